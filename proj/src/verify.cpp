#include "rsk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "rsk/errors.hpp"
#include "rsk/profiles.hpp"
#include "rsk/quad.hpp"
#include "rsk/targets.hpp"

namespace rsk {

// ---------------------------------------------------------------------------
// Test families

double theta_cap(const NormSpec& X) {
    switch (X.family()) {
    case NormSpec::Family::Lebesgue:
    case NormSpec::Family::Lorentz:
    case NormSpec::Family::LorentzZygmund:
    case NormSpec::Family::GLZ:
    case NormSpec::Family::OrliczLorentz: return std::isinf(X.p()) ? 0.0 : 1.0 / X.p();
    case NormSpec::Family::Orlicz:
        if (auto e = lz_equivalent(X)) return theta_cap(*e);
        return 0.0;
    default: return 0.0;
    }
}

namespace {

std::string fmt(double x) { return format_number(x); }

// Breakpoints 2^{-j/4} are shared by every geometric grid with K divisible by 4.
double quarter_octave(int j) { return std::exp2(-j / 4.0); }

int depth_quarters(const Grid& grid) {
    return std::max(1, static_cast<int>(std::floor(-4.0 * std::log2(grid.t_min()))));
}

GridFunction sum_of_indicators(const Grid& grid, const std::vector<std::pair<double, double>>& pieces) {
    GridFunction f = GridFunction::zero(grid);
    for (auto [b, c] : pieces) f = f + indicator(grid, b).scaled(c);
    return f;
}

}  // namespace

TestFamily TestFamily::standard(const Grid& grid, std::uint64_t seed, std::size_t size, double cap) {
    std::vector<FamilyMember> out;
    if (size == 0) return TestFamily(out);
    int depth = depth_quarters(grid);
    std::size_t n_ind = std::max<std::size_t>(1, size / 5);
    std::size_t n_pow = cap > 0.0 ? std::max<std::size_t>(1, size / 6) : 0;
    std::size_t n_log = std::max<std::size_t>(1, size / 6);
    std::size_t n_osc = std::max<std::size_t>(1, size / 6);

    for (std::size_t i = 0; i < n_ind && out.size() < size; ++i) {
        int j = static_cast<int>(std::llround(static_cast<double>(i) * depth / n_ind));
        double b = quarter_octave(j);
        out.push_back({"ind:" + fmt(b), indicator(grid, b), true});
    }
    for (std::size_t i = 0; i < n_pow && out.size() < size; ++i) {
        double th = cap * static_cast<double>(i) / n_pow;
        out.push_back({"pow:" + fmt(th), power_function(grid, th), true});
    }
    // Log-powers, including near-extremal members s^{-cap} log^{-2}(2/s).
    std::vector<std::pair<double, double>> lp;
    for (double g : {-2.0, -1.0, 1.0, 2.0})
        for (double t : {0.0, 0.5, 0.9}) {
            double th = t * cap;
            if (cap == 0.0 && g > 0.0) continue;
            lp.emplace_back(th, g);
        }
    if (cap > 0.0) lp.insert(lp.begin(), {cap, -2.0});
    for (std::size_t i = 0; i < n_log && i < lp.size() && out.size() < size; ++i) {
        auto [th, g] = lp[i];
        GridFunction f = power_log_function(grid, th, g);
        bool dec = f.nonincreasing();
        out.push_back({"plog:" + fmt(th) + "," + fmt(g), std::move(f), dec});
    }
    for (std::size_t i = 0; i < n_osc && out.size() + 1 < size; ++i) {
        Rng rng(seed * 1000003ULL + 7919ULL * i + 17ULL);
        int pieces = 3 + static_cast<int>(rng.bits() % 8);
        std::vector<int> cut;
        for (int p = 0; p < pieces; ++p) cut.push_back(static_cast<int>(rng.bits() % depth));
        cut.push_back(0);
        std::sort(cut.begin(), cut.end());
        cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
        std::vector<double> v(grid.size(), 0.0);
        GridFunction f = GridFunction::zero(grid);
        for (std::size_t p = 0; p < cut.size(); ++p) {
            double hi = quarter_octave(cut[p]);
            double lo = p + 1 < cut.size() ? quarter_octave(cut[p + 1]) : 0.0;
            double val = rng.uniform() < 0.2 ? 0.0 : std::exp(rng.uniform(-2.0, 2.0));
            f = f + indicator(grid, lo, hi).scaled(val);
        }
        out.push_back({"osc:" + std::to_string(i), f, f.nonincreasing()});
    }
    for (std::size_t i = 0; out.size() < size; ++i) {
        Rng rng(seed * 2000003ULL + 104729ULL * i + 5ULL);
        int pieces = 1 + static_cast<int>(rng.bits() % 12);
        std::vector<std::pair<double, double>> p;
        for (int k = 0; k < pieces; ++k) p.emplace_back(quarter_octave(static_cast<int>(rng.bits() % depth)), rng.exponential());
        out.push_back({"dec:" + std::to_string(i), sum_of_indicators(grid, p), true});
    }
    return TestFamily(std::move(out));
}

TestFamily TestFamily::for_norm(const NormSpec& X, const Grid& grid, std::uint64_t seed, std::size_t size) {
    return standard(grid, seed, size, theta_cap(X));
}

TestFamily TestFamily::nonincreasing_part() const {
    std::vector<FamilyMember> out;
    for (const auto& m : members_)
        if (m.nonincreasing) out.push_back(m);
    return TestFamily(std::move(out));
}

TestFamily TestFamily::rearranged() const {
    std::vector<FamilyMember> out;
    for (const auto& m : members_) out.push_back({m.id + "*", rearrange(m.f), true});
    return TestFamily(std::move(out));
}

// ---------------------------------------------------------------------------
// Reports

RatioReport::Verdict RatioReport::verdict() const {
    if (!failures.empty()) return Verdict::Fail;
    if (std::isnan(min_ratio) || std::isnan(max_ratio)) return Verdict::Fail;
    if (min_ratio < band_lo || max_ratio > band_hi) return Verdict::Fail;
    if (drift >= drift_tol) return Verdict::Unstable;
    return Verdict::Pass;
}

std::string verdict_name(RatioReport::Verdict v) {
    switch (v) {
    case RatioReport::Verdict::Pass: return "pass";
    case RatioReport::Verdict::Fail: return "fail";
    case RatioReport::Verdict::Unstable: return "unstable";
    }
    return "";
}

namespace {

nlohmann::json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

}  // namespace

nlohmann::json RatioReport::to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["detail"] = detail;
    j["min"] = num(min_ratio);
    j["max"] = num(max_ratio);
    j["argmin"] = argmin;
    j["argmax"] = argmax;
    j["grid_n"] = grid_n;
    j["drift"] = drift < 0.0 ? nlohmann::json(nullptr) : num(drift);
    j["band"] = {num(band_lo), num(band_hi)};
    if (!failures.empty()) j["failures"] = failures;
    if (!extra.empty()) j["extra"] = extra;
    j["verdict"] = verdict_name(verdict());
    return j;
}

nlohmann::json SuiteConfig::to_json() const {
    return {{"seed", seed},       {"K", K},
            {"t_min", t_min},     {"band", {band_lo, band_hi}},
            {"drift_tol", drift_tol}, {"family_size", family_size},
            {"negative_family_size", negative_family_size}, {"refine", refine}};
}

// ---------------------------------------------------------------------------
// Operator norm estimates

double op_norm_lower(const KernelOp& T, const NormSpec& X, const NormSpec& Y, const TestFamily& F) {
    if (F.empty()) throw ParameterError("empty test family");
    double best = 0.0;
    for (const auto& m : F.members()) {
        double nx = eval_norm(X, m.f);
        if (!(nx > 0.0) || std::isinf(nx)) continue;
        best = std::max(best, eval_norm(Y, T.apply(m.f)) / nx);
    }
    return best;
}

double op_norm_dual(const KernelOp& T, const NormSpec& X, const NormSpec& Y, const TestFamily& G) {
    if (G.empty()) throw ParameterError("empty test family");
    if (T.kind != KernelOp::Kind::H) throw UnsupportedError("dual estimate needs an H-type operator");
    if (!has_associate(X) || !has_associate(Y)) throw UnsupportedError("unsupported-base: missing associate");
    double best = 0.0;
    for (const auto& m : G.members()) {
        double ny = associate_eval(Y, m.f);
        if (!(ny > 0.0) || std::isinf(ny)) continue;
        best = std::max(best, associate_eval(X, apply_R_m(T.profile, T.m, rearrange(m.f))) / ny);
    }
    return best;
}

namespace {

// Cell averages understate the supremum of a steep output near 0; the
// nodal values and the limit at 0 give it exactly.
double output_norm(const NormSpec& Y, const OpResult& r) {
    double v = eval_norm(Y, r.cells);
    if (Y.family() == NormSpec::Family::Lebesgue && std::isinf(Y.p())) {
        v = std::max(v, r.at_zero);
        for (double x : r.nodes) v = std::max(v, x);
    }
    return v;
}

}  // namespace

RatioReport nonincreasing_reduction_check(const Profile& I, int m, const NormSpec& X, const NormSpec& Y,
                                          const TestFamily& F) {
    KernelOp T;
    T.profile = I;
    T.m = m;
    TestFamily dec = F.nonincreasing_part();
    double all = op_norm_lower(T, X, Y, F);
    double mono = op_norm_lower(T, X, Y, dec);
    RatioReport r;
    r.check = "nonincreasing-reduction";
    r.detail = "I=" + I.name() + " m=" + std::to_string(m) + " X=" + X.pretty() + " Y=" + Y.pretty();
    r.min_ratio = r.max_ratio = all / mono;
    r.band_lo = 1.0;
    r.band_hi = 64.0;
    r.grid_n = F.empty() ? 0 : F.members().front().f.grid().size();
    // ||H^m f||_Y <= ||H^m f*||_Y for every member, on a grid where f* is exact.
    int viol = 0;
    for (const auto& mem : F.members()) {
        if (mem.nonincreasing) continue;
        auto [f, fs] = exact_rearrangement(mem.f);
        double a = output_norm(Y, T.eval(f)), b = output_norm(Y, T.eval(fs));
        if (a > b * (1.0 + 1e-9)) ++viol;
    }
    r.extra = {{"all", all}, {"nonincreasing", mono}, {"rearrangement_violations", viol}};
    if (viol > 0) r.failures.push_back("H^m f exceeds H^m f* in Y for " + std::to_string(viol) + " members");
    return r;
}

// ---------------------------------------------------------------------------
// Suite

namespace {

constexpr double kSlack = 1e-12;

struct Band {
    double lo = kInf, hi = -kInf;
    std::string arglo, arghi;
    bool nan = false;
    void add(double r, const std::string& id) {
        if (std::isnan(r)) {
            nan = true;
            if (arglo.empty()) arglo = id;
            return;
        }
        if (r < lo) lo = r, arglo = id;
        if (r > hi) hi = r, arghi = id;
    }
    void fill(RatioReport& rep) const {
        rep.min_ratio = nan ? std::nan("") : lo;
        rep.max_ratio = nan ? std::nan("") : hi;
        rep.argmin = arglo;
        rep.argmax = arghi;
    }
};

double rel_gap(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

Grid coarse_grid(const SuiteConfig& c) { return Grid::geometric(c.K, c.t_min); }
Grid fine_grid(const SuiteConfig& c) { return Grid::geometric(2 * c.K, c.t_min); }

RatioReport report(const std::string& check, const std::string& detail, const Band& b, double lo, double hi,
                   const Grid& grid) {
    RatioReport r;
    r.check = check;
    r.detail = detail;
    b.fill(r);
    r.band_lo = lo;
    r.band_hi = hi;
    r.grid_n = grid.size();
    return r;
}

// Runs compute on the N and 2N grids and records the band drift row by row.
std::vector<RatioReport> with_drift(const SuiteConfig& c, const std::function<std::vector<RatioReport>(const Grid&)>& compute) {
    std::vector<RatioReport> rows = compute(coarse_grid(c));
    for (auto& r : rows) r.drift_tol = c.drift_tol;
    if (!c.refine) return rows;
    std::vector<RatioReport> fine = compute(fine_grid(c));
    for (std::size_t i = 0; i < rows.size() && i < fine.size(); ++i) {
        double d = std::max(rel_gap(rows[i].min_ratio, fine[i].min_ratio), rel_gap(rows[i].max_ratio, fine[i].max_ratio));
        if (std::isnan(d)) d = kInf;
        rows[i].drift = d;
        rows[i].extra["fine_min"] = num(fine[i].min_ratio);
        rows[i].extra["fine_max"] = num(fine[i].max_ratio);
        rows[i].extra["fine_grid_n"] = fine[i].grid_n;
    }
    return rows;
}

std::vector<std::pair<std::string, Profile>> matrix_profiles() {
    return {{"power:0.5", Profile::power(0.5)},
            {"power:0.75", Profile::power(0.75)},
            {"linear", Profile::linear()},
            {"gauss", Profile::gauss()}};
}

// --- operator identities ----------------------------------------------------

std::vector<RatioReport> kernel_formula(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    std::vector<RatioReport> out;
    for (const auto& [pname, I] : matrix_profiles()) {
        for (int m = 1; m <= 3; ++m) {
            Rng rng(c.seed * 31ULL + static_cast<std::uint64_t>(m));
            Band b;
            for (int i = 0; i < 20; ++i) {
                GridFunction f = random_step(grid, rng);
                OpResult a = eval_H_m(I, m, f), e = compose_H(I, m, f);
                double worst = 0.0;
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    worst = std::max(worst, rel_gap(a.cells[k], e.cells[k]));
                    worst = std::max(worst, rel_gap(a.nodes[k], e.nodes[k]));
                }
                b.add(worst, "step:" + std::to_string(i));
            }
            out.push_back(report("kernel-formula", "I=" + pname + " m=" + std::to_string(m), b, 0.0, 1e-6, grid));
        }
    }
    return out;
}

std::vector<RatioReport> associativity(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    std::vector<RatioReport> out;
    for (const auto& [pname, I] : matrix_profiles()) {
        for (int m = 1; m <= 3; ++m) {
            Rng rng(c.seed * 37ULL + static_cast<std::uint64_t>(m));
            Band b;
            for (int i = 0; i < 20; ++i) {
                GridFunction f = random_step(grid, rng), g = random_step(grid, rng);
                double p1 = pairing(apply_H_m(I, m, f), g), p2 = pairing(f, apply_R_m(I, m, g));
                b.add(p1 == 0.0 && p2 == 0.0 ? 0.0 : std::abs(p1 - p2) / std::abs(p1), "pair:" + std::to_string(i));
            }
            out.push_back(report("associativity", "I=" + pname + " m=" + std::to_string(m), b, 0.0, 1e-9, grid));
        }
    }
    return out;
}

std::vector<RatioReport> indicator_closed_form(const SuiteConfig& c) {
    Grid grid = coarse_grid(c).with_breakpoints({0.1, 0.5, 0.9});
    std::vector<RatioReport> out;
    for (const PhiFunction& phi : {PhiFunction::gauss(), PhiFunction::boltzmann(1.5), PhiFunction::boltzmann(1.0)}) {
        Profile I = Profile::l_phi(phi);
        for (int m = 1; m <= 3; ++m) {
            Band band;
            for (double b : {0.1, 0.5, 0.9}) {
                OpResult r = eval_H_m(I, m, indicator(grid, b));
                double worst = 0.0;
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    double x = grid.right(k);
                    double e = H_m_indicator_closed_form(phi, m, b, x);
                    if (e > 0.0) worst = std::max(worst, std::abs(r.nodes[k] - e) / e);
                    else if (r.nodes[k] != 0.0) worst = kInf;
                }
                band.add(worst, "b=" + fmt(b));
            }
            out.push_back(report("indicator-closed-form", "Phi=" + phi.name() + " m=" + std::to_string(m), band, 0.0,
                                 1e-6, grid));
        }
    }
    return out;
}

std::vector<RatioReport> sandwich(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    std::vector<RatioReport> out;
    for (double beta : {2.0, 1.0, 1.5}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile I = Profile::l_phi(phi);
        for (int m = 1; m <= 3; ++m) {
            Rng rng(c.seed * 41ULL + static_cast<std::uint64_t>(m));
            Band b;
            int viol = 0;
            double lower_c = 1.0 / (std::exp2(m) * factorial(m - 1)), upper_c = 1.0 / factorial(m - 1);
            for (int i = 0; i < 50; ++i) {
                GridFunction f = random_nonincreasing(grid, rng);
                OpResult h = eval_H_m(I, m, f), p = eval_P_phi(phi, m, f);
                std::string id = "dec:" + std::to_string(i);
                for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
                    double H = h.nodes[k], P = p.nodes[k];
                    if (P == 0.0 && H == 0.0) continue;
                    double r1 = H / (lower_c * P), r2 = upper_c * P / H;
                    if (r1 < 1.0 - kSlack || r2 < 1.0 - kSlack) ++viol;
                    b.add(r1, id + "/lower");
                    b.add(r2, id + "/upper");
                }
            }
            RatioReport r = report("sandwich", "Phi=" + phi.name() + " m=" + std::to_string(m), b, 1.0 - kSlack, kInf, grid);
            r.extra["violations"] = viol;
            out.push_back(r);
        }
    }
    return out;
}

std::vector<RatioReport> doubling_lemma(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    const auto& x = grid.breakpoints();
    std::vector<RatioReport> out;
    for (const auto& [pname, I] : matrix_profiles()) {
        for (int m = 1; m <= 3; ++m) {
            Rng rng(c.seed * 43ULL + static_cast<std::uint64_t>(m));
            Band b;
            int viol = 0;
            double cm = std::exp2(m);
            for (int i = 0; i < 20; ++i) {
                GridFunction f = random_nonincreasing(grid, rng);
                OpResult r = eval_R_m(I, m, f);
                double worst = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j) {
                    for (std::size_t s = j + 1; s-- > 0;) {
                        if (x[s] < 0.5 * x[j]) break;
                        double ratio = r.nodes[j] / (cm * r.nodes[s]);
                        if (ratio > 1.0 + kSlack) ++viol;
                        worst = std::max(worst, ratio);
                    }
                }
                b.add(worst, "dec:" + std::to_string(i));
            }
            RatioReport rep = report("doubling-lemma", "I=" + pname + " m=" + std::to_string(m), b, 0.0, 1.0 + kSlack, grid);
            rep.extra["violations"] = viol;
            out.push_back(rep);
        }
    }
    return out;
}

// Nested integrals against the single-kernel form for I = s^alpha.
std::vector<RatioReport> trial_function_identity(const SuiteConfig& c) {
    Grid grid = Grid::geometric(2, 0x1p-10);
    const QuadRule Q{1e-12};
    std::vector<RatioReport> out;
    for (double alpha : {0.5, 0.75}) {
        Profile I = Profile::power(alpha);
        for (int m = 2; m <= 3; ++m) {
            Rng rng(c.seed * 47ULL + static_cast<std::uint64_t>(m));
            Band b;
            for (int i = 0; i < 3; ++i) {
                GridFunction f = random_step(grid, rng);
                const auto& x = grid.breakpoints();
                // innermost: int_r^1 f(t) t^{-alpha} dt, exact per cell
                auto inner = [&](double r) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        double lo = std::max(r, grid.left(k)), hi = grid.right(k);
                        if (hi > lo) s += f[k] * (std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha)) / (1.0 - alpha);
                    }
                    return s;
                };
                std::function<double(double, int)> nested = [&](double s, int depth) -> double {
                    if (depth == 1) return inner(s);
                    double tot = 0.0;
                    for (std::size_t k = grid.locate(s); k < grid.size(); ++k) {
                        double lo = std::max(s, grid.left(k)), hi = grid.right(k);
                        if (hi <= lo) continue;
                        tot += Q.cell([&](double r) { return std::pow(r, -alpha) * nested(r, depth - 1); }, lo, hi);
                    }
                    return tot;
                };
                auto kernel = [&](double s) {
                    double tot = 0.0;
                    for (std::size_t k = grid.locate(s); k < grid.size(); ++k) {
                        double lo = std::max(s, grid.left(k)), hi = grid.right(k);
                        if (hi <= lo || f[k] == 0.0) continue;
                        tot += f[k] * Q.cell([&](double r) { return std::pow(r, -alpha) * std::pow(I.J(s, r), m - 1); }, lo, hi);
                    }
                    return tot / factorial(m - 1);
                };
                OpResult h = eval_H_m(I, m, f);
                double worst = 0.0;
                for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
                    double s = x[k];
                    double n = nested(s, m), kf = kernel(s);
                    worst = std::max({worst, rel_gap(n, kf), rel_gap(kf, h.nodes[k])});
                }
                b.add(worst, "step:" + std::to_string(i));
            }
            out.push_back(report("enec-identity", "alpha=" + fmt(alpha) + " m=" + std::to_string(m), b, 0.0, 1e-8, grid));
        }
    }
    return out;
}

// --- four-way equivalence ------------------------------------------------------

std::vector<RatioReport> four_way_equivalence(const SuiteConfig& c) {
    std::vector<std::pair<std::string, NormSpec>> spaces{{"L^1", NormSpec::lebesgue(1.0)},
                                                         {"L^2", NormSpec::lebesgue(2.0)},
                                                         {"L^{2,1}", NormSpec::lorentz(2.0, 1.0)},
                                                         {"L^{inf,2;-1}", NormSpec::lorentz_zygmund(kInf, 2.0, -1.0)}};
    std::vector<std::pair<std::string, Profile>> profiles{
        {"power:0.5", Profile::power(0.5)}, {"linear", Profile::linear()}, {"gauss", Profile::gauss()}};
    auto compute = [&](const Grid& grid) {
        TestFamily F = TestFamily::standard(grid, c.seed, c.family_size, 1.0);
        std::vector<RatioReport> rows;
        for (const auto& [pname, I] : profiles) {
            for (int m = 0; m <= 2; ++m) {
                std::vector<Band> bands(spaces.size());
                for (const auto& mem : F.members()) {
                    GridFunction fs = rearrange(mem.f);
                    GridFunction a = apply_R_m(I, m + 1, fs);
                    GridFunction rs = rearrange(apply_R(I, fs));
                    GridFunction b = m == 0 ? rs : apply_R_m(I, m, rs);
                    GridFunction g = apply_G_m(I, m + 1, mem.f).g.cells;
                    for (std::size_t x = 0; x < spaces.size(); ++x) {
                        const NormSpec& X = spaces[x].second;
                        double f1 = associate_eval(X, a);
                        if (!(f1 > 0.0)) continue;
                        bands[x].add(associate_eval(X, b) / f1, mem.id + "/iterated");
                        bands[x].add(associate_eval(X, g) / f1, mem.id + "/sup");
                        bands[x].add(down_dual_level(X, a) / f1, mem.id + "/down");
                    }
                }
                for (std::size_t x = 0; x < spaces.size(); ++x)
                    rows.push_back(report("lenka-main", "I=" + pname + " m=" + std::to_string(m) + " X=" + spaces[x].first,
                                          bands[x], c.band_lo, c.band_hi, grid));
            }
        }
        return rows;
    };
    return with_drift(c, compute);
}

// --- closed-form target tables -------------------------------------------------

struct TableRow {
    NormSpec base;
    Profile profile;
    int m;
    std::string expected;
};

std::vector<TableRow> table_rows() {
    return {
        {NormSpec::lorentz(4.0 / 3.0, 1.0), Profile::power(0.75), 2, "L^{4,1}"},
        {NormSpec::lebesgue(1.0), Profile::power(0.5), 1, "L^{2,1}"},
        {NormSpec::lebesgue(2.0), Profile::power(0.5), 1, "L^{inf,2;-1}"},
        {NormSpec::lorentz(1.5, 2.0), Profile::power(0.75), 1, "L^{2.4,2}"},
        {NormSpec::lebesgue(2.0), Profile::linear(), 1, "L^2"},
        {NormSpec::lebesgue(kInf), Profile::linear(), 1, "exp L^1"},
        {NormSpec::lebesgue(kInf), Profile::linear(), 2, "exp L^{0.5}"},
        {NormSpec::orlicz(YoungFunction::power(2.0)), Profile::power(0.75), 1, "L^{4,2}"},
        {NormSpec::orlicz(YoungFunction::power(1.5)), Profile::power(0.5), 1, "L^{6,1.5}"},
        {NormSpec::lebesgue(2.0), Profile::gauss(), 1, "L^2(log L)^1"},
        {NormSpec::orlicz(YoungFunction::exp(2.0)), Profile::gauss(), 1, "exp L^1"},
        {NormSpec::lebesgue(kInf), Profile::gauss(), 2, "exp L^1"},
    };
}

RatioReport target_band_row(const NormSpec& base, const Profile& I, int m, const Grid& grid, const SuiteConfig& c,
                            const std::string& check) {
    SymbolicTarget st = resolve_target(base, I, m);
    TestFamily F = TestFamily::for_norm(base, grid, c.seed, c.family_size);
    std::string detail = "X=" + base.pretty() + " I=" + I.name() + " m=" + std::to_string(m);
    Band b;
    if (st.target) {
        auto T = TargetNorm::make(base, I, m, TargetNorm::Variant::Full);
        for (const auto& mem : F.members()) {
            double lower = target_norm_lower(*T, mem.f);
            if (!(lower > 0.0)) continue;
            b.add(eval_norm(*st.target, mem.f) / lower, mem.id);
        }
    }
    RatioReport r = report(check, detail, b, c.band_lo, c.band_hi, grid);
    r.extra["resolved"] = st.display();
    if (!st.target) r.failures.push_back("no closed-form target: " + st.display());
    return r;
}

std::vector<RatioReport> target_tables(const SuiteConfig& c) {
    std::vector<RatioReport> out;
    for (const TableRow& row : table_rows()) {
        RatioReport r = target_band_check(row.base, row.profile, row.m, c, "target-tables");
        r.extra["expected"] = row.expected;
        SymbolicTarget st = resolve_target(row.base, row.profile, row.m);
        if (!st.target || st.target->pretty() != row.expected)
            r.failures.push_back("resolver gave " + st.display() + ", expected " + row.expected);
        out.push_back(std::move(r));
    }
    return out;
}

// --- L^inf criterion -----------------------------------------------------------

std::vector<RatioReport> linf_cases(const SuiteConfig& c) {
    struct Case {
        NormSpec X;
        double alpha;
        int m;
        bool expected;
    };
    std::vector<Case> cases{
        {NormSpec::lebesgue(1.0), 0.5, 1, false},  // subcritical
        {NormSpec::lebesgue(2.0), 0.5, 1, false},  // critical, q > 1
        {NormSpec::lebesgue(3.0), 0.5, 1, true},   // supercritical
        {NormSpec::lebesgue(2.0), 0.75, 2, false},
        {NormSpec::lebesgue(1.0), 0.5, 2, true},   // m(1-alpha) >= 1
        {NormSpec::lorentz(2.0, 1.0), 0.5, 1, true},  // critical with q = 1
        {NormSpec::orlicz(YoungFunction::power_log(2.0, 0.5)), 0.75, 2, false},  // exp class
        {NormSpec::orlicz(YoungFunction::power_log(2.0, 1.0)), 0.75, 2, false},  // exp exp class
        {NormSpec::orlicz(YoungFunction::power_log(2.0, 2.0)), 0.75, 2, true},
    };
    Grid grid = coarse_grid(c);
    std::vector<RatioReport> out;
    for (const Case& k : cases) {
        Profile I = Profile::power(k.alpha);
        LinfVerdict v = linf_criterion(k.X, I, k.m, grid);
        SymbolicTarget st = resolve_target(k.X, I, k.m);
        bool resolver_linf = st.verdict == SymbolicTarget::Verdict::LInfinity;
        Band b;
        b.add(v.finite == k.expected ? 1.0 : 0.0, "verdict");
        RatioReport r = report("linf-criterion",
                               "X=" + k.X.pretty() + " alpha=" + fmt(k.alpha) + " m=" + std::to_string(k.m), b, 1.0, 1.0, grid);
        r.extra = {{"finite", v.finite},
                   {"expected", k.expected},
                   {"value", num(v.value)},
                   {"tail_exponent", num(v.tail_exponent)},
                   {"reason", v.reason},
                   {"resolver", st.display()}};
        if (resolver_linf != k.expected) r.failures.push_back("resolver disagrees: " + st.display());
        out.push_back(r);
    }
    return out;
}

// --- iteration -----------------------------------------------------------------

std::vector<RatioReport> iteration_rows(const SuiteConfig& c, const std::string& id,
                                        const std::vector<std::tuple<int, int, NormSpec, Profile>>& rows) {
    auto compute = [&](const Grid& grid) {
        TestFamily G = TestFamily::standard(grid, c.seed, c.family_size, 1.0);
        std::vector<RatioReport> out;
        for (const auto& [k, h, X, I] : rows) {
            auto Tk = TargetNorm::make(X, I, k, TargetNorm::Variant::Full);
            auto iter = iterate_target(Tk, h);
            auto direct = TargetNorm::make(X, I, k + h, TargetNorm::Variant::Full);
            Band b;
            for (const auto& mem : G.members()) {
                double d = target_assoc_eval(*direct, mem.f);
                if (!(d > 0.0)) continue;
                b.add(target_assoc_eval(*iter, mem.f) / d, mem.id);
            }
            out.push_back(report(id,
                                 "k=" + std::to_string(k) + " h=" + std::to_string(h) + " X=" + X.pretty() + " I=" + I.name(),
                                 b, c.band_lo, c.band_hi, grid));
        }
        return out;
    };
    return with_drift(c, compute);
}

std::vector<RatioReport> iteration(const SuiteConfig& c) {
    std::vector<std::tuple<int, int, NormSpec, Profile>> rows;
    for (auto [k, h] : {std::pair{1, 1}, std::pair{1, 2}})
        for (const NormSpec& X : {NormSpec::lebesgue(1.0), NormSpec::lebesgue(2.0)})
            for (const Profile& I : {Profile::power(0.75), Profile::gauss()}) rows.emplace_back(k, h, X, I);
    return iteration_rows(c, "iteration", rows);
}

std::vector<RatioReport> iteration_power(const SuiteConfig& c) {
    return iteration_rows(c, "iteration-power", {{1, 1, NormSpec::lorentz(3.0, 2.0), Profile::power(0.75)}});
}

// --- negative controls ---------------------------------------------------------

std::vector<RatioReport> negative_controls(const SuiteConfig& c) {
    struct Row {
        NormSpec X;
        Profile I;
        int m;
        NormSpec stronger;
    };
    std::vector<Row> rows{
        {NormSpec::lebesgue(2.0), Profile::power(0.75), 1, NormSpec::lorentz(4.0, 1.0)},
        {NormSpec::lorentz(4.0 / 3.0, kInf), Profile::power(0.75), 1, NormSpec::lebesgue(2.0)},
        {NormSpec::lebesgue(kInf), Profile::linear(), 1, NormSpec::lebesgue(kInf)},
        {NormSpec::lebesgue(kInf), Profile::gauss(), 1, NormSpec::lebesgue(kInf)},
    };
    // A deep grid: the stronger targets only separate logarithmically.
    Grid grid = Grid::geometric(4, 0x1p-400);
    std::vector<int> depths{10, 20, 40, 80, 160, 320, 400};
    std::vector<RatioReport> out;
    for (const Row& row : rows) {
        SymbolicTarget st = resolve_target(row.X, row.I, row.m);
        KernelOp T;
        T.profile = row.I;
        T.m = row.m;
        double cap = theta_cap(row.X);
        std::size_t per_depth = std::max<std::size_t>(1, c.negative_family_size / depths.size());
        std::vector<double> pass_seq, strong_seq;
        double pass = 0.0, strong = 0.0;
        std::string arg;
        for (int d : depths) {
            double eps = std::exp2(-d);
            // Truncations at eps of near-critical members.
            for (std::size_t i = 0; i < per_depth; ++i) {
                double th = cap * static_cast<double>(i % 8) / 7.0;
                double g = i < 8 ? 0.0 : -0.5 * static_cast<double>(i / 8);
                GridFunction base = g != 0.0 || th > 0.0 ? power_log_function(grid, th, g) : GridFunction::constant(grid, 1.0);
                std::vector<double> v(base.values());
                for (std::size_t k = 0; k < v.size(); ++k)
                    if (grid.right(k) <= eps) v[k] = 0.0;
                GridFunction f(grid, std::move(v));
                double nx = eval_norm(row.X, f);
                if (!(nx > 0.0)) continue;
                GridFunction hf = T.apply(f);
                pass = std::max(pass, eval_norm(*st.target, hf) / nx);
                double s = eval_norm(row.stronger, hf) / nx;
                if (s > strong) strong = s, arg = "depth:" + std::to_string(d) + "/" + std::to_string(i);
            }
            pass_seq.push_back(pass);
            strong_seq.push_back(strong);
        }
        Band b;
        b.add(strong / pass, arg);
        RatioReport r = report("negative-controls",
                               "X=" + row.X.pretty() + " I=" + row.I.name() + " m=" + std::to_string(row.m) + " Y=" +
                                   st.target->pretty() + " stronger=" + row.stronger.pretty(),
                               b, 10.0, kInf, grid);
        r.extra = {{"depths", depths}, {"target_bound", pass_seq}, {"stronger_bound", strong_seq}};
        out.push_back(r);
    }
    return out;
}

// --- profile facts -------------------------------------------------------------

std::vector<RatioReport> profile_facts(const SuiteConfig& c) {
    std::vector<RatioReport> out;
    Grid grid = coarse_grid(c);
    for (double beta : {2.0, 1.5, 1.0}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile L = Profile::l_phi(phi);
        Band b;
        for (int i = 0; i <= 300; ++i) {
            double s = std::exp2(-30.0 + 29.0 * i / 300.0);
            b.add(F_phi(phi, s) / L.I(s), "s=" + fmt(s));
        }
        out.push_back(report("profile-facts", "F_Phi/L_Phi Phi=" + phi.name(), b, c.band_lo, c.band_hi, grid));
    }
    for (double beta : {2.0, 1.0, 1.5}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile L = Profile::l_phi(phi);
        Band b;
        int viol = 0;
        for (int i = 0; i < 1000; ++i) {
            double s = std::exp2(-60.0 + 59.0 * i / 999.0);
            double base = s * phi.derivative(phi.inverse(std::log(1.0 / s)));
            double l = L.I(s);
            double r1 = l / base, r2 = 2.0 * base / l;
            if (r1 < 1.0 - kSlack || r2 < 1.0 - kSlack) ++viol;
            b.add(r1, "s=" + fmt(s) + "/lower");
            b.add(r2, "s=" + fmt(s) + "/upper");
        }
        RatioReport r = report("profile-facts", "delta21 Phi=" + phi.name(), b, 1.0 - kSlack, kInf, grid);
        r.extra["violations"] = viol;
        out.push_back(r);

        Rng rng(c.seed * 53ULL + static_cast<std::uint64_t>(beta * 10));
        Band e;
        int viol_e = 0;
        for (int i = 0; i < 1000; ++i) {
            double s = std::pow(10.0, rng.uniform(-6.0, 6.0));
            double t = i % 10 == 0 ? 0.0 : s * rng.uniform();
            double inv = phi.inverse(s);
            double a = inv / (2.0 * s), mid = 1.0 / phi.derivative(inv);
            double slope = phi.inverse_gap(t, s - t) / (s - t), top = inv / s;
            double r1 = mid / a, r2 = slope / mid, r3 = top / slope;
            if (r1 < 1.0 - kSlack || r2 < 1.0 - kSlack || r3 < 1.0 - kSlack) ++viol_e;
            std::string id = "s=" + fmt(s) + ",t=" + fmt(t);
            e.add(r1, id + "/1");
            e.add(r2, id + "/2");
            e.add(r3, id + "/3");
        }
        RatioReport re = report("profile-facts", "chain Phi=" + phi.name(), e, 1.0 - kSlack, kInf, grid);
        re.extra["violations"] = viol_e;
        out.push_back(re);
    }
    return out;
}

// --- doubling simplification -----------------------------------------------------

std::vector<RatioReport> doubling_simplify(const SuiteConfig& c) {
    double alpha = 0.5;
    int j = 2;
    Profile I = Profile::power(alpha);
    // int_t^1 f(s) s^{j-1} / I(s)^j ds is H for the profile s^{j alpha - j + 1}.
    Profile Ij = Profile::power(j * alpha - j + 1.0);
    std::vector<std::pair<std::string, NormSpec>> spaces{{"L^1", NormSpec::lebesgue(1.0)}, {"L^inf", NormSpec::lebesgue(kInf)}};
    auto compute = [&](const Grid& grid) {
        TestFamily F = TestFamily::standard(grid, c.seed, c.family_size, 1.0);
        std::vector<Band> bands(spaces.size());
        for (const auto& mem : F.members()) {
            GridFunction left = apply_H_m(I, j, mem.f).scaled(factorial(j - 1));
            GridFunction right = apply_H(Ij, mem.f);
            for (std::size_t x = 0; x < spaces.size(); ++x) {
                double r = eval_norm(spaces[x].second, right);
                if (r > 0.0) bands[x].add(eval_norm(spaces[x].second, left) / r, mem.id);
            }
        }
        std::vector<RatioReport> out;
        for (std::size_t x = 0; x < spaces.size(); ++x)
            out.push_back(report("doubling-simplify", "I=" + I.name() + " j=" + std::to_string(j) + " X=" + spaces[x].first,
                                 bands[x], c.band_lo, c.band_hi, grid));
        return out;
    };
    return with_drift(c, compute);
}

// --- estimator cross-checks --------------------------------------------------------

std::vector<RatioReport> dual_estimators(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    struct Row {
        NormSpec X;
        Profile I;
        int m;
    };
    std::vector<Row> rows{{NormSpec::lebesgue(1.0), Profile::power(0.5), 1},
                          {NormSpec::lorentz(4.0 / 3.0, 1.0), Profile::power(0.75), 2},
                          {NormSpec::lebesgue(2.0), Profile::power(0.75), 1}};
    std::vector<RatioReport> out;
    for (const Row& row : rows) {
        NormSpec Y = *resolve_target(row.X, row.I, row.m).target;
        KernelOp T;
        T.profile = row.I;
        T.m = row.m;
        TestFamily F = TestFamily::for_norm(row.X, grid, c.seed, c.family_size);
        TestFamily G = TestFamily::standard(grid, c.seed + 1, c.family_size, 1.0);
        double lo = op_norm_lower(T, row.X, Y, F), du = op_norm_dual(T, row.X, Y, G);
        Band b;
        b.add(lo / du, "primal/dual");
        RatioReport r = report("dual-estimators", "X=" + row.X.pretty() + " Y=" + Y.pretty() + " I=" + row.I.name() +
                                                      " m=" + std::to_string(row.m),
                               b, 0.5, 2.0, grid);
        r.extra = {{"primal", lo}, {"dual", du}};
        out.push_back(r);
    }
    return out;
}

std::vector<RatioReport> reduction(const SuiteConfig& c) {
    Grid grid = coarse_grid(c);
    std::vector<RatioReport> out;
    for (auto [alpha, m] : {std::pair{0.5, 2}, std::pair{0.75, 1}}) {
        Profile I = Profile::power(alpha);
        NormSpec X = NormSpec::lebesgue(2.0);
        NormSpec Y = *resolve_target(X, I, m).target;
        TestFamily F = TestFamily::for_norm(X, grid, c.seed, c.family_size);
        std::vector<FamilyMember> both(F.members());
        for (const auto& mem : F.members())
            if (!mem.nonincreasing) both.push_back({mem.id + "*", rearrange(mem.f), true});
        out.push_back(nonincreasing_reduction_check(I, m, X, Y, TestFamily(std::move(both))));
    }
    return out;
}

using SuiteFn = std::vector<RatioReport> (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"kernel-formula", kernel_formula},
        {"associativity", associativity},
        {"indicator-closed-form", indicator_closed_form},
        {"sandwich", sandwich},
        {"doubling-lemma", doubling_lemma},
        {"lenka-main", four_way_equivalence},
        {"target-tables", target_tables},
        {"linf-criterion", linf_cases},
        {"iteration", iteration},
        {"negative-controls", negative_controls},
        {"profile-facts", profile_facts},
        {"enec-identity", trial_function_identity},
        {"doubling-simplify", doubling_simplify},
        {"iteration-power", iteration_power},
        {"dual-estimators", dual_estimators},
        {"nonincreasing-reduction", reduction},
    };
    return r;
}

}  // namespace

RatioReport target_band_check(const NormSpec& base, const Profile& I, int m, const SuiteConfig& config,
                              const std::string& check) {
    auto rows = with_drift(config, [&](const Grid& grid) {
        return std::vector<RatioReport>{target_band_row(base, I, m, grid, config, check)};
    });
    return rows.front();
}

std::vector<std::string> suite_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, fn] : registry()) ids.push_back(id);
    return ids;
}

std::vector<RatioReport> theorem_suite(const std::string& id, const SuiteConfig& config) {
    for (const auto& [name, fn] : registry())
        if (name == id) return fn(config);
    throw RegistryError("unknown theorem id: " + id);
}

}  // namespace rsk

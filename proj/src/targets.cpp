#include "rsk/targets.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rsk/errors.hpp"
#include "rsk/operators.hpp"
#include "rsk/quad.hpp"

namespace rsk {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

GridFunction pow_fn(const GridFunction& f, double r) {
    std::vector<double> v(f.values());
    for (double& e : v) e = e > 0.0 ? std::pow(e, r) : 0.0;
    return GridFunction(f.grid(), std::move(v));
}

// (t^{m-1} / I(t)^m) int_0^t g, for nonincreasing g, as cell averages.
GridFunction sharp_transform(const Profile& I, int m, const GridFunction& g) {
    const Grid& grid = g.grid();
    const QuadRule& Q = default_quad();
    std::vector<double> F = running_integral(g);
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.left(k), v = g[k], base = k == 0 ? 0.0 : F[k - 1];
        auto h = [&](double t) { return std::pow(t, m - 1) / std::pow(I.I(t), m) * (base + v * (t - a)); };
        double s = k == 0 ? Q.sentinel(h, grid.right(0)) : Q.cell(h, a, grid.right(k));
        out[k] = s / grid.length(k);
    }
    return GridFunction(grid, std::move(out));
}

// Cell averages of w(s)^{-m}, w(s) = log(2/s) / Phi^{-1}(log(2/s)).
const std::vector<double>& inverse_weight(const PhiFunction& phi, int m, const Grid& grid) {
    static std::mutex mu;
    static std::map<std::tuple<double, int, std::uint64_t>, std::vector<double>> cache;
    auto key = std::make_tuple(phi.beta(), m, grid.id());
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const QuadRule& Q = default_quad();
    auto h = [&](double s) {
        double y = std::log(2.0 / s);
        return std::pow(phi.inverse(y) / y, m);
    };
    std::vector<double> out(grid.size());
    out[0] = Q.sentinel(h, grid.right(0)) / grid.length(0);
    for (std::size_t k = 1; k < grid.size(); ++k) out[k] = Q.cell(h, grid.left(k), grid.right(k)) / grid.length(k);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(out)).first->second;
}

void require_associate(const NormSpec& X) {
    if (!has_associate(X)) throw UnsupportedError("unsupported-base: no closed-form associate for " + X.name());
}

}  // namespace

// ---------------------------------------------------------------------------
// TargetNorm

std::string variant_name(TargetNorm::Variant v) {
    switch (v) {
    case TargetNorm::Variant::Full: return "full";
    case TargetNorm::Variant::Sharp: return "sharp";
    case TargetNorm::Variant::Iterated: return "iterated";
    case TargetNorm::Variant::Phi: return "phi";
    case TargetNorm::Variant::Tilde: return "tilde";
    }
    return "";
}

TargetNorm::Variant variant_from_name(const std::string& s) {
    if (s == "full") return TargetNorm::Variant::Full;
    if (s == "sharp") return TargetNorm::Variant::Sharp;
    if (s == "iterated") return TargetNorm::Variant::Iterated;
    if (s == "phi") return TargetNorm::Variant::Phi;
    if (s == "tilde") return TargetNorm::Variant::Tilde;
    throw ParameterError("unknown target variant: " + s);
}

TargetPtr TargetNorm::make(NormSpec base, Profile profile, int m, Variant variant, std::optional<PhiFunction> phi) {
    if (m < 1 || m > 10) throw ParameterError("target order must lie in [1, 10]");
    if (variant == Variant::Phi && !phi) throw ParameterError("phi variant needs a Phi function");
    if (variant != Variant::Phi) phi.reset();
    require_associate(base);
    return TargetPtr(new TargetNorm(std::move(base), std::move(profile), m, variant, std::move(phi)));
}

double TargetNorm::eval(const GridFunction& f) const { return target_norm_lower(*this, f); }
double TargetNorm::associate(const GridFunction& g) const { return target_assoc_eval(*this, g); }

std::string TargetNorm::name() const {
    std::string b = "(" + base_.name() + ")";
    std::string m = std::to_string(m_);
    switch (variant_) {
    case Variant::Full: return b + "_{" + m + "," + profile_.name() + "}";
    case Variant::Sharp: return b + "^#_{" + m + "," + profile_.name() + "}";
    case Variant::Iterated: return b + "_{" + m + "}[" + profile_.name() + "]";
    case Variant::Phi: return b + "_{" + m + "," + phi_->name() + "}";
    case Variant::Tilde: return b + "~_{" + m + "}";
    }
    return b;
}

nlohmann::json TargetNorm::to_json() const {
    nlohmann::json j{{"base", base_.to_json()}, {"profile", profile_.to_json()}, {"m", m_},
                     {"variant", variant_name(variant_)}};
    if (phi_) j["phi"] = {{"beta", phi_->beta()}};
    return j;
}

NormSpec TargetNorm::as_norm() const { return NormSpec::derived(shared_from_this()); }

TargetPtr target_from_json(const nlohmann::json& j) {
    try {
        NormSpec base = norm_from_json(j.at("base"));
        Profile profile = j.contains("profile") ? Profile::from_json(j.at("profile")) : Profile::linear();
        int m = j.at("m").get<int>();
        auto variant = variant_from_name(j.value("variant", std::string("full")));
        std::optional<PhiFunction> phi;
        if (j.contains("phi")) phi = PhiFunction::boltzmann(j.at("phi").at("beta").get<double>());
        else if (variant == TargetNorm::Variant::Phi && profile.phi()) phi = profile.phi();
        return TargetNorm::make(base, profile, m, variant, phi);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("bad target JSON: ") + e.what());
    }
}

NormSpec norm_from_json(const nlohmann::json& j) {
    if (j.is_object() && j.value("family", std::string()) == "derived") {
        if (!j.contains("target")) throw ParameterError("derived norm needs a target");
        return target_from_json(j.at("target"))->as_norm();
    }
    return NormSpec::from_json(j);
}

// ---------------------------------------------------------------------------
// Evaluation

double target_assoc_eval(const TargetNorm& T, const GridFunction& g) {
    const NormSpec& X = T.base();
    require_associate(X);
    GridFunction gs = rearrange(g);
    int m = T.m();
    switch (T.variant()) {
    case TargetNorm::Variant::Full:
        return factorial(m - 1) * associate_eval(X, apply_R_m(T.profile(), m, gs));
    case TargetNorm::Variant::Tilde:
        return factorial(m - 1) * associate_eval(X, apply_R_m(Profile::linear(), m, gs));
    case TargetNorm::Variant::Sharp:
        return associate_eval(X, sharp_transform(T.profile(), m, gs));
    case TargetNorm::Variant::Iterated: {
        GridFunction h = gs;
        for (int i = 0; i < m; ++i) h = apply_R(T.profile(), i == 0 ? h : rearrange(h));
        return associate_eval(X, h);
    }
    case TargetNorm::Variant::Phi: {
        const std::vector<double>& iw = inverse_weight(*T.phi(), m, gs.grid());
        std::vector<double> u(gs.size());
        for (std::size_t k = 0; k < u.size(); ++k) u[k] = gs[k] > 0.0 ? gs[k] * iw[k] : 0.0;
        GridFunction lv = level_function(GridFunction(gs.grid(), std::move(u)));
        return factorial(m - 1) * associate_eval(X, apply_R_m(Profile::linear(), m, lv));
    }
    }
    return 0.0;
}

namespace {

struct DualCache {
    std::mutex mu;
    std::map<std::pair<std::string, std::uint64_t>, std::vector<double>> values;
};

DualCache& dual_cache() {
    static DualCache c;
    return c;
}

// ||g||_{T'} for every member of the canonical family, memoized.
// Nonincreasing dual test functions: indicators at quarter octaves, truncated
// powers and log-powers. Sparser than canonical_family since each member costs
// one target associate evaluation.
const std::vector<GridFunction>& dual_family(const Grid& grid) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::vector<GridFunction>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(grid.id());
    if (it != cache.end()) return it->second;
    std::vector<GridFunction> fam;
    for (int j = 0;; ++j) {
        double b = std::exp2(-0.25 * j);
        if (b < grid.t_min()) break;
        fam.push_back(indicator(grid, b));
    }
    for (int t = 1; t <= 9; ++t)
        for (int j = 0; j < 40; j += 4) {
            double b = std::ldexp(1.0, -j);
            if (b < grid.t_min()) break;
            fam.push_back(power_function(grid, 0.1 * t, b));
        }
    for (double th : {0.0, 0.25, 0.5, 0.75, 0.9})
        for (double ga : {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0})
            fam.push_back(rearrange(power_log_function(grid, th, ga)));
    for (double ga : {-1.5, -2.0, -3.0}) fam.push_back(rearrange(power_log_function(grid, 1.0, ga)));
    return cache.emplace(grid.id(), std::move(fam)).first->second;
}

const std::vector<double>& family_assoc(const TargetNorm& T, const Grid& grid) {
    DualCache& c = dual_cache();
    auto key = std::make_pair(T.to_json().dump(), grid.id());
    {
        std::lock_guard<std::mutex> lock(c.mu);
        auto it = c.values.find(key);
        if (it != c.values.end()) return it->second;
    }
    const std::vector<GridFunction>& fam = dual_family(grid);
    std::vector<double> vals;
    vals.reserve(fam.size());
    for (const GridFunction& g : fam) vals.push_back(target_assoc_eval(T, g));
    std::lock_guard<std::mutex> lock(c.mu);
    return c.values.emplace(key, std::move(vals)).first->second;
}

}  // namespace

double target_norm_lower(const TargetNorm& T, const GridFunction& f) {
    GridFunction fs = rearrange(f);
    if (fs[0] == 0.0) return 0.0;
    const Grid& grid = fs.grid();
    const std::vector<GridFunction>& fam = dual_family(grid);
    const std::vector<double>& av = family_assoc(T, grid);
    double best = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        if (!(av[i] > 0.0) || !std::isfinite(av[i])) continue;
        best = std::max(best, pairing(fs, fam[i]) / av[i]);
    }
    GridFunction fss = double_star(fs);
    std::vector<GridFunction> extra{fs, fss, pow_fn(fs, 0.5), pow_fn(fs, 2.0), pow_fn(fss, 2.0)};
    for (const GridFunction& g : extra) {
        double a = target_assoc_eval(T, g);
        if (a > 0.0 && std::isfinite(a)) best = std::max(best, pairing(fs, g) / a);
    }
    return best;
}

TargetNormValue target_norm_eval(const TargetNorm& T, const GridFunction& f) {
    TargetNormValue out;
    out.lower = target_norm_lower(T, f);
    if (T.base().family() == NormSpec::Family::Derived) return out;
    std::optional<SymbolicTarget> st;
    switch (T.variant()) {
    case TargetNorm::Variant::Full:
    case TargetNorm::Variant::Sharp:
    case TargetNorm::Variant::Iterated:
        st = resolve_target(T.base(), T.profile(), T.m());
        break;
    case TargetNorm::Variant::Phi:
        st = resolve_target(T.base(), Profile::l_phi(*T.phi()), T.m());
        break;
    case TargetNorm::Variant::Tilde:
        st = resolve_target(T.base(), Profile::linear(), T.m());
        break;
    }
    if (st && st->target) {
        out.closed = eval_norm(*st->target, f);
        out.closed_name = st->target->pretty();
    }
    return out;
}

TargetPtr iterate_target(const TargetPtr& T, int h) {
    if (h < 0) throw ParameterError("iteration order must be nonnegative");
    if (h == 0) return T;
    if (T->variant() != TargetNorm::Variant::Full && T->variant() != TargetNorm::Variant::Sharp &&
        T->variant() != TargetNorm::Variant::Phi)
        throw ParameterError("iteration needs a full, sharp or phi target");
    return TargetNorm::make(T->as_norm(), T->profile(), h, T->variant(), T->phi());
}

// ---------------------------------------------------------------------------
// Symbolic resolver

namespace {

struct LZ {
    double p, q, a;
};

std::optional<LZ> as_lz(const NormSpec& X) {
    switch (X.family()) {
    case NormSpec::Family::Lebesgue: return LZ{X.p(), X.p(), 0.0};
    case NormSpec::Family::Lorentz: return LZ{X.p(), X.q(), 0.0};
    case NormSpec::Family::LorentzZygmund:
        if (X.double_star()) return std::nullopt;
        return LZ{X.p(), X.q(), X.alpha()};
    case NormSpec::Family::GLZ:
        if (X.beta() != 0.0) return std::nullopt;
        return LZ{X.p(), X.q(), X.alpha()};
    case NormSpec::Family::Orlicz:
        if (auto e = lz_equivalent(X)) return as_lz(*e);
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

NormSpec lz_spec(double p, double q, double a) {
    if (a == 0.0) {
        if (p == q) return NormSpec::lebesgue(p);
        return NormSpec::lorentz(p, q);
    }
    return NormSpec::lorentz_zygmund(p, q, a);
}

SymbolicTarget space(NormSpec Y, std::string theorem) {
    SymbolicTarget s;
    bool linf = Y.family() == NormSpec::Family::Lebesgue && std::isinf(Y.p());
    s.verdict = linf ? SymbolicTarget::Verdict::LInfinity : SymbolicTarget::Verdict::Space;
    s.target = std::move(Y);
    s.theorem = std::move(theorem);
    return s;
}

SymbolicTarget no_table(std::string note) {
    SymbolicTarget s;
    s.verdict = SymbolicTarget::Verdict::NoTable;
    s.note = std::move(note);
    return s;
}

SymbolicTarget resolve_product(const NormSpec& base, const PhiFunction& phi, int m) {
    auto lz = as_lz(base);
    if (!lz) return no_table("base is not of Lorentz-Zygmund type");
    double beta = phi.beta();
    bool gauss = phi.is_gauss();
    std::string fam = gauss ? "gauss-lz" : "boltzmann-lz";
    if (std::isfinite(lz->p)) {
        double a = lz->a + m * (beta - 1.0) / beta;
        std::string tag = fam + "/branch1";
        if (gauss && base.family() == NormSpec::Family::Lebesgue) tag = "gauss-basic/i";
        return space(lz_spec(lz->p, lz->q, a), tag);
    }
    double a = lz->a - m / beta;
    std::string tag = fam + "/branch2";
    if (gauss && base.family() == NormSpec::Family::Lebesgue) tag = "gauss-basic/iii";
    if (gauss && base.family() == NormSpec::Family::Orlicz &&
        base.young().preset() == YoungFunction::Preset::Exp)
        tag = "gauss-basic/ii";
    return space(lz_spec(kInf, lz->q, a), tag);
}

SymbolicTarget resolve_power_orlicz(const YoungFunction& A, double alpha, int m) {
    double a = m * (1.0 - alpha);
    if (A.preset() == YoungFunction::Preset::Exp || A.preset() == YoungFunction::Preset::ExpExp)
        return space(NormSpec::lebesgue(kInf), "power-orlicz/branch2");
    if (A.preset() != YoungFunction::Preset::PowerLog) return no_table("Young function outside the preset tables");
    if (a >= 1.0) return space(NormSpec::lebesgue(kInf), "power-orlicz/branch2");
    double p = A.p(), beta = A.beta();
    double pa = p * a;
    if (pa < 1.0 && !close(pa, 1.0)) {
        SymbolicTarget s = space(lz_spec(p / (1.0 - pa), p, beta / p), "power-orlicz-log/branch1");
        s.orlicz_target = NormSpec::orlicz(YoungFunction::power_log(p / (1.0 - pa), beta / (1.0 - pa)));
        return s;
    }
    if (close(pa, 1.0)) {
        double thr = (1.0 - a) / a;
        if (beta < thr && !close(beta, thr)) {
            SymbolicTarget s = space(NormSpec::lorentz_zygmund(kInf, 1.0 / a, a * beta - 1.0), "power-orlicz-log/branch2");
            s.orlicz_target = NormSpec::orlicz(YoungFunction::exp(1.0 / (1.0 - (1.0 + beta) * a)));
            return s;
        }
        if (close(beta, thr)) {
            SymbolicTarget s = space(NormSpec::glz(kInf, 1.0 / a, -a, -1.0), "power-orlicz-log/branch3");
            s.orlicz_target = NormSpec::orlicz(YoungFunction::exp_exp(1.0 / (1.0 - a)));
            return s;
        }
    }
    return space(NormSpec::lebesgue(kInf), "power-orlicz-log/branch4");
}

}  // namespace

SymbolicTarget resolve_target(const NormSpec& base, const Profile& profile, int m) {
    if (m < 1) throw ParameterError("order must be positive");
    if (auto phi = profile.phi()) return resolve_product(base, *phi, m);
    auto al = profile.alpha();
    if (!al) return no_table("profile outside the catalog");
    double alpha = *al;
    if (alpha < 0.5 || alpha > 1.0) return no_table("profile exponent outside [1/2, 1]");

    NormSpec X = base;
    if (X.family() == NormSpec::Family::Orlicz) {
        const YoungFunction& A = X.young();
        if (A.preset() == YoungFunction::Preset::Power ||
            (A.preset() == YoungFunction::Preset::PowerLog && A.beta() == 0.0))
            X = NormSpec::lebesgue(A.p());
        else if (alpha < 1.0)
            return resolve_power_orlicz(A, alpha, m);
        else
            return no_table("Orlicz base with the linear profile");
    }
    auto lz = as_lz(X);
    if (!lz || lz->a != 0.0) return no_table("base is not a Lebesgue or Lorentz space");
    double p = lz->p, q = lz->q;

    if (alpha == 1.0) {
        if (std::isfinite(p)) return space(lz_spec(p, q, 0.0), "linear-lorentz/branch1");
        if (std::isinf(q)) return space(NormSpec::lorentz_zygmund(kInf, kInf, -static_cast<double>(m)), "linear-lorentz/branch2");
        return no_table("Lorentz base with p = inf and q < inf");
    }
    double a = m * (1.0 - alpha);
    if (a < 1.0) {
        double crit = 1.0 / a;
        if (p < crit && !close(p, crit)) return space(lz_spec(p / (1.0 - a * p), q, 0.0), "power-lorentz/branch1");
        if (close(p, crit) && q > 1.0) return space(NormSpec::lorentz_zygmund(kInf, q, -1.0), "power-lorentz/branch2");
    }
    return space(NormSpec::lebesgue(kInf), "power-lorentz/branch3");
}

std::string SymbolicTarget::display() const {
    switch (verdict) {
    case Verdict::Space:
    case Verdict::LInfinity: return target->pretty() + " [" + theorem + "]";
    case Verdict::NoTable: return "no-table (" + note + ")";
    }
    return "";
}

nlohmann::json SymbolicTarget::to_json() const {
    nlohmann::json j;
    switch (verdict) {
    case Verdict::Space: j["verdict"] = "space"; break;
    case Verdict::LInfinity: j["verdict"] = "linf"; break;
    case Verdict::NoTable: j["verdict"] = "no-table"; break;
    }
    if (target) {
        j["target"] = target->to_json();
        j["name"] = target->pretty();
    }
    if (!theorem.empty()) j["theorem"] = theorem;
    if (!note.empty()) j["note"] = note;
    if (orlicz_target) {
        j["orlicz_target"] = orlicz_target->to_json();
        j["orlicz_name"] = orlicz_target->pretty();
    }
    return j;
}

// ---------------------------------------------------------------------------
// L^inf criterion

namespace {

// Does s^{-theta} (near 0) belong to Y?
bool power_in(const NormSpec& Y, double theta) {
    if (theta <= 0.0) return true;
    auto lz_member = [&](double p, double q, double a, double b) {
        double e = 1.0 / p - theta;
        if (e > 1e-12) return true;
        if (e < -1e-12) return false;
        if (std::isfinite(q)) return a * q < -1.0 || (a * q == -1.0 && b * q < -1.0);
        return a < 0.0 || (a == 0.0 && b <= 0.0);
    };
    switch (Y.family()) {
    case NormSpec::Family::Lebesgue: return std::isfinite(Y.p()) && lz_member(Y.p(), Y.p(), 0.0, 0.0);
    case NormSpec::Family::Lorentz: return lz_member(Y.p(), Y.q(), 0.0, 0.0);
    case NormSpec::Family::LorentzZygmund:
        if (Y.double_star() && theta >= 1.0) return false;
        return lz_member(Y.p(), Y.q(), Y.alpha(), 0.0);
    case NormSpec::Family::GLZ: return lz_member(Y.p(), Y.q(), Y.alpha(), Y.beta());
    case NormSpec::Family::Orlicz:
        if (auto e = lz_equivalent(Y)) return power_in(*e, theta);
        return theta < 1.0;
    default:
        throw UnsupportedError("no membership rule for " + Y.name());
    }
}

}  // namespace

LinfVerdict linf_criterion(const NormSpec& X, const Profile& I, int m, const Grid& grid) {
    if (m < 1) throw ParameterError("order must be positive");
    auto Xp = associate_spec(X);
    if (!Xp) throw UnsupportedError("unsupported-base: no closed-form associate for " + X.name());
    LinfVerdict out;
    if (std::isinf(I.J(0.0, grid.t_min()))) {
        out.finite = false;
        out.value = kInf;
        out.tail_exponent = kInf;
        out.reason = "reminf: int_0 dr/I(r) diverges";
        return out;
    }
    GridFunction K = cell_average(grid, [&](double s) { return std::pow(I.J(0.0, s), m - 1) / I.I(s); });
    out.value = eval_norm(*Xp, K);
    double theta;
    if (auto al = I.alpha()) {
        theta = 1.0 - m * (1.0 - *al);
    } else {
        // table profiles are constant near 0
        theta = -(m - 1.0);
    }
    out.tail_exponent = theta;
    out.finite = power_in(*Xp, theta);
    out.reason = std::string("kernel ~ s^{-") + format_number(theta) + "} at 0, " +
                 (out.finite ? "in " : "not in ") + Xp->pretty();
    if (!out.finite) out.value = kInf;
    return out;
}

// ---------------------------------------------------------------------------
// Orlicz transform

OrliczTransform orlicz_transform(const YoungFunction& A, double alpha, int m) {
    OrliczTransform out;
    double a = m * (1.0 - alpha);
    if (a >= 1.0) {
        out.linf = true;
        out.reason = "m >= 1/(1-alpha)";
        return out;
    }
    double e = a / (1.0 - a);
    out.exponent = e;
    // divergence of int^inf (t/A(t))^e dt
    bool diverges;
    switch (A.preset()) {
    case YoungFunction::Preset::Power: diverges = (A.p() - 1.0) * e <= 1.0 + 1e-12; break;
    case YoungFunction::Preset::PowerLog: {
        double r = (A.p() - 1.0) * e;
        diverges = r < 1.0 - 1e-12 || (std::abs(r - 1.0) <= 1e-12 && A.beta() * e <= 1.0 + 1e-12);
        break;
    }
    case YoungFunction::Preset::Table: diverges = true; break;
    default: diverges = false;
    }
    if (!diverges) {
        out.linf = true;
        out.reason = "int^inf (t/A(t))^{m(1-alpha)/(1-m(1-alpha))} dt converges";
        return out;
    }
    // A is replaced by A(1) t on [0, 1]; this leaves L^A unchanged and makes
    // the integral at 0 finite.
    double A1 = A.A(1.0);
    const QuadRule& Q = default_quad();
    auto integrand = [&](double t) { return std::pow(t / A.A(t), e); };
    std::vector<std::pair<double, double>> pts;
    double cum = std::pow(A1, -e);
    pts.emplace_back(std::pow(cum, 1.0 - a), A1);
    double prev = 1.0;
    for (int i = 1; i <= 8 * 200; ++i) {
        double t = std::exp2(i / 8.0);
        double At = A.A(t);
        if (!std::isfinite(At) || At > 1e300) break;
        cum += Q.cell(integrand, prev, t);
        prev = t;
        pts.emplace_back(std::pow(cum, 1.0 - a), At);
    }
    // below H(1) the transform is linear as well
    out.young = YoungFunction::table(std::move(pts), false);
    out.reason = "A_{m,alpha} = A o H^{-1}";
    return out;
}

}  // namespace rsk

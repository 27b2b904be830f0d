#include "rsk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "rsk/errors.hpp"
#include "rsk/quad.hpp"

namespace rsk {

namespace {

constexpr int kMaxOrder = 10;
constexpr int kMoments = kMaxOrder + 1;

struct KernelTable {
    std::vector<double> S;   // S[k] = J(x_0, x_k)
    std::vector<double> Jc;  // J over cell k; Jc[0] = J(0, x_0)
    std::vector<double> Ib;  // I(x_k)
    std::vector<std::vector<double>> mu;  // mu[k][i] = int_cell J(s, x_k)^i ds
};

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

void check_order(int m) {
    if (m < 1 || m > kMaxOrder) throw ParameterError("operator order must lie in [1, 10]");
}

std::shared_ptr<const KernelTable> build_table(const Profile& I, const Grid& g) {
    auto t = std::make_shared<KernelTable>();
    std::size_t n = g.size();
    const QuadRule& q = default_quad();
    t->S.assign(n, 0.0);
    t->Jc.assign(n, 0.0);
    t->Ib.assign(n, 0.0);
    t->mu.assign(n, std::vector<double>(kMoments + 1, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        double a = g.left(k), b = g.right(k);
        t->Jc[k] = I.J(a, b);
        t->Ib[k] = I.I(b);
        if (k > 0) t->S[k] = t->S[k - 1] + t->Jc[k];
        t->mu[k][0] = g.length(k);
        std::vector<double> lsplits;
        for (double p : I.kinks(a, b)) lsplits.push_back(std::log(b / p));
        for (int i = 1; i <= kMoments; ++i) {
            auto h = [&](double l) { return std::pow(I.J_back(b, l), i) * b * std::exp(-l); };
            t->mu[k][i] = k == 0 ? q.half_line(h) : q.interval(h, 0.0, std::log(b / a), lsplits);
        }
    }
    return t;
}

const KernelTable& kernel_table(const Profile& I, const Grid& g) {
    static std::mutex mtx;
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const KernelTable>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(I.id(), g.id());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_table(I, g)).first;
    return *it->second;
}

// Per-cell coefficients of H^m f as a polynomial in u = J(t, x_k).
std::vector<std::vector<double>> h_coefficients(const KernelTable& t, int m, const GridFunction& f) {
    std::size_t n = f.size();
    std::vector<double> invfact(m + 1);
    for (int i = 0; i <= m; ++i) invfact[i] = 1.0 / factorial(i);
    std::vector<std::vector<double>> coef(n, std::vector<double>(m + 1, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        auto& c = coef[k];
        for (std::size_t j = k + 1; j < n; ++j) {
            double v = f[j];
            if (v == 0.0) continue;
            double Jj = t.Jc[j];
            double D = t.S[j - 1] - t.S[k];
            double E = D + Jj;
            double delta = Jj, Dpow = 1.0;
            for (int p = 1; p <= m; ++p) {
                if (p > 1) {
                    Dpow *= D;
                    delta = E * delta + Jj * Dpow;
                }
                c[m - p] += v * delta * invfact[m - p] * invfact[p];
            }
        }
        if (f[k] != 0.0) c[m] += f[k] * invfact[m];
    }
    return coef;
}

double poly_at(const std::vector<double>& c, double u) {
    if (std::isinf(u)) {
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i] > 0.0) return kInf;
        return c[0];
    }
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
    return r;
}

OpResult from_coefficients(const KernelTable& t, const Grid& g,
                           const std::vector<std::vector<double>>& coef) {
    std::size_t n = g.size();
    std::vector<double> cells(n), nodes(n);
    for (std::size_t k = 0; k < n; ++k) {
        double integral = 0.0;
        for (std::size_t i = 0; i < coef[k].size(); ++i)
            if (coef[k][i] != 0.0) integral += coef[k][i] * t.mu[k][i];
        cells[k] = integral / g.length(k);
        nodes[k] = coef[k][0];
    }
    double zero = poly_at(coef[0], t.Jc[0]);
    return OpResult{GridFunction(g, std::move(cells)), std::move(nodes), zero};
}

}  // namespace

OpResult eval_H_m(const Profile& I, int m, const GridFunction& f) {
    check_order(m);
    const KernelTable& t = kernel_table(I, f.grid());
    return from_coefficients(t, f.grid(), h_coefficients(t, m, f));
}

OpResult compose_H(const Profile& I, int m, const GridFunction& f) {
    check_order(m);
    const KernelTable& t = kernel_table(I, f.grid());
    std::size_t n = f.size();
    std::vector<std::vector<double>> P(n);
    for (std::size_t k = 0; k < n; ++k) P[k] = {f[k]};
    for (int step = 0; step < m; ++step) {
        std::vector<std::vector<double>> Q(n);
        for (std::size_t k = 0; k < n; ++k) {
            Q[k].assign(P[k].size() + 1, 0.0);
            for (std::size_t i = 0; i < P[k].size(); ++i) Q[k][i + 1] = P[k][i] / static_cast<double>(i + 1);
        }
        double carry = 0.0;  // H of everything to the right of the current cell
        for (std::size_t k = n; k-- > 0;) {
            double own = k > 0 ? poly_at(Q[k], t.Jc[k]) : 0.0;
            Q[k][0] = carry;
            carry += own;
        }
        P = std::move(Q);
    }
    return from_coefficients(t, f.grid(), P);
}

OpResult eval_R_m(const Profile& I, int m, const GridFunction& f) {
    check_order(m);
    const Grid& g = f.grid();
    const KernelTable& t = kernel_table(I, g);
    std::size_t n = f.size();
    double invf = 1.0 / factorial(m - 1);
    std::vector<double> bc(m);
    for (int i = 0; i < m; ++i) bc[i] = binom(m - 1, i);
    std::vector<double> cells(n), nodes(n);
    std::vector<double> w(m), Epow(m), delta(m + 1);
    for (std::size_t k = 0; k < n; ++k) {
        double node_sum = 0.0, int_sum = 0.0;
        double Jk = t.Jc[k];
        for (std::size_t j = 0; j < k; ++j) {
            double v = f[j];
            if (v == 0.0) continue;
            double E = t.S[k] - t.S[j];
            double D = t.S[k - 1] - t.S[j];
            Epow[0] = 1.0;
            for (int p = 1; p < m; ++p) Epow[p] = Epow[p - 1] * E;
            double dp = Jk, Dpow = 1.0;
            delta[1] = dp;
            for (int p = 2; p <= m; ++p) {
                Dpow *= D;
                dp = E * dp + Jk * Dpow;
                delta[p] = dp;
            }
            double ns = 0.0, is = 0.0;
            for (int i = 0; i < m; ++i) {
                double wi = bc[i] * t.mu[j][i];
                ns += wi * Epow[m - 1 - i];
                is += wi * delta[m - i] / static_cast<double>(m - i);
            }
            node_sum += v * ns;
            int_sum += v * is;
        }
        if (f[k] != 0.0) {
            node_sum += f[k] * t.mu[k][m - 1];
            int_sum += f[k] * t.mu[k][m] / m;
        }
        nodes[k] = invf * node_sum / t.Ib[k];
        cells[k] = invf * int_sum / g.length(k);
    }
    return OpResult{GridFunction(g, std::move(cells)), std::move(nodes),
                    std::numeric_limits<double>::quiet_NaN()};
}

namespace {

double phi_weight(const PhiFunction& phi, double t) {
    double y = std::log(2.0 / t);
    return phi.inverse(y) / y;
}

const std::vector<std::vector<double>>& p_table(const PhiFunction& phi, int m, const Grid& g) {
    static std::mutex mtx;
    static std::map<std::tuple<double, int, std::uint64_t>, std::shared_ptr<std::vector<std::vector<double>>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(phi.beta(), m, g.id());
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto nu = std::make_shared<std::vector<std::vector<double>>>(g.size(), std::vector<double>(m + 1));
    const QuadRule& q = default_quad();
    for (std::size_t k = 0; k < g.size(); ++k) {
        double a = g.left(k), b = g.right(k);
        for (int i = 0; i <= m; ++i) {
            auto h = [&](double l) {
                double s = b * std::exp(-l);
                return std::pow(phi_weight(phi, s), m) * std::pow(l, i) * s;
            };
            (*nu)[k][i] = k == 0 ? q.half_line(h) : q.interval(h, 0.0, std::log(b / a));
        }
    }
    return *cache.emplace(key, nu).first->second;
}

}  // namespace

OpResult eval_P_phi(const PhiFunction& phi, int m, const GridFunction& f) {
    check_order(m);
    const Grid& g = f.grid();
    const KernelTable& t = kernel_table(Profile::linear(), g);
    auto coef = h_coefficients(t, m, f);
    const auto& nu = p_table(phi, m, g);
    double fm = factorial(m - 1);
    std::size_t n = g.size();
    std::vector<double> cells(n), nodes(n);
    for (std::size_t k = 0; k < n; ++k) {
        double integral = 0.0;
        for (int i = 0; i <= m; ++i)
            if (coef[k][i] != 0.0) integral += coef[k][i] * nu[k][i];
        cells[k] = fm * integral / g.length(k);
        nodes[k] = fm * std::pow(phi_weight(phi, g.right(k)), m) * coef[k][0];
    }
    return OpResult{GridFunction(g, std::move(cells)), std::move(nodes),
                    std::numeric_limits<double>::quiet_NaN()};
}

OpResult LevelDecomposition::reconstruct(const OpResult& r) const {
    std::size_t n = r.nodes.size();
    std::vector<double> nodes = r.nodes;
    for (std::size_t i = 0; i < index.size(); ++i) {
        auto [c, d] = index[i];
        for (long k = c + 1; k < d; ++k) nodes[k] = plateau[i];
    }
    std::vector<double> cells(n);
    for (std::size_t k = 0; k < n; ++k) cells[k] = std::max(r.cells[k], nodes[k]);
    // Outside E, G = R^m f*, which may rise by a few ulps; clamp.
    for (std::size_t k = n - 1; k-- > 0;) {
        nodes[k] = std::max(nodes[k], nodes[k + 1]);
        cells[k] = std::max(cells[k], cells[k + 1]);
    }
    double zero = *std::max_element(nodes.begin(), nodes.end());
    return OpResult{GridFunction(r.cells.grid(), std::move(cells)), std::move(nodes), zero};
}

GResult apply_G_m(const Profile& I, int m, const GridFunction& f) {
    OpResult r = eval_R_m(I, m, rearrange(f));
    const Grid& g = f.grid();
    std::size_t n = r.nodes.size();
    std::vector<double> runmax(n);
    double mx = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        mx = std::max(mx, r.nodes[k]);
        runmax[k] = mx;
    }
    // Rises below this relative size are rounding, not part of E.
    auto below = [&](std::size_t k) { return r.nodes[k] < runmax[k + 1] * (1.0 - 1e-12); };
    LevelDecomposition level;
    std::size_t k = 0;
    while (k + 1 < n) {
        if (below(k)) {
            std::size_t p = k;
            while (k + 1 < n && below(k)) ++k;
            // nodes p..k-1 lie in E; the plateau ends at breakpoint k.
            long c = static_cast<long>(p) - 1;
            long d = static_cast<long>(k);
            level.index.emplace_back(c, d);
            level.intervals.emplace_back(c < 0 ? 0.0 : g.right(c), g.right(d));
            level.plateau.push_back(runmax[d]);
        } else {
            ++k;
        }
    }
    OpResult gres = level.reconstruct(r);
    return GResult{std::move(gres), std::move(r), std::move(level)};
}

double H_m_indicator_closed_form(const PhiFunction& phi, int m, double b, double t) {
    if (t >= b) return 0.0;
    double gap = phi.inverse_gap(std::log(2.0 / b), std::log(b / t));
    return std::pow(gap, m) / factorial(m);
}

double P_m_indicator_closed_form(const PhiFunction& phi, int m, double b, double t) {
    if (t >= b) return 0.0;
    return std::pow(phi_weight(phi, t), m) * std::pow(std::log(b / t), m) / m;
}

OpResult KernelOp::eval(const GridFunction& f) const {
    switch (kind) {
        case Kind::H:
            return eval_H_m(profile, m, f);
        case Kind::R:
            return eval_R_m(profile, m, f);
        case Kind::G:
            return apply_G_m(profile, m, f).g;
        case Kind::P:
            if (!phi) throw ParameterError("P operator needs a Phi function");
            return eval_P_phi(*phi, m, f);
    }
    throw ParameterError("unknown operator kind");
}

std::string KernelOp::name() const {
    const char* k = kind == Kind::H ? "H" : kind == Kind::R ? "R" : kind == Kind::G ? "G" : "P";
    std::string target = kind == Kind::P && phi ? phi->name() : profile.name();
    return std::string(k) + "^" + std::to_string(m) + "[" + target + "]";
}

nlohmann::json KernelOp::to_json() const {
    const char* k = kind == Kind::H ? "H" : kind == Kind::R ? "R" : kind == Kind::G ? "G" : "P";
    nlohmann::json j = {{"op", k}, {"m", m}, {"profile", profile.to_json()}};
    if (phi) j["phi"] = Profile::l_phi(*phi).to_json();
    return j;
}

KernelOp KernelOp::from_json(const nlohmann::json& j) {
    KernelOp op;
    std::string k = j.at("op").get<std::string>();
    if (k == "H")
        op.kind = Kind::H;
    else if (k == "R")
        op.kind = Kind::R;
    else if (k == "G")
        op.kind = Kind::G;
    else if (k == "P")
        op.kind = Kind::P;
    else
        throw ParameterError("unknown operator: " + k);
    op.m = j.value("m", 1);
    check_order(op.m);
    if (j.contains("profile")) op.profile = Profile::from_json(j.at("profile"));
    if (j.contains("phi")) {
        op.phi = Profile::from_json(j.at("phi")).phi();
    } else if (op.kind == Kind::P) {
        op.phi = op.profile.phi();
    }
    if (op.kind == Kind::P && !op.phi) throw ParameterError("P operator needs a gauss or boltzmann Phi");
    return op;
}

}  // namespace rsk

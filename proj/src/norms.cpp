#include "rsk/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <tuple>

#include "rsk/errors.hpp"
#include "rsk/quad.hpp"

namespace rsk {

namespace {

bool is_inf(double x) { return std::isinf(x) && x > 0; }

double conj(double p) {
    if (p == 1.0) return kInf;
    if (is_inf(p)) return 1.0;
    return p / (p - 1.0);
}

double json_number(const nlohmann::json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        if (s == "-inf") return -kInf;
        throw ParameterError("bad number: " + s);
    }
    if (!j.is_number()) throw ParameterError("expected a number");
    return j.get<double>();
}

nlohmann::json number_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string exponent(double x) {
    std::string s = format_number(x);
    if (s.size() == 1) return s;
    return "{" + s + "}";
}

// ---------------------------------------------------------------------------
// Young functions

double expexp_shift(double gamma) {
    if (gamma >= 1.0) return 0.0;
    // smallest u with gamma u^gamma (exp(u^gamma) + 1) >= 1 - gamma
    auto ok = [&](double u) {
        double w = std::pow(u, gamma);
        return gamma * w * (std::exp(w) + 1.0) >= 1.0 - gamma;
    };
    double lo = 0.0, hi = 1.0;
    while (!ok(hi)) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

YoungFunction YoungFunction::power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("power Young function needs 1 <= p < inf");
    YoungFunction y;
    y.preset_ = Preset::Power;
    y.p_ = p;
    return y;
}

YoungFunction YoungFunction::power_log(double p, double beta) {
    if (!std::isfinite(p) || !std::isfinite(beta) || p < 1.0 || (p == 1.0 && beta < 0.0))
        throw ParameterError("power-log Young function needs p > 1, or p = 1 and beta >= 0");
    YoungFunction y;
    y.preset_ = Preset::PowerLog;
    y.p_ = p;
    y.beta_ = beta;
    y.shift_ = std::exp(1.0 + std::abs(beta));
    y.validate();
    return y;
}

YoungFunction YoungFunction::exp(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("exp Young function needs gamma > 0");
    YoungFunction y;
    y.preset_ = Preset::Exp;
    y.gamma_ = gamma;
    y.shift_ = gamma < 1.0 ? std::pow((1.0 - gamma) / gamma, 1.0 / gamma) : 0.0;
    return y;
}

YoungFunction YoungFunction::exp_exp(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("exp exp Young function needs gamma > 0");
    YoungFunction y;
    y.preset_ = Preset::ExpExp;
    y.gamma_ = gamma;
    y.shift_ = expexp_shift(gamma);
    return y;
}

YoungFunction YoungFunction::table(std::vector<std::pair<double, double>> points, bool check_convex) {
    std::sort(points.begin(), points.end());
    if (points.empty()) throw ParameterError("empty Young table");
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (auto [t, v] : points) {
        if (!(t >= 0.0) || !(v >= 0.0) || !std::isfinite(t) || !std::isfinite(v))
            throw ParameterError("Young table entries must be finite and nonnegative");
        if (t == 0.0) {
            if (v != 0.0) throw ParameterError("Young function must vanish at 0");
            continue;
        }
        if (t == pts.back().first) throw ParameterError("duplicate abscissa in Young table");
        pts.emplace_back(t, v);
    }
    if (pts.size() < 2) throw ParameterError("Young table needs a positive abscissa");
    double prev = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double slope = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
        if (slope < 0.0) throw ParameterError("Young table must be nondecreasing");
        if (check_convex && slope < prev * (1.0 - 1e-12)) throw ParameterError("Young table is not convex");
        prev = std::max(prev, slope);
    }
    if (prev == 0.0) throw ParameterError("Young table is identically zero");
    YoungFunction y;
    y.preset_ = Preset::Table;
    y.table_ = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(pts));
    return y;
}

void YoungFunction::validate() const {
    // numerical convexity check on a geometric sample
    double prev = -1.0;
    double tp = 0.0, Ap = 0.0;
    for (int i = -200; i <= 200; ++i) {
        double t = std::exp2(i / 4.0);
        double v = A(t);
        if (!std::isfinite(v)) break;
        double slope = (v - Ap) / (t - tp);
        if (slope < prev * (1.0 - 1e-9)) throw ParameterError("Young function is not convex: " + name());
        prev = slope;
        tp = t;
        Ap = v;
    }
}

double YoungFunction::A(double t) const {
    if (!(t > 0.0)) return 0.0;
    if (is_inf(t)) return kInf;
    switch (preset_) {
    case Preset::Power:
        return std::pow(t, p_);
    case Preset::PowerLog:
        return std::pow(t, p_) * std::pow(std::log(shift_ + t) / std::log(shift_), beta_);
    case Preset::Exp: {
        double c = std::pow(shift_, gamma_);
        double u = std::pow(t + shift_, gamma_);
        // exp(u) - exp(c) = exp(c) expm1(u - c)
        return std::exp(c) * std::expm1(u - c);
    }
    case Preset::ExpExp: {
        double c = std::exp(std::pow(shift_, gamma_));
        double u = std::exp(std::pow(t + shift_, gamma_));
        return std::exp(c) * std::expm1(u - c);
    }
    case Preset::Table: {
        const auto& pts = *table_;
        auto it = std::lower_bound(pts.begin(), pts.end(), t,
                                   [](const std::pair<double, double>& e, double x) { return e.first < x; });
        std::size_t i = it == pts.end() ? pts.size() - 1 : static_cast<std::size_t>(it - pts.begin());
        std::size_t lo = i - 1;
        double slope = (pts[i].second - pts[lo].second) / (pts[i].first - pts[lo].first);
        return pts[lo].second + slope * (t - pts[lo].first);
    }
    }
    return 0.0;
}

double YoungFunction::a(double t) const {
    if (!(t > 0.0)) return preset_ == Preset::Power && p_ == 1.0 ? 1.0 : 0.0;
    if (is_inf(t)) return kInf;
    switch (preset_) {
    case Preset::Power:
        return p_ * std::pow(t, p_ - 1.0);
    case Preset::PowerLog: {
        double L = std::log(shift_ + t), L0 = std::log(shift_);
        return std::pow(L / L0, beta_) * std::pow(t, p_ - 1.0) * (p_ + beta_ * t / ((shift_ + t) * L));
    }
    case Preset::Exp: {
        double u = t + shift_;
        return gamma_ * std::pow(u, gamma_ - 1.0) * std::exp(std::pow(u, gamma_));
    }
    case Preset::ExpExp: {
        double u = t + shift_;
        double e = std::exp(std::pow(u, gamma_));
        return gamma_ * std::pow(u, gamma_ - 1.0) * e * std::exp(e);
    }
    case Preset::Table: {
        const auto& pts = *table_;
        std::size_t i = 1;
        while (i + 1 < pts.size() && pts[i].first < t) ++i;
        return (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
    }
    }
    return 0.0;
}

double YoungFunction::A_inverse(double y) const {
    if (!(y > 0.0)) return 0.0;
    if (is_inf(y)) return kInf;
    if (preset_ == Preset::Power) return std::pow(y, 1.0 / p_);
    double lo = 0.0, hi = 1.0;
    while (A(hi) < y) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (A(mid) < y ? lo : hi) = mid;
    }
    return hi;
}

double YoungFunction::a_inverse(double y) const {
    // inf { t >= 0 : a(t) >= y }
    if (!(y > 0.0)) return 0.0;
    if (is_inf(y)) return kInf;
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (a(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000) return kInf;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (a(mid) < y ? lo : hi) = mid;
    }
    return hi;
}

std::string YoungFunction::name() const {
    switch (preset_) {
    case Preset::Power: return "t^" + exponent(p_);
    case Preset::PowerLog: return "t^" + exponent(p_) + " log^" + exponent(beta_) + " t";
    case Preset::Exp: return "exp(t^" + exponent(gamma_) + ")";
    case Preset::ExpExp: return "exp(exp(t^" + exponent(gamma_) + "))";
    case Preset::Table: return "table(" + std::to_string(table_->size() - 1) + ")";
    }
    return "";
}

nlohmann::json YoungFunction::to_json() const {
    switch (preset_) {
    case Preset::Power: return {{"preset", "power"}, {"p", p_}};
    case Preset::PowerLog: return {{"preset", "powerlog"}, {"p", p_}, {"beta", beta_}};
    case Preset::Exp: return {{"preset", "exp"}, {"gamma", gamma_}};
    case Preset::ExpExp: return {{"preset", "expexp"}, {"gamma", gamma_}};
    case Preset::Table: {
        nlohmann::json pts = nlohmann::json::array();
        for (std::size_t i = 1; i < table_->size(); ++i) pts.push_back({(*table_)[i].first, (*table_)[i].second});
        return {{"preset", "table"}, {"points", pts}};
    }
    }
    return {};
}

YoungFunction YoungFunction::from_json(const nlohmann::json& j) {
    try {
        std::string preset = j.at("preset").get<std::string>();
        if (preset == "power") return power(json_number(j.at("p")));
        if (preset == "powerlog") return power_log(json_number(j.at("p")), json_number(j.at("beta")));
        if (preset == "exp") return exp(json_number(j.at("gamma")));
        if (preset == "expexp") return exp_exp(json_number(j.at("gamma")));
        if (preset == "table") {
            std::vector<std::pair<double, double>> pts;
            for (const auto& e : j.at("points")) pts.emplace_back(json_number(e.at(0)), json_number(e.at(1)));
            return table(std::move(pts));
        }
        throw ParameterError("unknown Young preset: " + preset);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("bad Young function JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// NormSpec

namespace {

bool lz_admissible(double p, double q, double a) {
    if (p > 1.0 && p < kInf && q >= 1.0) return true;
    if (p == 1.0 && q == 1.0 && a >= 0.0) return true;
    if (is_inf(p) && is_inf(q) && a <= 0.0) return true;
    if (is_inf(p) && q >= 1.0 && q < kInf && a + 1.0 / q < 0.0) return true;
    return false;
}

bool glz_admissible(double p, double q, double a, double b) {
    if (b == 0.0) return lz_admissible(p, q, a);
    if (p > 1.0 && p < kInf && q >= 1.0) return true;
    if (p == 1.0 && q == 1.0) return a > 0.0 || (a == 0.0 && b >= 0.0);
    if (is_inf(p) && is_inf(q)) return a < 0.0 || (a == 0.0 && b <= 0.0);
    if (is_inf(p) && q >= 1.0 && q < kInf) {
        double s = a + 1.0 / q;
        return s < 0.0 || (s == 0.0 && b + 1.0 / q < 0.0);
    }
    return false;
}

void check_range(double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw ParameterError("indices must lie in [1, inf]");
}

}  // namespace

NormSpec NormSpec::lebesgue(double p) {
    check_range(p, 1.0);
    NormSpec X;
    X.family_ = Family::Lebesgue;
    X.p_ = X.q_ = p;
    return X;
}

NormSpec NormSpec::lorentz(double p, double q) {
    check_range(p, q);
    bool ok = (p > 1.0 && p < kInf) || (p == 1.0 && q == 1.0) || (is_inf(p) && is_inf(q));
    if (!ok) throw ParameterError("inadmissible Lorentz indices (" + format_number(p) + "," + format_number(q) + ")");
    NormSpec X;
    X.family_ = Family::Lorentz;
    X.p_ = p;
    X.q_ = q;
    return X;
}

NormSpec NormSpec::lorentz_zygmund(double p, double q, double alpha) {
    check_range(p, q);
    if (!std::isfinite(alpha) || !lz_admissible(p, q, alpha))
        throw ParameterError("inadmissible Lorentz-Zygmund parameters (" + format_number(p) + "," +
                             format_number(q) + ";" + format_number(alpha) + ")");
    NormSpec X;
    X.family_ = Family::LorentzZygmund;
    X.p_ = p;
    X.q_ = q;
    X.alpha_ = alpha;
    return X;
}

NormSpec NormSpec::glz(double p, double q, double alpha, double beta) {
    check_range(p, q);
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !glz_admissible(p, q, alpha, beta))
        throw ParameterError("inadmissible generalized Lorentz-Zygmund parameters (" + format_number(p) + "," +
                             format_number(q) + ";" + format_number(alpha) + "," + format_number(beta) + ")");
    NormSpec X;
    X.family_ = Family::GLZ;
    X.p_ = p;
    X.q_ = q;
    X.alpha_ = alpha;
    X.beta_ = beta;
    return X;
}

NormSpec NormSpec::lz_double_star(double p, double q, double alpha) {
    check_range(p, q);
    if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
    // the weight must have finite norm so that constants belong to the space
    bool ok = p < kInf || (q < kInf ? alpha * q < -1.0 : alpha <= 0.0);
    if (!ok) throw ParameterError("inadmissible double-star parameters");
    NormSpec X;
    X.family_ = Family::LorentzZygmund;
    X.double_star_ = true;
    X.p_ = p;
    X.q_ = q;
    X.alpha_ = alpha;
    return X;
}

NormSpec NormSpec::orlicz(YoungFunction A) {
    NormSpec X;
    X.family_ = Family::Orlicz;
    X.young_ = std::make_shared<const YoungFunction>(std::move(A));
    return X;
}

NormSpec NormSpec::orlicz_lorentz(double p, double q, YoungFunction D) {
    if (!(p > 1.0) || is_inf(p) || !(q >= 1.0) || is_inf(q))
        throw ParameterError("Orlicz-Lorentz needs 1 < p < inf and 1 <= q < inf");
    NormSpec X;
    X.family_ = Family::OrliczLorentz;
    X.p_ = p;
    X.q_ = q;
    X.young_ = std::make_shared<const YoungFunction>(std::move(D));
    return X;
}

NormSpec NormSpec::derived(std::shared_ptr<const DerivedNorm> d) {
    if (!d) throw ParameterError("null derived norm");
    NormSpec X;
    X.family_ = Family::Derived;
    X.derived_ = std::move(d);
    return X;
}

std::string NormSpec::name() const {
    std::string p = format_number(p_), q = format_number(q_), a = format_number(alpha_);
    switch (family_) {
    case Family::Lebesgue: return "L^" + exponent(p_);
    case Family::Lorentz: return "L^{" + p + "," + q + "}";
    case Family::LorentzZygmund:
        if (double_star_) return "L^{(" + p + "," + q + ";" + a + ")}";
        return "L^{" + p + "," + q + ";" + a + "}";
    case Family::GLZ: return "L^{" + p + "," + q + ";" + a + "," + format_number(beta_) + "}";
    case Family::Orlicz: return "L^A[" + young_->name() + "]";
    case Family::OrliczLorentz: return "L(" + p + "," + q + "," + young_->name() + ")";
    case Family::Derived: return derived_->name();
    }
    return "";
}

std::string NormSpec::pretty() const {
    switch (family_) {
    case Family::Lorentz:
        if (p_ == q_) return "L^" + exponent(p_);
        return name();
    case Family::LorentzZygmund:
        if (double_star_) return name();
        if (alpha_ == 0.0) return p_ == q_ ? "L^" + exponent(p_) : "L^{" + format_number(p_) + "," + format_number(q_) + "}";
        if (is_inf(p_) && is_inf(q_)) return "exp L^" + exponent(-1.0 / alpha_);
        if (p_ == q_) return "L^" + exponent(p_) + "(log L)^" + exponent(p_ * alpha_);
        return name();
    case Family::GLZ:
        if (beta_ == 0.0) return lorentz_zygmund(p_, q_, alpha_).pretty();
        if (is_inf(p_) && is_inf(q_) && alpha_ == 0.0) return "exp exp L^" + exponent(-1.0 / beta_);
        return name();
    case Family::Orlicz:
        switch (young_->preset()) {
        case YoungFunction::Preset::Power: return "L^" + exponent(young_->p());
        case YoungFunction::Preset::PowerLog:
            return "L^" + exponent(young_->p()) + "(log L)^" + exponent(young_->beta());
        case YoungFunction::Preset::Exp: return "exp L^" + exponent(young_->gamma());
        case YoungFunction::Preset::ExpExp: return "exp exp L^" + exponent(young_->gamma());
        case YoungFunction::Preset::Table: return name();
        }
        return name();
    default:
        return name();
    }
}

nlohmann::json NormSpec::to_json() const {
    switch (family_) {
    case Family::Lebesgue: return {{"family", "lebesgue"}, {"p", number_json(p_)}};
    case Family::Lorentz: return {{"family", "lorentz"}, {"p", number_json(p_)}, {"q", number_json(q_)}};
    case Family::LorentzZygmund: {
        nlohmann::json j{{"family", "lorentz-zygmund"}, {"p", number_json(p_)}, {"q", number_json(q_)}, {"alpha", alpha_}};
        if (double_star_) j["double_star"] = true;
        return j;
    }
    case Family::GLZ:
        return {{"family", "glz"}, {"p", number_json(p_)}, {"q", number_json(q_)}, {"alpha", alpha_}, {"beta", beta_}};
    case Family::Orlicz: return {{"family", "orlicz"}, {"young", young_->to_json()}};
    case Family::OrliczLorentz:
        return {{"family", "orlicz-lorentz"}, {"p", number_json(p_)}, {"q", number_json(q_)}, {"young", young_->to_json()}};
    case Family::Derived: return {{"family", "derived"}, {"target", derived_->to_json()}};
    }
    return {};
}

NormSpec NormSpec::from_json(const nlohmann::json& j) {
    try {
        std::string fam = j.at("family").get<std::string>();
        auto num = [&](const char* k) { return json_number(j.at(k)); };
        if (fam == "lebesgue") return lebesgue(num("p"));
        if (fam == "lorentz") return lorentz(num("p"), num("q"));
        if (fam == "lorentz-zygmund") {
            if (j.value("double_star", false)) return lz_double_star(num("p"), num("q"), num("alpha"));
            return lorentz_zygmund(num("p"), num("q"), num("alpha"));
        }
        if (fam == "glz") return glz(num("p"), num("q"), num("alpha"), num("beta"));
        if (fam == "orlicz") return orlicz(YoungFunction::from_json(j.at("young")));
        if (fam == "orlicz-lorentz") return orlicz_lorentz(num("p"), num("q"), YoungFunction::from_json(j.at("young")));
        if (fam == "derived") throw ParameterError("derived norms are built from a target spec");
        throw ParameterError("unknown norm family: " + fam);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("bad norm JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Weight {
    double p, q, a, b;  // omega(s) = s^{1/p - 1/q} log^a(2/s) log^b(1 + log(2/s))

    double log_omega(double s) const {
        double L = std::log(2.0 / s);
        double r = (1.0 / p - 1.0 / q) * std::log(s);
        if (a != 0.0) r += a * std::log(L);
        if (b != 0.0) r += b * std::log(std::log1p(L));
        return r;
    }
    double omega(double s) const { return std::exp(log_omega(s)); }
    double omega_q(double s) const { return std::exp(q * log_omega(s)); }

    // log omega as a function of y = log(2/s)
    double log_omega_y(double y) const {
        double r = (1.0 / p - 1.0 / q) * (std::log(2.0) - y);
        if (a != 0.0) r += a * std::log(y);
        if (b != 0.0) r += b * std::log(std::log1p(y));
        return r;
    }

    // int_0^t omega^q ds, or inf.
    double sentinel_integral(double t) const {
        const QuadRule& Q = default_quad();
        double ex = q / p - 1.0, A = a * q, B = b * q;
        double y0 = std::log(2.0 / t);
        if (ex > -1.0) {
            double c = ex + 1.0;
            auto h = [&](double z) {
                double y = y0 + z;
                double r = -c * z;
                if (A != 0.0) r += A * std::log(y);
                if (B != 0.0) r += B * std::log(std::log1p(y));
                return std::exp(r);
            };
            double core = c < 0.05 ? Q.tail(h, 0.0) : Q.half_line(h);
            return std::pow(t, c) * core;
        }
        if (ex == -1.0) {
            if (A < -1.0 || (A == -1.0 && B < -1.0)) {
                if (B == 0.0) return std::pow(y0, A + 1.0) / (-A - 1.0);
                auto f = [&](double y) { return std::exp(A * std::log(y) + B * std::log(std::log1p(y))); };
                return Q.tail(f, y0);
            }
            return kInf;
        }
        return kInf;
    }

    // limit of omega at 0
    double at_zero() const {
        double e = 1.0 / p - 1.0 / q;
        if (e > 0.0) return 0.0;
        if (e < 0.0) return kInf;
        if (a < 0.0 || (a == 0.0 && b < 0.0)) return 0.0;
        if (a == 0.0 && b == 0.0) return 1.0;
        return kInf;
    }
};

// sup of a smooth function of y on [y1, y2] (y2 may be inf) by sampling and
// golden-section refinement around the best sample.
double sup_on(const std::function<double(double)>& g, double y1, double y2) {
    const int n = 24;
    std::vector<double> ys;
    if (std::isfinite(y2)) {
        for (int i = 0; i <= n; ++i) ys.push_back(y1 + (y2 - y1) * i / n);
    } else {
        for (int i = 0; i <= 4 * n; ++i) ys.push_back(y1 + std::expm1(i / 8.0));
    }
    std::size_t best = 0;
    double bv = -kInf;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double v = g(ys[i]);
        if (v > bv) {
            bv = v;
            best = i;
        }
    }
    double lo = ys[best == 0 ? 0 : best - 1], hi = ys[std::min(best + 1, ys.size() - 1)];
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < 80; ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        }
    }
    return std::max({bv, f1, f2});
}

// Per-cell weights: int_cell omega^q for q < inf, sup_cell omega for q = inf.
const std::vector<double>& cell_weights(const Weight& w, const Grid& grid) {
    static std::mutex mu;
    static std::map<std::tuple<std::uint64_t, double, double, double, double>, std::vector<double>> cache;
    auto key = std::make_tuple(grid.id(), w.p, w.q, w.a, w.b);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::size_t n = grid.size();
    std::vector<double> W(n);
    const QuadRule& Q = default_quad();
    if (std::isfinite(w.q)) {
        W[0] = w.sentinel_integral(grid.t_min());
        for (std::size_t k = 1; k < n; ++k)
            W[k] = Q.cell([&](double s) { return w.omega_q(s); }, grid.left(k), grid.right(k));
    } else {
        auto lg = [&](double y) { return w.log_omega_y(y); };
        double y0 = std::log(2.0 / grid.t_min());
        double z = w.at_zero();
        W[0] = is_inf(z) ? kInf : std::max(z, std::exp(sup_on(lg, y0, kInf)));
        for (std::size_t k = 1; k < n; ++k)
            W[k] = std::exp(sup_on(lg, std::log(2.0 / grid.right(k)), std::log(2.0 / grid.left(k))));
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(W)).first->second;
}

// Exact decreasing rearrangement of a step function: value v[j] on (lo[j], hi[j]).
struct Distribution {
    std::vector<double> lo, hi, v;
    bool on_grid = false;  // pieces are the grid cells
};

Distribution distribution(const GridFunction& f) {
    const Grid& g = f.grid();
    std::size_t n = f.size();
    Distribution d;
    if (f.nonincreasing()) {
        d.on_grid = true;
        for (std::size_t k = 0; k < n; ++k) {
            d.lo.push_back(g.left(k));
            d.hi.push_back(g.right(k));
            d.v.push_back(f[k]);
        }
        return d;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    double pos = 0.0;
    for (std::size_t k : order) {
        double end = pos + g.length(k);
        if (!d.v.empty() && d.v.back() == f[k]) {
            d.hi.back() = end;
        } else {
            d.lo.push_back(pos);
            d.hi.push_back(end);
            d.v.push_back(f[k]);
        }
        pos = end;
    }
    d.hi.back() = 1.0;
    return d;
}

double lz_eval(const Weight& w, bool dstar, const GridFunction& f) {
    Distribution d = distribution(f);
    std::size_t n = d.v.size();
    double top = d.v[0];
    if (top == 0.0) return 0.0;
    if (is_inf(top)) return kInf;
    const QuadRule& Q = default_quad();
    const std::vector<double>* cached = d.on_grid ? &cell_weights(w, f.grid()) : nullptr;
    auto lg = [&](double y) { return w.log_omega_y(y); };

    // weight of piece j: int omega^q, or sup omega when q = inf
    auto piece_weight = [&](std::size_t j) {
        if (cached) return (*cached)[j];
        if (std::isfinite(w.q)) {
            if (d.lo[j] == 0.0) return w.sentinel_integral(d.hi[j]);
            return Q.cell([&](double s) { return w.omega_q(s); }, d.lo[j], d.hi[j]);
        }
        double y2 = d.lo[j] == 0.0 ? kInf : std::log(2.0 / d.lo[j]);
        double m = std::exp(sup_on(lg, std::log(2.0 / d.hi[j]), y2));
        if (d.lo[j] == 0.0) {
            double z = w.at_zero();
            if (is_inf(z)) return kInf;
            m = std::max(m, z);
        }
        return m;
    };

    if (!dstar) {
        if (is_inf(w.q)) {
            double best = 0.0;
            for (std::size_t j = 0; j < n && d.v[j] > 0.0; ++j) best = std::max(best, d.v[j] * piece_weight(j));
            return best;
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n && d.v[j] > 0.0; ++j) {
            double W = piece_weight(j);
            if (is_inf(W)) return kInf;
            sum += std::pow(d.v[j] / top, w.q) * W;
        }
        return top * std::pow(sum, 1.0 / w.q);
    }

    // f** = v + c / s on piece j >= 1, v on the first piece
    double F = 0.0;  // int_0^{lo_j} f*, scaled by 1/top
    double W0 = piece_weight(0);
    if (is_inf(W0)) return kInf;
    double acc = W0;
    for (std::size_t j = 1; j < n; ++j) {
        F += d.v[j - 1] / top * (d.hi[j - 1] - d.lo[j - 1]);
        double v = d.v[j] / top, c = F - v * d.lo[j];
        if (is_inf(w.q)) {
            auto g = [&](double y) { return w.log_omega_y(y) + std::log(v + c * 0.5 * std::exp(y)); };
            acc = std::max(acc, std::exp(sup_on(g, std::log(2.0 / d.hi[j]), std::log(2.0 / d.lo[j]))));
        } else {
            acc += Q.cell([&](double s) { return std::exp(w.q * (w.log_omega(s) + std::log(v + c / s))); },
                          d.lo[j], d.hi[j]);
        }
    }
    return is_inf(w.q) ? top * acc : top * std::pow(acc, 1.0 / w.q);
}

double lebesgue_eval(double p, const GridFunction& f) {
    double top = f.sup();
    if (top == 0.0) return 0.0;
    if (is_inf(top)) return kInf;
    if (is_inf(p)) return top;
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] > 0.0) sum += std::pow(f[k] / top, p) * f.grid().length(k);
    return top * std::pow(sum, 1.0 / p);
}

// Luxemburg gauge for a modular rho that is nonincreasing in lambda.
double luxemburg(const std::function<double(double)>& rho, double lo, double hi) {
    if (!(lo > 0.0)) lo = 1e-300;
    int guard = 0;
    while (rho(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2100) return kInf;
    }
    guard = 0;
    while (lo > 1e-300 && rho(lo) <= 1.0) {
        hi = lo;
        lo *= 0.5;
        if (++guard > 2100) return 0.0;
    }
    while (hi - lo > 1e-12 * hi) {
        double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        (rho(mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

double orlicz_eval(const YoungFunction& A, const GridFunction& f) {
    double top = f.sup();
    if (top == 0.0) return 0.0;
    if (is_inf(top)) return kInf;
    const Grid& g = f.grid();
    auto rho = [&](double lam) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k)
            if (f[k] > 0.0) s += A.A(f[k] / lam) * g.length(k);
        return s;
    };
    double a1 = A.A_inverse(1.0);
    return luxemburg(rho, f.integral() / a1, top / a1);
}

double orlicz_lorentz_eval(double p, double q, const YoungFunction& D, const GridFunction& f) {
    Distribution d = distribution(f);
    double top = d.v[0];
    if (top == 0.0) return 0.0;
    if (is_inf(top)) return kInf;
    const QuadRule Q{1e-10};
    double e = q / p;
    auto rho = [&](double lam) {
        double s = 0.0;
        for (std::size_t j = 0; j < d.v.size(); ++j) {
            double v = d.v[j] / lam;
            if (v == 0.0) break;
            auto h = [&](double u) { return D.A(std::pow(u, -e) * v) * q * std::pow(u, q - 1.0); };
            s += j == 0 ? Q.sentinel(h, d.hi[0]) : Q.cell(h, d.lo[j], d.hi[j]);
            if (!(s < kInf)) return kInf;
        }
        return s;
    };
    double a1 = D.A_inverse(1.0);
    return luxemburg(rho, 1e-3 * f.integral() / a1, 2.0 * top / a1);
}

}  // namespace

double eval_norm(const NormSpec& X, const GridFunction& f) {
    for (double v : f.values())
        if (!(v >= 0.0)) throw ParameterError("norms are defined for nonnegative functions");
    switch (X.family()) {
    case NormSpec::Family::Lebesgue: return lebesgue_eval(X.p(), f);
    case NormSpec::Family::Lorentz: return lz_eval(Weight{X.p(), X.q(), 0.0, 0.0}, false, f);
    case NormSpec::Family::LorentzZygmund:
        return lz_eval(Weight{X.p(), X.q(), X.alpha(), 0.0}, X.double_star(), f);
    case NormSpec::Family::GLZ: return lz_eval(Weight{X.p(), X.q(), X.alpha(), X.beta()}, false, f);
    case NormSpec::Family::Orlicz: return orlicz_eval(X.young(), f);
    case NormSpec::Family::OrliczLorentz: return orlicz_lorentz_eval(X.p(), X.q(), X.young(), f);
    case NormSpec::Family::Derived: return X.derived_norm().eval(f);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Associates

std::optional<NormSpec> lz_equivalent(const NormSpec& X) {
    if (X.family() != NormSpec::Family::Orlicz) return std::nullopt;
    const YoungFunction& A = X.young();
    switch (A.preset()) {
    case YoungFunction::Preset::Power: return NormSpec::lebesgue(A.p());
    case YoungFunction::Preset::PowerLog: return NormSpec::lorentz_zygmund(A.p(), A.p(), A.beta() / A.p());
    case YoungFunction::Preset::Exp: return NormSpec::lorentz_zygmund(kInf, kInf, -1.0 / A.gamma());
    case YoungFunction::Preset::ExpExp: return NormSpec::glz(kInf, kInf, 0.0, -1.0 / A.gamma());
    case YoungFunction::Preset::Table: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

std::optional<NormSpec> lz_assoc(double p, double q, double a) {
    if (p > 1.0 && p < kInf) {
        if (a == 0.0) return conj(p) == conj(q) ? NormSpec::lebesgue(conj(p)) : NormSpec::lorentz(conj(p), conj(q));
        return NormSpec::lorentz_zygmund(conj(p), conj(q), -a);
    }
    if (p == 1.0 && q == 1.0) {
        if (a == 0.0) return NormSpec::lebesgue(kInf);
        return NormSpec::lorentz_zygmund(kInf, kInf, -a);
    }
    if (is_inf(p) && is_inf(q)) {
        if (a == 0.0) return NormSpec::lebesgue(1.0);
        return NormSpec::lorentz_zygmund(1.0, 1.0, -a);
    }
    if (is_inf(p) && q < kInf) return NormSpec::lz_double_star(1.0, conj(q), -a - 1.0);
    return std::nullopt;
}

}  // namespace

std::optional<NormSpec> associate_spec(const NormSpec& X) {
    switch (X.family()) {
    case NormSpec::Family::Lebesgue: return NormSpec::lebesgue(conj(X.p()));
    case NormSpec::Family::Lorentz: return lz_assoc(X.p(), X.q(), 0.0);
    case NormSpec::Family::LorentzZygmund:
        if (!X.double_star()) return lz_assoc(X.p(), X.q(), X.alpha());
        // L^{(p,q;a)} = L^{p,q;a} for p > 1, and L^{(1,r;a)} is the associate
        // of L^{inf,r';-a-1}
        if (X.p() > 1.0) {
            if (!lz_admissible(X.p(), X.q(), X.alpha())) return std::nullopt;
            return lz_assoc(X.p(), X.q(), X.alpha());
        }
        if (X.p() == 1.0 && lz_admissible(kInf, conj(X.q()), -X.alpha() - 1.0))
            return NormSpec::lorentz_zygmund(kInf, conj(X.q()), -X.alpha() - 1.0);
        return std::nullopt;
    case NormSpec::Family::GLZ:
        if (X.beta() == 0.0) return lz_assoc(X.p(), X.q(), X.alpha());
        return std::nullopt;
    case NormSpec::Family::Orlicz:
        if (auto e = lz_equivalent(X)) return associate_spec(*e);
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

bool has_associate(const NormSpec& X) {
    return X.family() == NormSpec::Family::Derived || associate_spec(X).has_value();
}

double associate_eval(const NormSpec& X, const GridFunction& g) {
    if (X.family() == NormSpec::Family::Derived) return X.derived_norm().associate(g);
    auto a = associate_spec(X);
    if (!a) throw UnsupportedError("no closed-form associate for " + X.name());
    return eval_norm(*a, g);
}

// ---------------------------------------------------------------------------
// Numeric duality

std::vector<GridFunction> canonical_family(const Grid& grid) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::vector<GridFunction>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(grid.id());
        if (it != cache.end()) return it->second;
    }
    std::vector<GridFunction> fam;
    const auto& x = grid.breakpoints();
    for (double b : x) fam.push_back(indicator(grid, b));
    for (int t = 1; t <= 19; ++t) {
        double theta = 0.05 * t;
        for (int j = 0; j < 40; j += 2) {
            double b = std::ldexp(1.0, -j);
            if (b < grid.t_min()) break;
            fam.push_back(power_function(grid, theta, b));
        }
    }
    const double thetas[] = {0.0, 0.25, 0.5, 0.75, 0.9};
    const double gammas[] = {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0};
    for (double th : thetas)
        for (double ga : gammas) fam.push_back(rearrange(power_log_function(grid, th, ga)));
    for (double ga : {-1.5, -2.0, -3.0}) fam.push_back(rearrange(power_log_function(grid, 1.0, ga)));
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(grid.id(), std::move(fam)).first->second;
}

namespace {

GridFunction pow_fn(const GridFunction& f, double r) {
    std::vector<double> v(f.values());
    for (double& e : v) e = e > 0.0 ? std::pow(e, r) : 0.0;
    return GridFunction(f.grid(), std::move(v));
}

// sup over nonincreasing f of pairing(f, h) / ||f||_X
double dual_sup(const NormSpec& X, const GridFunction& h, const std::vector<GridFunction>& extra) {
    const Grid& grid = h.grid();
    double best = 0.0;
    auto consider = [&](const GridFunction& f) {
        double nf = eval_norm(X, f);
        if (!(nf > 0.0) || !std::isfinite(nf)) return 0.0;
        double r = pairing(f, h) / nf;
        if (std::isfinite(r)) best = std::max(best, r);
        return r;
    };
    for (const GridFunction& f : canonical_family(grid)) consider(f);
    for (const GridFunction& f : extra) consider(f);

    // local ascent over s^{-theta} chi_(0,b)
    double bt = 0.5, bb = 1.0, bv = -1.0;
    for (int t = 0; t <= 19; ++t)
        for (int j = 0; j < 40; j += 2) {
            double b = std::ldexp(1.0, -j);
            if (b < grid.t_min()) break;
            double r = consider(power_function(grid, 0.05 * t, b));
            if (r > bv) {
                bv = r;
                bt = 0.05 * t;
                bb = b;
            }
        }
    double dt = 0.025, db = 1.0;
    for (int it = 0; it < 24; ++it) {
        bool moved = false;
        for (auto [ct, cb] : {std::pair{dt, 0.0}, {-dt, 0.0}, {0.0, db}, {0.0, -db}}) {
            double th = bt + ct, b = std::min(1.0, bb * std::exp2(cb));
            if (th < 0.0 || th >= 1.0 || b < grid.t_min()) continue;
            double r = consider(power_function(grid, th, b));
            if (r > bv) {
                bv = r;
                bt = th;
                bb = b;
                moved = true;
            }
        }
        if (!moved) {
            dt *= 0.5;
            db *= 0.5;
        }
    }
    return best;
}

}  // namespace

double associate_numeric(const NormSpec& X, const GridFunction& g) {
    GridFunction gs = rearrange(g);
    GridFunction gss = double_star(g);
    std::vector<GridFunction> extra{gs, gss};
    for (double r : {0.25, 0.5, 2.0, 3.0, 4.0}) {
        extra.push_back(pow_fn(gs, r));
        extra.push_back(pow_fn(gss, r));
    }
    return dual_sup(X, gs, extra);
}

double down_dual_numeric(const NormSpec& X, const GridFunction& g) {
    if (g.nonincreasing()) return associate_numeric(X, g);
    GridFunction lv = level_function(g);
    std::vector<GridFunction> extra{lv, double_star(lv)};
    for (double r : {0.25, 0.5, 2.0, 3.0, 4.0}) extra.push_back(pow_fn(lv, r));
    return dual_sup(X, g, extra);
}

GridFunction level_function(const GridFunction& g) {
    const Grid& grid = g.grid();
    std::size_t n = grid.size();
    for (double v : g.values())
        if (is_inf(v)) return g;
    std::vector<double> G = running_integral(g);
    // vertices: index -1 is the origin
    auto px = [&](long i) { return i < 0 ? 0.0 : grid.right(static_cast<std::size_t>(i)); };
    auto py = [&](long i) { return i < 0 ? 0.0 : G[static_cast<std::size_t>(i)]; };
    std::vector<long> hull{-1};
    for (long i = 0; i < static_cast<long>(n); ++i) {
        while (hull.size() >= 2) {
            long a = hull[hull.size() - 2], b = hull.back();
            // drop b when it lies on or below the chord from a to i
            double lhs = (py(b) - py(a)) * (px(i) - px(a));
            double rhs = (py(i) - py(a)) * (px(b) - px(a));
            if (lhs <= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    std::vector<double> out(n);
    for (std::size_t h = 1; h < hull.size(); ++h) {
        long a = hull[h - 1], b = hull[h];
        double slope = (py(b) - py(a)) / (px(b) - px(a));
        for (long k = a + 1; k <= b; ++k) out[static_cast<std::size_t>(k)] = std::max(slope, 0.0);
    }
    return GridFunction(grid, std::move(out));
}

double down_dual_level(const NormSpec& X, const GridFunction& g) {
    return associate_eval(X, level_function(g));
}

double l1_embedding_constant(const NormSpec& X, const Grid& grid) {
    return 1.0 / eval_norm(X, GridFunction::constant(grid, 1.0));
}

bool orlicz_domination(const YoungFunction& A, const YoungFunction& B) {
    for (int ci = -10; ci <= 10; ++ci) {
        double c = std::ldexp(1.0, ci);
        for (int ti = 0; ti <= 20; ++ti) {
            bool ok = true;
            for (int e = 4 * ti; e <= 160 && ok; ++e) {
                double t = std::exp2(e / 4.0);
                if (B.A(t) > A.A(c * t)) ok = false;
            }
            if (ok) return true;
        }
    }
    return false;
}

}  // namespace rsk

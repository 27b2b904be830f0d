#include "rsk/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rsk/errors.hpp"
#include "rsk/gridfn.hpp"
#include "rsk/quad.hpp"

namespace rsk {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

PhiFunction::PhiFunction(double beta) : beta_(beta) {
    if (!(beta >= 1.0 && beta <= 2.0))
        throw ParameterError("Phi(t) = t^beta/beta needs beta in [1,2] (convex, sqrt concave)");
    // Second differences of Phi and sqrt(Phi) on a sample grid.
    for (int i = 1; i < 200; ++i) {
        double t = 0.05 * i, h = 0.01;
        double d2 = value(t + h) - 2 * value(t) + value(t - h);
        double r2 = std::sqrt(value(t + h)) - 2 * std::sqrt(value(t)) + std::sqrt(value(t - h));
        if (d2 < -1e-12 || r2 > 1e-12) throw ParameterError("Phi fails convexity checks");
    }
    double mass = default_quad().tail([&](double t) { return std::exp(-value(t)); }, 0.0);
    c_ = 1.0 / (2.0 * mass);
}

double PhiFunction::value(double t) const { return std::pow(t, beta_) / beta_; }

double PhiFunction::derivative(double t) const {
    if (beta_ == 1.0) return 1.0;
    return std::pow(t, beta_ - 1.0);
}

double PhiFunction::inverse(double y) const {
    if (beta_ == 1.0) return y;
    return std::pow(beta_ * y, 1.0 / beta_);
}

double PhiFunction::inverse_gap(double y, double d) const {
    if (beta_ == 1.0) return d;
    if (y <= 0.0) return inverse(d);
    return inverse(y) * std::expm1(std::log1p(d / y) / beta_);
}

std::string PhiFunction::name() const {
    return is_gauss() ? "gauss" : "boltzmann:" + short_fmt(beta_);
}

double H_function(const PhiFunction& phi, double t) {
    if (t < 0.0) return 1.0 - H_function(phi, -t);
    double base = phi.value(t);
    double rest = default_quad().tail(
        [&](double u) { return std::exp(-(phi.value(t + u) - base)); }, 0.0);
    return phi.c() * std::exp(-base) * rest;
}

double H_inverse(const PhiFunction& phi, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ParameterError("H^{-1} needs s in (0,1)");
    if (s > 0.5) return -H_inverse(phi, 1.0 - s);
    double lo = 0.0, hi = 1.0;
    while (H_function(phi, hi) > s) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (H_function(phi, mid) > s)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double F_phi(const PhiFunction& phi, double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return phi.c() * std::exp(-phi.value(std::abs(H_inverse(phi, s))));
}

double model_domain_M(double alpha, double r) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
    if (alpha == 1.0) {
        if (r < 0.0) throw ParameterError("r must be nonnegative");
        return std::exp(-r);
    }
    if (r < 0.0 || r > 1.0 / (1.0 - alpha)) throw ParameterError("r outside [0, 1/(1-alpha)]");
    return std::pow(1.0 - (1.0 - alpha) * r, 1.0 / (1.0 - alpha));
}

Profile Profile::power(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("power profile needs alpha in [0,1]");
    Profile p;
    p.kind_ = alpha == 1.0 ? Kind::Linear : Kind::Power;
    p.alpha_ = alpha;
    p.id_ = std::hash<std::string>{}("power:" + fmt(alpha));
    return p;
}

Profile Profile::linear() { return power(1.0); }

Profile Profile::john(int n) {
    if (n < 2) throw ParameterError("john profile needs n >= 2");
    Profile p = power(1.0 - 1.0 / n);
    p.kind_ = Kind::John;
    p.n_ = n;
    return p;
}

Profile Profile::l_phi(const PhiFunction& phi) {
    Profile p;
    p.kind_ = phi.is_gauss() ? Kind::Gauss : Kind::Boltzmann;
    p.phi_ = std::make_shared<const PhiFunction>(phi);
    p.id_ = std::hash<std::string>{}("lphi:" + fmt(phi.beta()));
    return p;
}

Profile Profile::table(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw ParameterError("table profile needs points");
    std::sort(points.begin(), points.end());
    std::string key = "table";
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [s, v] = points[i];
        if (!(s > 0.0 && s <= 1.0)) throw ParameterError("table abscissae must lie in (0,1]");
        if (!(v > 0.0)) throw ParameterError("table values must be positive");
        if (i > 0 && (s == points[i - 1].first || v < points[i - 1].second))
            throw ParameterError("table profile must be strictly ordered and nondecreasing");
        key += ":" + fmt(s) + "," + fmt(v);
    }
    if (points.back().first != 1.0) points.emplace_back(1.0, points.back().second);
    Profile p;
    p.kind_ = Kind::Table;
    p.table_ = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(points));
    p.id_ = std::hash<std::string>{}(key);
    return p;
}

double Profile::I(double s) const {
    if (s <= 0.0) return kind_ == Kind::Table ? table_->front().second : 0.0;
    switch (kind_) {
        case Kind::Power:
        case Kind::John:
            return std::pow(s, alpha_);
        case Kind::Linear:
            return s;
        case Kind::Gauss:
        case Kind::Boltzmann:
            return s * phi_->derivative(phi_->inverse(std::log(2.0 / s)));
        case Kind::Table: {
            auto it = std::lower_bound(table_->begin(), table_->end(), s,
                                       [](const auto& pt, double x) { return pt.first < x; });
            if (it == table_->end()) return table_->back().second;
            return it->second;
        }
    }
    return 0.0;
}

double Profile::J(double a, double b) const {
    if (!(b > a)) return 0.0;
    switch (kind_) {
        case Kind::Power:
        case Kind::John: {
            double e = 1.0 - alpha_;
            if (a <= 0.0) return std::pow(b, e) / e;
            return std::pow(b, e) * -std::expm1(e * std::log(a / b)) / e;
        }
        case Kind::Linear:
            if (a <= 0.0) return kInf;
            return std::log(b / a);
        case Kind::Gauss:
        case Kind::Boltzmann:
            if (a <= 0.0) return kInf;
            return phi_->inverse_gap(std::log(2.0 / b), std::log(b / a));
        case Kind::Table: {
            double total = 0.0, prev = 0.0;
            for (const auto& [s, v] : *table_) {
                double lo = std::max(a, prev), hi = std::min(b, s);
                if (hi > lo) total += (hi - lo) / v;
                prev = s;
                if (s >= b) break;
            }
            return total;
        }
    }
    return 0.0;
}

double Profile::J_back(double b, double l) const {
    if (!(l > 0.0)) return 0.0;
    switch (kind_) {
        case Kind::Power:
        case Kind::John: {
            double e = 1.0 - alpha_;
            return std::pow(b, e) * -std::expm1(-e * l) / e;
        }
        case Kind::Linear:
            return l;
        case Kind::Gauss:
        case Kind::Boltzmann:
            return phi_->inverse_gap(std::log(2.0 / b), l);
        case Kind::Table:
            return J(b * std::exp(-l), b);
    }
    return 0.0;
}

std::optional<double> Profile::alpha() const {
    if (kind_ == Kind::Power || kind_ == Kind::John || kind_ == Kind::Linear) return alpha_;
    return std::nullopt;
}

std::optional<PhiFunction> Profile::phi() const {
    if (phi_) return *phi_;
    return std::nullopt;
}

bool Profile::doubling() const {
    switch (kind_) {
        case Kind::Power:
        case Kind::John:
            return alpha_ < 1.0;
        case Kind::Table:
            return true;
        default:
            return false;
    }
}

std::vector<double> Profile::kinks(double a, double b) const {
    std::vector<double> out;
    if (kind_ != Kind::Table) return out;
    for (const auto& pt : *table_)
        if (pt.first > a && pt.first < b) out.push_back(pt.first);
    return out;
}

std::string Profile::name() const {
    switch (kind_) {
        case Kind::Power:
            return "power:" + short_fmt(alpha_);
        case Kind::Linear:
            return "linear";
        case Kind::John:
            return "john:" + std::to_string(n_);
        case Kind::Gauss:
        case Kind::Boltzmann:
            return phi_->name();
        case Kind::Table:
            return "table";
    }
    return "?";
}

nlohmann::json Profile::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::Power:
            j = {{"type", "power"}, {"alpha", alpha_}};
            break;
        case Kind::Linear:
            j = {{"type", "linear"}};
            break;
        case Kind::John:
            j = {{"type", "john"}, {"n", n_}};
            break;
        case Kind::Gauss:
            j = {{"type", "gauss"}};
            break;
        case Kind::Boltzmann:
            j = {{"type", "boltzmann"}, {"beta", phi_->beta()}};
            break;
        case Kind::Table: {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& [s, v] : *table_) pts.push_back({s, v});
            j = {{"type", "table"}, {"points", pts}};
            break;
        }
    }
    return j;
}

Profile Profile::from_json(const nlohmann::json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "power") return power(j.at("alpha").get<double>());
    if (type == "linear") return linear();
    if (type == "john") return john(j.at("n").get<int>());
    if (type == "gauss") return gauss();
    if (type == "boltzmann") return boltzmann(j.at("beta").get<double>());
    if (type == "table") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return table(std::move(pts));
    }
    throw ParameterError("unknown profile type: " + type);
}

}  // namespace rsk

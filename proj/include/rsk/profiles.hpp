#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rsk {

// Phi(t) = t^beta / beta with beta in [1, 2]; beta = 2 is the Gaussian case.
class PhiFunction {
public:
    static PhiFunction gauss() { return PhiFunction(2.0); }
    static PhiFunction boltzmann(double beta) { return PhiFunction(beta); }

    double beta() const { return beta_; }
    bool is_gauss() const { return beta_ == 2.0; }
    double value(double t) const;
    double derivative(double t) const;
    double inverse(double y) const;
    // Phi^{-1}(y + d) - Phi^{-1}(y) without cancellation, d >= 0.
    double inverse_gap(double y, double d) const;
    double c() const { return c_; }
    std::string name() const;

private:
    explicit PhiFunction(double beta);
    double beta_;
    double c_;
};

double H_function(const PhiFunction& phi, double t);
double H_inverse(const PhiFunction& phi, double s);
double F_phi(const PhiFunction& phi, double s);
double model_domain_M(double alpha, double r);

class Profile {
public:
    enum class Kind { Power, Linear, John, Gauss, Boltzmann, Table };

    static Profile power(double alpha);
    static Profile linear();
    static Profile john(int n);
    static Profile l_phi(const PhiFunction& phi);
    static Profile gauss() { return l_phi(PhiFunction::gauss()); }
    static Profile boltzmann(double beta) { return l_phi(PhiFunction::boltzmann(beta)); }
    // Left-continuous step profile: I = I_i on (s_{i-1}, s_i].
    static Profile table(std::vector<std::pair<double, double>> points);

    double I(double s) const;
    // int_a^b dr / I(r) for 0 <= a <= b <= 1; +inf allowed when a = 0.
    double J(double a, double b) const;
    // J(b e^{-l}, b), computed from l directly so that small gaps keep full precision.
    double J_back(double b, double l) const;
    Kind kind() const { return kind_; }
    // Exponent for power-type profiles (linear: 1); empty otherwise.
    std::optional<double> alpha() const;
    std::optional<PhiFunction> phi() const;
    bool doubling() const;
    bool left_continuous() const { return true; }
    // Points inside (a, b) where I is not smooth.
    std::vector<double> kinks(double a, double b) const;
    std::string name() const;
    std::uint64_t id() const { return id_; }

    nlohmann::json to_json() const;
    static Profile from_json(const nlohmann::json& j);

private:
    Kind kind_ = Kind::Power;
    double alpha_ = 0.0;
    int n_ = 0;
    std::shared_ptr<const PhiFunction> phi_;
    std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
    std::uint64_t id_ = 0;
};

inline Profile power_profile(double alpha) { return Profile::power(alpha); }
inline Profile L_phi_profile(const PhiFunction& phi) { return Profile::l_phi(phi); }

}  // namespace rsk

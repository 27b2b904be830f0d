#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsk/gridfn.hpp"

namespace rsk {

class YoungFunction {
public:
    enum class Preset { Power, PowerLog, Exp, ExpExp, Table };

    // t^p, p >= 1.
    static YoungFunction power(double p);
    // t^p log^beta(e + t).
    static YoungFunction power_log(double p, double beta);
    // exp((t + c)^gamma) - exp(c^gamma); c > 0 only when needed for convexity.
    static YoungFunction exp(double gamma);
    // exp(exp((t + c)^gamma)) - exp(exp(c^gamma)).
    static YoungFunction exp_exp(double gamma);
    // Piecewise linear through (0,0) and the given points, extended linearly.
    static YoungFunction table(std::vector<std::pair<double, double>> points, bool check_convex = true);

    double A(double t) const;
    double a(double t) const;  // left derivative
    double A_inverse(double y) const;
    double a_inverse(double y) const;

    Preset preset() const { return preset_; }
    double p() const { return p_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }
    std::string name() const;

    nlohmann::json to_json() const;
    static YoungFunction from_json(const nlohmann::json& j);

private:
    void validate() const;
    Preset preset_ = Preset::Power;
    double p_ = 1.0, beta_ = 0.0, gamma_ = 1.0, shift_ = 0.0;
    std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
};

// Norms defined elsewhere (optimal targets) that know their own associate.
class DerivedNorm {
public:
    virtual ~DerivedNorm() = default;
    virtual double eval(const GridFunction& f) const = 0;
    virtual double associate(const GridFunction& g) const = 0;
    virtual std::string name() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class NormSpec {
public:
    enum class Family { Lebesgue, Lorentz, LorentzZygmund, GLZ, Orlicz, OrliczLorentz, Derived };

    static NormSpec lebesgue(double p);
    static NormSpec lorentz(double p, double q);
    static NormSpec lorentz_zygmund(double p, double q, double alpha);
    static NormSpec glz(double p, double q, double alpha, double beta);
    // L^{(p,q;alpha)}: the LZ functional applied to f** instead of f*.
    static NormSpec lz_double_star(double p, double q, double alpha);
    static NormSpec orlicz(YoungFunction A);
    static NormSpec orlicz_lorentz(double p, double q, YoungFunction D);
    static NormSpec derived(std::shared_ptr<const DerivedNorm> d);

    Family family() const { return family_; }
    double p() const { return p_; }
    double q() const { return q_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    bool double_star() const { return double_star_; }
    const YoungFunction& young() const { return *young_; }
    const DerivedNorm& derived_norm() const { return *derived_; }

    // Parameter form, e.g. L^{2,1;0.5}.
    std::string name() const;
    // Customary form where one exists, e.g. exp L^2 or L^2(log L)^1.
    std::string pretty() const;

    nlohmann::json to_json() const;
    static NormSpec from_json(const nlohmann::json& j);

private:
    Family family_ = Family::Lebesgue;
    double p_ = 1.0, q_ = 1.0, alpha_ = 0.0, beta_ = 0.0;
    bool double_star_ = false;
    std::shared_ptr<const YoungFunction> young_;
    std::shared_ptr<const DerivedNorm> derived_;
};

double eval_norm(const NormSpec& X, const GridFunction& f);

// Closed-form associate (up to equivalent norms), when one is known.
std::optional<NormSpec> associate_spec(const NormSpec& X);
// Lorentz-Zygmund form of an Orlicz preset, when one is known.
std::optional<NormSpec> lz_equivalent(const NormSpec& X);
bool has_associate(const NormSpec& X);
// ||g||_{X'} through the closed-form associate or a derived norm's own formula.
double associate_eval(const NormSpec& X, const GridFunction& g);

// Lower bounds by duality over the canonical nonincreasing test family.
double associate_numeric(const NormSpec& X, const GridFunction& g);
double down_dual_numeric(const NormSpec& X, const GridFunction& g);
inline double down_dual_norm(const NormSpec& X, const GridFunction& g) { return down_dual_numeric(X, g); }
// ||g°||_{X'} with g° the level function of g; needs a closed-form associate.
double down_dual_level(const NormSpec& X, const GridFunction& g);
// Slopes of the least concave majorant of t -> int_0^t g.
GridFunction level_function(const GridFunction& g);

std::vector<GridFunction> canonical_family(const Grid& grid);

// C with int f <= C ||f||_X, i.e. ||1||_{X'} = 1 / ||1||_X. The identity
// needs a norm; for a quasi-norm this is only a lower bound for C.
double l1_embedding_constant(const NormSpec& X, const Grid& grid);

bool orlicz_domination(const YoungFunction& A, const YoungFunction& B);

std::string format_number(double x);

}  // namespace rsk

#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "rsk/gridfn.hpp"
#include "rsk/norms.hpp"
#include "rsk/profiles.hpp"

namespace rsk {

class TargetNorm : public DerivedNorm, public std::enable_shared_from_this<TargetNorm> {
public:
    enum class Variant { Full, Sharp, Iterated, Phi, Tilde };

    // phi is required for Variant::Phi and ignored otherwise.
    static std::shared_ptr<const TargetNorm> make(NormSpec base, Profile profile, int m, Variant variant,
                                                  std::optional<PhiFunction> phi = std::nullopt);

    const NormSpec& base() const { return base_; }
    const Profile& profile() const { return profile_; }
    int m() const { return m_; }
    Variant variant() const { return variant_; }
    const std::optional<PhiFunction>& phi() const { return phi_; }

    double eval(const GridFunction& f) const override;
    double associate(const GridFunction& g) const override;
    std::string name() const override;
    nlohmann::json to_json() const override;

    NormSpec as_norm() const;

private:
    TargetNorm(NormSpec base, Profile profile, int m, Variant variant, std::optional<PhiFunction> phi)
        : base_(std::move(base)), profile_(std::move(profile)), m_(m), variant_(variant), phi_(std::move(phi)) {}
    NormSpec base_;
    Profile profile_;
    int m_;
    Variant variant_;
    std::optional<PhiFunction> phi_;
};

using TargetPtr = std::shared_ptr<const TargetNorm>;

std::string variant_name(TargetNorm::Variant v);
TargetNorm::Variant variant_from_name(const std::string& s);

// {"base":{...},"profile":{...},"m":2,"variant":"full"}; bases may nest.
TargetPtr target_from_json(const nlohmann::json& j);
// Norm JSON that also accepts {"family":"derived","target":{...}}.
NormSpec norm_from_json(const nlohmann::json& j);

double target_assoc_eval(const TargetNorm& T, const GridFunction& g);

struct TargetNormValue {
    double lower = 0.0;             // duality lower bound
    std::optional<double> closed;   // closed-form target norm when the resolver knows one
    std::string closed_name;
};

// Duality lower bound sup pairing(f*, g) / ||g||_{T'} over the nonincreasing
// dual family, plus the closed-form value when available.
TargetNormValue target_norm_eval(const TargetNorm& T, const GridFunction& f);
double target_norm_lower(const TargetNorm& T, const GridFunction& f);

// (T)_{h}: the same construction with T as base; h = 0 returns T.
TargetPtr iterate_target(const TargetPtr& T, int h);

struct SymbolicTarget {
    enum class Verdict { Space, LInfinity, NoTable };
    Verdict verdict = Verdict::NoTable;
    std::optional<NormSpec> target;  // set for Space and LInfinity
    std::string theorem;             // which table branch was applied
    std::string note;
    // Optimal Orlicz target when it differs from the optimal r.i. target.
    std::optional<NormSpec> orlicz_target;

    std::string display() const;
    nlohmann::json to_json() const;
};

SymbolicTarget resolve_target(const NormSpec& base, const Profile& profile, int m);

struct LinfVerdict {
    bool finite = false;
    double value = 0.0;          // ||kernel||_{X'} on the grid
    double tail_exponent = 0.0;  // kernel ~ s^{-theta} at 0 (theta reported)
    std::string reason;
};

// Finiteness of ||(1/I(s)) (int_0^s dr/I)^{m-1}||_{X'}.
LinfVerdict linf_criterion(const NormSpec& X, const Profile& I, int m, const Grid& grid);

struct OrliczTransform {
    bool linf = false;                    // target is L^inf
    std::optional<YoungFunction> young;   // A_{m,alpha} otherwise
    double exponent = 0.0;                // m(1-alpha)/(1-m(1-alpha))
    std::string reason;
};

OrliczTransform orlicz_transform(const YoungFunction& A, double alpha, int m);

}  // namespace rsk

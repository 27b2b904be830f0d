#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsk/gridfn.hpp"
#include "rsk/norms.hpp"
#include "rsk/operators.hpp"
#include "rsk/profiles.hpp"

namespace rsk {

struct FamilyMember {
    std::string id;
    GridFunction f;
    bool nonincreasing = false;
};

class TestFamily {
public:
    TestFamily() = default;
    explicit TestFamily(std::vector<FamilyMember> members) : members_(std::move(members)) {}

    // Indicators, powers s^{-theta} with theta < theta_cap, log-powers,
    // random nonincreasing steps and oscillating steps. Every member is
    // defined independently of the grid resolution, so the same seed gives
    // the same functions on a refined grid.
    static TestFamily standard(const Grid& grid, std::uint64_t seed, std::size_t size = 64, double theta_cap = 1.0);
    // standard() with theta_cap chosen so that every member lies in X.
    static TestFamily for_norm(const NormSpec& X, const Grid& grid, std::uint64_t seed, std::size_t size = 64);

    const std::vector<FamilyMember>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    TestFamily nonincreasing_part() const;
    TestFamily rearranged() const;

private:
    std::vector<FamilyMember> members_;
};

// Critical power exponent of X near 0: s^{-theta} lies in X for theta below it.
double theta_cap(const NormSpec& X);

struct RatioReport {
    enum class Verdict { Pass, Fail, Unstable };

    std::string check;   // suite id
    std::string detail;  // parameters of this row
    double min_ratio = 0.0, max_ratio = 0.0;
    std::string argmin, argmax;
    std::size_t grid_n = 0;
    double drift = -1.0;  // relative band change N -> 2N; negative when not measured
    double band_lo = 0.0, band_hi = 0.0;
    double drift_tol = 0.05;
    std::vector<std::string> failures;  // any entry forces a fail
    nlohmann::json extra = nlohmann::json::object();

    Verdict verdict() const;
    nlohmann::json to_json() const;
};

std::string verdict_name(RatioReport::Verdict v);

// max over F of ||T f||_Y / ||f||_X.
double op_norm_lower(const KernelOp& T, const NormSpec& X, const NormSpec& Y, const TestFamily& F);
// max over G of ||R^m g*||_{X'} / ||g||_{Y'} for T of kind H.
double op_norm_dual(const KernelOp& T, const NormSpec& X, const NormSpec& Y, const TestFamily& G);
// op_norm_lower over F divided by op_norm_lower over its nonincreasing members.
RatioReport nonincreasing_reduction_check(const Profile& I, int m, const NormSpec& X, const NormSpec& Y,
                                          const TestFamily& F);

struct SuiteConfig {
    std::uint64_t seed = 1;
    int K = 16;
    double t_min = 0x1p-40;
    double band_lo = 1.0 / 64.0, band_hi = 64.0;
    double drift_tol = 0.05;
    std::size_t family_size = 64;
    std::size_t negative_family_size = 256;
    bool refine = true;  // measure drift on the grid with 2K points per octave

    nlohmann::json to_json() const;
};

// Closed-form resolver target norm over the duality lower bound for the
// X_{m,I} norm, on for_norm(base); fails when the resolver has no target.
RatioReport target_band_check(const NormSpec& base, const Profile& I, int m, const SuiteConfig& config,
                              const std::string& check = "optimal-target");

std::vector<std::string> suite_ids();
std::vector<RatioReport> theorem_suite(const std::string& id, const SuiteConfig& config);

}  // namespace rsk

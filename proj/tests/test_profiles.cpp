#include <doctest.h>

#include <cmath>

#include "rsk/errors.hpp"
#include "rsk/profiles.hpp"
#include "support.hpp"

using namespace rsk;
using rsk::testing::for_all;

namespace {

// Standard normal tail and density as oracles for the Gaussian case.
double normal_tail(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }
double normal_density(double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); }

std::vector<Profile> builtin_profiles() {
    return {Profile::power(0.5), Profile::power(0.75), Profile::linear(), Profile::john(3),
            Profile::gauss(), Profile::boltzmann(1.0), Profile::boltzmann(1.5)};
}

}  // namespace

TEST_CASE("profile antiderivative examples") {
    CHECK(Profile::power(0.5).J(0.25, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(Profile::linear().J(std::exp(-1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(Profile::power(0.5).J(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::isinf(Profile::linear().J(0.0, 0.5)));

    Profile j4 = Profile::john(4), p = Profile::power(0.75);
    for (double s : {1e-9, 0.01, 0.3, 1.0}) CHECK(j4.I(s) == p.I(s));
}

TEST_CASE("H function") {
    PhiFunction g = PhiFunction::gauss();
    CHECK(H_function(g, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(H_function(PhiFunction::boltzmann(1.3), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(H_function(g, 1.0) == doctest::Approx(normal_tail(1.0)).epsilon(1e-12));
    CHECK(H_function(g, 1.0) == doctest::Approx(0.158655).epsilon(1e-5));
    double prev = 1.0;
    for (double t = -5.0; t <= 5.0; t += 0.25) {
        double h = H_function(PhiFunction::boltzmann(1.5), t);
        CHECK(h < prev);
        prev = h;
    }
    for (double s : {1e-10, 0.01, 0.3, 0.5, 0.8}) CHECK(H_function(g, H_inverse(g, s)) == doctest::Approx(s).epsilon(1e-10));
}

TEST_CASE("L_Phi profile") {
    Profile g = Profile::gauss();
    CHECK(g.I(0.5) == doctest::Approx(0.5 * std::sqrt(2 * std::log(4.0))).epsilon(1e-14));
    CHECK(g.I(0.5) == doctest::Approx(0.83255).epsilon(1e-5));
    for (double s : {1e-12, 1e-4, 0.1, 0.5}) CHECK(g.I(s) == doctest::Approx(s * std::sqrt(2 * std::log(2 / s))).epsilon(1e-13));
    Profile b1 = Profile::boltzmann(1.0);
    for (double s : {1e-12, 1e-4, 0.1, 0.5, 1.0}) CHECK(b1.I(s) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("property: L_Phi sandwich on (0, 1/2]") {
    for (double beta : {1.0, 1.5, 2.0}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile I = Profile::l_phi(phi);
        for_all(1000, 21, [&](Rng& rng, int) {
            double s = std::exp2(-rng.uniform(1.0, 60.0));
            double base = s * phi.derivative(phi.inverse(std::log(1 / s)));
            CHECK(base <= I.I(s) * (1 + 1e-12));
            CHECK(I.I(s) <= 2 * base * (1 + 1e-12));
        });
    }
}

TEST_CASE("F_Phi") {
    PhiFunction g = PhiFunction::gauss();
    CHECK(F_phi(g, 0.5) == doctest::Approx(g.c()).epsilon(1e-14));
    CHECK(F_phi(g, normal_tail(1.0)) == doctest::Approx(normal_density(1.0)).epsilon(1e-10));
    CHECK(F_phi(g, 0.158655) == doctest::Approx(0.241971).epsilon(1e-5));

    for (double beta : {1.0, 1.5, 2.0}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile I = Profile::l_phi(phi);
        double lo = kInf, hi = 0.0;
        for (int i = 0; i <= 300; ++i) {
            double s = std::exp2(-1.0 - 29.0 * i / 300.0);
            double r = F_phi(phi, s) / I.I(s);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CHECK(lo > 0.1);
        CHECK(hi < 10.0);
    }
}

TEST_CASE("model domain") {
    CHECK(model_domain_M(1.0, 0.0) == 1.0);
    CHECK(model_domain_M(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    for (double r : {0.0, 0.3, 1.0, 1.9}) {
        CHECK(model_domain_M(0.5, r) == doctest::Approx((1 - r / 2) * (1 - r / 2)).epsilon(1e-14));
        if (r == 0.0) continue;
        double h = 1e-6;
        double deriv = -(model_domain_M(0.5, r + h) - model_domain_M(0.5, r - h)) / (2 * h);
        CHECK(deriv == doctest::Approx(std::sqrt(model_domain_M(0.5, r))).epsilon(1e-7));
    }
}

TEST_CASE("property: built-in profiles are nondecreasing with I(t)/t bounded below") {
    for (const Profile& I : builtin_profiles()) {
        double prev = 0.0, ratio_min = kInf;
        for (int i = 0; i <= 10000; ++i) {
            double t = std::exp2(-40.0 * (10000 - i) / 10000.0);
            double v = I.I(t);
            CHECK(v >= prev);
            prev = v;
            ratio_min = std::min(ratio_min, v / t);
        }
        CHECK(ratio_min > 0.5);
    }
}

TEST_CASE("power profile doubling constant") {
    for (double a : {0.25, 0.5, 0.75, 0.9}) {
        Profile I = Profile::power(a);
        for (double s : {1e-12, 1e-6, 0.01, 0.5, 1.0})
            CHECK(I.J(0.0, s) <= s / I.I(s) / (1 - a) * (1 + 1e-13));
    }
}

TEST_CASE("property: delta2 chain for gauss and boltzmann") {
    for (double beta : {1.0, 1.5, 2.0}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        for_all(1000, 22, [&](Rng& rng, int) {
            double y = rng.uniform(0.0, 200.0), d = rng.uniform(0.0, 50.0);
            double gap = phi.inverse_gap(y, d);
            CHECK(gap >= 0.0);
            CHECK(gap <= phi.inverse(d) * (1 + 1e-12) + 1e-300);
            CHECK(gap == doctest::Approx(phi.inverse(y + d) - phi.inverse(y)).epsilon(1e-8));
        });
    }
}

TEST_CASE("table profiles are left continuous") {
    Profile t = Profile::table({{0.25, 0.1}, {0.5, 0.3}, {1.0, 0.6}});
    CHECK(t.I(0.25) == 0.1);
    CHECK(t.I(0.2500001) == 0.3);
    CHECK(t.I(0.5) == 0.3);
    CHECK(t.I(1.0) == 0.6);
    CHECK(t.J(0.25, 0.5) == doctest::Approx(0.25 / 0.3).epsilon(1e-14));
    CHECK_THROWS_AS(Profile::table({{0.5, 0.3}, {1.0, 0.2}}), ParameterError);
}

TEST_CASE("profile JSON round trip") {
    for (const Profile& I : builtin_profiles()) {
        Profile back = Profile::from_json(I.to_json());
        CHECK(back.name() == I.name());
        CHECK(back.I(0.3) == I.I(0.3));
    }
    CHECK_THROWS_AS(Profile::power(1.5), ParameterError);
}

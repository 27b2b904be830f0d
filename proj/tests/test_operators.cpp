#include <doctest.h>

#include <cmath>

#include "rsk/errors.hpp"
#include "rsk/operators.hpp"
#include "support.hpp"

using namespace rsk;
using rsk::testing::for_all;
using rsk::testing::gen_nonincreasing;
using rsk::testing::gen_step;
using rsk::testing::rel;

namespace {

Grid grid16() { return Grid::geometric(16, 0x1p-40); }
Grid grid8() { return Grid::geometric(8, 0x1p-30); }

std::size_t node_at(const Grid& g, double t) {
    const auto& x = g.breakpoints();
    auto it = std::lower_bound(x.begin(), x.end(), t);
    REQUIRE(it != x.end());
    REQUIRE(*it == doctest::Approx(t).epsilon(1e-15));
    return static_cast<std::size_t>(it - x.begin());
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("H examples") {
    Grid g = grid16();
    GridFunction one = GridFunction::constant(g, 1.0);
    OpResult h = eval_H_m(Profile::power(0.5), 1, one);
    CHECK(h.nodes[node_at(g, 0.25)] == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(h.nodes[k] == doctest::Approx(2 * (1 - std::sqrt(g.right(k)))).epsilon(1e-12));
    CHECK(h.at_zero == doctest::Approx(2.0).epsilon(1e-12));

    OpResult lg = eval_H_m(Profile::linear(), 1, one);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(lg.nodes[k] == doctest::Approx(std::log(1 / g.right(k))).epsilon(1e-12).scale(1e-12));
    CHECK(std::isinf(lg.at_zero));

    GridFunction zero = GridFunction::zero(g);
    GridFunction hz = apply_H_m(Profile::gauss(), 2, zero);
    for (double v : hz.values()) CHECK(v == 0.0);
}

TEST_CASE("R examples") {
    Grid g = grid16();
    Rng rng(31);
    GridFunction fs = rearrange(gen_step(g, rng));
    GridFunction r = apply_R(Profile::linear(), fs);
    GridFunction dd = double_star(fs);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(r[k] == doctest::Approx(dd[k]).epsilon(1e-11));

    OpResult sq = eval_R_m(Profile::power(0.5), 1, GridFunction::constant(g, 1.0));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(sq.nodes[k] == doctest::Approx(std::sqrt(g.right(k))).epsilon(1e-12));
}

TEST_CASE("H^2 for the linear profile at t = e^-2") {
    Grid g = grid16().with_breakpoints({std::exp(-2.0)});
    OpResult h = eval_H_m(Profile::linear(), 2, GridFunction::constant(g, 1.0));
    CHECK(h.nodes[node_at(g, std::exp(-2.0))] == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        double l = std::log(1 / g.right(k));
        CHECK(h.nodes[k] == doctest::Approx(l * l / 2).epsilon(1e-11));
    }
}

TEST_CASE("property: kernel sums agree with composition") {
    Grid g = grid8();
    for (const Profile& I : {Profile::power(0.5), Profile::linear(), Profile::gauss()})
        for (int m = 1; m <= 3; ++m)
            for_all(5, 32 + m, [&](Rng& rng, int) {
                GridFunction f = gen_step(g, rng);
                OpResult a = eval_H_m(I, m, f), b = compose_H(I, m, f);
                for (std::size_t k = 0; k < g.size(); ++k) CHECK(rel(a.cells[k], b.cells[k]) < 1e-9);
                if (m == 1) {
                    GridFunction once = apply_H(I, f);
                    for (std::size_t k = 0; k < g.size(); ++k) CHECK(once[k] == a.cells[k]);
                }
            });
}

TEST_CASE("property: H and R are mutually associate") {
    Grid g = grid8();
    for (const Profile& I : {Profile::power(0.75), Profile::linear(), Profile::boltzmann(1.5)})
        for (int m = 1; m <= 3; ++m)
            for_all(10, 40 + m, [&](Rng& rng, int) {
                GridFunction f = gen_step(g, rng), h = gen_step(g, rng);
                double a = pairing(apply_H_m(I, m, f), h), b = pairing(f, apply_R_m(I, m, h));
                CHECK(rel(a, b) <= 1e-10);
            });
}

TEST_CASE("Fubini oracle at m = 2") {
    // f = chi_(0,0.6), g = chi_(0,0.3), I = s^{1/2}:
    // <H^2 f, g> = int_0^0.3 int_t^0.6 2(sqrt(s) - sqrt(t)) / sqrt(s) ds dt = int_0^0.3 2(sqrt(0.6) - sqrt(t))^2 dt
    Grid g = grid16().with_breakpoints({0.3, 0.6});
    const double a = 0.6, b = 0.3;
    double exact = 2 * (a * b - 4.0 / 3.0 * std::sqrt(a) * std::pow(b, 1.5) + b * b / 2);
    double num = pairing(apply_H_m(Profile::power(0.5), 2, indicator(g, a)), indicator(g, b));
    CHECK(num == doctest::Approx(exact).epsilon(1e-12));
    double dual = pairing(indicator(g, a), apply_R_m(Profile::power(0.5), 2, indicator(g, b)));
    CHECK(dual == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("property: R^m doubling bound on nonincreasing functions") {
    Grid g = grid8();
    for (const Profile& I : {Profile::power(0.5), Profile::linear(), Profile::gauss()})
        for (int m = 1; m <= 3; ++m)
            for_all(50, 50 + m, [&](Rng& rng, int) {
                OpResult r = eval_R_m(I, m, gen_nonincreasing(g, rng));
                const auto& x = g.breakpoints();
                std::size_t j = 0;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    while (x[j] < x[k] / 2) ++j;
                    for (std::size_t i = j; i <= k; ++i)
                        REQUIRE(r.nodes[k] <= std::ldexp(r.nodes[i], m) * (1 + 1e-12));
                }
            });
}

TEST_CASE("property: R^m f <= R^m f* and the integral bound") {
    Grid g = Grid::geometric(4, 0x1p-20);
    for (const Profile& I : {Profile::power(0.5), Profile::gauss()})
        for (int m = 1; m <= 3; ++m)
            for_all(20, 60 + m, [&](Rng& rng, int) {
                GridFunction f = gen_step(g, rng);
                GridFunction a = apply_R_m(I, m, f);
                OpResult b = eval_R_m(I, m, rearrange(f));
                for (std::size_t k = 0; k < g.size(); ++k) CHECK(a[k] <= b.cells[k] * (1 + 1e-12));
                // (d - c) R^m f*(d) <= 2^{m+1} int_c^d R^m f*
                std::vector<double> cum(g.size() + 1, 0.0);
                for (std::size_t k = 0; k < g.size(); ++k) cum[k + 1] = cum[k] + b.cells[k] * g.length(k);
                for (std::size_t c = 0; c < g.size(); ++c)
                    for (std::size_t d = c + 1; d < g.size(); ++d) {
                        double lhs = (g.right(d) - g.right(c)) * b.nodes[d];
                        double rhs = std::ldexp(cum[d + 1] - cum[c + 1], m + 1);
                        REQUIRE(lhs <= rhs * (1 + 1e-12));
                    }
            });
}

TEST_CASE("G examples") {
    Grid g = grid16();
    Rng rng(70);
    GridFunction f = gen_step(g, rng);
    GResult lin = apply_G_m(Profile::linear(), 1, f);
    CHECK(lin.level.intervals.empty());
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(lin.g.cells[k] == doctest::Approx(lin.r.cells[k]).epsilon(1e-12));

    GResult sq = apply_G_m(Profile::power(0.5), 1, GridFunction::constant(g, 1.0));
    REQUIRE(sq.level.intervals.size() == 1);
    CHECK(sq.level.intervals[0].first == 0.0);
    CHECK(sq.level.intervals[0].second == 1.0);
    CHECK(sq.level.plateau[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (double v : sq.g.cells.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("property: level decomposition reconstructs G") {
    Grid g = grid8();
    for (const Profile& I : {Profile::power(0.5), Profile::power(0.75), Profile::gauss()})
        for (int m = 1; m <= 2; ++m)
            for_all(10, 80 + m, [&](Rng& rng, int) {
                GResult res = apply_G_m(I, m, gen_step(g, rng));
                OpResult back = res.level.reconstruct(res.r);
                CHECK(back.cells.values() == res.g.cells.values());
                CHECK(back.nodes == res.g.nodes);
                CHECK(res.g.cells.nonincreasing());
                for (std::size_t k = 0; k < g.size(); ++k) CHECK(res.g.nodes[k] >= res.r.nodes[k] * (1 - 1e-12));
            });
}

TEST_CASE("property: G semigroup up to constants") {
    Grid g = grid8();
    for (const Profile& I : {Profile::power(0.5), Profile::gauss()})
        for (int m = 1; m <= 2; ++m)
            for_all(30, 90 + m, [&](Rng& rng, int) {
                GridFunction f = gen_step(g, rng);
                GridFunction once = apply_G_m(I, 1, f).g.cells;
                GridFunction lhs = apply_G_m(I, m, once).g.cells;
                GridFunction rhs = apply_G_m(I, m + 1, f).g.cells;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    if (rhs[k] == 0.0) continue;
                    double r = lhs[k] / rhs[k];
                    CHECK(r >= 1.0 / 64);
                    CHECK(r <= 64.0);
                }
            });
}

TEST_CASE("P examples") {
    Grid g = grid16();
    OpResult p = eval_P_phi(PhiFunction::boltzmann(1.0), 1, GridFunction::constant(g, 1.0));
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
        CHECK(p.nodes[k] == doctest::Approx(std::log(1 / g.right(k))).epsilon(1e-12));

    PhiFunction gauss = PhiFunction::gauss();
    for (int m = 1; m <= 3; ++m)
        for (double b : {0.1, 0.5}) {
            Grid gb = grid16().with_breakpoints({b});
            OpResult r = eval_P_phi(gauss, m, indicator(gb, b));
            for (std::size_t k = 0; k < gb.size(); ++k) {
                double t = gb.right(k);
                CHECK(rel(r.nodes[k], P_m_indicator_closed_form(gauss, m, b, t)) < 1e-9);
            }
        }
}

TEST_CASE("H indicator closed form") {
    PhiFunction gauss = PhiFunction::gauss();
    for (double t : {1e-10, 0.01, 0.3, 0.9})
        CHECK(H_m_indicator_closed_form(gauss, 1, 1.0, t) ==
              doctest::Approx(std::sqrt(2 * std::log(2 / t)) - std::sqrt(2 * std::log(2.0))).epsilon(1e-13));
    CHECK(H_m_indicator_closed_form(gauss, 2, 0.5, 0.5) == 0.0);
    for (int m = 1; m <= 3; ++m)
        for (double b : {0.1, 0.5}) {
            Grid gb = grid16().with_breakpoints({b});
            OpResult r = eval_H_m(Profile::gauss(), m, indicator(gb, b));
            for (std::size_t k = 0; k < gb.size(); ++k)
                CHECK(rel(r.nodes[k], H_m_indicator_closed_form(gauss, m, b, gb.right(k))) < 1e-6);
        }
}

TEST_CASE("property: P and H sandwich") {
    Grid g = grid8();
    for (double beta : {1.0, 1.5, 2.0}) {
        PhiFunction phi = PhiFunction::boltzmann(beta);
        Profile I = Profile::l_phi(phi);
        for (int m = 1; m <= 3; ++m) {
            double lo = std::ldexp(1.0, -m) / factorial(m - 1), hi = 1.0 / factorial(m - 1);
            for_all(10, 100 + m, [&](Rng& rng, int i) {
                GridFunction f = i % 2 ? gen_step(g, rng) : gen_nonincreasing(g, rng);
                OpResult p = eval_P_phi(phi, m, f), h = eval_H_m(I, m, f);
                for (std::size_t k = 0; k < g.size(); ++k) {
                    CHECK(lo * p.nodes[k] <= h.nodes[k] * (1 + 1e-12));
                    if (f.nonincreasing()) CHECK(h.nodes[k] <= hi * p.nodes[k] * (1 + 1e-12));
                }
            });
        }
    }
}

TEST_CASE("kernel operator JSON") {
    KernelOp op = KernelOp::from_json(nlohmann::json::parse(R"({"op":"H","profile":{"type":"power","alpha":0.5},"m":2})"));
    CHECK(op.kind == KernelOp::Kind::H);
    CHECK(op.m == 2);
    KernelOp back = KernelOp::from_json(op.to_json());
    CHECK(back.name() == op.name());
    CHECK_THROWS_AS(KernelOp::from_json(nlohmann::json::parse(R"({"op":"Q"})")), ParameterError);
    CHECK_THROWS_AS(KernelOp::from_json(nlohmann::json::parse(R"({"op":"P","m":1})")), ParameterError);
}

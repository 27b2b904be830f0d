#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rsk/errors.hpp"
#include "rsk/gridfn.hpp"
#include "rsk/quad.hpp"
#include "support.hpp"

using namespace rsk;
using rsk::testing::for_all;

namespace {

Grid small_grid() { return Grid::geometric(4, 0x1p-20); }

std::vector<double> partial_integrals(const GridFunction& f) { return running_integral(f); }

}  // namespace

TEST_CASE("geometric grid construction") {
    Grid g = Grid::geometric(1, 0.125);
    REQUIRE(g.breakpoints() == std::vector<double>{0.125, 0.25, 0.5, 1.0});
    CHECK(g.left(0) == 0.0);
    CHECK(g.right(0) == 0.125);

    Grid fine = g.refined();
    for (double b : g.breakpoints())
        CHECK(std::find(fine.breakpoints().begin(), fine.breakpoints().end(), b) != fine.breakpoints().end());
    CHECK(fine.size() > g.size());

    CHECK(Grid::geometric(4, 0x1p-20).size() >= 80);
    CHECK_THROWS_AS(Grid::geometric(0, 0.5), ParameterError);
    CHECK_THROWS_AS(Grid::from_breakpoints({0.5, 0.25, 1.0}), GridError);
}

TEST_CASE("rearrangement examples") {
    Grid g = Grid::from_breakpoints({0.2, 0.5, 0.7, 1.0});
    GridFunction f(g, {3.0, 1.0, 1.0, 2.0});
    GridFunction fs = rearrange(f);
    std::vector<double> expect{3.0, 2.0, 1.0, 1.0};
    for (std::size_t k = 0; k < 4; ++k) CHECK(fs[k] == doctest::Approx(expect[k]).epsilon(1e-14));

    GridFunction dec(g, {4.0, 3.0, 3.0, 0.5});
    CHECK(rearrange(dec).values() == dec.values());

    Grid h = Grid::from_breakpoints({0.25, 0.6, 0.85, 1.0});
    GridFunction chi = indicator(h, 0.6, 0.85);
    CHECK(rearrange(chi).values() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("double star examples") {
    Grid g = small_grid();
    GridFunction c = GridFunction::constant(g, 2.5);
    GridFunction cs = double_star(c);
    for (double v : cs.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    Grid h = Grid::from_breakpoints({0.125, 0.25, 0.5, 1.0});
    GridFunction fss = double_star(indicator(h, 0.25));
    CHECK(fss[0] == doctest::Approx(1.0));
    CHECK(fss[1] == doctest::Approx(1.0));
    // cell average of b/s over (0.25, 0.5) is log 2, over (0.5, 1) it is log(2)/2
    CHECK(fss[2] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(fss[3] == doctest::Approx(std::log(2.0) / 2).epsilon(1e-14));
}

TEST_CASE("dilation examples") {
    Grid g = Grid::geometric(2, 0x1p-10);
    Rng rng(5);
    GridFunction f = rsk::testing::gen_step(g, rng);
    GridFunction same = dilate(f, 1.0);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(same[k] == doctest::Approx(f[k]).epsilon(1e-14));

    GridFunction half = dilate(indicator(g, 0.5), 0.5);
    GridFunction quarter = indicator(g, 0.25);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(half[k] == doctest::Approx(quarter[k]));

    for (double lam : {0.25, 0.5, 2.0, 4.0}) {
        GridFunction d = dilate(f, lam);
        double expect = lam <= 1.0 ? lam * f.integral() : 0.0;
        if (lam <= 1.0) CHECK(d.integral() == doctest::Approx(expect).epsilon(1e-12));
        else CHECK(d.integral() <= lam * f.integral() * (1 + 1e-12));
    }
}

TEST_CASE("pairing examples") {
    Grid g = Grid::geometric(4, 0x1p-16);
    Rng rng(9);
    GridFunction f = rsk::testing::gen_step(g, rng);
    CHECK(pairing(f, GridFunction::constant(g, 1.0)) == doctest::Approx(f.integral()).epsilon(1e-14));
    CHECK(pairing(indicator(g, 0.25), indicator(g, 0.5)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pairing(indicator(g, 0.5), indicator(g, 0.125)) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("property: Hardy-Littlewood inequality") {
    Grid g = small_grid();
    for_all(100, 11, [&](Rng& rng, int) {
        GridFunction f = rsk::testing::gen_step(g, rng);
        GridFunction h = rsk::testing::gen_step(g, rng);
        // a grid on which both f* and h* are exact
        std::vector<double> cuts = rearrangement_cuts(f), more = rearrangement_cuts(h);
        cuts.insert(cuts.end(), more.begin(), more.end());
        Grid r = g.with_breakpoints(cuts);
        GridFunction f2 = resample(f, r), h2 = resample(h, r);
        CHECK(pairing(f2, h2) == doctest::Approx(pairing(f, h)).epsilon(1e-13));
        CHECK(pairing(f2, h2) <= pairing(rearrange(f2), rearrange(h2)) * (1 + 1e-12));
    });
}

TEST_CASE("property: grid rearrangement preserves cell integrals of f*") {
    Grid g = small_grid();
    for_all(50, 16, [&](Rng& rng, int) {
        GridFunction f = rsk::testing::gen_step(g, rng);
        GridFunction fs = rearrange(f);
        auto [f2, exact] = exact_rearrangement(f);
        auto a = running_integral(fs), b = running_integral(exact);
        for (std::size_t k = 0; k < g.size(); ++k) {
            // nearest breakpoint: merging may keep a cut within rounding of x_k instead of x_k
            const auto& x = exact.grid().breakpoints();
            std::size_t j = exact.grid().locate(g.right(k));
            if (j > 0 && std::abs(x[j - 1] - g.right(k)) < std::abs(x[j] - g.right(k))) --j;
            CHECK(a[k] == doctest::Approx(b[j]).epsilon(1e-12));
        }
    });
}

TEST_CASE("property: rearrangement is idempotent and equimeasurable") {
    Grid g = small_grid();
    for_all(50, 12, [&](Rng& rng, int) {
        GridFunction f0 = rsk::testing::gen_step(g, rng);
        auto [f, fs] = exact_rearrangement(f0);
        const Grid& r = f.grid();
        CHECK(fs.nonincreasing());
        CHECK(rearrange(fs).values() == fs.values());
        CHECK(fs.integral() == doctest::Approx(f.integral()).epsilon(1e-12));
        // superlevel sets at every attained value
        for (double y0 : f.values()) {
            // cell averages reproduce a value only to rounding
            double y = y0 * (1 + 1e-12);
            double mf = 0.0, ms = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (f[k] > y) mf += r.length(k);
                if (fs[k] > y) ms += r.length(k);
            }
            CHECK(ms == doctest::Approx(mf).epsilon(1e-12));
        }
    });
}

TEST_CASE("property: subadditivity of running integrals of rearrangements") {
    Grid g = small_grid();
    for_all(50, 13, [&](Rng& rng, int) {
        GridFunction f = rsk::testing::gen_step(g, rng);
        GridFunction h = rsk::testing::gen_step(g, rng);
        auto a = partial_integrals(rearrange(f + h));
        auto b = partial_integrals(rearrange(f));
        auto c = partial_integrals(rearrange(h));
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] <= (b[k] + c[k]) * (1 + 1e-12) + 1e-300);
    });
}

TEST_CASE("property: Hardy lemma") {
    Grid g = small_grid();
    for_all(50, 14, [&](Rng& rng, int) {
        GridFunction f2 = rsk::testing::gen_step(g, rng);
        // f1 = f2 with mass moved to the right keeps running integrals below f2's
        std::vector<double> v(f2.values());
        std::vector<double> moved(v.size(), 0.0);
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            double take = 0.5 * v[k] * g.length(k);
            v[k] -= take / g.length(k);
            moved[k + 1] += take;
        }
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += moved[k] / g.length(k);
        GridFunction f1(g, v);
        auto a = running_integral(f1), b = running_integral(f2);
        for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] <= b[k] * (1 + 1e-12));
        GridFunction h = rsk::testing::gen_nonincreasing(g, rng);
        CHECK(pairing(f1, h) <= pairing(f2, h) * (1 + 1e-12));
    });
}

TEST_CASE("property: JSON round trip is exact") {
    Grid g = Grid::geometric(16, 0x1p-40);
    for_all(10, 15, [&](Rng& rng, int) {
        GridFunction f = rsk::testing::gen_step(g, rng);
        GridFunction back = GridFunction::from_json(nlohmann::json::parse(f.to_json().dump()));
        CHECK(back.values() == f.values());
        CHECK(back.grid().breakpoints() == g.breakpoints());
    });
}

TEST_CASE("cell quadrature of 1/s matches log(1/t)") {
    Grid g = Grid::geometric(16, 0x1p-40);
    const QuadRule& q = default_quad();
    double sum = 0.0;
    for (std::size_t k = g.size() - 1; k >= 1; --k) {
        sum += q.cell([](double s) { return 1.0 / s; }, g.left(k), g.right(k));
        CHECK(sum == doctest::Approx(std::log(1.0 / g.left(k))).epsilon(1e-12));
    }
}

TEST_CASE("grid function validation") {
    Grid g = Grid::geometric(1, 0.25);
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0}), GridError);
    CHECK_THROWS_AS(GridFunction(g, {1.0, -1.0, 0.0}), ParameterError);
}

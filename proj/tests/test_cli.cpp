#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "rsk/errors.hpp"

using namespace rsk;

namespace {

int run(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "rsk");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

}  // namespace

TEST_CASE("number parsing") {
    CHECK(cli::parse_number("4/3") == doctest::Approx(4.0 / 3.0).epsilon(1e-16));
    CHECK(cli::parse_number(" 0.75 ") == 0.75);
    CHECK(std::isinf(cli::parse_number("inf")));
    CHECK(cli::parse_number("2^-40") == 0x1p-40);
    CHECK_THROWS_AS(cli::parse_number("1/0"), ParameterError);
    CHECK_THROWS_AS(cli::parse_number("abc"), ParameterError);
    CHECK_THROWS_AS(cli::parse_number("1.5x"), ParameterError);
}

TEST_CASE("shorthand parsing") {
    NormSpec l = cli::parse_norm("lorentz:4/3,1");
    CHECK(l.family() == NormSpec::Family::Lorentz);
    CHECK(l.p() == doctest::Approx(4.0 / 3.0));
    CHECK(cli::parse_norm("orlicz:exp,2").pretty() == "exp L^2");
    CHECK(cli::parse_norm("lz:inf,2,-1").pretty() == "L^{inf,2;-1}");
    CHECK(cli::parse_norm(R"({"family":"lebesgue","p":2})").p() == 2.0);
    CHECK_THROWS_AS(cli::parse_norm("lorentz:2"), ParameterError);
    CHECK(cli::parse_profile("power:0.75").alpha() == 0.75);
    CHECK(cli::parse_profile("gauss").kind() == Profile::Kind::Gauss);
    Grid g = Grid::geometric(2, 0x1p-8);
    CHECK(cli::parse_function("indicator:0.25", g).integral() == doctest::Approx(0.25));
    CHECK_THROWS_AS(cli::parse_function("wave:1", g), ParameterError);
}

TEST_CASE("eval-norm and exit codes") {
    std::string out;
    CHECK(run({"eval-norm", "--family", "lorentz:2,1", "--fn", "indicator:0.25"}, out) == cli::kPass);
    CHECK(out == "1.0\n");
    CHECK(run({"eval-norm", "--family", "lebesgue:1", "--fn", "power:1"}, out) == cli::kPass);
    CHECK(out == "inf\n");
    CHECK(run({"eval-norm", "--family", "bogus:1", "--fn", "indicator:0.25"}, out) == cli::kSpecError);
    CHECK(run({"eval-norm", "--fn", "indicator:0.25"}, out) == cli::kSpecError);
    CHECK(run({}, out) == cli::kSpecError);
    CHECK(run({"suite", "--id", "nope"}, out) == cli::kSpecError);
}

TEST_CASE("optimal-target output") {
    std::string out;
    CHECK(run({"optimal-target", "--base", "orlicz:exp,2", "--profile", "gauss", "--m", "1", "--no-check"}, out) ==
          cli::kPass);
    CHECK(out.rfind("exp L^1 [", 0) == 0);
    CHECK(run({"optimal-target", "--base", "lorentz:4/3,1", "--profile", "power:0.75", "--m", "2", "--K", "4",
               "--tmin", "2^-20", "--no-refine"},
              out) == cli::kPass);
    CHECK(out.rfind("L^{4,1} [power-lorentz/branch1]\n", 0) == 0);
    auto line = out.substr(out.find('\n') + 1);
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("verdict") == "pass");
}

TEST_CASE("eval-op writes a grid function") {
    std::string out;
    CHECK(run({"eval-op", "--op", "H", "--profile", "power:1/2", "--fn", "const:1", "--K", "1", "--tmin", "1/8"}, out) ==
          cli::kPass);
    GridFunction f = GridFunction::from_json(nlohmann::json::parse(out));
    CHECK(f.size() == 4);
    CHECK(run({"eval-op", "--op", "P", "--phi", "gauss", "--m", "2", "--fn", "indicator:0.5", "--K", "1", "--tmin", "1/8",
               "--format", "csv"},
              out) == cli::kPass);
    CHECK(out.rfind("s,value\n", 0) == 0);
}

TEST_CASE("sweep CSV is reproducible") {
    std::vector<std::string> args{"sweep", "--base", "lebesgue:{p}", "--profile", "power:{a}", "--param", "p=2,1",
                                  "--param", "a=0.75", "--K", "2", "--tmin", "2^-12", "--no-refine"};
    std::string a, b;
    int code = run(args, a);
    CHECK(code != cli::kSpecError);
    run(args, b);
    CHECK(a == b);
    std::istringstream in(a);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "p,a,value,band_lo,band_hi,drift,verdict");
    CHECK(first.rfind("1.0,0.75,", 0) == 0);
}

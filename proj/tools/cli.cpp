#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rsk/errors.hpp"
#include "rsk/targets.hpp"
#include "rsk/verify.hpp"

namespace rsk::cli {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double decimal(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParameterError("bad number: " + s);
    }
    if (used != s.size()) throw ParameterError("bad number: " + s);
    return v;
}

// Splits "head:a,b,c" into head and arguments.
std::pair<std::string, std::vector<std::string>> shorthand(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) return {trim(s), {}};
    return {trim(s.substr(0, colon)), split(s.substr(colon + 1), ',')};
}

void want_args(const std::string& what, const std::vector<std::string>& args, std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw ParameterError("wrong number of arguments for " + what);
}

YoungFunction parse_young(const std::vector<std::string>& args) {
    if (args.empty()) throw ParameterError("orlicz needs a Young function");
    const std::string& kind = args[0];
    if (kind == "power") {
        want_args("orlicz:power", args, 2, 2);
        return YoungFunction::power(parse_number(args[1]));
    }
    if (kind == "powerlog") {
        want_args("orlicz:powerlog", args, 3, 3);
        return YoungFunction::power_log(parse_number(args[1]), parse_number(args[2]));
    }
    if (kind == "exp") {
        want_args("orlicz:exp", args, 2, 2);
        return YoungFunction::exp(parse_number(args[1]));
    }
    if (kind == "expexp") {
        want_args("orlicz:expexp", args, 2, 2);
        return YoungFunction::exp_exp(parse_number(args[1]));
    }
    throw ParameterError("unknown Young function: " + kind);
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return nlohmann::json(x).dump();
}

// Printed scalars carry 12 significant digits, so roundoff in the last bits
// does not show.
std::string fmt_value(double x) {
    if (!std::isfinite(x) || x == 0.0) return fmt(x);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return fmt(std::strtod(buf, nullptr));
}

int exit_code(const std::vector<RatioReport>& reports) {
    int code = kPass;
    for (const auto& r : reports) {
        auto v = r.verdict();
        if (v == RatioReport::Verdict::Fail) return kFailed;
        if (v == RatioReport::Verdict::Unstable) code = kUnstable;
    }
    return code;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ParameterError("cannot open output file: " + path);
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

struct Options {
    std::string out;
    std::string K, tmin;
    std::uint64_t seed = 1;

    std::string op = "H", profile = "linear", phi, spec, fn, format = "json";
    std::string family;
    bool associate = false;
    std::string base, m = "1";
    bool no_check = false;
    bool all = false, no_refine = false;
    std::vector<std::string> ids, params;
    std::string csv;
};

GridConfig grid_config(const Options& o) {
    GridConfig c = grid_config_from_env();
    if (!o.K.empty()) c.K = static_cast<int>(parse_number(o.K));
    if (!o.tmin.empty()) c.t_min = parse_number(o.tmin);
    return c;
}

SuiteConfig suite_config(const Options& o) {
    GridConfig g = grid_config(o);
    SuiteConfig c;
    c.seed = o.seed;
    c.K = g.K;
    c.t_min = g.t_min;
    c.refine = !o.no_refine;
    return c;
}

int parse_order(const std::string& s) {
    double v = parse_number(s);
    if (v != std::floor(v) || v < 0 || v > 100) throw ParameterError("order must be a small integer: " + s);
    return static_cast<int>(v);
}

void log_config(std::ostream& err, const std::string& sub, nlohmann::json j) {
    j["subcommand"] = sub;
    err << "config: " << j.dump() << "\n";
}

// --- subcommands ---------------------------------------------------------------

int eval_op(const Options& o, std::ostream& out, std::ostream& err) {
    KernelOp op;
    if (!o.spec.empty()) {
        auto j = load_json_arg(o.spec);
        if (!j) throw ParameterError("operator spec must be JSON");
        op = KernelOp::from_json(*j);
    } else {
        nlohmann::json j{{"op", o.op}, {"m", parse_order(o.m)}, {"profile", parse_profile(o.profile).to_json()}};
        if (!o.phi.empty()) j["phi"] = parse_profile(o.phi).to_json();
        op = KernelOp::from_json(j);
    }
    GridConfig g = grid_config(o);
    Grid grid = Grid::geometric(g.K, g.t_min);
    GridFunction f = parse_function(o.fn, grid);
    log_config(err, "eval-op", {{"op", op.to_json()}, {"fn", o.fn}, {"grid", {{"K", g.K}, {"t_min", g.t_min}, {"n", f.size()}}},
                                {"format", o.format}});
    GridFunction r = op.apply(f);
    Output dst(o.out, out);
    if (o.format == "csv") {
        dst.stream() << "s,value\n";
        for (std::size_t k = 0; k < r.size(); ++k)
            dst.stream() << fmt(r.grid().right(k)) << "," << fmt(r[k]) << "\n";
    } else if (o.format == "json") {
        dst.stream() << r.to_json().dump() << "\n";
    } else {
        throw ParameterError("unknown format: " + o.format);
    }
    return kPass;
}

int eval_norm(const Options& o, std::ostream& out, std::ostream& err) {
    NormSpec X = parse_norm(o.family);
    GridConfig g = grid_config(o);
    Grid grid = Grid::geometric(g.K, g.t_min);
    GridFunction f = parse_function(o.fn, grid);
    log_config(err, "eval-norm", {{"norm", X.to_json()}, {"fn", o.fn}, {"associate", o.associate},
                                  {"grid", {{"K", g.K}, {"t_min", g.t_min}, {"n", f.size()}}}});
    double v = o.associate ? associate_eval(X, f) : eval_norm(X, f);
    Output dst(o.out, out);
    dst.stream() << fmt_value(v) << "\n";
    return kPass;
}

int optimal_target(const Options& o, std::ostream& out, std::ostream& err) {
    NormSpec X = parse_norm(o.base);
    Profile I = parse_profile(o.profile);
    int m = parse_order(o.m);
    SuiteConfig c = suite_config(o);
    log_config(err, "optimal-target",
               {{"base", X.to_json()}, {"profile", I.to_json()}, {"m", m}, {"suite", c.to_json()}, {"check", !o.no_check}});
    SymbolicTarget st = resolve_target(X, I, m);
    Output dst(o.out, out);
    dst.stream() << st.display() << "\n";
    if (st.orlicz_target) dst.stream() << "orlicz target: " << st.orlicz_target->pretty() << "\n";
    if (o.no_check) return st.verdict == SymbolicTarget::Verdict::NoTable ? kFailed : kPass;
    RatioReport r = target_band_check(X, I, m, c);
    dst.stream() << r.to_json().dump() << "\n";
    return exit_code({r});
}

int write_reports(const std::vector<RatioReport>& reports, const Options& o, std::ostream& out) {
    Output dst(o.out, out);
    for (const auto& r : reports) dst.stream() << r.to_json().dump() << "\n";
    if (!o.csv.empty()) {
        Output table(o.csv, out);
        table.stream() << "check,detail,min_ratio,max_ratio,band_lo,band_hi,drift,verdict\n";
        for (const auto& r : reports)
            table.stream() << r.check << ",\"" << r.detail << "\"," << fmt(r.min_ratio) << "," << fmt(r.max_ratio) << ","
                           << fmt(r.band_lo) << "," << fmt(r.band_hi) << "," << (r.drift < 0 ? "" : fmt(r.drift)) << ","
                           << verdict_name(r.verdict()) << "\n";
    }
    return exit_code(reports);
}

int check(const Options& o, std::ostream& out, std::ostream& err) {
    SuiteConfig c = suite_config(o);
    if (!o.ids.empty()) {
        log_config(err, "check", {{"ids", o.ids}, {"suite", c.to_json()}});
        std::vector<RatioReport> all;
        for (const auto& id : o.ids)
            for (auto& r : theorem_suite(id, c)) all.push_back(std::move(r));
        return write_reports(all, o, out);
    }
    if (o.base.empty()) throw ParameterError("check needs --id or --base");
    NormSpec X = parse_norm(o.base);
    Profile I = parse_profile(o.profile);
    int m = parse_order(o.m);
    log_config(err, "check", {{"base", X.to_json()}, {"profile", I.to_json()}, {"m", m}, {"suite", c.to_json()}});
    return write_reports({target_band_check(X, I, m, c, "check")}, o, out);
}

int suite(const Options& o, std::ostream& out, std::ostream& err) {
    SuiteConfig c = suite_config(o);
    std::vector<std::string> ids = o.all ? suite_ids() : o.ids;
    if (ids.empty()) throw ParameterError("suite needs --all or --id");
    log_config(err, "suite", {{"ids", ids}, {"suite", c.to_json()}});
    std::vector<RatioReport> all;
    for (const auto& id : ids)
        for (auto& r : theorem_suite(id, c)) all.push_back(std::move(r));
    return write_reports(all, o, out);
}

std::string substitute(std::string s, const std::map<std::string, std::string>& values) {
    for (const auto& [name, v] : values) {
        std::string key = "{" + name + "}";
        for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + v.size()))
            s.replace(pos, key.size(), v);
    }
    if (s.find('{') != std::string::npos && s.front() != '{')
        throw ParameterError("unbound placeholder in " + s);
    return s;
}

int sweep(const Options& o, std::ostream& out, std::ostream& err) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> values;
    for (const auto& p : o.params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw ParameterError("--param needs name=v1,v2,...: " + p);
        names.push_back(trim(p.substr(0, eq)));
        values.push_back(split(p.substr(eq + 1), ','));
        if (values.back().empty()) throw ParameterError("empty parameter list: " + p);
        for (const auto& v : values.back()) parse_number(v);
    }
    SuiteConfig c = suite_config(o);
    log_config(err, "sweep", {{"base", o.base}, {"profile", o.profile}, {"m", o.m}, {"params", o.params}, {"suite", c.to_json()}});

    std::vector<std::vector<std::string>> tuples{{}};
    for (const auto& vs : values) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : tuples)
            for (const auto& v : vs) {
                next.push_back(t);
                next.back().push_back(v);
            }
        tuples = std::move(next);
    }
    std::sort(tuples.begin(), tuples.end(), [](const auto& a, const auto& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            double x = parse_number(a[i]), y = parse_number(b[i]);
            if (x != y) return x < y;
        }
        return false;
    });

    std::vector<std::string> rows;
    std::vector<RatioReport> reports;
    for (const auto& t : tuples) {
        std::map<std::string, std::string> bind;
        for (std::size_t i = 0; i < names.size(); ++i) bind[names[i]] = t[i];
        NormSpec X = parse_norm(substitute(o.base, bind));
        Profile I = parse_profile(substitute(o.profile, bind));
        int m = parse_order(substitute(o.m, bind));
        RatioReport r = target_band_check(X, I, m, c, "sweep");
        // the ratio farthest from 1 on a log scale
        double value = std::abs(std::log(r.max_ratio)) >= std::abs(std::log(r.min_ratio)) ? r.max_ratio : r.min_ratio;
        std::ostringstream row;
        for (const auto& v : t) row << fmt(parse_number(v)) << ",";
        row << fmt(value) << "," << fmt(r.band_lo) << "," << fmt(r.band_hi) << "," << (r.drift < 0 ? "" : fmt(r.drift)) << ","
            << verdict_name(r.verdict());
        rows.push_back(row.str());
        reports.push_back(std::move(r));
    }
    Output dst(o.out, out);
    for (const auto& n : names) dst.stream() << n << ",";
    dst.stream() << "value,band_lo,band_hi,drift,verdict\n";
    for (const auto& r : rows) dst.stream() << r << "\n";
    return exit_code(reports);
}

}  // namespace

double parse_number(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw ParameterError("empty number");
    if (s == "inf" || s == "infinity" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s.rfind("2^", 0) == 0) return std::exp2(decimal(s.substr(2)));
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double den = decimal(trim(s.substr(slash + 1)));
        if (den == 0.0) throw ParameterError("zero denominator: " + s);
        return decimal(trim(s.substr(0, slash))) / den;
    }
    return decimal(s);
}

std::optional<nlohmann::json> load_json_arg(const std::string& raw) {
    std::string s = trim(raw);
    try {
        if (!s.empty() && (s.front() == '{' || s.front() == '[')) return nlohmann::json::parse(s);
        if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
            std::ifstream in(s);
            if (!in) throw ParameterError("cannot read " + s);
            return nlohmann::json::parse(in);
        }
    } catch (const nlohmann::json::parse_error& e) {
        throw ParameterError(std::string("bad JSON: ") + e.what());
    }
    return std::nullopt;
}

NormSpec parse_norm(const std::string& s) {
    if (auto j = load_json_arg(s)) return norm_from_json(*j);
    auto [head, args] = shorthand(s);
    auto n = [&](std::size_t i) { return parse_number(args.at(i)); };
    if (head == "lebesgue" || head == "L") {
        want_args(head, args, 1, 1);
        return NormSpec::lebesgue(n(0));
    }
    if (head == "lorentz") {
        want_args(head, args, 2, 2);
        return NormSpec::lorentz(n(0), n(1));
    }
    if (head == "lz") {
        want_args(head, args, 3, 3);
        return NormSpec::lorentz_zygmund(n(0), n(1), n(2));
    }
    if (head == "lz**") {
        want_args(head, args, 3, 3);
        return NormSpec::lz_double_star(n(0), n(1), n(2));
    }
    if (head == "glz") {
        want_args(head, args, 4, 4);
        return NormSpec::glz(n(0), n(1), n(2), n(3));
    }
    if (head == "orlicz") return NormSpec::orlicz(parse_young(args));
    throw ParameterError("unknown norm: " + s);
}

Profile parse_profile(const std::string& s) {
    if (auto j = load_json_arg(s)) return Profile::from_json(*j);
    auto [head, args] = shorthand(s);
    if (head == "power") {
        want_args(head, args, 1, 1);
        return Profile::power(parse_number(args[0]));
    }
    if (head == "linear") {
        want_args(head, args, 0, 0);
        return Profile::linear();
    }
    if (head == "gauss") {
        want_args(head, args, 0, 0);
        return Profile::gauss();
    }
    if (head == "boltzmann") {
        want_args(head, args, 1, 1);
        return Profile::boltzmann(parse_number(args[0]));
    }
    if (head == "john") {
        want_args(head, args, 1, 1);
        return Profile::john(parse_order(args[0]));
    }
    throw ParameterError("unknown profile: " + s);
}

GridFunction parse_function(const std::string& s, const Grid& grid) {
    if (auto j = load_json_arg(s)) return GridFunction::from_json(*j);
    auto [head, args] = shorthand(s);
    auto n = [&](std::size_t i) { return parse_number(args.at(i)); };
    if (head == "indicator") {
        want_args(head, args, 1, 2);
        return args.size() == 1 ? indicator(grid, n(0)) : indicator(grid, n(0), n(1));
    }
    if (head == "power") {
        want_args(head, args, 1, 2);
        return args.size() == 1 ? power_function(grid, n(0)) : power_function(grid, n(0), n(1));
    }
    if (head == "powerlog") {
        want_args(head, args, 2, 2);
        return power_log_function(grid, n(0), n(1));
    }
    if (head == "const") {
        want_args(head, args, 1, 1);
        return GridFunction::constant(grid, n(0));
    }
    throw ParameterError("unknown function: " + s);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Higher-order Sobolev embedding toolkit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-o,--out", o.out, "output file (default stdout)");
        sub->add_option("--K", o.K, "grid points per octave (default RSK_GRID_K or 16)");
        sub->add_option("--tmin", o.tmin, "smallest grid point (default RSK_TMIN or 2^-40)");
        sub->add_option("--seed", o.seed, "test family seed");
    };

    auto* op = app.add_subcommand("eval-op", "apply an operator to a function");
    common(op);
    op->add_option("--op", o.op, "H, R, G or P");
    op->add_option("--profile", o.profile, "profile I");
    op->add_option("--m", o.m, "order");
    op->add_option("--phi", o.phi, "gauss or boltzmann:b for P");
    op->add_option("--spec", o.spec, "operator JSON (overrides --op/--profile/--m)");
    op->add_option("--fn", o.fn, "input function")->required();
    op->add_option("--format", o.format, "json or csv");

    auto* nm = app.add_subcommand("eval-norm", "evaluate a norm");
    common(nm);
    nm->add_option("--family", o.family, "norm")->required();
    nm->add_option("--fn", o.fn, "function")->required();
    nm->add_flag("--associate", o.associate, "evaluate the associate norm instead");

    auto* ot = app.add_subcommand("optimal-target", "resolve the optimal target and check it numerically");
    common(ot);
    ot->add_option("--base", o.base, "domain norm X")->required();
    ot->add_option("--profile", o.profile, "profile I");
    ot->add_option("--m", o.m, "order");
    ot->add_flag("--no-check", o.no_check, "skip the numeric band check");
    ot->add_flag("--no-refine", o.no_refine, "skip the 2N drift measurement");

    auto* ck = app.add_subcommand("check", "run suite entries or one target band check");
    common(ck);
    ck->add_option("--id", o.ids, "suite id (repeatable)");
    ck->add_option("--base", o.base, "domain norm X");
    ck->add_option("--profile", o.profile, "profile I");
    ck->add_option("--m", o.m, "order");
    ck->add_option("--csv", o.csv, "also write a CSV summary");
    ck->add_flag("--no-refine", o.no_refine, "skip the 2N drift measurement");

    auto* sw = app.add_subcommand("sweep", "target band checks over a parameter grid, as CSV");
    common(sw);
    sw->add_option("--base", o.base, "norm template, e.g. lorentz:{p},1")->required();
    sw->add_option("--profile", o.profile, "profile template, e.g. power:{a}");
    sw->add_option("--m", o.m, "order template");
    sw->add_option("--param", o.params, "name=v1,v2,... (repeatable)")->required();
    sw->add_flag("--no-refine", o.no_refine, "skip the 2N drift measurement");

    auto* st = app.add_subcommand("suite", "run the registered checks");
    common(st);
    st->add_flag("--all", o.all, "every registered check");
    st->add_option("--id", o.ids, "suite id (repeatable)");
    st->add_option("--csv", o.csv, "also write a CSV summary");
    st->add_flag("--no-refine", o.no_refine, "skip the 2N drift measurement");
    st->add_flag_callback("--list", [&] {
        for (const auto& id : suite_ids()) out << id << "\n";
        throw CLI::Success();
    }, "list suite ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kPass : kSpecError;
    }

    try {
        if (*op) return eval_op(o, out, err);
        if (*nm) return eval_norm(o, out, err);
        if (*ot) return optimal_target(o, out, err);
        if (*ck) return check(o, out, err);
        if (*sw) return sweep(o, out, err);
        if (*st) return suite(o, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kSpecError;
    }
    return kSpecError;
}

}  // namespace rsk::cli

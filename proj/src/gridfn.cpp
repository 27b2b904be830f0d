#include "rsk/gridfn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "rsk/errors.hpp"
#include "rsk/quad.hpp"

namespace rsk {

namespace {

std::uint64_t next_grid_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
}

std::vector<double> merge_points(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    std::vector<double> out;
    for (double p : x) {
        if (!out.empty() && std::abs(p - out.back()) <= 1e-14 * p) continue;
        out.push_back(p);
    }
    return out;
}

double power_integral(double lo, double hi, double theta) {
    if (!(hi > lo)) return 0.0;
    if (theta == 0.0) return hi - std::max(lo, 0.0);
    if (lo <= 0.0) {
        if (theta >= 1.0) return kInf;
        return std::pow(hi, 1.0 - theta) / (1.0 - theta);
    }
    double r = std::log(lo / hi);
    if (theta == 1.0) return -r;
    return std::pow(hi, 1.0 - theta) * -std::expm1((1.0 - theta) * r) / (1.0 - theta);
}

}  // namespace

Grid Grid::build(std::vector<double> x, int K) {
    if (x.empty()) throw GridError("grid needs at least one breakpoint");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(x[i] <= 1.0)) throw GridError("breakpoints must lie in (0,1]");
        if (i > 0 && !(x[i] > x[i - 1])) throw GridError("breakpoints must increase strictly");
    }
    if (x.back() != 1.0) throw GridError("last breakpoint must be 1");
    auto d = std::make_shared<Data>();
    d->len.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) d->len[k] = x[k] - (k == 0 ? 0.0 : x[k - 1]);
    d->x = std::move(x);
    d->K = K;
    d->id = next_grid_id();
    return Grid(std::move(d));
}

Grid Grid::geometric(int K, double t_min) {
    if (K < 1) throw ParameterError("points per octave must be positive");
    if (!(t_min > 0.0) || !(t_min < 0.5)) throw ParameterError("t_min must lie in (0, 1/2)");
    std::vector<double> x;
    for (long j = 0;; ++j) {
        double p = std::exp2(-static_cast<double>(j) / K);
        if (p <= t_min * (1.0 + 1e-12)) break;
        x.push_back(p);
    }
    x.push_back(t_min);
    std::reverse(x.begin(), x.end());
    return build(std::move(x), K);
}

Grid Grid::from_breakpoints(std::vector<double> points) {
    return build(std::move(points), 0);
}

Grid Grid::refined() const {
    std::vector<double> x = d_->x;
    if (d_->K > 0) {
        Grid fine = geometric(2 * d_->K, t_min());
        x.insert(x.end(), fine.breakpoints().begin(), fine.breakpoints().end());
    } else {
        for (std::size_t k = 1; k < d_->x.size(); ++k) x.push_back(std::sqrt(d_->x[k - 1] * d_->x[k]));
    }
    return build(merge_points(std::move(x)), d_->K > 0 ? 2 * d_->K : 0);
}

Grid Grid::with_breakpoints(const std::vector<double>& extra) const {
    std::vector<double> x = d_->x;
    for (double p : extra) {
        if (!(p > 0.0) || !(p <= 1.0)) throw GridError("extra breakpoint outside (0,1]");
        x.push_back(p);
    }
    return build(merge_points(std::move(x)), d_->K);
}

std::size_t Grid::locate(double s) const {
    auto it = std::lower_bound(d_->x.begin(), d_->x.end(), s);
    if (it == d_->x.end()) return d_->x.size() - 1;
    return static_cast<std::size_t>(it - d_->x.begin());
}

bool Grid::same(const Grid& other) const {
    return d_ == other.d_ || d_->x == other.d_->x;
}

GridConfig grid_config_from_env() {
    GridConfig c;
    if (const char* k = std::getenv("RSK_GRID_K")) {
        c.K = std::stoi(k);
    }
    if (const char* t = std::getenv("RSK_TMIN")) {
        std::string s(t);
        if (s.rfind("2^", 0) == 0)
            c.t_min = std::exp2(std::stod(s.substr(2)));
        else
            c.t_min = std::stod(s);
    }
    return c;
}

Grid default_grid() {
    GridConfig c = grid_config_from_env();
    return Grid::geometric(c.K, c.t_min);
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_.size()) throw GridError("value count must equal cell count");
    for (double v : v_)
        if (!(v >= 0.0)) throw ParameterError("grid function values must be nonnegative");
}

GridFunction GridFunction::constant(const Grid& grid, double c) {
    return GridFunction(grid, std::vector<double>(grid.size(), c));
}

double GridFunction::integral() const {
    double s = 0.0;
    for (std::size_t k = 0; k < v_.size(); ++k)
        if (v_[k] > 0.0) s += v_[k] * grid_.length(k);
    return s;
}

double GridFunction::sup() const {
    return v_.empty() ? 0.0 : *std::max_element(v_.begin(), v_.end());
}

bool GridFunction::nonincreasing() const {
    for (std::size_t k = 1; k < v_.size(); ++k)
        if (v_[k] > v_[k - 1]) return false;
    return true;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    if (!grid_.same(o.grid_)) throw GridError("grid mismatch");
    std::vector<double> w(v_.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = v_[k] + o.v_[k];
    return GridFunction(grid_, std::move(w));
}

GridFunction GridFunction::scaled(double c) const {
    if (!(c >= 0.0)) throw ParameterError("scale factor must be nonnegative");
    std::vector<double> w(v_.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = v_[k] == 0.0 ? 0.0 : v_[k] * c;
    return GridFunction(grid_, std::move(w));
}

nlohmann::json GridFunction::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t k = 0; k < v_.size(); ++k) {
        nlohmann::json cell;
        cell["left"] = grid_.left(k);
        cell["right"] = grid_.right(k);
        if (std::isinf(v_[k]))
            cell["value"] = "inf";
        else
            cell["value"] = v_[k];
        arr.push_back(cell);
    }
    return arr;
}

GridFunction GridFunction::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ParameterError("grid function JSON must be a nonempty array");
    std::vector<double> x, v;
    double prev = 0.0;
    for (const auto& cell : j) {
        double l = cell.at("left").get<double>();
        double r = cell.at("right").get<double>();
        if (l != prev) throw GridError("cells must be contiguous and start at 0");
        prev = r;
        x.push_back(r);
        const auto& val = cell.at("value");
        if (val.is_string()) {
            if (val.get<std::string>() != "inf") throw ParameterError("unknown value string");
            v.push_back(kInf);
        } else {
            v.push_back(val.get<double>());
        }
    }
    return GridFunction(Grid::from_breakpoints(std::move(x)), std::move(v));
}

GridFunction rearrange(const GridFunction& f) {
    if (f.nonincreasing()) return f;
    const Grid& g = f.grid();
    const auto& x = g.breakpoints();
    const auto& v = f.values();
    std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    // Piece idx occupies (a, b) with b the running sum of lengths, the same sum
    // rearrangement_cuts produces; b snaps to a breakpoint within rounding.
    std::vector<double> mass(n, 0.0);
    std::size_t c = 0;
    double a = 0.0, sum = 0.0;
    for (std::size_t idx : order) {
        sum += g.length(idx);
        double b = sum;
        std::size_t j = g.locate(b);
        if (std::abs(x[j] - b) <= 1e-13 * x[j]) b = x[j];
        else if (j > 0 && std::abs(x[j - 1] - b) <= 1e-13 * x[j - 1]) b = x[j - 1];
        b = std::min(b, 1.0);
        double val = v[idx];
        while (c < n && x[c] <= a) ++c;
        if (val > 0.0)
            for (std::size_t d = c; d < n && g.left(d) < b; ++d) {
                double overlap = std::min(b, x[d]) - std::max(a, g.left(d));
                if (overlap > 0.0) mass[d] += val * overlap;
            }
        a = std::max(a, b);
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = mass[k] / g.length(k);
    // Averaging across a split cell can break monotonicity by rounding only.
    for (std::size_t k = 1; k < n; ++k) out[k] = std::min(out[k], out[k - 1]);
    return GridFunction(g, std::move(out));
}

std::vector<double> running_integral(const GridFunction& f) {
    const Grid& g = f.grid();
    std::vector<double> F(f.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] > 0.0) acc += f[k] * g.length(k);
        F[k] = acc;
    }
    return F;
}

GridFunction resample(const GridFunction& f, const Grid& finer) {
    const Grid& g = f.grid();
    std::vector<double> v(finer.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f[g.locate(0.5 * (finer.left(k) + finer.right(k)))];
    return GridFunction(finer, std::move(v));
}

std::vector<double> rearrangement_cuts(const GridFunction& f) {
    const Grid& g = f.grid();
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    std::vector<double> cuts;
    double pos = 0.0;
    for (std::size_t k : order) {
        pos += g.length(k);
        if (pos < 1.0 - 1e-12) cuts.push_back(pos);
    }
    return cuts;
}

std::pair<GridFunction, GridFunction> exact_rearrangement(const GridFunction& f) {
    GridFunction f2 = resample(f, f.grid().with_breakpoints(rearrangement_cuts(f)));
    return {f2, rearrange(f2)};
}

GridFunction double_star(const GridFunction& f) {
    GridFunction fs = rearrange(f);
    const Grid& g = fs.grid();
    std::vector<double> out(fs.size());
    double F = 0.0;  // integral of f* over (0, left(k))
    for (std::size_t k = 0; k < fs.size(); ++k) {
        double v = fs[k];
        double a = g.left(k), b = g.right(k);
        if (k == 0 || std::isinf(v) || std::isinf(F)) {
            out[k] = k == 0 ? v : (std::isinf(F) || std::isinf(v) ? kInf : v);
        } else {
            double c = std::max(F - v * a, 0.0);
            out[k] = (c * std::log(b / a) + v * (b - a)) / (b - a);
        }
        if (v > 0.0) F += v * g.length(k);
    }
    return GridFunction(g, std::move(out));
}

GridFunction dilate(const GridFunction& f, double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("dilation factor must be positive");
    const Grid& g = f.grid();
    std::size_t n = f.size();
    std::vector<double> mass(n, 0.0);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double lo = lambda * g.left(j);
        double hi = std::min(lambda * g.right(j), 1.0);
        if (lo >= 1.0) break;
        if (f[j] == 0.0) continue;
        while (c < n && g.right(c) <= lo) ++c;
        for (std::size_t d = c; d < n && g.left(d) < hi; ++d) {
            double overlap = std::min(hi, g.right(d)) - std::max(lo, g.left(d));
            if (overlap > 0.0) mass[d] += f[j] * overlap;
        }
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = mass[k] / g.length(k);
    return GridFunction(g, std::move(out));
}

double pairing(const GridFunction& f, const GridFunction& g) {
    if (!f.grid().same(g.grid())) throw GridError("pairing needs functions on the same grid");
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] > 0.0 && g[k] > 0.0) s += f[k] * g[k] * f.grid().length(k);
    return s;
}

GridFunction cell_average(const Grid& grid, const std::function<double(double)>& fn) {
    const QuadRule& q = default_quad();
    std::vector<double> out(grid.size());
    out[0] = q.sentinel(fn, grid.t_min()) / grid.t_min();
    for (std::size_t k = 1; k < grid.size(); ++k)
        out[k] = q.cell(fn, grid.left(k), grid.right(k)) / grid.length(k);
    return GridFunction(grid, std::move(out));
}

GridFunction indicator(const Grid& grid, double a, double b) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double overlap = std::min(b, grid.right(k)) - std::max(a, grid.left(k));
        out[k] = overlap > 0.0 ? std::min(overlap / grid.length(k), 1.0) : 0.0;
    }
    return GridFunction(grid, std::move(out));
}

GridFunction power_function(const Grid& grid, double theta, double b) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double hi = std::min(b, grid.right(k));
        out[k] = power_integral(grid.left(k), hi, theta) / grid.length(k);
    }
    return GridFunction(grid, std::move(out));
}

GridFunction power_log_function(const Grid& grid, double theta, double gamma) {
    if (theta == 1.0) {
        // int_a^b s^{-1} log^gamma(2/s) ds in closed form
        if (!(gamma < -1.0)) throw ParameterError("s^{-1} log^gamma(2/s) needs gamma < -1");
        auto prim = [&](double s) { return s == 0.0 ? 0.0 : std::pow(std::log(2.0 / s), gamma + 1.0) / (gamma + 1.0); };
        std::vector<double> out(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            out[k] = (prim(grid.left(k)) - prim(grid.right(k))) / grid.length(k);
        return GridFunction(grid, std::move(out));
    }
    return cell_average(grid, [=](double s) { return std::pow(s, -theta) * std::pow(std::log(2.0 / s), gamma); });
}

GridFunction random_step(const Grid& grid, Rng& rng) {
    std::size_t n = grid.size();
    int pieces = 2 + static_cast<int>(rng.bits() % 10);
    std::vector<std::size_t> cuts;
    for (int i = 0; i < pieces - 1; ++i) cuts.push_back(1 + rng.bits() % (n - 1));
    cuts.push_back(n);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out(n);
    std::size_t start = 0;
    for (std::size_t c : cuts) {
        double val = rng.uniform() < 0.15 ? 0.0 : std::exp(rng.uniform(-2.0, 2.0));
        for (std::size_t k = start; k < c; ++k) out[k] = val;
        start = c;
    }
    if (rng.uniform() < 0.4) {
        GridFunction p = power_function(grid, rng.uniform(0.0, 0.6));
        for (std::size_t k = 0; k < n; ++k) out[k] *= p[k];
    }
    return GridFunction(grid, std::move(out));
}

GridFunction random_nonincreasing(const Grid& grid, Rng& rng) {
    std::size_t n = grid.size();
    int pieces = 1 + static_cast<int>(rng.bits() % 12);
    std::vector<std::size_t> cuts;
    for (int i = 0; i < pieces - 1; ++i) cuts.push_back(1 + rng.bits() % (n - 1));
    cuts.push_back(n);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> levels;
    for (std::size_t i = 0; i < cuts.size(); ++i) levels.push_back(rng.exponential());
    std::sort(levels.begin(), levels.end(), std::greater<>());
    std::vector<double> out(n);
    std::size_t start = 0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t k = start; k < cuts[i]; ++k) out[k] = levels[i];
        start = cuts[i];
    }
    if (rng.uniform() < 0.5) {
        GridFunction p = power_function(grid, rng.uniform(0.0, 0.7));
        for (std::size_t k = 0; k < n; ++k) out[k] *= p[k];
    }
    return GridFunction(grid, std::move(out));
}

}  // namespace rsk

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rsk {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Breakpoints x_0 < x_1 < ... < x_{N-1} = 1. Cell 0 is the sentinel (0, x_0),
// cell k >= 1 is (x_{k-1}, x_k).
class Grid {
public:
    static Grid geometric(int K, double t_min);
    static Grid from_breakpoints(std::vector<double> points);

    Grid refined() const;
    Grid with_breakpoints(const std::vector<double>& extra) const;

    std::size_t size() const { return d_->x.size(); }
    double left(std::size_t k) const { return k == 0 ? 0.0 : d_->x[k - 1]; }
    double right(std::size_t k) const { return d_->x[k]; }
    double length(std::size_t k) const { return d_->len[k]; }
    const std::vector<double>& breakpoints() const { return d_->x; }
    int K() const { return d_->K; }
    double t_min() const { return d_->x.front(); }
    std::uint64_t id() const { return d_->id; }

    // Index of the cell containing s (cells are half-open on the left).
    std::size_t locate(double s) const;
    bool same(const Grid& other) const;

private:
    struct Data {
        std::vector<double> x;
        std::vector<double> len;
        int K = 0;
        std::uint64_t id = 0;
    };
    explicit Grid(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static Grid build(std::vector<double> x, int K);
    std::shared_ptr<const Data> d_;
};

// Grid defaults, with RSK_GRID_K / RSK_TMIN overrides read by default_grid().
struct GridConfig {
    int K = 16;
    double t_min = 0x1p-40;
};
GridConfig grid_config_from_env();
Grid default_grid();

class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values);
    static GridFunction constant(const Grid& grid, double c);
    static GridFunction zero(const Grid& grid) { return constant(grid, 0.0); }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t k) const { return v_[k]; }

    double integral() const;
    double sup() const;
    bool nonincreasing() const;

    GridFunction operator+(const GridFunction& o) const;
    GridFunction scaled(double c) const;

    nlohmann::json to_json() const;
    static GridFunction from_json(const nlohmann::json& j);

private:
    Grid grid_;
    std::vector<double> v_;
};

GridFunction rearrange(const GridFunction& f);
GridFunction double_star(const GridFunction& f);

// rearrange() is the cell-average projection of f* onto the grid of f. The
// exact f* is a step function whose jumps sit at the cumulative lengths of
// the sorted values; adding those points as breakpoints makes it exact.
std::vector<double> rearrangement_cuts(const GridFunction& f);
// f on a finer grid that contains every breakpoint of f's grid.
GridFunction resample(const GridFunction& f, const Grid& finer);
// f and its exact f* on the grid refined by rearrangement_cuts(f).
std::pair<GridFunction, GridFunction> exact_rearrangement(const GridFunction& f);
GridFunction dilate(const GridFunction& f, double lambda);
double pairing(const GridFunction& f, const GridFunction& g);

// Running integrals F(x_k) = int_0^{x_k} f, one entry per breakpoint.
std::vector<double> running_integral(const GridFunction& f);

// Cell averages of a pointwise function; exact for the closed forms below.
GridFunction cell_average(const Grid& grid, const std::function<double(double)>& fn);
GridFunction indicator(const Grid& grid, double a, double b);
inline GridFunction indicator(const Grid& grid, double b) { return indicator(grid, 0.0, b); }
// s^{-theta} restricted to (0, b).
GridFunction power_function(const Grid& grid, double theta, double b = 1.0);
// s^{-theta} log^gamma(2/s).
GridFunction power_log_function(const Grid& grid, double theta, double gamma);

// Portable uniform variates: the standard distributions are implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double exponential() { return -std::log1p(-uniform()); }
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

GridFunction random_step(const Grid& grid, Rng& rng);
GridFunction random_nonincreasing(const Grid& grid, Rng& rng);

}  // namespace rsk

#pragma once

#include <functional>
#include <vector>

namespace rsk {

// Integrals over one grid cell. A cell (a, b) is mapped to s = b e^{-l},
// l in [0, log(b/a)], which keeps full relative precision next to b; the
// sentinel cell (0, b) is the same map with l in [0, inf).
struct QuadRule {
    double eps = 1e-13;

    double cell(const std::function<double(double)>& f, double a, double b,
                const std::vector<double>& splits = {}) const;
    double sentinel(const std::function<double(double)>& f, double b) const;
    // Integrals in the variable l directly; h already carries the Jacobian.
    double interval(const std::function<double(double)>& h, double lo, double hi,
                    const std::vector<double>& splits = {}) const;
    double half_line(const std::function<double(double)>& h) const;
    // Integral over [a, inf) of an integrand decaying at infinity.
    double tail(const std::function<double(double)>& f, double a) const;
};

const QuadRule& default_quad();

}  // namespace rsk

#include "rsk/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rsk {

namespace bq = boost::math::quadrature;

double QuadRule::interval(const std::function<double(double)>& h, double lo, double hi,
                          const std::vector<double>& splits) const {
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts;
    for (double p : splits)
        if (p > lo && p < hi) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(hi);
    // Each piece is mapped onto [0, 1]: the adaptive routine compares an
    // unscaled error estimate with a scaled tolerance, so short intervals
    // would otherwise always be bisected to the maximum depth.
    double total = 0.0, a = lo;
    for (double c : cuts) {
        double w = c - a;
        auto u = [&](double t) { return h(a + w * t) * w; };
        total += bq::gauss_kronrod<double, 15>::integrate(u, 0.0, 1.0, 10, eps);
        a = c;
    }
    return total;
}

double QuadRule::half_line(const std::function<double(double)>& h) const {
    double total = 0.0, lo = 0.0;
    for (double hi = 1.0; hi <= 4096.0; hi *= 2.0) {
        double piece = bq::gauss_kronrod<double, 15>::integrate(h, lo, hi, 10, eps);
        total += piece;
        lo = hi;
        if (std::abs(piece) <= 1e-17 * std::abs(total)) break;
    }
    return total;
}

double QuadRule::cell(const std::function<double(double)>& f, double a, double b,
                      const std::vector<double>& splits) const {
    if (!(b > a)) return 0.0;
    std::vector<double> lsplits;
    for (double p : splits)
        if (p > a && p < b) lsplits.push_back(std::log(b / p));
    auto h = [&](double l) {
        double s = b * std::exp(-l);
        return f(s) * s;
    };
    return interval(h, 0.0, std::log(b / a), lsplits);
}

double QuadRule::sentinel(const std::function<double(double)>& f, double b) const {
    auto h = [&](double l) {
        double s = b * std::exp(-l);
        if (s < std::numeric_limits<double>::min()) return 0.0;
        return f(s) * s;
    };
    return half_line(h);
}

double QuadRule::tail(const std::function<double(double)>& f, double a) const {
    return bq::gauss_kronrod<double, 31>::integrate(f, a, std::numeric_limits<double>::infinity(),
                                                    15, eps);
}

const QuadRule& default_quad() {
    static const QuadRule q{};
    return q;
}

}  // namespace rsk

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsk/gridfn.hpp"
#include "rsk/profiles.hpp"

namespace rsk {

// Operator output: exact cell averages plus exact values at the breakpoints.
struct OpResult {
    GridFunction cells;
    std::vector<double> nodes;  // value at breakpoint x_k
    double at_zero = 0.0;       // limit as t -> 0+, possibly +inf
};

OpResult eval_H_m(const Profile& I, int m, const GridFunction& f);
OpResult eval_R_m(const Profile& I, int m, const GridFunction& f);
OpResult eval_P_phi(const PhiFunction& phi, int m, const GridFunction& f);

inline GridFunction apply_H_m(const Profile& I, int m, const GridFunction& f) {
    return eval_H_m(I, m, f).cells;
}
inline GridFunction apply_R_m(const Profile& I, int m, const GridFunction& f) {
    return eval_R_m(I, m, f).cells;
}
inline GridFunction apply_H(const Profile& I, const GridFunction& f) { return apply_H_m(I, 1, f); }
inline GridFunction apply_R(const Profile& I, const GridFunction& f) { return apply_R_m(I, 1, f); }
inline GridFunction apply_P_phi(const PhiFunction& phi, int m, const GridFunction& f) {
    return eval_P_phi(phi, m, f).cells;
}

// m-fold application of H by exact antiderivatives of piecewise polynomials in
// the local coordinate J(t, x_k). Independent of the kernel sums in eval_H_m.
OpResult compose_H(const Profile& I, int m, const GridFunction& f);

// Open set E = {R^m f* < G^m f} as maximal grid intervals (c_k, d_k).
struct LevelDecomposition {
    std::vector<std::pair<double, double>> intervals;
    std::vector<double> plateau;  // R^m f*(d_k)
    // Breakpoint indices of c_k (or -1 for c_k = 0) and d_k.
    std::vector<std::pair<long, long>> index;

    // Rebuilds G from R^m f* (nodes and cell averages) and the decomposition.
    OpResult reconstruct(const OpResult& r) const;
};

struct GResult {
    OpResult g;
    OpResult r;  // R^m f* that G was built from
    LevelDecomposition level;
};

GResult apply_G_m(const Profile& I, int m, const GridFunction& f);

double H_m_indicator_closed_form(const PhiFunction& phi, int m, double b, double t);
double P_m_indicator_closed_form(const PhiFunction& phi, int m, double b, double t);

struct KernelOp {
    enum class Kind { H, R, G, P };
    Kind kind = Kind::H;
    Profile profile = Profile::linear();
    int m = 1;
    std::optional<PhiFunction> phi;

    OpResult eval(const GridFunction& f) const;
    GridFunction apply(const GridFunction& f) const { return eval(f).cells; }
    std::string name() const;

    nlohmann::json to_json() const;
    static KernelOp from_json(const nlohmann::json& j);
};

}  // namespace rsk

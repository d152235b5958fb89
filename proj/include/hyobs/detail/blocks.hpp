#pragma once

#include <cmath>

#include "hyobs/linalg.hpp"

// Block matrices shared by the analysis and the design conditions. T is
// either Matrix (evaluation) or lmi::AffineExpr (constraint assembly).
namespace hyobs::detail {

// [[He(P1A − YC) + δP1, Y + μ(P2CA − XC)ᵀ], [•, μHe(X) − δP2]]
//
// With Y = P1L and X = P2(CL + H) this is the flow matrix M(μ).
template <typename T>
T flow_block(const Matrix& a, const Matrix& c, const T& p1, const T& p2, const T& y, const T& x, double delta,
             double mu) {
    const Matrix ca = c * a;
    T tl = he(p1 * a - y * c) + delta * p1;
    T tr = y + mu * transposed(p2 * ca - x * c);
    T br = mu * he(x) - delta * p2;
    return symmetric_blocks(tl, tr, br);
}

// [[−P1 + QJ, P1 − CᵀZᵀ], [•, −e^{δT1}P1]]
//
// With Z = P1F and QJ = 0 this is the jump condition of the analysis.
template <typename T>
T jump_block(const Matrix& c, const T& p1, const T& z, const Matrix& qj, double delta, double t1) {
    const Matrix ct = c.transpose();
    T tl = qj - p1;
    T tr = p1 - ct * transposed(z);
    T br = -std::exp(delta * t1) * p1;
    return symmetric_blocks(tl, tr, br);
}

}  // namespace hyobs::detail

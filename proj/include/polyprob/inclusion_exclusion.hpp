#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

/// Closed Heaviside step: H(0) = 1.
inline int heaviside(double x) { return x >= 0.0 ? 1 : 0; }

/// 1 iff x satisfies every half-space constraint.
inline int indicator(const HalfspaceSystem& sys, const Eigen::VectorXd& x)
{
    for (int j = 0; j < sys.n; ++j)
        if (sys.f(j, x) < 0.0) return 0;
    return 1;
}

namespace detail {

/// Bit j set iff f_j(x) < 0; a product term over J survives iff J is
/// contained in this mask (each factor H(f_j) - 1 is -1 there, 0 otherwise).
inline Mask negative_mask(const HalfspaceSystem& sys, const Eigen::VectorXd& x)
{
    Mask neg = 0;
    for (int j = 0; j < sys.n; ++j)
        if (sys.f(j, x) < 0.0) neg |= Mask{1} << j;
    return neg;
}

} // namespace detail

/// sum over J in F of prod_{j in J} (H(f_j(x)) - 1); equals indicator(sys, x)
/// whenever F is the face set of a system near sys.
inline long ie_sum(const HalfspaceSystem& sys, const FaceComplex& fc, const Eigen::VectorXd& x)
{
    const Mask neg = detail::negative_mask(sys, x);
    long sum = 0;
    for (const Mask J : fc.members())
        if ((J & ~neg) == 0u) sum += (subset_size(J) & 1) ? -1 : 1;
    return sum;
}

/// Same alternating sum restricted to the faces containing J, with the factors
/// over j in J struck out; for x on V(J) it reproduces prod_{j not in J} H(f_j(x)).
/// The point must satisfy the J-equalities to within res_tol.
inline long face_ie_sum(const HalfspaceSystem& sys, const FaceComplex& fc, Mask J,
                        const Eigen::VectorXd& x, double res_tol = 1e-8)
{
    if (!fc.contains(J)) fail(ErrorCode::IndexOutOfRange, "subset " + subset_str(J) + " is not a face");
    for (int j : subset_indices(J))
        if (std::abs(sys.f(j, x)) > res_tol)
            fail(ErrorCode::NotOnHyperplane,
                 "point misses hyperplane " + std::to_string(j) + " by " + std::to_string(sys.f(j, x)));
    const Mask neg = detail::negative_mask(sys, x);
    long sum = 0;
    for (const Mask F : fc.members()) {
        if ((F & J) != J) continue;
        const Mask extra = F & ~J;
        if ((extra & ~neg) == 0u) sum += (subset_size(extra) & 1) ? -1 : 1;
    }
    return sum;
}

} // namespace polyprob

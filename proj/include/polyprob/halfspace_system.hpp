#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "polyprob/errors.hpp"

namespace polyprob {

/// Finite intersection of closed half-spaces
///     P = { x in R^d : a_j . x + b_j >= 0, j = 0..n-1 },
/// with the inward normals a_j stored as the columns of a (d x n).
struct HalfspaceSystem {
    int d = 0;
    int n = 0;
    Eigen::MatrixXd a; // d x n
    Eigen::VectorXd b; // n

    /// f_j(x) = a_j . x + b_j
    double f(int j, const Eigen::VectorXd& x) const { return a.col(j).dot(x) + b(j); }

    Eigen::VectorXd residuals(const Eigen::VectorXd& x) const { return a.transpose() * x + b; }
};

/// Validating constructor: shapes agree, entries finite, no zero normal.
inline HalfspaceSystem build_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
{
    const int d = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (d < 1 || n < 1)
        fail(ErrorCode::DimensionMismatch, "need d >= 1 and n >= 1, got d=" + std::to_string(d) +
                                               " n=" + std::to_string(n));
    if (b.size() != n)
        fail(ErrorCode::DimensionMismatch, "offset vector has length " + std::to_string(b.size()) +
                                               ", expected n=" + std::to_string(n));
    if (!a.allFinite() || !b.allFinite())
        fail(ErrorCode::NonFiniteEntry, "system contains a non-finite entry");
    for (int j = 0; j < n; ++j)
        if (a.col(j).cwiseAbs().maxCoeff() == 0.0)
            fail(ErrorCode::ZeroNormal, "normal column " + std::to_string(j) + " is zero");

    HalfspaceSystem sys;
    sys.d = d;
    sys.n = n;
    sys.a = a;
    sys.b = b;
    return sys;
}

} // namespace polyprob

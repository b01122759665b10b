#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "polyprob/errors.hpp"

namespace polyprob {

/// Decide whether { y in R^p : G y >= h } is nonempty.
///
/// Phase-one simplex on the standard form
///     G y+ - G y- - s = h,   y+, y-, s >= 0,
/// with rows flipped so the right-hand side is nonnegative and one artificial
/// variable per row; minimizes the artificial sum under Bland's rule (entering
/// column = smallest index with negative reduced cost, leaving row = smallest
/// ratio with ties broken by smallest basic index), so no cycling.  Feasible
/// iff the optimum is <= tol (absolute, caller scales).
inline bool lp_feasible(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, double tol = 1e-9)
{
    const int m = static_cast<int>(G.rows());
    const int p = static_cast<int>(G.cols());
    if (h.size() != m) fail(ErrorCode::DimensionMismatch, "lp_feasible: G rows != h length");
    if (m == 0) return true;

    const int nstruct = 2 * p + m;   // y+, y-, slack
    const int ncols = nstruct + m;   // + artificials
    Eigen::MatrixXd T(m, ncols + 1); // tableau, last column = rhs
    T.setZero();
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        const double sign = h(i) < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < p; ++j) {
            T(i, j) = sign * G(i, j);
            T(i, p + j) = -sign * G(i, j);
        }
        T(i, 2 * p + i) = -sign;     // surplus
        T(i, nstruct + i) = 1.0;     // artificial
        T(i, ncols) = sign * h(i);   // >= 0
        basis[i] = nstruct + i;
    }

    // Reduced costs for min sum(artificials); artificial columns start basic
    // with reduced cost zero.
    Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(ncols + 1);
    for (int j = 0; j <= ncols; ++j) {
        if (j >= nstruct && j < ncols) continue;
        z(j) = -T.col(j).sum();
    }

    const double eps_enter = 1e-10;
    const double eps_pivot = 1e-11;
    const long max_iter = 500L * (m + ncols) + 1000L;

    for (long iter = 0;; ++iter) {
        if (iter > max_iter)
            fail(ErrorCode::LpNumericalFailure, "phase-one simplex exceeded iteration cap");

        int enter = -1;
        for (int j = 0; j < ncols; ++j) {
            if (z(j) < -eps_enter) { enter = j; break; }
        }
        if (enter < 0) break; // optimal

        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (T(i, enter) <= eps_pivot) continue;
            const double ratio = T(i, ncols) / T(i, enter);
            if (leave < 0 || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0)
            fail(ErrorCode::LpNumericalFailure, "phase-one objective unbounded (inconsistent tableau)");

        T.row(leave) /= T(leave, enter);
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double factor = T(i, enter);
            if (factor != 0.0) T.row(i) -= factor * T.row(leave);
        }
        const double zf = z(enter);
        if (zf != 0.0) z -= zf * T.row(leave);
        basis[leave] = enter;
    }

    double artificial_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= nstruct) artificial_sum += T(i, ncols);
    return artificial_sum <= tol;
}

} // namespace polyprob

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/halfspace_system.hpp"

namespace polyprob {

namespace detail {

template <typename F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol)
{
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 30);
}

/// Nested 1-D passes over x_k, innermost first in memory order x_0..x_{d-1}.
/// Each constraint is turned into an interval bound at the deepest level where
/// it still has a coefficient, so every 1-D integrand is continuous and the
/// Simpson error estimate stays trustworthy; the integrand is still exactly
/// the Gaussian density times the polyhedron indicator.
class NestedGaussian {
public:
    NestedGaussian(const HalfspaceSystem& sys, double tol) : sys_(sys), x_(sys.d)
    {
        resolve_.resize(sys.d);
        for (int j = 0; j < sys.n; ++j) {
            int last = -1;
            for (int i = 0; i < sys.d; ++i)
                if (sys.a(i, j) != 0.0) last = i;
            resolve_[last].push_back(j);
        }
        tol_.resize(sys.d);
        double t = 0.5 * tol;
        for (int k = 0; k < sys.d; ++k) {
            tol_[k] = t;
            t /= 50.0;
        }
    }

    double run() { return level(0); }

private:
    double level(int k)
    {
        double lo = -8.0, hi = 8.0;
        for (int j : resolve_[k]) {
            double c = sys_.b(j);
            for (int i = 0; i < k; ++i) c += sys_.a(i, j) * x_(i);
            const double w = sys_.a(k, j);
            if (w > 0.0)
                lo = std::max(lo, -c / w);
            else
                hi = std::min(hi, -c / w);
        }
        if (!(lo < hi)) return 0.0;
        constexpr double inv_sqrt_2pi = 0.3989422804014326779;
        auto f = [&](double t) {
            x_(k) = t;
            const double phi = inv_sqrt_2pi * std::exp(-0.5 * t * t);
            return k + 1 == sys_.d ? phi : phi * level(k + 1);
        };
        return adaptive_simpson(f, lo, hi, tol_[k]);
    }

    const HalfspaceSystem& sys_;
    Eigen::VectorXd x_;
    std::vector<std::vector<int>> resolve_;
    std::vector<double> tol_;
};

} // namespace detail

/// Deterministic quadrature oracle: nested adaptive Simpson integration of the
/// normal density times the polyhedron indicator over [-8, 8]^d.  Intended as
/// an independent cross-check for d <= 3.
inline double quadrature_probability(const HalfspaceSystem& sys, double abs_tol = 1e-7)
{
    if (sys.d > 3) fail(ErrorCode::DimensionTooLarge, "quadrature oracle supports d <= 3");
    if (!(abs_tol > 0.0)) fail(ErrorCode::InvalidConfig, "abs_tol must be positive");
    detail::NestedGaussian q(sys, abs_tol);
    return q.run();
}

} // namespace polyprob

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/inclusion_exclusion.hpp"
#include "polyprob/rng.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_samples = 0;
    std::uint64_t seed = 0;
};

/// Plain Monte Carlo estimate of the Gaussian content of the polyhedron.
/// Sample s consumes counters s*d .. s*d+d-1, so the estimate is independent
/// of any batching.
inline McEstimate mc_probability(const HalfspaceSystem& sys, long long n_samples, std::uint64_t seed)
{
    if (n_samples < 1) fail(ErrorCode::InvalidConfig, "need at least one sample");
    const CounterRng rng{seed};
    Eigen::VectorXd x(sys.d);
    long long hits = 0;
    for (long long s = 0; s < n_samples; ++s) {
        const std::uint64_t base = static_cast<std::uint64_t>(s) * sys.d;
        for (int i = 0; i < sys.d; ++i) x(i) = rng.normal(base + i);
        hits += indicator(sys, x);
    }
    McEstimate est;
    est.mean = static_cast<double>(hits) / static_cast<double>(n_samples);
    est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n_samples));
    est.n_samples = n_samples;
    est.seed = seed;
    return est;
}

/// Monte Carlo estimate of the unnormalized face integral
///     g^J = det(alpha_J)^{-1/2} int_{V(J)} e^{-|x|^2/2} prod_{j not in J} H(f_j) d mu.
/// Writing V(J) = x0 + Q y with the min-norm point x0 orthogonal to the
/// tangent basis Q splits |x|^2 = |x0|^2 + |y|^2, leaving an indicator
/// probability under y ~ N(0, I):
///     (2 pi)^{(d-|J|)/2} e^{-|x0|^2/2} det(alpha_J)^{-1/2} Pr[all f_j(x0+Qy) >= 0].
/// For |J| = d the estimate is deterministic with zero variance.
inline McEstimate mc_face_integral(const HalfspaceSystem& sys, const FaceComplex& fc, Mask J,
                                   long long n_samples, std::uint64_t seed)
{
    if (!fc.contains(J)) fail(ErrorCode::IndexOutOfRange, "subset " + subset_str(J) + " is not a face");
    if (n_samples < 1) fail(ErrorCode::InvalidConfig, "need at least one sample");
    const int k = subset_size(J);
    const AffineSubspace sub = face_subspace(sys, J);
    if (!sub.consistent || sub.rank != k)
        fail(ErrorCode::SingularGram, "face " + subset_str(J) + " has dependent normals");
    const Eigen::VectorXd x0 = min_norm_point(sys, J);

    double logdet = 0.0;
    if (k > 0) {
        Eigen::MatrixXd A(sys.d, k);
        int c = 0;
        for (int j : subset_indices(J)) A.col(c++) = sys.a.col(j);
        Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(A.transpose() * A));
        if (llt.info() != Eigen::Success)
            fail(ErrorCode::SingularGram, "Gram block " + subset_str(J) + " is not positive definite");
        for (int i = 0; i < k; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    }
    const int m = sys.d - k;
    const double factor = std::pow(2.0 * std::numbers::pi, 0.5 * m) *
                          std::exp(-0.5 * x0.squaredNorm() - 0.5 * logdet);

    const auto rest = [&] {
        std::vector<int> r;
        for (int j = 0; j < sys.n; ++j)
            if (!subset_contains(J, j)) r.push_back(j);
        return r;
    }();

    const CounterRng rng{seed};
    Eigen::VectorXd y(m), x(sys.d);
    long long hits = 0;
    for (long long s = 0; s < n_samples; ++s) {
        const std::uint64_t base = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(std::max(m, 1));
        for (int i = 0; i < m; ++i) y(i) = rng.normal(base + i);
        x = x0;
        if (m > 0) x += sub.tangent * y;
        bool inside = true;
        for (int j : rest)
            if (sys.f(j, x) < 0.0) { inside = false; break; }
        hits += inside ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    McEstimate est;
    est.mean = factor * p;
    est.std_error = factor * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    est.n_samples = n_samples;
    est.seed = seed;
    return est;
}

} // namespace polyprob

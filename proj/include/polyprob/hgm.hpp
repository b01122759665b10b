#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/gram.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/linprog.hpp"
#include "polyprob/pfaffian.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

/// Affine parameter homotopy gamma(t) = ((1-t) a0 + t a1, (1-t) b0 + t b1),
/// t in [0,1], from a start with known derivative vector to the target system.
struct Path {
    enum class Kind { Bounded, Cone };
    Kind kind = Kind::Bounded;
    Eigen::MatrixXd a0, a1;
    Eigen::VectorXd b0, b1;

    HalfspaceSystem at(double t) const
    {
        HalfspaceSystem s;
        s.d = static_cast<int>(a0.rows());
        s.n = static_cast<int>(a0.cols());
        s.a = (1.0 - t) * a0 + t * a1;
        s.b = (1.0 - t) * b0 + t * b1;
        return s;
    }

    Eigen::MatrixXd adot() const { return a1 - a0; }
    Eigen::VectorXd bdot() const { return b1 - b0; }

    bool stationary() const
    {
        return (a1 - a0).cwiseAbs().maxCoeff() == 0.0 && (b1 - b0).cwiseAbs().maxCoeff() == 0.0;
    }
};

struct SolverConfig {
    enum class Scheme { AdaptiveRK45, FixedRK4 };
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double h_init = 1e-2;  // FixedRK4 uses round(1/h_init) uniform steps
    double h_min = 1e-12;
    double h_max = 1.0;
    long max_steps = 1000000;
    double cond_limit = 1e12; // Gram condition estimate above this rejects the step
    Scheme scheme = Scheme::AdaptiveRK45;
};

inline void validate_config(const SolverConfig& cfg)
{
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol >= 0.0))
        fail(ErrorCode::InvalidConfig, "tolerances must be positive");
    if (!(cfg.h_min > 0.0) || !(cfg.h_min <= cfg.h_init) || !(cfg.h_init <= cfg.h_max) || cfg.h_max > 1.0)
        fail(ErrorCode::InvalidConfig, "need 0 < h_min <= h_init <= h_max <= 1");
    if (cfg.max_steps < 1) fail(ErrorCode::InvalidConfig, "max_steps must be positive");
}

struct HgmResult {
    double probability = 0.0;
    GVector g_final;
    long steps = 0;
    long rejections = 0;
    double min_gram_condition_margin = 0.0; // min over stages of cond_limit / max cond estimate
    double wall_time_s = 0.0;
    std::vector<std::string> flags;
};

/// True iff the recession cone { y : a_j . y >= 0 for all j } is {0}; probed by
/// feasibility of { recession y : y_i = +-1, |y_k| <= 1 } over the 2d axis
/// slices (any nonzero recession direction scales into one of them).
inline bool recession_cone_trivial(const HalfspaceSystem& sys, double tol = 1e-9)
{
    if (sys.d == 1) {
        bool pos = true, neg = true;
        for (int j = 0; j < sys.n; ++j) {
            if (sys.a(0, j) < 0.0) pos = false;
            if (sys.a(0, j) > 0.0) neg = false;
        }
        return !pos && !neg;
    }
    for (int i = 0; i < sys.d; ++i) {
        for (const double sigma : {1.0, -1.0}) {
            const int p = sys.d - 1;
            Eigen::MatrixXd G(sys.n + 2 * p, p);
            Eigen::VectorXd h(sys.n + 2 * p);
            for (int j = 0; j < sys.n; ++j) {
                int c = 0;
                for (int k = 0; k < sys.d; ++k)
                    if (k != i) G(j, c++) = sys.a(k, j);
                h(j) = -sigma * sys.a(i, j);
            }
            G.bottomRows(2 * p).setZero();
            for (int k = 0; k < p; ++k) {
                G(sys.n + 2 * k, k) = 1.0;
                h(sys.n + 2 * k) = -1.0;
                G(sys.n + 2 * k + 1, k) = -1.0;
                h(sys.n + 2 * k + 1) = -1.0;
            }
            if (lp_feasible(G, h, tol)) return false;
        }
    }
    return true;
}

/// Homotopy for bounded polyhedra in general position: keep a fixed, grow the
/// offsets from 0 to b.  At t=0 the polyhedron is the single point {0} and the
/// derivative vector is supported on the vertex faces.
inline Path path_bounded(const HalfspaceSystem& sys, const FaceComplex& fc)
{
    if (!recession_cone_trivial(sys))
        fail(ErrorCode::UnboundedPolyhedron, "bounded homotopy needs a trivial recession cone");
    const GeneralPositionReport rep = general_position_check(sys, fc);
    if (!rep.pass) fail(ErrorCode::GeneralPositionFailure, rep.summary());
    Path p;
    p.kind = Path::Kind::Bounded;
    p.a0 = p.a1 = sys.a;
    p.b0 = Eigen::VectorXd::Zero(sys.n);
    p.b1 = sys.b;
    return p;
}

/// Start vector for the bounded homotopy: at (a, 0) only the full-dimensional
/// faces contribute, with value 1/sqrt(det alpha_J).
inline GVector initial_bounded(const HalfspaceSystem& sys, const FaceComplex& fc, const GramCache& cache)
{
    GVector g;
    g.values = Eigen::VectorXd::Zero(fc.size());
    for (int m = 0; m < fc.size(); ++m)
        if (subset_size(fc.member(m)) == sys.d) g.values(m) = 1.0 / std::sqrt(cache.det(m));
    return g;
}

struct ConeSetup {
    HalfspaceSystem rotated;  // upper-triangular normals, positive diagonal
    Eigen::MatrixXd rotation; // orthogonal R with rotated.a = R * sys.a
    Path path;
};

/// Homotopy for simplicial cones (n = d): rotate the normals upper triangular
/// (probability is rotation invariant), then slide from the decoupled diagonal
/// system to the target.  The diagonal is constant along the way, so every
/// Gram block stays nonsingular for all t.
inline ConeSetup path_cone(const HalfspaceSystem& sys)
{
    if (sys.n != sys.d)
        fail(ErrorCode::NotSquare, "cone homotopy needs n = d, got n=" + std::to_string(sys.n) +
                                       " d=" + std::to_string(sys.d));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sys.a);
    Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    const double scale = R.cwiseAbs().maxCoeff();
    for (int i = 0; i < sys.d; ++i)
        if (std::abs(R(i, i)) <= 1e-12 * scale)
            fail(ErrorCode::SingularNormals, "cone normals are linearly dependent");
    Eigen::MatrixXd rot = qr.householderQ().transpose();
    for (int i = 0; i < sys.d; ++i)
        if (R(i, i) < 0.0) {
            R.row(i) *= -1.0;
            rot.row(i) *= -1.0;
        }

    ConeSetup cs;
    cs.rotation = rot;
    cs.rotated.d = sys.d;
    cs.rotated.n = sys.n;
    cs.rotated.a = R;
    cs.rotated.b = sys.b;
    cs.path.kind = Path::Kind::Cone;
    cs.path.a0 = Eigen::MatrixXd(R.diagonal().asDiagonal());
    cs.path.a1 = R;
    cs.path.b0 = Eigen::VectorXd::Zero(sys.n);
    cs.path.b1 = sys.b;
    return cs;
}

/// Start vector for the cone homotopy at the decoupled diagonal system:
///     g^J = (pi/2)^((d-|J|)/2) / |prod_{j in J} a_jj|   for every J.
inline GVector initial_cone(const HalfspaceSystem& sys, const FaceComplex& fc)
{
    if (sys.n != sys.d) fail(ErrorCode::NotSquare, "initial_cone needs n = d");
    double offdiag = 0.0;
    for (int j = 0; j < sys.n; ++j)
        for (int i = j + 1; i < sys.d; ++i) offdiag = std::max(offdiag, std::abs(sys.a(i, j)));
    if (offdiag > 1e-10 * sys.a.cwiseAbs().maxCoeff())
        fail(ErrorCode::InvalidConfig, "initial_cone needs upper-triangular normals");
    for (int j = 0; j < sys.d; ++j)
        if (sys.a(j, j) == 0.0) fail(ErrorCode::ZeroDiagonal, "zero diagonal at " + std::to_string(j));

    GVector g;
    g.values.resize(fc.size());
    for (int m = 0; m < fc.size(); ++m) {
        const Mask J = fc.member(m);
        double dprod = 1.0;
        for (int j : subset_indices(J)) dprod *= sys.a(j, j);
        const int codim = subset_size(J);
        g.values(m) = std::pow(std::numbers::pi / 2.0, 0.5 * (sys.d - codim)) / std::abs(dprod);
    }
    return g;
}

inline double probability_from_g(const GVector& g, int d)
{
    return g.values(0) / std::pow(2.0 * std::numbers::pi, 0.5 * d);
}

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_err[7] = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525,  -1.0 / 40};

} // namespace detail

/// Integrate dg/dt along the path from g0 at t=0 to t=1.  Adaptive embedded
/// RK45 with PI-free step control; steps are rejected when the embedded error
/// exceeds tolerance or any Gram block's condition estimate passes the limit.
/// A fixed-grid classic RK4 scheme is kept for order measurements and
/// regression tables.
inline HgmResult integrate(const Path& path, const FaceComplex& fc, const GVector& g0,
                           const SolverConfig& cfg = {})
{
    validate_config(cfg);
    if (g0.values.size() != fc.size())
        fail(ErrorCode::DimensionMismatch, "initial vector length != face count");

    const auto t_start = std::chrono::steady_clock::now();
    HgmResult res;
    res.min_gram_condition_margin = std::numeric_limits<double>::infinity();

    const int d = static_cast<int>(path.a0.rows());
    PfaffianOperator op(path.at(0.0), fc);
    const Eigen::MatrixXd adot = path.adot();
    const Eigen::VectorXd bdot = path.bdot();
    const bool amove = adot.cwiseAbs().maxCoeff() != 0.0;
    const Eigen::MatrixXd adot_arg = amove ? adot : Eigen::MatrixXd();

    Eigen::VectorXd g = g0.values;
    res.min_gram_condition_margin = cfg.cond_limit / op.max_gram_cond();

    auto finish = [&](Eigen::VectorXd gv) {
        res.g_final.values = std::move(gv);
        const double raw = probability_from_g(res.g_final, d);
        res.probability = raw;
        if (raw < 0.0 || raw > 1.0) {
            res.flags.push_back("probability_out_of_range");
            res.probability = std::min(1.0, std::max(0.0, raw));
        }
        res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return res;
    };

    if (path.stationary()) return finish(std::move(g));

    // stage evaluation; returns the Gram condition estimate at the stage point
    auto eval = [&](double tt, const Eigen::VectorXd& y, Eigen::VectorXd& k) -> double {
        op.update(path.at(tt));
        op.rhs(adot_arg, bdot, y, k);
        return op.max_gram_cond();
    };
    auto note_cond = [&](double cond) {
        res.min_gram_condition_margin = std::min(res.min_gram_condition_margin, cfg.cond_limit / cond);
    };

    if (cfg.scheme == SolverConfig::Scheme::FixedRK4) {
        const long N = std::max(1L, std::lround(1.0 / cfg.h_init));
        const double h = 1.0 / static_cast<double>(N);
        Eigen::VectorXd k1, k2, k3, k4;
        for (long i = 0; i < N; ++i) {
            const double t = static_cast<double>(i) * h;
            double cond = eval(t, g, k1);
            cond = std::max(cond, eval(t + 0.5 * h, g + (0.5 * h) * k1, k2));
            cond = std::max(cond, eval(t + 0.5 * h, g + (0.5 * h) * k2, k3));
            cond = std::max(cond, eval(t + h, g + h * k3, k4));
            note_cond(cond);
            if (cond > cfg.cond_limit)
                fail(ErrorCode::SingularGram, "Gram condition limit exceeded on the fixed grid");
            g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ++res.steps;
        }
        return finish(std::move(g));
    }

    using detail::dp_a;
    using detail::dp_c;
    using detail::dp_err;
    Eigen::VectorXd k[7], y(fc.size()), y5(fc.size()), err(fc.size());
    double t = 0.0;
    double h = std::min(cfg.h_init, 1.0);
    double cond_k1 = eval(0.0, g, k[0]);
    note_cond(cond_k1);

    while (t < 1.0 - 1e-14) {
        if (res.steps + res.rejections >= cfg.max_steps)
            fail(ErrorCode::MaxStepsExceeded, "integrator exceeded max_steps");
        const double hs = std::min(h, 1.0 - t);
        bool singular = false;
        double step_cond = cond_k1;
        try {
            for (int s = 1; s < 7; ++s) {
                y = g;
                for (int q = 0; q < s; ++q)
                    if (dp_a[s][q] != 0.0) y += (hs * dp_a[s][q]) * k[q];
                if (s == 6) y5 = y; // stage 7 sits on the 5th-order solution
                step_cond = std::max(step_cond, eval(t + dp_c[s] * hs, y, k[s]));
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularGram) throw;
            singular = true;
        }

        double err_norm = std::numeric_limits<double>::infinity();
        if (!singular) {
            err.setZero();
            for (int s = 0; s < 7; ++s)
                if (dp_err[s] != 0.0) err += (hs * dp_err[s]) * k[s];
            double acc = 0.0;
            for (int i = 0; i < err.size(); ++i) {
                const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(g(i)), std::abs(y5(i)));
                const double r = err(i) / sc;
                acc += r * r;
            }
            err_norm = std::sqrt(acc / static_cast<double>(err.size()));
            note_cond(step_cond);
        }

        const bool accept = !singular && err_norm <= 1.0 && step_cond <= cfg.cond_limit;
        if (accept) {
            t += hs;
            g = y5;
            k[0] = k[6]; // FSAL: stage 7 is the derivative at the new point
            cond_k1 = step_cond;
            ++res.steps;
        } else {
            ++res.rejections;
            if (hs <= cfg.h_min * (1.0 + 1e-12))
                fail(ErrorCode::StepUnderflow, "step size underflow at t=" + std::to_string(t));
        }

        double fac;
        if (singular || !std::isfinite(err_norm))
            fac = 0.3;
        else if (err_norm == 0.0)
            fac = 5.0;
        else
            fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
        if (!accept) fac = std::min(fac, 0.7);
        h = std::min(cfg.h_max, std::max(cfg.h_min, hs * fac));
    }
    return finish(std::move(g));
}

enum class Method { Auto, Bounded, Cone };

/// Full pipeline: face set, diagnostics, homotopy, start vector, integration.
/// Auto resolves to Cone for square independent systems and to Bounded
/// otherwise; a system fitting neither raises NoApplicableMethod.
inline HgmResult probability(const HalfspaceSystem& sys, Method method = Method::Auto,
                             const SolverConfig& cfg = {})
{
    validate_config(cfg);
    const auto t_start = std::chrono::steady_clock::now();
    auto with_time = [&](HgmResult res) {
        res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return res;
    };

    auto run_cone = [&]() {
        const ConeSetup cs = path_cone(sys);
        const FaceComplex fc = face_complex_cone(sys.d);
        const GVector g0 = initial_cone(cs.rotated, fc);
        HgmResult res = integrate(cs.path, fc, g0, cfg);
        if ((cs.rotation - Eigen::MatrixXd::Identity(sys.d, sys.d)).cwiseAbs().maxCoeff() > 1e-12)
            res.flags.push_back("cone_rotated");
        return res;
    };
    auto run_bounded = [&]() {
        const FaceComplex fc = face_complex_lp(sys);
        const Path path = path_bounded(sys, fc);
        const GramCache cache(sys, fc);
        const GVector g0 = initial_bounded(sys, fc, cache);
        return integrate(path, fc, g0, cfg);
    };

    switch (method) {
        case Method::Cone: return with_time(run_cone());
        case Method::Bounded: return with_time(run_bounded());
        case Method::Auto: break;
    }
    if (sys.n == sys.d) {
        try {
            return with_time(run_cone());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularNormals) throw;
            fail(ErrorCode::NoApplicableMethod,
                 std::string("square system with dependent normals: ") + e.what());
        }
    }
    try {
        return with_time(run_bounded());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnboundedPolyhedron || e.code() == ErrorCode::GeneralPositionFailure)
            fail(ErrorCode::NoApplicableMethod, std::string("no applicable homotopy: ") + e.what());
        throw;
    }
}

} // namespace polyprob

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/families.hpp"
#include "polyprob/hgm.hpp"
#include "polyprob/inclusion_exclusion.hpp"
#include "polyprob/monte_carlo.hpp"
#include "polyprob/pfaffian.hpp"
#include "polyprob/quadrature.hpp"
#include "polyprob/rng.hpp"

namespace polyprob {

/// Outcome of one verification suite; `worst` is the largest deviation seen in
/// the suite's own metric (exact identity suites count failures instead).
struct CheckResult {
    std::string name;
    bool pass = true;
    long cases = 0;
    long failures = 0;
    double worst = 0.0;
    std::string note;
};

inline std::string format_check_line(const CheckResult& r)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %s  cases=%-6ld failures=%-4ld worst=%.3g%s%s",
                  r.name.c_str(), r.pass ? "pass" : "FAIL", r.cases, r.failures, r.worst,
                  r.note.empty() ? "" : "  ", r.note.c_str());
    return buf;
}

/// Uniform coefficient noise in [-magnitude, magnitude], counter-based so the
/// perturbed system is a pure function of (sys, magnitude, seed).
inline HalfspaceSystem perturb_system(const HalfspaceSystem& sys, double magnitude, std::uint64_t seed)
{
    const CounterRng rng{seed};
    HalfspaceSystem out = sys;
    std::uint64_t c = 0;
    for (int j = 0; j < sys.n; ++j) {
        for (int i = 0; i < sys.d; ++i) out.a(i, j) += magnitude * (2.0 * rng.uniform(c++) - 1.0);
        out.b(j) += magnitude * (2.0 * rng.uniform(c++) - 1.0);
    }
    return out;
}

/// Exact identity sum_{J in F} prod_{j in J}(H(f_j) - 1) == indicator on
/// Gaussian sample points, skipping points within `guard` of any hyperplane.
inline CheckResult check_ie_identity(const HalfspaceSystem& sys, const FaceComplex& fc,
                                     const std::string& label, long n_points, std::uint64_t seed,
                                     double sigma = 2.0, double guard = 1e-9)
{
    CheckResult r;
    r.name = "ie/" + label;
    const CounterRng rng{seed};
    Eigen::VectorXd x(sys.d);
    for (long s = 0; s < n_points; ++s) {
        const std::uint64_t base = static_cast<std::uint64_t>(s) * sys.d;
        for (int i = 0; i < sys.d; ++i) x(i) = sigma * rng.normal(base + i);
        bool near_boundary = false;
        for (int j = 0; j < sys.n && !near_boundary; ++j)
            if (std::abs(sys.f(j, x)) < guard) near_boundary = true;
        if (near_boundary) continue;
        ++r.cases;
        const long lhs = ie_sum(sys, fc, x);
        const long rhs = indicator(sys, x);
        if (lhs != rhs) {
            ++r.failures;
            r.worst = std::max(r.worst, static_cast<double>(std::labs(lhs - rhs)));
            if (r.note.empty())
                r.note = "ie_sum=" + std::to_string(lhs) + " indicator=" + std::to_string(rhs);
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// Face version of the identity on every member J: sample points of V(J) as
/// x0 + Q y with Gaussian tangent coordinates and compare face_ie_sum against
/// prod_{j not in J} H(f_j).  Points within `guard` of an off-J hyperplane are
/// skipped.
inline CheckResult check_face_identity(const HalfspaceSystem& sys, const FaceComplex& fc,
                                       const std::string& label, long per_face, std::uint64_t seed,
                                       double sigma = 2.0, double guard = 1e-9)
{
    CheckResult r;
    r.name = "face-ie/" + label;
    std::uint64_t stream = 0;
    Eigen::VectorXd x(sys.d);
    for (int m = 0; m < fc.size(); ++m) {
        const Mask J = fc.member(m);
        const AffineSubspace sub = face_subspace(sys, J);
        if (!sub.consistent || sub.rank != subset_size(J)) {
            ++r.failures;
            r.note = "face " + subset_str(J) + " has no consistent subspace";
            continue;
        }
        const int mt = static_cast<int>(sub.tangent.cols());
        const CounterRng rng{seed + 7777u * static_cast<std::uint64_t>(m)};
        const long reps = mt == 0 ? 1 : per_face;
        Eigen::VectorXd y(mt);
        for (long s = 0; s < reps; ++s) {
            const std::uint64_t base = stream;
            stream += static_cast<std::uint64_t>(std::max(mt, 1));
            x = sub.point;
            for (int i = 0; i < mt; ++i) x += sigma * rng.normal(base + i) * sub.tangent.col(i);
            bool near_boundary = false;
            long expected = 1;
            for (int j = 0; j < sys.n; ++j) {
                if (subset_contains(J, j)) continue;
                const double f = sys.f(j, x);
                if (std::abs(f) < guard) { near_boundary = true; break; }
                if (f < 0.0) expected = 0;
            }
            if (near_boundary) continue;
            ++r.cases;
            const long lhs = face_ie_sum(sys, fc, J, x);
            if (lhs != expected) {
                ++r.failures;
                r.worst = std::max(r.worst, static_cast<double>(std::labs(lhs - expected)));
                if (r.note.empty())
                    r.note = "J=" + subset_str(J) + " face_ie_sum=" + std::to_string(lhs) +
                             " expected=" + std::to_string(expected);
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

namespace detail {

inline SolverConfig tight_config()
{
    SolverConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-14;
    return cfg;
}

} // namespace detail

/// d g^empty / d b_j == g^{j}: central differences of two full solver runs at
/// b +- eps e_j against the {j} component of the unperturbed derivative vector.
inline CheckResult check_b_derivative_fd(const HalfspaceSystem& sys, Method method,
                                         const std::string& label, double eps = 1e-3,
                                         double tol_rel = 5e-4)
{
    CheckResult r;
    r.name = "dgdb-fd/" + label;
    const SolverConfig cfg = detail::tight_config();
    const HgmResult base = probability(sys, method, cfg);
    const FaceComplex fc =
        method == Method::Cone ? face_complex_cone(sys.d) : face_complex_lp(sys);
    for (int j = 0; j < sys.n; ++j) {
        HalfspaceSystem up = sys, dn = sys;
        up.b(j) += eps;
        dn.b(j) -= eps;
        const double gu = probability(up, method, cfg).g_final.values(0);
        const double gd = probability(dn, method, cfg).g_final.values(0);
        const double fd = (gu - gd) / (2.0 * eps);
        const double ref = base.g_final.values(fc.index_of(Mask{1} << j));
        const double rel = std::abs(fd - ref) / std::max(std::abs(ref), 1e-300);
        ++r.cases;
        r.worst = std::max(r.worst, rel);
        if (rel > tol_rel) {
            ++r.failures;
            if (r.note.empty()) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "j=%d fd=%.10g ref=%.10g", j, fd, ref);
                r.note = buf;
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// d g^empty / d a_ij == (A_ij g)^empty at the midpoint of the cone homotopy:
/// finite differences of perturbed full runs against the dense operator.
/// Upper-triangle entries only, so each perturbed system still starts from the
/// decoupled diagonal.
inline CheckResult check_a_derivative_fd(const HalfspaceSystem& cone_sys, const std::string& label,
                                         double t_mid = 0.5, double eps = 1e-4, double tol = 1e-4)
{
    CheckResult r;
    r.name = "dgda-fd/" + label;
    const SolverConfig cfg = detail::tight_config();
    const ConeSetup cs = path_cone(cone_sys);
    const HalfspaceSystem ms = cs.path.at(t_mid);
    const FaceComplex fc = face_complex_cone(ms.d);
    const GramCache cache(ms, fc);
    const Eigen::VectorXd g = probability(ms, Method::Cone, cfg).g_final.values;
    for (int j = 0; j < ms.n; ++j) {
        for (int i = 0; i <= j; ++i) {
            HalfspaceSystem up = ms, dn = ms;
            up.a(i, j) += eps;
            dn.a(i, j) -= eps;
            const double gu = probability(up, Method::Cone, cfg).g_final.values(0);
            const double gd = probability(dn, Method::Cone, cfg).g_final.values(0);
            const double fd = (gu - gd) / (2.0 * eps);
            const double ref = (aij_matrix(ms, cache, i, j) * g)(0);
            const double dev = std::abs(fd - ref) / std::max(1.0, std::abs(ref));
            ++r.cases;
            r.worst = std::max(r.worst, dev);
            if (dev > tol) {
                ++r.failures;
                if (r.note.empty()) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "a(%d,%d) fd=%.10g ref=%.10g", i, j, fd, ref);
                    r.note = buf;
                }
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// Mixed-partial commutation along the homotopy: the dense operators for
/// d/db_k d/db_j and d/db_j d/db_k must agree on the trajectory vector.
inline CheckResult check_commutation(const HalfspaceSystem& sys, Method method,
                                     const std::string& label, double tol = 1e-6)
{
    CheckResult r;
    r.name = "commute/" + label;
    const SolverConfig cfg = detail::tight_config();

    FaceComplex fc = method == Method::Cone ? face_complex_cone(sys.d) : face_complex_lp(sys);
    Path path;
    GVector g0;
    if (method == Method::Cone) {
        const ConeSetup cs = path_cone(sys);
        path = cs.path;
        g0 = initial_cone(cs.rotated, fc);
    } else {
        path = path_bounded(sys, fc);
        const GramCache cache(sys, fc);
        g0 = initial_bounded(sys, fc, cache);
    }

    for (const double t : {0.25, 0.5, 0.75, 1.0}) {
        Path partial = path;
        partial.a1 = path.at(t).a;
        partial.b1 = path.at(t).b;
        const Eigen::VectorXd g = integrate(partial, fc, g0, cfg).g_final.values;
        const double gnorm = g.norm();
        const HalfspaceSystem st = path.at(t);
        const GramCache cache(st, fc);
        for (int k = 0; k < st.n; ++k) {
            for (int j = k + 1; j < st.n; ++j) {
                const Eigen::MatrixXd mkj = second_derivative_operator(cache, st.b, k, j);
                const Eigen::MatrixXd mjk = second_derivative_operator(cache, st.b, j, k);
                const double resid = ((mkj - mjk) * g).norm() / gnorm;
                ++r.cases;
                r.worst = std::max(r.worst, resid);
                if (resid > tol) {
                    ++r.failures;
                    if (r.note.empty()) {
                        char buf[96];
                        std::snprintf(buf, sizeof buf, "t=%g (k,j)=(%d,%d) resid=%.3g", t, k, j, resid);
                        r.note = buf;
                    }
                }
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// |HGM - MC| within 4 standard errors.
inline CheckResult check_oracle_mc(const HalfspaceSystem& sys, const std::string& label,
                                   long long samples, std::uint64_t seed)
{
    CheckResult r;
    r.name = "mc/" + label;
    const HgmResult h = probability(sys);
    const McEstimate mc = mc_probability(sys, samples, seed);
    const double diff = std::abs(h.probability - mc.mean);
    r.cases = 1;
    r.worst = mc.std_error > 0.0 ? diff / mc.std_error : (diff == 0.0 ? 0.0 : HUGE_VAL);
    if (diff > 4.0 * mc.std_error) {
        r.failures = 1;
        char buf[128];
        std::snprintf(buf, sizeof buf, "hgm=%.8g mc=%.8g se=%.3g", h.probability, mc.mean,
                      mc.std_error);
        r.note = buf;
    }
    r.pass = r.failures == 0;
    return r;
}

/// |HGM - adaptive quadrature| within tol (low dimensions only).
inline CheckResult check_oracle_quadrature(const HalfspaceSystem& sys, const std::string& label,
                                           double tol = 1e-4)
{
    CheckResult r;
    r.name = "quad/" + label;
    const HgmResult h = probability(sys);
    const double q = quadrature_probability(sys);
    r.cases = 1;
    r.worst = std::abs(h.probability - q);
    if (r.worst > tol) {
        r.failures = 1;
        char buf[96];
        std::snprintf(buf, sizeof buf, "hgm=%.10g quad=%.10g", h.probability, q);
        r.note = buf;
    }
    r.pass = r.failures == 0;
    return r;
}

/// d=1 intervals against the normal CDF difference.
inline CheckResult check_segment_anchors(double tol = 1e-8)
{
    CheckResult r;
    r.name = "segment";
    const double pairs[][2] = {{-1.0, 1.0}, {-2.5, 0.3}, {0.5, 3.0}, {-6.0, -1.0}, {-0.1, 0.1}};
    for (const auto& p : pairs) {
        const HgmResult h = probability(segment(p[0], p[1]));
        const double ref = normal_cdf(p[1]) - normal_cdf(p[0]);
        const double dev = std::abs(h.probability - ref);
        ++r.cases;
        r.worst = std::max(r.worst, dev);
        if (dev > tol) {
            ++r.failures;
            if (r.note.empty()) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "[%g,%g] hgm=%.12g ref=%.12g", p[0], p[1],
                              h.probability, ref);
                r.note = buf;
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// Orthant content through the cone homotopy must be 2^-d.
inline CheckResult check_orthant_anchor(int d_max = 6, double tol = 1e-8)
{
    CheckResult r;
    r.name = "orthant-cone";
    for (int d = 1; d <= d_max; ++d) {
        const HgmResult h = probability(orthant(d), Method::Cone);
        const double dev = std::abs(h.probability - std::ldexp(1.0, -d));
        ++r.cases;
        r.worst = std::max(r.worst, dev);
        if (dev > tol) {
            ++r.failures;
            if (r.note.empty()) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "d=%d p=%.12g", d, h.probability);
                r.note = buf;
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// The cone start vector at a = I must equal (pi/2)^((d-|J|)/2) exactly.
inline CheckResult check_cone_initial_identity(int d_max = 6)
{
    CheckResult r;
    r.name = "cone-initial";
    for (int d = 1; d <= d_max; ++d) {
        const HalfspaceSystem sys = orthant(d);
        const FaceComplex fc = face_complex_cone(d);
        const GVector g0 = initial_cone(sys, fc);
        for (int m = 0; m < fc.size(); ++m) {
            const double want = std::pow(std::numbers::pi / 2.0, 0.5 * (d - subset_size(fc.member(m))));
            ++r.cases;
            if (g0.values(m) != want) {
                ++r.failures;
                if (r.note.empty()) r.note = "d=" + std::to_string(d) + " J=" + subset_str(fc.member(m));
            }
        }
    }
    r.pass = r.failures == 0;
    return r;
}

/// Convergence order of the integrator on one system: classical order from the
/// fixed grid under step halving (reference from a very tight adaptive run),
/// plus the refinement property that halving rel_tol does not move the result
/// further from the reference.
inline CheckResult check_convergence_order(const HalfspaceSystem& sys, Method method,
                                           const std::string& label, double h0 = 1.0 / 16.0,
                                           double min_order = 4.0)
{
    CheckResult r;
    r.name = "order/" + label;
    SolverConfig ref_cfg;
    ref_cfg.rel_tol = 1e-13;
    ref_cfg.abs_tol = 1e-16;
    const double p_ref = probability(sys, method, ref_cfg).probability;

    double errs[3];
    for (int i = 0; i < 3; ++i) {
        SolverConfig cfg;
        cfg.scheme = SolverConfig::Scheme::FixedRK4;
        cfg.h_init = h0 / static_cast<double>(1 << i);
        cfg.h_min = 1e-12;
        errs[i] = std::abs(probability(sys, method, cfg).probability - p_ref);
    }
    double worst_order = HUGE_VAL;
    for (int i = 0; i + 1 < 3; ++i) {
        const double order = std::log2(errs[i] / errs[i + 1]);
        worst_order = std::min(worst_order, order);
        ++r.cases;
    }
    r.worst = worst_order;
    if (!(worst_order >= min_order)) {
        ++r.failures;
        char buf[128];
        std::snprintf(buf, sizeof buf, "errs=%.3g,%.3g,%.3g", errs[0], errs[1], errs[2]);
        r.note = buf;
    }

    // refinement sanity: quartering rel_tol may not move the result away from
    // the reference (adjacent halvings can trade places inside the noise band,
    // the endpoints must not)
    double err_first = 0.0, err_last = 0.0;
    for (const double rt : {1e-6, 2.5e-7}) {
        SolverConfig cfg;
        cfg.rel_tol = rt;
        cfg.abs_tol = 0.0;
        const double err = std::abs(probability(sys, method, cfg).probability - p_ref);
        ++r.cases;
        if (rt == 1e-6) err_first = err; else err_last = err;
    }
    if (err_last > err_first) {
        ++r.failures;
        if (r.note.empty()) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "refine err %0.3g -> %0.3g", err_first, err_last);
            r.note = buf;
        }
    }
    r.pass = r.failures == 0;
    return r;
}

struct CheckSuiteConfig {
    int d_max = 5;
    double perturb = 0.0;
    std::uint64_t seed = 1; // MC cells use seed + d; the rare-event cells need hits
    long ie_points = 10000;
    long face_points = 1000;
    long long mc_samples = 1000000;
};

/// The full verification matrix: identity suites over the benchmark families,
/// finite-difference and commutation checks, oracle cross-checks, closed-form
/// anchors, convergence order.
inline std::vector<CheckResult> run_check_suites(const CheckSuiteConfig& cfg)
{
    std::vector<CheckResult> out;
    const int d_hi = std::min(cfg.d_max, 5);
    std::uint64_t salt = 0;

    for (const Family fam : {Family::P, Family::Q, Family::C}) {
        for (int d = 2; d <= d_hi; ++d) {
            const HalfspaceSystem base = make_family(fam, d);
            const FaceComplex fc =
                fam == Family::C ? face_complex_cone(d) : face_complex_lp(base);
            const HalfspaceSystem sys =
                cfg.perturb > 0.0 ? perturb_system(base, cfg.perturb, cfg.seed + salt) : base;
            const std::string label = std::string(1, family_letter(fam)) + "_" + std::to_string(d);
            out.push_back(check_ie_identity(sys, fc, label, cfg.ie_points, cfg.seed + salt + 1));
            out.push_back(check_face_identity(sys, fc, label, cfg.face_points, cfg.seed + salt + 2));
            salt += 3;
        }
    }

    const int d_fd = std::min(cfg.d_max, 4);
    for (int d = 2; d <= d_fd; ++d) {
        const std::string pd = "P_" + std::to_string(d), cd = "C_" + std::to_string(d);
        out.push_back(check_b_derivative_fd(p_simplex(d), Method::Bounded, pd));
        out.push_back(check_b_derivative_fd(c_cone(d), Method::Cone, cd));
        out.push_back(check_a_derivative_fd(c_cone(d), cd));
        out.push_back(check_commutation(p_simplex(d), Method::Bounded, pd));
        out.push_back(check_commutation(c_cone(d), Method::Cone, cd));
    }

    for (const Family fam : {Family::P, Family::Q, Family::C}) {
        for (int d = 2; d <= std::min(cfg.d_max, 6); ++d) {
            const HalfspaceSystem sys = make_family(fam, d);
            const std::string label = std::string(1, family_letter(fam)) + "_" + std::to_string(d);
            out.push_back(check_oracle_mc(sys, label, cfg.mc_samples,
                                          cfg.seed + static_cast<std::uint64_t>(d)));
            if (d <= 3) out.push_back(check_oracle_quadrature(sys, label));
        }
    }

    out.push_back(check_segment_anchors());
    out.push_back(check_orthant_anchor(std::min(cfg.d_max, 6)));
    out.push_back(check_cone_initial_identity(std::min(cfg.d_max, 6)));
    if (cfg.d_max >= 3) {
        out.push_back(check_convergence_order(p_simplex(3), Method::Bounded, "P_3"));
        out.push_back(check_convergence_order(c_cone(3), Method::Cone, "C_3"));
    }
    return out;
}

} // namespace polyprob

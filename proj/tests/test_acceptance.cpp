#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <vector>

#include <polyprob/polyprob.hpp>

using namespace polyprob;

// End-to-end acceptance checks.  Each test prints exactly one
// "acceptance k/8 ... pass|FAIL" verdict line (plus informational rows) so the
// run can be audited from the log alone.

namespace {

struct Row {
    int d = 0;
    double p = 0.0;
    double seconds = 0.0;
};

std::vector<Row> run_table(Family fam, int d_lo, int d_hi)
{
    std::vector<Row> rows;
    for (int d = d_lo; d <= d_hi; ++d) {
        const HgmResult res = probability(make_family(fam, d));
        rows.push_back({d, res.probability, res.wall_time_s});
    }
    return rows;
}

void verdict(int k, const char* name, bool ok, const std::string& detail)
{
    std::printf("acceptance %d/8 %-28s %s  %s\n", k, name, ok ? "pass" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Reference probabilities for the three benchmark families, frozen at the
// published precision (six significant digits).
constexpr double kRefP[] = {0.285205, 0.251995, 0.241744, 0.242724, 0.250219,
                            0.261920, 0.276510, 0.293138, 0.311198};
constexpr double kRefQ[] = {5.1758e-02, 7.0235e-03, 6.3101e-04, 3.9722e-05, 1.8042e-06,
                            5.9878e-08, 1.4799e-09, 1.1393e-11, 1.2861e-11};
constexpr double kRefC[] = {0.580822, 0.532131, 0.512854, 0.509868, 0.516602,
                            0.529243, 0.545340, 0.563203, 0.581630};

} // namespace

TEST_CASE("acceptance: bounded simplex table")
{
    const auto rows = run_table(Family::P, 2, 10);
    bool ok = true;
    double worst = 0.0, worst_low = 0.0, max_t = 0.0;
    for (const Row& r : rows) {
        const double ref = kRefP[r.d - 2];
        const double dev = std::abs(r.p - ref);
        const double tol = r.d <= 8 ? 1e-3 : 2e-3;
        ok = ok && dev <= tol && r.seconds < 60.0;
        worst = std::max(worst, dev);
        if (r.d <= 8) worst_low = std::max(worst_low, dev);
        max_t = std::max(max_t, r.seconds);
        std::printf("  P_%-2d  hgm %.8f  ref %.6f  |diff| %.2e  %.3fs\n", r.d, r.p, ref, dev,
                    r.seconds);
    }
    verdict(1, "bounded simplex P_2..P_10", ok,
            fmt("worst |diff| %.2e (d<=8 worst %.2e vs 5e-4 target), ", worst, worst_low) +
                fmt("max row time %.3fs", max_t));
    REQUIRE(ok);
    CHECK(worst_low <= 5e-4); // stretch target on the well-conditioned rows
}

TEST_CASE("acceptance: rare event simplex table")
{
    const auto rows = run_table(Family::Q, 2, 10);
    bool ok = true;
    double worst_rel = 0.0;
    for (const Row& r : rows) {
        const double ref = kRefQ[r.d - 2];
        const double rel = std::abs(r.p - ref) / ref;
        if (r.d <= 6) {
            ok = ok && rel <= 2e-2;
            worst_rel = std::max(worst_rel, rel);
            std::printf("  Q_%-2d  hgm %.6e  ref %.4e  rel %.2e\n", r.d, r.p, ref, rel);
        } else {
            // Tiny contents ride on the solver's absolute tolerance; report the
            // order-of-magnitude agreement but do not gate on it.
            std::printf("  Q_%-2d  hgm %.6e  ref %.4e  ratio %.3f  (not asserted)\n", r.d, r.p,
                        ref, r.p / ref);
        }
    }
    verdict(2, "rare event Q_2..Q_6", ok, fmt("worst relative %.2e (gate 2e-2)", worst_rel));
    REQUIRE(ok);
}

TEST_CASE("acceptance: simplicial cone table")
{
    const auto rows = run_table(Family::C, 2, 8);
    bool ok = true;
    double worst = 0.0;
    double prev_t = 0.0;
    for (const Row& r : rows) {
        const double ref = kRefC[r.d - 2];
        const double dev = std::abs(r.p - ref);
        const double tol = r.d <= 5 ? 1e-3 : 3e-3;
        ok = ok && dev <= tol;
        worst = std::max(worst, dev);
        // Work per step scales with the 2^d faces; print the observed growth.
        std::printf("  C_%-2d  hgm %.8f  ref %.6f  |diff| %.2e  %.3fs%s\n", r.d, r.p, ref, dev,
                    r.seconds,
                    prev_t > 0.0 ? fmt("  (x%.1f)", r.seconds / prev_t).c_str() : "");
        prev_t = r.seconds;
    }
    verdict(3, "simplicial cone C_2..C_8", ok, fmt("worst |diff| %.2e (gate 1e-3/3e-3)", worst));
    REQUIRE(ok);
}

TEST_CASE("acceptance: independent oracles")
{
    bool ok = true;
    double worst_z = 0.0, worst_quad = 0.0;
    for (Family fam : {Family::P, Family::Q, Family::C}) {
        for (int d = 2; d <= 6; ++d) {
            const auto sys = make_family(fam, d);
            const std::string label = std::string(1, family_letter(fam)) + std::to_string(d);
            const auto mc = check_oracle_mc(sys, label, 1000000, 1 + static_cast<std::uint64_t>(d));
            ok = ok && mc.pass;
            worst_z = std::max(worst_z, mc.worst);
            if (d <= 3) {
                const auto qd = check_oracle_quadrature(sys, label);
                ok = ok && qd.pass;
                worst_quad = std::max(worst_quad, qd.worst);
            }
        }
    }
    verdict(4, "MC and quadrature oracles", ok,
            fmt("worst |z| %.2f (gate 4), worst quad |diff| %.2e (gate 1e-4)", worst_z,
                worst_quad));
    REQUIRE(ok);
}

TEST_CASE("acceptance: indicator identities")
{
    bool ok = true;
    long cases = 0, failures = 0;
    for (Family fam : {Family::P, Family::Q, Family::C}) {
        for (int d = 2; d <= 5; ++d) {
            const auto sys = make_family(fam, d);
            const auto fc = fam == Family::C ? face_complex_cone(d) : face_complex_lp(sys);
            const std::string label = std::string(1, family_letter(fam)) + std::to_string(d);
            const auto ie = check_ie_identity(sys, fc, label, 10000, 11 + d);
            const auto face = check_face_identity(sys, fc, label, 1000, 23 + d);
            ok = ok && ie.pass && face.pass;
            cases += ie.cases + face.cases;
            failures += ie.failures + face.failures;
        }
    }
    verdict(5, "inclusion-exclusion identities", ok,
            fmt("%.0f sampled points, %.0f failures", static_cast<double>(cases),
                static_cast<double>(failures)));
    REQUIRE(ok);
}

TEST_CASE("acceptance: derivative structure")
{
    bool ok = true;
    double worst_fd = 0.0, worst_comm = 0.0;
    for (Family fam : {Family::P, Family::C}) {
        const Method method = fam == Family::C ? Method::Cone : Method::Bounded;
        for (int d = 2; d <= 4; ++d) {
            const auto sys = make_family(fam, d);
            const std::string label = std::string(1, family_letter(fam)) + std::to_string(d);
            const auto fd = check_b_derivative_fd(sys, method, label);
            const auto comm = check_commutation(sys, method, label);
            ok = ok && fd.pass && comm.pass;
            worst_fd = std::max(worst_fd, fd.worst);
            worst_comm = std::max(worst_comm, comm.worst);
        }
    }
    verdict(6, "derivative consistency", ok,
            fmt("worst FD rel %.2e (gate 5e-4), worst commutator %.2e (gate 1e-6)", worst_fd,
                worst_comm));
    REQUIRE(ok);
}

TEST_CASE("acceptance: closed-form anchors")
{
    const auto seg = check_segment_anchors();
    const auto orth = check_orthant_anchor(6);
    const auto init = check_cone_initial_identity(6);
    const bool ok = seg.pass && orth.pass && init.pass;
    verdict(7, "closed-form anchors", ok,
            fmt("segment worst %.2e, orthant worst %.2e (gates 1e-8), ", seg.worst, orth.worst) +
                (init.pass ? "cone start exact" : "cone start WRONG"));
    REQUIRE(ok);
}

TEST_CASE("acceptance: convergence order")
{
    const auto p3 = check_convergence_order(p_simplex(3), Method::Bounded, "P3");
    const auto c3 = check_convergence_order(c_cone(3), Method::Cone, "C3");
    const bool ok = p3.pass && c3.pass;
    verdict(8, "integration order >= 4", ok,
            fmt("observed order P3 %.2f, C3 %.2f", p3.worst, c3.worst));
    REQUIRE(ok);
}

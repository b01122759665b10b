#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "polyprob/polyprob.hpp"
#include "test_support.hpp"

using namespace polyprob;
using polyprob::test::code_of;

namespace {

// Independent face probe for d=2 systems: the two-hyperplane case by exact
// solve, the sub-cases by parameter scans.  Deliberately brute force so it
// shares nothing with the LP enumeration path.
bool face_nonempty_2d(const HalfspaceSystem& sys, Mask J)
{
    REQUIRE(sys.d == 2);
    const double feas = -1e-9;
    auto all_others_ok = [&](const Eigen::Vector2d& x) {
        for (int j = 0; j < sys.n; ++j)
            if (!subset_contains(J, j) && sys.f(j, x) < feas) return false;
        return true;
    };
    const auto idx = subset_indices(J);
    if (idx.size() == 2) {
        Eigen::Matrix2d A;
        A.row(0) = sys.a.col(idx[0]).transpose();
        A.row(1) = sys.a.col(idx[1]).transpose();
        const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        if (std::abs(det) < 1e-12) return false; // parallel pair: never a vertex here
        const Eigen::Vector2d x = A.inverse() * Eigen::Vector2d(-sys.b(idx[0]), -sys.b(idx[1]));
        return all_others_ok(x);
    }
    if (idx.size() == 1) {
        const Eigen::Vector2d n = sys.a.col(idx[0]);
        const Eigen::Vector2d x0 = -sys.b(idx[0]) / n.squaredNorm() * n;
        const Eigen::Vector2d dir(-n(1), n(0));
        for (double t = -20.0; t <= 20.0; t += 1e-3)
            if (all_others_ok(x0 + t * dir)) return true;
        return false;
    }
    for (double x = -8.0; x <= 8.0; x += 0.01)
        for (double y = -8.0; y <= 8.0; y += 0.01)
            if (all_others_ok(Eigen::Vector2d(x, y))) return true;
    return false;
}

std::set<Mask> brute_force_faces_2d(const HalfspaceSystem& sys)
{
    std::set<Mask> out;
    for (Mask J = 0; J < (Mask{1} << sys.n); ++J)
        if (subset_size(J) <= 2 && face_nonempty_2d(sys, J)) out.insert(J);
    return out;
}

std::set<Mask> member_set(const FaceComplex& fc)
{
    return {fc.members().begin(), fc.members().end()};
}

// box [-1,1]^2 cut by x + y <= 1.8; the cut removes the (1,1) corner, so
// {1,3} is not a face while {1,4} and {3,4} are
HalfspaceSystem cut_box()
{
    Eigen::MatrixXd a(2, 5);
    a << 1, -1, 0, 0, -1,
         0, 0, 1, -1, -1;
    Eigen::VectorXd b(5);
    b << 1, 1, 1, 1, 1.8;
    return build_system(a, b);
}

} // namespace

TEST_CASE("system construction validates its input", "[geometry]")
{
    Eigen::MatrixXd a(2, 3);
    a << 1, 0, -1, 0, 1, -1;
    Eigen::VectorXd b3 = Eigen::VectorXd::Ones(3);

    REQUIRE(build_system(a, b3).n == 3);
    REQUIRE(code_of([&] { build_system(a, Eigen::VectorXd::Ones(2)); }) == ErrorCode::DimensionMismatch);

    Eigen::MatrixXd az = a;
    az.col(1).setZero();
    REQUIRE(code_of([&] { build_system(az, b3); }) == ErrorCode::ZeroNormal);

    Eigen::MatrixXd an = a;
    an(0, 0) = std::nan("");
    REQUIRE(code_of([&] { build_system(an, b3); }) == ErrorCode::NonFiniteEntry);

    Eigen::VectorXd bn = b3;
    bn(2) = HUGE_VAL;
    REQUIRE(code_of([&] { build_system(a, bn); }) == ErrorCode::NonFiniteEntry);
}

TEST_CASE("subset order is cardinality first, then lexicographic", "[geometry]")
{
    std::vector<Mask> all;
    for (Mask m = 0; m < 16; ++m) all.push_back(m);
    std::sort(all.begin(), all.end(), subset_less);

    const std::vector<Mask> want = {
        mask_of({}),        mask_of({0}),       mask_of({1}),    mask_of({2}),    mask_of({3}),
        mask_of({0, 1}),    mask_of({0, 2}),    mask_of({0, 3}), mask_of({1, 2}), mask_of({1, 3}),
        mask_of({2, 3}),    mask_of({0, 1, 2}), mask_of({0, 1, 3}), mask_of({0, 2, 3}),
        mask_of({1, 2, 3}), mask_of({0, 1, 2, 3})};
    REQUIRE(all == want);

    REQUIRE(subset_str(mask_of({0, 2})) == "{0,2}");
    REQUIRE(subset_str(0) == "{}");
    REQUIRE(subset_indices(mask_of({1, 3})) == std::vector<int>{1, 3});
    REQUIRE(subset_rank(mask_of({1, 3, 5}), 5) == 2);
}

TEST_CASE("closed-form complexes have the expected members", "[geometry]")
{
    const FaceComplex fs = face_complex_simplex(2);
    const std::vector<Mask> want = {mask_of({}),     mask_of({0}),    mask_of({1}), mask_of({2}),
                                    mask_of({0, 1}), mask_of({0, 2}), mask_of({1, 2})};
    REQUIRE(fs.members() == want);
    REQUIRE(fs.member(0) == Mask{0});
    REQUIRE(fs.index_of(mask_of({0, 2})) == 5);
    REQUIRE_FALSE(fs.contains(mask_of({0, 1, 2})));
    REQUIRE(fs.index_of(mask_of({0, 1, 2})) == -1);

    const FaceComplex fcn = face_complex_cone(3);
    REQUIRE(fcn.size() == 8); // every subset of the three facets
    REQUIRE(fcn.contains(mask_of({0, 1, 2})));
}

TEST_CASE("simplex complex size formula", "[geometry]")
{
    // d+1 half-spaces, every subset of size <= d is a face
    for (int d = 1; d <= 6; ++d) {
        const FaceComplex fc = face_complex_simplex(d);
        REQUIRE(fc.size() == (1 << (d + 1)) - 1); // all 2^(d+1) subsets minus the full set
        for (const Mask J : fc.members()) REQUIRE(subset_size(J) <= d);
    }
}

TEST_CASE("LP face enumeration agrees with brute force in d=2", "[geometry]")
{
    SECTION("regular simplex")
    {
        const HalfspaceSystem sys = p_simplex(2);
        const std::set<Mask> brute = brute_force_faces_2d(sys);
        REQUIRE(brute == member_set(face_complex_lp(sys)));
        REQUIRE(brute == member_set(face_complex_simplex(2)));
    }
    SECTION("box with a corner cut off")
    {
        const HalfspaceSystem sys = cut_box();
        const std::set<Mask> brute = brute_force_faces_2d(sys);
        const FaceComplex fc = face_complex_lp(sys);
        REQUIRE(brute == member_set(fc));
        REQUIRE(fc.size() == 11);
        REQUIRE_FALSE(fc.contains(mask_of({1, 3}))); // the removed corner
        REQUIRE(fc.contains(mask_of({1, 4})));
        REQUIRE(fc.contains(mask_of({3, 4})));
        REQUIRE_FALSE(fc.contains(mask_of({0, 1}))); // parallel pair
    }
    SECTION("shifted simplex far from the origin")
    {
        const HalfspaceSystem sys = q_simplex(2);
        REQUIRE(brute_force_faces_2d(sys) == member_set(face_complex_lp(sys)));
    }
}

TEST_CASE("LP face enumeration matches the closed forms up to d=6", "[geometry]")
{
    for (int d = 2; d <= 6; ++d) {
        REQUIRE(member_set(face_complex_lp(p_simplex(d))) == member_set(face_complex_simplex(d)));
        REQUIRE(member_set(face_complex_lp(q_simplex(d))) == member_set(face_complex_simplex(d)));
        REQUIRE(member_set(face_complex_lp(c_cone(d))) == member_set(face_complex_cone(d)));
    }
}

TEST_CASE("face enumeration output is canonical and downward closed", "[geometry]")
{
    const FaceComplex fc = face_complex_lp(cut_box());
    for (int i = 1; i < fc.size(); ++i) REQUIRE(subset_less(fc.member(i - 1), fc.member(i)));
    for (const Mask J : fc.members())
        for (int j : subset_indices(J)) REQUIRE(fc.contains(J & ~(Mask{1} << j)));
}

TEST_CASE("face enumeration rejects oversized and empty systems", "[geometry]")
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 21);
    REQUIRE(code_of([&] { face_complex_lp(build_system(a, Eigen::VectorXd::Ones(21))); }) ==
            ErrorCode::DimensionTooLarge);

    // x >= 1 and x <= -1
    Eigen::MatrixXd ae(1, 2);
    ae << 1, -1;
    Eigen::VectorXd be(2);
    be << -1, -1;
    REQUIRE(code_of([&] { face_complex_lp(build_system(ae, be)); }) == ErrorCode::EmptyPolyhedron);
}

TEST_CASE("general position diagnostics", "[geometry]")
{
    SECTION("benchmark families pass")
    {
        for (int d = 2; d <= 4; ++d) {
            const HalfspaceSystem sys = p_simplex(d);
            REQUIRE(general_position_check(sys, face_complex_lp(sys)).pass);
        }
        const HalfspaceSystem box = cut_box();
        REQUIRE(general_position_check(box, face_complex_lp(box)).pass);
    }
    SECTION("three lines through one point fail")
    {
        Eigen::MatrixXd a(2, 3);
        a << 1, 0, 1,
             0, 1, 1;
        const HalfspaceSystem sys = build_system(a, Eigen::VectorXd::Zero(3));
        const GeneralPositionReport rep = general_position_check(sys, face_complex_lp(sys));
        REQUIRE_FALSE(rep.pass);
    }
    SECTION("coincident hyperplanes fail")
    {
        Eigen::MatrixXd a(2, 3);
        a << 1, 2, 0,
             0, 0, 1;
        Eigen::VectorXd b(3);
        b << 0, 0, 1;
        const HalfspaceSystem sys = build_system(a, b);
        const GeneralPositionReport rep = general_position_check(sys, face_complex_lp(sys));
        REQUIRE_FALSE(rep.pass);
    }
}

TEST_CASE("LP feasibility on half-space systems", "[geometry]")
{
    Eigen::MatrixXd G(2, 1);
    G << 1, -1;
    Eigen::VectorXd h(2);

    h << 0, -1; // 0 <= y <= 1
    REQUIRE(lp_feasible(G, h));
    h << 2, -1; // 2 <= y <= 1
    REQUIRE_FALSE(lp_feasible(G, h));
    h << 0, 0; // y = 0 exactly
    REQUIRE(lp_feasible(G, h));

    // empty constraint set is trivially feasible
    REQUIRE(lp_feasible(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)));
}

TEST_CASE("min-norm points and face subspaces", "[geometry]")
{
    const HalfspaceSystem sys = p_simplex(2);
    const double s = std::sqrt(2.0) / 2.0;

    const Eigen::VectorXd x0 = min_norm_point(sys, mask_of({0}));
    REQUIRE(x0(0) == Catch::Approx(-s).margin(1e-14));
    REQUIRE(x0(1) == Catch::Approx(0.0).margin(1e-14));

    const Eigen::VectorXd xv = min_norm_point(sys, mask_of({0, 1}));
    REQUIRE(xv(0) == Catch::Approx(-s).margin(1e-14));
    REQUIRE(xv(1) == Catch::Approx(-s).margin(1e-14));

    const AffineSubspace sub = face_subspace(sys, mask_of({0}));
    REQUIRE(sub.consistent);
    REQUIRE(sub.rank == 1);
    REQUIRE(sub.tangent.cols() == 1);
    // min-norm point is orthogonal to the tangent direction
    REQUIRE(std::abs(sub.tangent.col(0).dot(x0)) < 1e-12);
    // points of the subspace satisfy the equality
    REQUIRE(std::abs(sys.f(0, sub.point + 3.7 * sub.tangent.col(0))) < 1e-9);

    // parallel distinct hyperplanes: inconsistent subspace, singular Gram
    Eigen::MatrixXd ap(2, 2);
    ap << 1, -1, 0, 0;
    Eigen::VectorXd bp(2);
    bp << 0, -1;
    const HalfspaceSystem par = build_system(ap, bp);
    REQUIRE_FALSE(face_subspace(par, mask_of({0, 1})).consistent);
    REQUIRE(code_of([&] { min_norm_point(par, mask_of({0, 1})); }) == ErrorCode::SingularGram);
}

TEST_CASE("recession cone probe separates bounded from unbounded", "[geometry]")
{
    REQUIRE(recession_cone_trivial(p_simplex(2)));
    REQUIRE(recession_cone_trivial(p_simplex(5)));
    REQUIRE(recession_cone_trivial(cut_box()));
    REQUIRE_FALSE(recession_cone_trivial(c_cone(3)));
    REQUIRE_FALSE(recession_cone_trivial(orthant(2)));
    REQUIRE(recession_cone_trivial(segment(-1.0, 1.0)));

    // slab: bounded in x, unbounded in y
    Eigen::MatrixXd a(2, 2);
    a << 1, -1, 0, 0;
    Eigen::VectorXd b(2);
    b << 1, 1;
    REQUIRE_FALSE(recession_cone_trivial(build_system(a, b)));
}

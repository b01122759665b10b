#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "polyprob/polyprob.hpp"
#include "test_support.hpp"

using namespace polyprob;
using polyprob::test::code_of;

namespace {

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

TEST_CASE("heaviside closes the boundary", "[ie]")
{
    REQUIRE(heaviside(0.0) == 1);
    REQUIRE(heaviside(-0.0) == 1);
    REQUIRE(heaviside(1e-300) == 1);
    REQUIRE(heaviside(-1e-300) == 0);
    REQUIRE(heaviside(3.5) == 1);
}

TEST_CASE("alternating sum reproduces the indicator at hand-checked points", "[ie]")
{
    const HalfspaceSystem sys = p_simplex(2);
    const FaceComplex fc = face_complex_simplex(2);
    const double s = std::sqrt(2.0) / 2.0;

    // inside: no negative constraints, only the empty set contributes
    Eigen::Vector2d x(0.0, 0.0);
    REQUIRE(indicator(sys, x) == 1);
    REQUIRE(ie_sum(sys, fc, x) == 1);

    // outside one facet: {} and {2} cancel
    x << 10.0, 10.0;
    REQUIRE(indicator(sys, x) == 0);
    REQUIRE(ie_sum(sys, fc, x) == 0);

    // outside past a vertex: {} - {0} - {1} + {0,1} = 0
    x << -2.0, -2.0;
    REQUIRE(sys.f(0, x) < 0.0);
    REQUIRE(sys.f(1, x) < 0.0);
    REQUIRE(sys.f(2, x) > 0.0);
    REQUIRE(ie_sum(sys, fc, x) == 0);

    // on a facet interior (closed-face convention counts it inside)
    x << -s, 0.0;
    REQUIRE(indicator(sys, x) == 1);
    REQUIRE(ie_sum(sys, fc, x) == 1);
}

TEST_CASE("face identity at hand-checked points", "[ie]")
{
    const HalfspaceSystem sys = p_simplex(2);
    const FaceComplex fc = face_complex_simplex(2);
    const double s = std::sqrt(2.0) / 2.0;

    // far point on hyperplane 0, outside constraint 2
    Eigen::Vector2d x(-s, 100.0);
    REQUIRE(face_ie_sum(sys, fc, mask_of({0}), x) == 0);

    // point on hyperplane 0 inside the other constraints
    x << -s, 0.0;
    REQUIRE(face_ie_sum(sys, fc, mask_of({0}), x) == 1);

    // vertex {0,1}: all remaining constraints hold there
    x << -s, -s;
    REQUIRE(face_ie_sum(sys, fc, mask_of({0, 1}), x) == 1);

    // empty J reduces to the plain identity
    x << 0.0, 0.0;
    REQUIRE(face_ie_sum(sys, fc, Mask{0}, x) == 1);

    // off-hyperplane points are rejected
    x << 0.0, 0.0;
    REQUIRE(code_of([&] { face_ie_sum(sys, fc, mask_of({0}), x); }) == ErrorCode::NotOnHyperplane);

    // non-members are rejected
    x << -s, -s;
    REQUIRE(code_of([&] { face_ie_sum(sys, fc, mask_of({0, 1, 2}), x); }) ==
            ErrorCode::IndexOutOfRange);
}

TEST_CASE("identity holds on random points for the benchmark families", "[ie]")
{
    for (int d = 2; d <= 4; ++d) {
        const HalfspaceSystem p = p_simplex(d);
        const CheckResult rp = check_ie_identity(p, face_complex_lp(p), "p", 2000, 11 + d);
        INFO(rp.note);
        REQUIRE(rp.pass);
        REQUIRE(rp.cases > 1500);

        const CheckResult rc =
            check_ie_identity(c_cone(d), face_complex_cone(d), "c", 2000, 23 + d);
        INFO(rc.note);
        REQUIRE(rc.pass);
    }
    const HalfspaceSystem box = cut_box();
    const CheckResult rb = check_ie_identity(box, face_complex_lp(box), "box", 2000, 5);
    REQUIRE(rb.pass);
}

TEST_CASE("face identity holds on sampled face points", "[ie]")
{
    for (int d = 2; d <= 4; ++d) {
        const HalfspaceSystem p = p_simplex(d);
        const CheckResult rp = check_face_identity(p, face_complex_lp(p), "p", 200, 31 + d);
        INFO(rp.note);
        REQUIRE(rp.pass);
        REQUIRE(rp.cases > 0);

        const CheckResult rc =
            check_face_identity(c_cone(d), face_complex_cone(d), "c", 200, 47 + d);
        INFO(rc.note);
        REQUIRE(rc.pass);
    }
    const HalfspaceSystem box = cut_box();
    const CheckResult rb = check_face_identity(box, face_complex_lp(box), "box", 200, 3);
    REQUIRE(rb.pass);
}

TEST_CASE("identities survive coefficient noise with the face set held fixed", "[ie]")
{
    for (int d = 2; d <= 4; ++d) {
        const HalfspaceSystem base = p_simplex(d);
        const FaceComplex fc = face_complex_lp(base);
        const HalfspaceSystem noisy = perturb_system(base, 1e-3, 99 + static_cast<std::uint64_t>(d));
        REQUIRE(check_ie_identity(noisy, fc, "p-noisy", 2000, 7).pass);
        REQUIRE(check_face_identity(noisy, fc, "p-noisy", 200, 13).pass);

        const HalfspaceSystem cone = perturb_system(c_cone(d), 1e-3, 17);
        REQUIRE(check_ie_identity(cone, face_complex_cone(d), "c-noisy", 2000, 29).pass);
        REQUIRE(check_face_identity(cone, face_complex_cone(d), "c-noisy", 200, 37).pass);
    }
}

TEST_CASE("perturbation helper is deterministic and bounded", "[ie]")
{
    const HalfspaceSystem base = p_simplex(3);
    const HalfspaceSystem a = perturb_system(base, 1e-3, 42);
    const HalfspaceSystem b = perturb_system(base, 1e-3, 42);
    const HalfspaceSystem c = perturb_system(base, 1e-3, 43);
    REQUIRE(a.a == b.a);
    REQUIRE(a.b == b.b);
    REQUIRE(a.a != c.a);
    REQUIRE((a.a - base.a).cwiseAbs().maxCoeff() <= 1e-3);
    REQUIRE((a.b - base.b).cwiseAbs().maxCoeff() <= 1e-3);
    REQUIRE((a.a - base.a).cwiseAbs().maxCoeff() > 0.0);
}

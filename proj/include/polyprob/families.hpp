#pragma once

#include <cmath>
#include <string>

#include "polyprob/halfspace_system.hpp"

namespace polyprob {

/// Benchmark families used by the table command and the test suite.
enum class Family { P, Q, C };

/// Regular simplex around the origin:
///     x_i + sqrt(d)/2 >= 0 (i = 1..d),   -(x_1+...+x_d) + sqrt(d)/2 >= 0.
inline HalfspaceSystem p_simplex(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "p_simplex needs d >= 1");
    const double s = std::sqrt(static_cast<double>(d)) / 2.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d + 1);
    a.leftCols(d).setIdentity();
    a.col(d).setConstant(-1.0);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(d + 1, s);
    return build_system(a, b);
}

/// Shifted simplex in the far positive orthant (tiny probability content):
///     x_i - sqrt(d)/2 >= 0 (i = 1..d),   -(x_1+...+x_d) + (2d+1) sqrt(d)/2 >= 0.
inline HalfspaceSystem q_simplex(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "q_simplex needs d >= 1");
    const double s = std::sqrt(static_cast<double>(d)) / 2.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d + 1);
    a.leftCols(d).setIdentity();
    a.col(d).setConstant(-1.0);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(d + 1, -s);
    b(d) = (2.0 * d + 1.0) * s;
    return build_system(a, b);
}

/// Simplicial cone: constraint i couples coordinates i..d with unit leading
/// coefficient,
///     x_i + sum_{j>i} ((i+j)/100) x_j + sqrt(d)/2 >= 0   (1-based),
/// so the normals are the rows of a unit-diagonal upper-triangular matrix.
inline HalfspaceSystem c_cone(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "c_cone needs d >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            a(j, i) = static_cast<double>((i + 1) + (j + 1)) / 100.0;
    Eigen::VectorXd b = Eigen::VectorXd::Constant(d, std::sqrt(static_cast<double>(d)) / 2.0);
    return build_system(a, b);
}

/// Nonnegative orthant { x : x_i >= 0 }.
inline HalfspaceSystem orthant(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "orthant needs d >= 1");
    return build_system(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d));
}

/// The segment [lo, hi] as a d=1 system: x - lo >= 0, -x + hi >= 0.
inline HalfspaceSystem segment(double lo, double hi)
{
    if (!(lo < hi)) fail(ErrorCode::DimensionMismatch, "segment needs lo < hi");
    Eigen::MatrixXd a(1, 2);
    a << 1.0, -1.0;
    Eigen::VectorXd b(2);
    b << -lo, hi;
    return build_system(a, b);
}

inline HalfspaceSystem make_family(Family f, int d)
{
    switch (f) {
        case Family::P: return p_simplex(d);
        case Family::Q: return q_simplex(d);
        case Family::C: return c_cone(d);
    }
    fail(ErrorCode::IndexOutOfRange, "unknown family");
}

inline char family_letter(Family f)
{
    switch (f) {
        case Family::P: return 'P';
        case Family::Q: return 'Q';
        case Family::C: return 'C';
    }
    return '?';
}

} // namespace polyprob

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/linprog.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

/// The nonempty-face index sets of a half-space system:
///     J in F  iff  the intersection of {f_j = 0 (j in J)} with P is nonempty.
/// Members are kept in canonical order (cardinality, then lexicographic), so
/// {} always sits at position 0; the set is downward closed and every member
/// has cardinality <= d.  This ordering fixes the meaning of every g-vector
/// index and operator row used downstream.
class FaceComplex {
public:
    FaceComplex() = default;

    FaceComplex(int d, int n, std::vector<Mask> members) : d_(d), n_(n), members_(std::move(members))
    {
        if (n_ < 1 || n_ > 20)
            fail(ErrorCode::DimensionTooLarge, "face complex supports 1 <= n <= 20, got n=" + std::to_string(n_));
        std::sort(members_.begin(), members_.end(), subset_less);
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        index_.assign(std::size_t{1} << n_, -1);
        for (int i = 0; i < static_cast<int>(members_.size()); ++i) {
            const Mask m = members_[i];
            if (m >= (Mask{1} << n_)) fail(ErrorCode::IndexOutOfRange, "member outside {0..n-1}");
            if (subset_size(m) > d_)
                fail(ErrorCode::GeneralPositionFailure, "face " + subset_str(m) + " has more than d elements");
            index_[m] = i;
        }
        if (members_.empty() || members_[0] != 0u)
            fail(ErrorCode::EmptyPolyhedron, "face complex must contain the empty set");
        for (const Mask m : members_) {
            for (Mask rest = m; rest;) {
                const Mask bit = rest & (~rest + 1u);
                rest &= rest - 1u;
                if (index_[m ^ bit] < 0)
                    fail(ErrorCode::GeneralPositionFailure,
                         "face set not downward closed at " + subset_str(m));
            }
        }
    }

    int dim() const { return d_; }
    int num_halfspaces() const { return n_; }
    int size() const { return static_cast<int>(members_.size()); }
    Mask member(int i) const { return members_[static_cast<std::size_t>(i)]; }
    const std::vector<Mask>& members() const { return members_; }

    /// Position in canonical order, -1 if absent.
    int index_of(Mask m) const { return index_[m]; }
    bool contains(Mask m) const { return index_[m] >= 0; }

private:
    int d_ = 0;
    int n_ = 0;
    std::vector<Mask> members_;
    std::vector<std::int32_t> index_;
};

/// Face set of a bounded simplex with d+1 facets in general position:
/// every J with |J| <= d is a face (all d+1 hyperplanes together meet nowhere).
inline FaceComplex face_complex_simplex(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "face_complex_simplex needs d >= 1");
    const int n = d + 1;
    std::vector<Mask> members;
    members.reserve((std::size_t{1} << n) - 1u);
    for (Mask m = 0; m < (Mask{1} << n); ++m)
        if (subset_size(m) <= d) members.push_back(m);
    return FaceComplex(d, n, std::move(members));
}

/// Face set of a simplicial cone with d independent facets: the full power set.
inline FaceComplex face_complex_cone(int d)
{
    if (d < 1) fail(ErrorCode::DimensionMismatch, "face_complex_cone needs d >= 1");
    std::vector<Mask> members;
    members.reserve(std::size_t{1} << d);
    for (Mask m = 0; m < (Mask{1} << d); ++m) members.push_back(m);
    return FaceComplex(d, d, std::move(members));
}

/// Affine hull data of V(J) = { x : f_j(x) = 0, j in J }: the minimum-norm
/// solution, an orthonormal tangent basis, and whether the equalities are
/// consistent at all (SVD rank decisions).
struct AffineSubspace {
    Eigen::VectorXd point;   // min-norm x0, valid when consistent
    Eigen::MatrixXd tangent; // d x (d - rank), orthonormal columns
    bool consistent = false;
    int rank = 0;
};

inline AffineSubspace face_subspace(const HalfspaceSystem& sys, Mask J, double res_tol = 1e-9)
{
    AffineSubspace out;
    const int k = subset_size(J);
    if (k == 0) {
        out.point = Eigen::VectorXd::Zero(sys.d);
        out.tangent = Eigen::MatrixXd::Identity(sys.d, sys.d);
        out.consistent = true;
        return out;
    }
    Eigen::MatrixXd A(sys.d, k);
    Eigen::VectorXd bJ(k);
    {
        int c = 0;
        for (int j : subset_indices(J)) {
            A.col(c) = sys.a.col(j);
            bJ(c) = sys.b(j);
            ++c;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * smax) ++rank;
    // min-norm least squares solution of A^T x = -bJ
    Eigen::VectorXd w = svd.matrixV().leftCols(rank).transpose() * (-bJ);
    for (int i = 0; i < rank; ++i) w(i) /= sv(i);
    out.point = svd.matrixU().leftCols(rank) * w;
    out.tangent = svd.matrixU().rightCols(sys.d - rank);
    out.rank = rank;
    const double res = (A.transpose() * out.point + bJ).cwiseAbs().maxCoeff();
    out.consistent = res <= res_tol * (1.0 + bJ.cwiseAbs().maxCoeff());
    return out;
}

namespace detail {

/// Is the closed set V(J) intersected with the remaining half-spaces nonempty?
inline bool face_feasible(const HalfspaceSystem& sys, Mask J, double tol)
{
    const AffineSubspace sub = face_subspace(sys, J, tol);
    if (!sub.consistent) return false;
    const int p = static_cast<int>(sub.tangent.cols());
    std::vector<int> rest;
    for (int j = 0; j < sys.n; ++j)
        if (!subset_contains(J, j)) rest.push_back(j);
    if (p == 0) {
        for (int j : rest)
            if (sys.f(j, sub.point) < -tol) return false;
        return true;
    }
    if (rest.empty()) return true;
    Eigen::MatrixXd G(static_cast<int>(rest.size()), p);
    Eigen::VectorXd h(static_cast<int>(rest.size()));
    for (int r = 0; r < static_cast<int>(rest.size()); ++r) {
        G.row(r) = (sub.tangent.transpose() * sys.a.col(rest[r])).transpose();
        h(r) = -sys.f(rest[r], sub.point) - tol;
    }
    return lp_feasible(G, h, tol);
}

} // namespace detail

/// Enumerate the face set by increasing cardinality with LP feasibility tests.
/// Downward closure prunes the search: only extensions of known members are
/// tried, and a candidate is tested only when all its immediate subsets are
/// already members.
inline FaceComplex face_complex_lp(const HalfspaceSystem& sys, double tol = 1e-9)
{
    if (sys.n > 20)
        fail(ErrorCode::DimensionTooLarge, "face enumeration capped at n <= 20");
    if (!detail::face_feasible(sys, 0u, tol))
        fail(ErrorCode::EmptyPolyhedron, "the half-space intersection is empty");

    std::vector<Mask> members{0u};
    std::vector<char> is_member(std::size_t{1} << sys.n, 0);
    is_member[0] = 1;
    std::size_t level_begin = 0; // first index of the previous cardinality class
    for (int card = 1; card <= std::min(sys.d, sys.n); ++card) {
        const std::size_t level_end = members.size();
        for (std::size_t idx = level_begin; idx < level_end; ++idx) {
            const Mask base = members[idx];
            const int lo = base ? 32 - std::countl_zero(base) : 0;
            for (int j = lo; j < sys.n; ++j) {
                const Mask cand = base | (Mask{1} << j);
                bool closed = true;
                for (Mask rest = cand; rest && closed;) {
                    const Mask bit = rest & (~rest + 1u);
                    rest &= rest - 1u;
                    if (!is_member[cand ^ bit]) closed = false;
                }
                if (!closed) continue;
                if (detail::face_feasible(sys, cand, tol)) {
                    members.push_back(cand);
                    is_member[cand] = 1;
                }
            }
        }
        if (members.size() == level_end) break; // nothing new at this cardinality
        level_begin = level_end;
    }
    return FaceComplex(sys.d, sys.n, std::move(members));
}

/// General-position diagnostics: (i) every face's normals are linearly
/// independent, (ii) no feasible index set with more than d elements exists.
struct GeneralPositionReport {
    bool pass = true;
    std::vector<Mask> dependent;        // faces failing the rank test
    std::vector<Mask> over_cardinality; // feasible sets with |J| = d+1

    std::string summary() const
    {
        if (pass) return "general position holds";
        std::string s = "general position fails:";
        for (Mask m : dependent) s += " dependent " + subset_str(m);
        for (Mask m : over_cardinality) s += " feasible " + subset_str(m);
        return s;
    }
};

inline GeneralPositionReport general_position_check(const HalfspaceSystem& sys, const FaceComplex& fc,
                                                    double sv_tol = 1e-7, double feas_tol = 1e-9)
{
    GeneralPositionReport rep;
    for (int i = 0; i < fc.size(); ++i) {
        const Mask J = fc.member(i);
        const int k = subset_size(J);
        if (k == 0) continue;
        Eigen::MatrixXd A(sys.d, k);
        int c = 0;
        for (int j : subset_indices(J)) A.col(c++) = sys.a.col(j);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        if (svd.singularValues().minCoeff() <= sv_tol) rep.dependent.push_back(J);
    }
    // Any feasible (d+1)-set would extend a feasible d-set, so testing
    // extensions of the maximal members covers all candidates.
    for (int i = 0; i < fc.size(); ++i) {
        const Mask J = fc.member(i);
        if (subset_size(J) != sys.d) continue;
        const int lo = J ? 32 - std::countl_zero(J) : 0;
        for (int j = lo; j < sys.n; ++j) {
            const Mask cand = J | (Mask{1} << j);
            if (cand == J) continue;
            if (detail::face_feasible(sys, cand, feas_tol)) rep.over_cardinality.push_back(cand);
        }
    }
    rep.pass = rep.dependent.empty() && rep.over_cardinality.empty();
    return rep;
}

/// Minimum-norm point of V(J,a,b):  x0 = -A_J alpha_J^{-1} b_J, which lies in
/// range(A_J) and therefore orthogonal to the tangent space.
inline Eigen::VectorXd min_norm_point(const HalfspaceSystem& sys, Mask J)
{
    const int k = subset_size(J);
    if (k == 0) return Eigen::VectorXd::Zero(sys.d);
    if (J >= (Mask{1} << sys.n)) fail(ErrorCode::IndexOutOfRange, "subset outside {0..n-1}");
    Eigen::MatrixXd A(sys.d, k);
    Eigen::VectorXd bJ(k);
    int c = 0;
    for (int j : subset_indices(J)) {
        A.col(c) = sys.a.col(j);
        bJ(c) = sys.b(j);
        ++c;
    }
    const Eigen::MatrixXd alpha = A.transpose() * A;
    Eigen::LLT<Eigen::MatrixXd> llt(alpha);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::SingularGram, "Gram block " + subset_str(J) + " is not positive definite");
    const Eigen::VectorXd z = llt.solve(bJ);
    if ((alpha * z - bJ).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + bJ.cwiseAbs().maxCoeff()))
        fail(ErrorCode::SingularGram, "Gram block " + subset_str(J) + " is numerically singular");
    return -A * z;
}

} // namespace polyprob

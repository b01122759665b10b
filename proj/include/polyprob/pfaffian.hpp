#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/gram.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

/// Derivative vector indexed by the face set in canonical order; entry 0 is
/// the potential itself.  Everything here uses the unnormalized scale (the
/// plain Gaussian kernel exp(-|x|^2/2) without the (2*pi)^(-d/2) factor), so
/// the probability is values[0] / (2*pi)^(d/2) at the end of a run.
struct GVector {
    Eigen::VectorXd values;
};

/// b-derivative operator B_j, dense:  d/db_j g = B_j g, with
///   row J, j not in J:  g^{J u {j}}                  (one unit entry)
///   row J, j in J:      -(alpha_J^{-1} b_J)_j  g^J
///                       - sum_{l not in J} (alpha_J^{-1} G_{J,:})_{j,l} g^{J u {l}}.
/// Index sets leaving the face family are dropped (their entries vanish there).
inline Eigen::MatrixXd bj_matrix(const GramCache& cache, const Eigen::VectorXd& b, int j)
{
    const FaceComplex& fc = cache.faces();
    const int n = fc.num_halfspaces();
    if (j < 0 || j >= n) fail(ErrorCode::IndexOutOfRange, "half-space index out of range");
    if (b.size() != n) fail(ErrorCode::DimensionMismatch, "offset vector length != n");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(fc.size(), fc.size());
    for (int m = 0; m < fc.size(); ++m) {
        const Mask J = fc.member(m);
        if (!subset_contains(J, j)) {
            const int col = fc.index_of(J | (Mask{1} << j));
            if (col >= 0) M(m, col) = 1.0;
            continue;
        }
        const int k = subset_size(J);
        const auto idx = subset_indices(J);
        Eigen::MatrixXd W(k, n + 1);
        for (int r = 0; r < k; ++r) {
            for (int l = 0; l < n; ++l) W(r, l) = cache.gram()(idx[r], l);
            W(r, n) = b(idx[r]);
        }
        cache.solve_in_place(m, W.data(), n + 1);
        const int p = subset_rank(J, j);
        M(m, m) = -W(p, n);
        for (int l = 0; l < n; ++l) {
            if (subset_contains(J, l)) continue;
            const int col = fc.index_of(J | (Mask{1} << l));
            if (col >= 0) M(m, col) -= W(p, l);
        }
    }
    return M;
}

/// dB_j/db_k: diagonal, entry (J,J) = -alpha_J^{jk} when both j,k lie in J.
inline Eigen::MatrixXd bj_b_derivative(const GramCache& cache, int j, int k)
{
    const FaceComplex& fc = cache.faces();
    const int n = fc.num_halfspaces();
    if (j < 0 || j >= n || k < 0 || k >= n)
        fail(ErrorCode::IndexOutOfRange, "half-space index out of range");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(fc.size(), fc.size());
    for (int m = 0; m < fc.size(); ++m) {
        const Mask J = fc.member(m);
        if (!subset_contains(J, j) || !subset_contains(J, k)) continue;
        const Eigen::MatrixXd inv = cache.block_inverse(m);
        M(m, m) = -inv(subset_rank(J, j), subset_rank(J, k));
    }
    return M;
}

/// Mixed second derivative as an operator:  d/db_k d/db_j g = M_kj g with
/// M_kj = dB_j/db_k + B_j B_k.
inline Eigen::MatrixXd second_derivative_operator(const GramCache& cache, const Eigen::VectorXd& b,
                                                  int k, int j)
{
    return bj_b_derivative(cache, j, k) + bj_matrix(cache, b, j) * bj_matrix(cache, b, k);
}

/// a-derivative operator:  d/da_ij g = A_ij g with A_ij = sum_k a_ik M_kj.
inline Eigen::MatrixXd aij_matrix(const HalfspaceSystem& sys, const GramCache& cache, int i, int j)
{
    if (i < 0 || i >= sys.d) fail(ErrorCode::IndexOutOfRange, "coordinate index out of range");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(cache.size(), cache.size());
    for (int k = 0; k < sys.n; ++k) {
        const double w = sys.a(i, k);
        if (w != 0.0) M += w * second_derivative_operator(cache, sys.b, k, j);
    }
    return M;
}

/// Coordinate-format dump (one "rowset colset value" line per nonzero) for
/// eyeballing operators against an independent implementation.
inline void dump_operator(const Eigen::MatrixXd& M, const FaceComplex& fc, std::ostream& os)
{
    char buf[64];
    for (int r = 0; r < static_cast<int>(M.rows()); ++r)
        for (int c = 0; c < static_cast<int>(M.cols()); ++c)
            if (M(r, c) != 0.0) {
                std::snprintf(buf, sizeof buf, "%.17g", M(r, c));
                os << subset_str(fc.member(r)) << ' ' << subset_str(fc.member(c)) << ' ' << buf << '\n';
            }
}

/// Matrix-free evaluator for the Pfaffian right-hand side
///     dg/dt = [ sum_ij adot_ij A_ij + sum_j bdot_j B_j ] g.
/// The sparsity skeleton (which face feeds which) is fixed by the face set;
/// update() refreshes the numeric coefficients at the current (a, b), which
/// the integrator calls at every stage.
class PfaffianOperator {
public:
    PfaffianOperator(const HalfspaceSystem& sys, const FaceComplex& fc)
        : fc_(&fc), cache_(sys, fc), nf_(fc.size()), n_(fc.num_halfspaces()), d_(sys.d)
    {
        ext_.assign(static_cast<std::size_t>(nf_) * n_, -1);
        off1_.resize(nf_ + 1);
        off2_.resize(nf_ + 1);
        int o1 = 0, o2 = 0;
        for (int m = 0; m < nf_; ++m) {
            const Mask J = fc.member(m);
            off1_[m] = o1;
            off2_[m] = o2;
            const int k = subset_size(J);
            o1 += k;
            o2 += k * n_;
            for (int j = 0; j < n_; ++j)
                if (!subset_contains(J, j)) ext_[static_cast<std::size_t>(m) * n_ + j] = fc.index_of(J | (Mask{1} << j));
        }
        off1_[nf_] = o1;
        off2_[nf_] = o2;
        dvec_.resize(o1);
        coef_.resize(o2);
        scratch_.resize(static_cast<std::size_t>(std::max(1, sys.d)) * (n_ + 1));
        update(sys);
    }

    /// Refactor all Gram blocks and the pfaff3 coefficients at a new (a, b).
    void update(const HalfspaceSystem& sys)
    {
        cache_.update(sys);
        a_ = sys.a;
        for (int m = 0; m < nf_; ++m) {
            const Mask J = fc_->member(m);
            const int k = subset_size(J);
            if (k == 0) continue;
            const auto idx = subset_indices(J);
            double* W = scratch_.data(); // k x (n+1), column-major
            for (int c = 0; c < n_; ++c)
                for (int r = 0; r < k; ++r) W[c * k + r] = cache_.gram()(idx[r], c);
            for (int r = 0; r < k; ++r) W[n_ * k + r] = sys.b(idx[r]);
            cache_.solve_in_place(m, W, n_ + 1);
            for (int r = 0; r < k; ++r) {
                dvec_[off1_[m] + r] = W[n_ * k + r];
                double* row = coef_.data() + off2_[m] + static_cast<std::ptrdiff_t>(r) * n_;
                for (int c = 0; c < n_; ++c) row[c] = W[c * k + r];
            }
        }
    }

    const GramCache& cache() const { return cache_; }
    const FaceComplex& faces() const { return *fc_; }
    double max_gram_cond() const { return cache_.max_cond(); }

    /// y += s * B_j x  (coefficients from the last update()).
    void apply_bj_scaled(int j, double s, const double* x, double* y) const
    {
        const std::int32_t* ext = ext_.data();
        for (int m = 0; m < nf_; ++m) {
            const Mask J = fc_->member(m);
            if (subset_contains(J, j)) {
                const int p = subset_rank(J, j);
                double acc = -dvec_[off1_[m] + p] * x[m];
                const double* row = coef_.data() + off2_[m] + static_cast<std::ptrdiff_t>(p) * n_;
                const std::int32_t* e = ext + static_cast<std::ptrdiff_t>(m) * n_;
                for (int l = 0; l < n_; ++l) {
                    const std::int32_t col = e[l];
                    if (col >= 0) acc -= row[l] * x[col];
                }
                y[m] += s * acc;
            } else {
                const std::int32_t col = ext[static_cast<std::ptrdiff_t>(m) * n_ + j];
                if (col >= 0) y[m] += s * x[col];
            }
        }
    }

    /// out = [ sum_ij adot_ij A_ij + sum_j bdot_j B_j ] g at the last update()
    /// point.  adot may be empty (0x0) for paths that move b only.
    void rhs(const Eigen::MatrixXd& adot, const Eigen::VectorXd& bdot, const Eigen::VectorXd& g,
             Eigen::VectorXd& out)
    {
        out.setZero(nf_);
        const bool amove = adot.size() != 0 && adot.cwiseAbs().maxCoeff() != 0.0;
        if (!amove) {
            for (int j = 0; j < n_; ++j)
                if (bdot(j) != 0.0) apply_bj_scaled(j, bdot(j), g.data(), out.data());
            return;
        }
        // c_kj = sum_i a_ik adot_ij reduces the A_ij sum to
        //   sum_jk c_kj (dB_j/db_k + B_j B_k) g.
        c_ = a_.transpose() * adot;
        u_.setZero(nf_, n_);
        for (int k = 0; k < n_; ++k) apply_bj_scaled(k, 1.0, g.data(), u_.col(k).data());
        for (int j = 0; j < n_; ++j) {
            v_ = u_ * c_.col(j);
            if (bdot(j) != 0.0) v_ += bdot(j) * g;
            apply_bj_scaled(j, 1.0, v_.data(), out.data());
        }
        // diagonal dB_j/db_k part: out_J -= tr(alpha_J^{-1} c[J,J]^T) g_J
        for (int m = 0; m < nf_; ++m) {
            const Mask J = fc_->member(m);
            const int k = subset_size(J);
            if (k == 0) continue;
            const auto idx = subset_indices(J);
            double* Msub = scratch_.data(); // k x k, column-major: Msub(q,p) = c(J_q, J_p)
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q) Msub[p * k + q] = c_(idx[q], idx[p]);
            cache_.solve_in_place(m, Msub, k);
            double tr = 0.0;
            for (int p = 0; p < k; ++p) tr += Msub[p * k + p];
            out[m] -= tr * g[m];
        }
    }

private:
    const FaceComplex* fc_;
    GramCache cache_;
    int nf_, n_, d_;
    std::vector<std::int32_t> ext_; // nf x n: index of J u {j}, -1 when absent or j in J
    std::vector<int> off1_, off2_;
    std::vector<double> dvec_;      // alpha_J^{-1} b_J, flattened
    std::vector<double> coef_;      // alpha_J^{-1} G_{J,:}, flattened row-major k x n
    std::vector<double> scratch_;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd c_;
    Eigen::MatrixXd u_;
    Eigen::VectorXd v_;
};

/// One-shot right-hand-side evaluation (test convenience; the integrator keeps
/// a PfaffianOperator alive instead).
inline Eigen::VectorXd ode_rhs(const HalfspaceSystem& sys_at_t, const FaceComplex& fc,
                               const Eigen::MatrixXd& adot, const Eigen::VectorXd& bdot,
                               const Eigen::VectorXd& g)
{
    if (g.size() != fc.size()) fail(ErrorCode::DimensionMismatch, "g length != face count");
    PfaffianOperator op(sys_at_t, fc);
    Eigen::VectorXd out;
    op.rhs(adot, bdot, g, out);
    return out;
}

} // namespace polyprob

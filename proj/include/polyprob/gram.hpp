#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "polyprob/errors.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/subset.hpp"

namespace polyprob {

/// Cholesky factors of every face Gram block alpha_F(a) = (a_i . a_j)_{i,j in F},
/// plus determinants and a cheap condition estimate per block.  update() reuses
/// the storage, so the integrator can refactor at every stage of a moving path.
class GramCache {
public:
    GramCache(const HalfspaceSystem& sys, const FaceComplex& fc) : fc_(&fc)
    {
        offset_.resize(fc.size() + 1);
        int off = 0;
        for (int m = 0; m < fc.size(); ++m) {
            offset_[m] = off;
            const int k = subset_size(fc.member(m));
            off += k * k;
        }
        offset_[fc.size()] = off;
        chol_.resize(off);
        det_.resize(fc.size());
        cond_.resize(fc.size());
        update(sys);
    }

    void update(const HalfspaceSystem& sys)
    {
        gram_ = sys.a.transpose() * sys.a;
        max_cond_ = 1.0;
        for (int m = 0; m < fc_->size(); ++m) {
            const Mask J = fc_->member(m);
            const int k = subset_size(J);
            if (k == 0) {
                det_[m] = 1.0;
                cond_[m] = 1.0;
                continue;
            }
            const auto idx = subset_indices(J);
            double* L = chol_.data() + offset_[m];
            // lower factor, row-major; plain loops keep the small blocks cheap
            for (int r = 0; r < k; ++r) {
                for (int c = 0; c <= r; ++c) {
                    double v = gram_(idx[r], idx[c]);
                    for (int t = 0; t < c; ++t) v -= L[r * k + t] * L[c * k + t];
                    if (c == r) {
                        if (!(v > 0.0) || !std::isfinite(v))
                            fail(ErrorCode::SingularGram,
                                 "Gram block " + subset_str(J) + " is not positive definite");
                        L[r * k + r] = std::sqrt(v);
                    } else {
                        L[r * k + c] = v / L[c * k + c];
                    }
                }
            }
            double det = 1.0, lmin = L[0], lmax = L[0];
            for (int r = 0; r < k; ++r) {
                const double l = L[r * k + r];
                det *= l * l;
                lmin = std::min(lmin, l);
                lmax = std::max(lmax, l);
            }
            det_[m] = det;
            const double ratio = lmax / lmin;
            cond_[m] = ratio * ratio;
            max_cond_ = std::max(max_cond_, cond_[m]);
        }
    }

    int size() const { return fc_->size(); }
    const FaceComplex& faces() const { return *fc_; }
    const Eigen::MatrixXd& gram() const { return gram_; }
    double det(int m) const { return det_[m]; }
    double cond(int m) const { return cond_[m]; }
    double max_cond() const { return max_cond_; }

    /// Solve alpha_F X = B in place for member m; B is k x cols, column-major
    /// with leading dimension k.
    void solve_in_place(int m, double* B, int cols) const
    {
        const int k = subset_size(fc_->member(m));
        if (k == 0) return;
        const double* L = chol_.data() + offset_[m];
        for (int c = 0; c < cols; ++c) {
            double* x = B + static_cast<std::ptrdiff_t>(c) * k;
            for (int r = 0; r < k; ++r) {
                double v = x[r];
                for (int t = 0; t < r; ++t) v -= L[r * k + t] * x[t];
                x[r] = v / L[r * k + r];
            }
            for (int r = k - 1; r >= 0; --r) {
                double v = x[r];
                for (int t = r + 1; t < k; ++t) v -= L[t * k + r] * x[t];
                x[r] = v / L[r * k + r];
            }
        }
    }

    /// Dense inverse of one Gram block (test and diagnostic use).
    Eigen::MatrixXd block_inverse(int m) const
    {
        const int k = subset_size(fc_->member(m));
        Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
        solve_in_place(m, I.data(), k);
        return I;
    }

private:
    const FaceComplex* fc_;
    Eigen::MatrixXd gram_;
    std::vector<int> offset_;
    std::vector<double> chol_;
    std::vector<double> det_;
    std::vector<double> cond_;
    double max_cond_ = 1.0;
};

inline GramCache gram_cache(const HalfspaceSystem& sys, const FaceComplex& fc)
{
    return GramCache(sys, fc);
}

} // namespace polyprob

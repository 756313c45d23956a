#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fusion/error.hpp"

namespace fusion {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-1e-10 |m|, 0] are clamped to zero; anything lower throws NotPSD.
Mat psd_sqrt(const Mat& m);

// Inverse of the symmetric square root; m must be positive definite.
Mat psd_inv_sqrt(const Mat& m);

// Inverse through Cholesky; NotPSD when the factorisation fails.
Mat spd_inverse(const Mat& m);

struct Pooled {
  Mat precision;  // sum of inverses
  Mat cov;        // inverse of the sum
};

Pooled pooled_precision(const std::vector<Mat>& lambdas);

Vec weighted_center(const std::vector<Mat>& lambdas, const std::vector<Vec>& points);

// Same as above with the inverses and pooled covariance already at hand.
Vec weighted_center(const Mat& pooled_cov, const std::vector<Mat>& inverses,
                    const std::vector<Vec>& points);

// Spectral norm max |Ax| / |x|.
double operator_norm(const Mat& m);

bool is_symmetric(const Mat& m, double rel_tol = 1e-12);

// Weighted mean and covariance of the columns of x (d x n). Weights are
// normalised internally; empty weights mean uniform.
Vec weighted_mean(const Mat& x, const Vec& w);
Mat weighted_cov(const Mat& x, const Vec& w);

}  // namespace fusion

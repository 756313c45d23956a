#pragma once

#include <functional>
#include <vector>

#include "fusion/linalg.hpp"

namespace fusion {

// merged_i = (Σ W_c)⁻¹ Σ W_c x_i^(c). Empty W means inverse sample covariances.
Mat consensus_merge(const std::vector<Mat>& sub_samples, std::vector<Mat> W = {});

struct Kde1D {
  Vec grid;
  Vec density;
  double bandwidth = 0;
  Vec points;   // the data
  Vec weights;  // normalised

  // Exact kernel sum at x.
  double operator()(double x) const;
};

// Gaussian-kernel KDE with Silverman bandwidth 0.9 min(sd, IQR/1.34) n_eff^{-1/5},
// n_eff = 1/Σw², on a grid over the data range ± 3 bandwidths.
Kde1D kde_1d(const Vec& x, const Vec& w = {}, int grid_points = 512);

struct Marginal {
  std::function<double(double)> pdf;
  double lo;
  double hi;
};

Marginal normal_marginal(double mean, double sd);

// Half L1 distance averaged over dimensions, clamped to [0, 1].
double iad(const Mat& a, const Vec& wa, const Mat& b, const Vec& wb);
double iad(const Mat& a, const Vec& wa, const std::vector<Marginal>& reference);
double iad(const Marginal& a, const Marginal& b, int grid_points = 20001);

}  // namespace fusion

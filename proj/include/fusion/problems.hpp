#pragma once

#include <vector>

#include "fusion/baselines.hpp"
#include "fusion/regression.hpp"

namespace fusion {

struct Problem {
  std::vector<ModelPtr> factors;
  ModelPtr full;  // the unsplit posterior, used for reference draws
  int d = 0;
  double m = 1;   // data size fed to the guidance
  // Analytic target when the factors are Gaussian; empty otherwise.
  Vec target_mean;
  Mat target_cov;
  std::vector<Marginal> reference;
};

// Product of arbitrary Gaussian factors N(means[c], covs[c]).
Problem gaussian_factors(const std::vector<Vec>& means, const std::vector<Mat>& covs);

// C factors N(μ_c, (C/m) Σ) with Σ unit-diagonal, off-diagonal ρ. The means are
// spread evenly over [-shift, shift] along the all-ones direction.
Problem gaussian_synthetic(int C, int d, double rho, double m, double shift = 0);

// m rows of binary covariates with activation probabilities p and a logistic
// response under coefficients beta (intercept first).
RegressionData logistic_synthetic(int m, const std::vector<double>& p, const Vec& beta, Rng& rng);

// The default generator: p = (0.2, 0.3, 0.5, 0.01), β = (-3, 1.2, -0.5, 0.8, 3).
RegressionData logistic_synthetic(int m, Rng& rng);

// Splits the rows into C contiguous shards; every shard keeps the prior mean
// and has its prior variance multiplied by C. `data` holds the unsplit prior.
Problem regression_problem(Family family, const RegressionData& data, int C);

}  // namespace fusion

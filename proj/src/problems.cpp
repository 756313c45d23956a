#include "fusion/problems.hpp"

#include <cmath>

namespace fusion {

Problem gaussian_factors(const std::vector<Vec>& means, const std::vector<Mat>& covs) {
  require(!means.empty() && means.size() == covs.size(), Errc::DimensionMismatch, "gaussian factors");
  Problem p;
  p.d = int(means.front().size());
  for (size_t c = 0; c < means.size(); ++c) p.factors.push_back(std::make_shared<GaussianModel>(means[c], covs[c]));
  Pooled pooled = pooled_precision(covs);
  p.target_cov = pooled.cov;
  p.target_mean = weighted_center(covs, means);
  p.full = std::make_shared<GaussianModel>(p.target_mean, p.target_cov);
  for (int j = 0; j < p.d; ++j) p.reference.push_back(normal_marginal(p.target_mean(j), std::sqrt(p.target_cov(j, j))));
  return p;
}

Problem gaussian_synthetic(int C, int d, double rho, double m, double shift) {
  require(C >= 1 && d >= 1 && m > 0, Errc::BadArgument, "gaussian synthetic sizes");
  require(rho > -1.0 / std::max(1, d - 1) && rho < 1, Errc::NotPSD, "rho out of range");
  Mat sigma = Mat::Constant(d, d, rho);
  sigma.diagonal().setOnes();
  std::vector<Vec> means;
  std::vector<Mat> covs;
  for (int c = 0; c < C; ++c) {
    double s = C == 1 ? 0.0 : shift * (2.0 * c / (C - 1) - 1.0);
    means.push_back(Vec::Constant(d, s));
    covs.push_back((double(C) / m) * sigma);
  }
  Problem p = gaussian_factors(means, covs);
  p.m = m;
  return p;
}

RegressionData logistic_synthetic(int m, const std::vector<double>& p, const Vec& beta, Rng& rng) {
  require(m >= 1, Errc::BadArgument, "need at least one row");
  require(beta.size() == Eigen::Index(p.size()) + 1, Errc::DimensionMismatch, "beta needs an intercept");
  RegressionData data;
  const auto d = beta.size();
  data.X = Mat::Zero(m, d);
  data.y.resize(m);
  for (int i = 0; i < m; ++i) {
    data.X(i, 0) = 1.0;
    for (size_t j = 0; j < p.size(); ++j) data.X(i, Eigen::Index(j) + 1) = unif01(rng) < p[j] ? 1.0 : 0.0;
    double eta = data.X.row(i).dot(beta);
    data.y(i) = unif01(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  data.prior_mean = Vec::Zero(d);
  data.prior_var = Vec::Ones(d);
  return data;
}

RegressionData logistic_synthetic(int m, Rng& rng) {
  Vec beta(5);
  beta << -3, 1.2, -0.5, 0.8, 3;
  return logistic_synthetic(m, {0.2, 0.3, 0.5, 0.01}, beta, rng);
}

Problem regression_problem(Family family, const RegressionData& data, int C) {
  const auto n = data.X.rows();
  require(C >= 1 && C <= n, Errc::BadArgument, "shard count must lie in [1, rows]");
  Problem p;
  p.d = int(data.X.cols());
  p.m = double(n);
  p.full = std::make_shared<RegressionModel>(family, data);
  for (int c = 0; c < C; ++c) {
    RegressionData shard = slice_rows(data, n * c / C, n * (c + 1) / C);
    shard.prior_var = data.prior_var * double(C);
    p.factors.push_back(std::make_shared<RegressionModel>(family, shard));
  }
  return p;
}

}  // namespace fusion

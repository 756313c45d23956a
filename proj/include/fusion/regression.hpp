#pragma once

#include <string>

#include "fusion/model.hpp"

namespace fusion {

enum class Family { Logistic, RobustT, NegBin };

struct RegressionData {
  Mat X;            // n x (p+1), intercept column included
  Vec y;            // n
  Vec prior_mean;   // p+1
  Vec prior_var;    // p+1, already scaled by the number of shards
  double nu = 5.0;     // robust-t degrees of freedom
  double sigma = 1.0;  // robust-t scale
  double r = 1.0;      // negative binomial size
};

class RegressionModel : public Model {
 public:
  RegressionModel(Family family, RegressionData data);
  int dim() const override { return int(data_.X.cols()); }
  double log_density(const Vec& x) const override;
  Vec grad(const Vec& x) const override;
  Mat hess(const Vec& x) const override;
  std::unique_ptr<Whitened> whiten(const Mat& lambda_sqrt, BoundMode mode) const override;

  Family family() const { return family_; }
  const RegressionData& data() const { return data_; }

 private:
  Family family_;
  RegressionData data_;
};

// Reads a CSV with a header row. Column `y` is the response, every other
// column is a feature; an intercept column is prepended to the design.
RegressionData load_regression_csv(const std::string& path);

// Rows [begin, end) of the data with the same hyperparameters.
RegressionData slice_rows(const RegressionData& data, Eigen::Index begin, Eigen::Index end);

}  // namespace fusion

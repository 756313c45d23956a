#include "fusion/regression.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fusion {

namespace {

// log(1 + e^a) without overflow.
double softplus(double a) { return a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

double sigmoid(double a) {
  if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
  double e = std::exp(a);
  return e / (1.0 + e);
}

// e^a / (e^a + r)^2 evaluated in log space.
double gr(double a, double r) {
  double lr = std::log(r);
  double lse = a > lr ? a + std::log1p(r * std::exp(-a)) : lr + std::log1p(std::exp(a - lr));
  return std::exp(a - 2.0 * lse);
}

// e^a / (e^a + r)
double ratio(double a, double r) {
  double lr = std::log(r);
  return a > lr ? 1.0 / (1.0 + r * std::exp(-a)) : std::exp(a - lr) / (1.0 + std::exp(a - lr));
}

// sup over E in [e_lo, e_hi] of |1/(E+b) - 2b/(E+b)^2|.
double robust_kernel_sup(double e_lo, double e_hi, double b) {
  auto k = [b](double e) { return 1.0 / (e + b) - 2.0 * b / ((e + b) * (e + b)); };
  double m = std::max(std::abs(k(e_lo)), std::abs(k(e_hi)));
  if (e_lo <= 3 * b && 3 * b <= e_hi) m = std::max(m, 1.0 / (8.0 * b));
  return m;
}

class RegressionWhitened : public Whitened {
 public:
  RegressionWhitened(const RegressionModel& m, const Mat& s, BoundMode mode)
      : Whitened(m.dim()), fam_(m.family()), data_(m.data()), s_(s), mode_(mode) {
    a_ = data_.X * s;
    abs_a_ = a_.cwiseAbs();
    row_sq_ = a_.rowwise().squaredNorm();
    Vec dinv = data_.prior_var.cwiseInverse();
    sd_ = s * dinv.asDiagonal();
    q_ = sd_ * s;
    q_ = 0.5 * (q_ + q_.transpose());
    abs_q_ = q_.cwiseAbs();
    tr_q_ = q_.trace();
    b_ = data_.nu * data_.sigma * data_.sigma;
    if (mode_ == BoundMode::Global) {
      Vec w(a_.rows());
      for (Eigen::Index i = 0; i < a_.rows(); ++i) w(i) = coef(i) * global_g();
      global_ = abs_a_.transpose() * w.asDiagonal() * abs_a_ + abs_q_;
    }
  }

  double grad_trace(const Vec& z, Vec& g) const override {
    Vec eta = a_ * z;
    Vec x = s_ * z;
    Vec resid(eta.size());
    double tr = -tr_q_;
    const Vec& y = data_.y;
    switch (fam_) {
      case Family::Logistic:
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
          double p = sigmoid(eta(i));
          resid(i) = y(i) - p;
          tr -= p * (1 - p) * row_sq_(i);
        }
        break;
      case Family::NegBin:
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
          resid(i) = y(i) - (y(i) + data_.r) * ratio(eta(i), data_.r);
          tr -= (y(i) + data_.r) * data_.r * gr(eta(i), data_.r) * row_sq_(i);
        }
        break;
      case Family::RobustT:
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
          double e = y(i) - eta(i);
          double den = b_ + e * e;
          resid(i) = (data_.nu + 1) * e / den;
          tr += (data_.nu + 1) * (e * e - b_) / (den * den) * row_sq_(i);
        }
        break;
    }
    g = a_.transpose() * resid - sd_ * (x - data_.prior_mean);
    return tr;
  }

  Mat hess_abs_bound(const Vec& lo, const Vec& hi) const override {
    if (mode_ == BoundMode::Global) return global_;
    Vec mid = 0.5 * (lo + hi);
    Vec half = 0.5 * (hi - lo);
    Vec centre = a_ * mid;
    Vec radius = abs_a_ * half;
    Vec w(a_.rows());
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      double f_lo = centre(i) - radius(i), f_hi = centre(i) + radius(i);
      w(i) = coef(i) * local_g(i, f_lo, f_hi);
    }
    return abs_a_.transpose() * w.asDiagonal() * abs_a_ + abs_q_;
  }

 private:
  double coef(Eigen::Index i) const {
    switch (fam_) {
      case Family::Logistic: return 1.0;
      case Family::NegBin: return (data_.y(i) + data_.r) * data_.r;
      case Family::RobustT: return data_.nu + 1;
    }
    return 1.0;
  }

  double global_g() const {
    switch (fam_) {
      case Family::Logistic: return 0.25;
      case Family::NegBin: return 0.25 / data_.r;
      case Family::RobustT: return 1.0 / b_;
    }
    return 0;
  }

  // Bound on the row weight given the range [f_lo, f_hi] of the linear predictor.
  double local_g(Eigen::Index i, double f_lo, double f_hi) const {
    switch (fam_) {
      case Family::Logistic: return interval_g(f_lo, f_hi, 1.0);
      case Family::NegBin: return interval_g(f_lo, f_hi, data_.r);
      case Family::RobustT: {
        double e_lo = data_.y(i) - f_hi, e_hi = data_.y(i) - f_lo;
        double sq_lo = (e_lo <= 0 && e_hi >= 0) ? 0.0 : std::min(e_lo * e_lo, e_hi * e_hi);
        double sq_hi = std::max(e_lo * e_lo, e_hi * e_hi);
        return robust_kernel_sup(sq_lo, sq_hi, b_);
      }
    }
    return 0;
  }

  static double interval_g(double f_lo, double f_hi, double r) {
    double mode = std::log(r);
    if (f_lo <= mode && mode <= f_hi) return 0.25 / r;
    return f_hi < mode ? gr(f_hi, r) : gr(f_lo, r);
  }

  Family fam_;
  const RegressionData& data_;
  Mat s_;
  BoundMode mode_;
  Mat a_;
  Mat abs_a_;
  Vec row_sq_;
  Mat sd_;
  Mat q_;
  Mat abs_q_;
  double tr_q_;
  double b_;
  Mat global_;
};

}  // namespace

RegressionModel::RegressionModel(Family family, RegressionData data)
    : family_(family), data_(std::move(data)) {
  const auto n = data_.X.rows(), p = data_.X.cols();
  require(n >= 1 && p >= 1, Errc::EmptyInput, "regression data is empty");
  require(data_.y.size() == n, Errc::DimensionMismatch, "response length");
  require(data_.prior_mean.size() == p && data_.prior_var.size() == p, Errc::DimensionMismatch,
          "prior length");
  require((data_.prior_var.array() > 0).all(), Errc::BadArgument, "prior variances must be positive");
  if (family_ == Family::Logistic)
    require(((data_.y.array() == 0) || (data_.y.array() == 1)).all(), Errc::BadArgument,
            "logistic response must be 0/1");
  if (family_ == Family::NegBin) {
    require(data_.r > 0, Errc::BadArgument, "negative binomial size must be positive");
    for (Eigen::Index i = 0; i < n; ++i)
      require(data_.y(i) >= 0 && data_.y(i) == std::floor(data_.y(i)), Errc::BadArgument,
              "negative binomial response must be a count");
  }
  if (family_ == Family::RobustT)
    require(data_.nu > 0 && data_.sigma > 0, Errc::BadArgument, "robust-t parameters");
}

double RegressionModel::log_density(const Vec& x) const {
  require(x.size() == dim(), Errc::DimensionMismatch, "log_density");
  Vec eta = data_.X * x;
  const Vec& y = data_.y;
  double s = 0;
  switch (family_) {
    case Family::Logistic:
      for (Eigen::Index i = 0; i < eta.size(); ++i) s += eta(i) * y(i) - softplus(eta(i));
      break;
    case Family::NegBin: {
      double lr = std::log(data_.r);
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double lse = eta(i) > lr ? eta(i) + std::log1p(data_.r * std::exp(-eta(i)))
                                 : lr + std::log1p(std::exp(eta(i) - lr));
        s += eta(i) * y(i) - (y(i) + data_.r) * lse;
      }
      break;
    }
    case Family::RobustT: {
      double b = data_.nu * data_.sigma * data_.sigma;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double e = y(i) - eta(i);
        s -= 0.5 * (data_.nu + 1) * std::log1p(e * e / b);
      }
      break;
    }
  }
  Vec d = x - data_.prior_mean;
  s -= 0.5 * (d.array().square() / data_.prior_var.array()).sum();
  require(std::isfinite(s), Errc::NonFinite, "log_density overflow");
  return s;
}

Vec RegressionModel::grad(const Vec& x) const {
  require(x.size() == dim(), Errc::DimensionMismatch, "grad");
  Vec eta = data_.X * x;
  const Vec& y = data_.y;
  Vec w(eta.size());
  double b = data_.nu * data_.sigma * data_.sigma;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    switch (family_) {
      case Family::Logistic: w(i) = y(i) - sigmoid(eta(i)); break;
      case Family::NegBin: w(i) = y(i) - (y(i) + data_.r) * ratio(eta(i), data_.r); break;
      case Family::RobustT: {
        double e = y(i) - eta(i);
        w(i) = (data_.nu + 1) * e / (b + e * e);
        break;
      }
    }
  }
  Vec g = data_.X.transpose() * w;
  g.array() -= (x - data_.prior_mean).array() / data_.prior_var.array();
  return g;
}

Mat RegressionModel::hess(const Vec& x) const {
  require(x.size() == dim(), Errc::DimensionMismatch, "hess");
  Vec eta = data_.X * x;
  const Vec& y = data_.y;
  Vec w(eta.size());
  double b = data_.nu * data_.sigma * data_.sigma;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    switch (family_) {
      case Family::Logistic: {
        double p = sigmoid(eta(i));
        w(i) = -p * (1 - p);
        break;
      }
      case Family::NegBin: w(i) = -(y(i) + data_.r) * data_.r * gr(eta(i), data_.r); break;
      case Family::RobustT: {
        double e = y(i) - eta(i);
        double den = b + e * e;
        w(i) = (data_.nu + 1) * (e * e - b) / (den * den);
        break;
      }
    }
  }
  Mat h = data_.X.transpose() * w.asDiagonal() * data_.X;
  h.diagonal().array() -= data_.prior_var.cwiseInverse().array();
  return 0.5 * (h + h.transpose());
}

std::unique_ptr<Whitened> RegressionModel::whiten(const Mat& s, BoundMode mode) const {
  require(s.rows() == dim() && s.cols() == dim(), Errc::DimensionMismatch, "whiten");
  return std::make_unique<RegressionWhitened>(*this, s, mode);
}

RegressionData load_regression_csv(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), Errc::ConfigInvalid, "cannot open data file " + path);
  std::string line;
  require(bool(std::getline(in, line)), Errc::EmptyInput, "data file has no header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      header.push_back(cell);
    }
  }
  int ycol = -1;
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == "y") ycol = int(j);
  require(ycol >= 0, Errc::ConfigInvalid, "data file lacks a `y` column");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(row.size() == header.size(), Errc::DimensionMismatch, "ragged row in " + path);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), Errc::EmptyInput, "data file has no rows");
  const auto n = Eigen::Index(rows.size());
  const auto p = Eigen::Index(header.size());
  RegressionData data;
  data.X.resize(n, p);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    Eigen::Index k = 1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == ycol) data.y(i) = rows[i][j];
      else data.X(i, k++) = rows[i][j];
    }
  }
  data.prior_mean = Vec::Zero(p);
  data.prior_var = Vec::Ones(p);
  return data;
}

RegressionData slice_rows(const RegressionData& data, Eigen::Index begin, Eigen::Index end) {
  require(0 <= begin && begin < end && end <= data.X.rows(), Errc::BadArgument, "slice_rows range");
  RegressionData out = data;
  out.X = data.X.middleRows(begin, end - begin);
  out.y = data.y.segment(begin, end - begin);
  return out;
}

}  // namespace fusion

#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "fusion/linalg.hpp"
#include "fusion/rng.hpp"

namespace fusion {

struct PhiBounds {
  double lower;
  double upper;
};

enum class BoundMode { Local, Global };

// A factor seen through the change of variables x = S z, S = Λ^{1/2}.
// Everything here is expressed in z: the gradient is S ∇log f(Sz) and the
// Hessian is S ∇²log f(Sz) S.
class Whitened {
 public:
  explicit Whitened(int d) : d_(d) {}
  virtual ~Whitened() = default;

  int dim() const { return d_; }

  // Writes the whitened gradient into g and returns the whitened Hessian trace.
  virtual double grad_trace(const Vec& z, Vec& g) const = 0;

  // Element-wise bound on |whitened Hessian| valid over the box [lo, hi].
  virtual Mat hess_abs_bound(const Vec& lo, const Vec& hi) const = 0;

  // Global lower bound of φ, or -inf when unknown.
  virtual double phi_floor() const { return -std::numeric_limits<double>::infinity(); }

  double phi(const Vec& z) const;

  // L = -d P / 2 (raised to phi_floor when that is larger) and
  // U = ((|g(ẑ)| + r P)^2 + d P) / 2 with ẑ the box midpoint and r its half diagonal.
  PhiBounds bounds(const Vec& lo, const Vec& hi) const;

 private:
  int d_;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual int dim() const = 0;
  virtual double log_density(const Vec& x) const = 0;
  virtual Vec grad(const Vec& x) const = 0;
  virtual Mat hess(const Vec& x) const = 0;
  virtual std::unique_ptr<Whitened> whiten(const Mat& lambda_sqrt,
                                           BoundMode mode = BoundMode::Local) const = 0;
  virtual bool has_exact_sampler() const { return false; }
  virtual Vec draw(Rng& rng) const;
};

using ModelPtr = std::shared_ptr<const Model>;

// ½(gᵀΛg + Tr(ΛH)) in the original coordinates.
double phi(const Model& model, const Mat& lambda, const Vec& x);

// Gradient-and-curvature bounds on φ over the box [lo, hi] in whitened coordinates.
PhiBounds phi_interval_bounds(const Whitened& w, const Vec& lo, const Vec& hi);

class GaussianModel : public Model {
 public:
  GaussianModel(Vec mean, Mat cov);
  int dim() const override { return int(mean_.size()); }
  double log_density(const Vec& x) const override;
  Vec grad(const Vec& x) const override;
  Mat hess(const Vec& x) const override;
  std::unique_ptr<Whitened> whiten(const Mat& lambda_sqrt, BoundMode mode) const override;
  bool has_exact_sampler() const override { return true; }
  Vec draw(Rng& rng) const override;

  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  const Mat& precision() const { return prec_; }

 private:
  Vec mean_;
  Mat cov_;
  Mat prec_;
  Mat chol_;
};

// Product of several factors over the same parameter: log-densities,
// gradients and Hessians add.
class ProductModel : public Model {
 public:
  explicit ProductModel(std::vector<ModelPtr> parts);
  int dim() const override { return parts_.front()->dim(); }
  double log_density(const Vec& x) const override;
  Vec grad(const Vec& x) const override;
  Mat hess(const Vec& x) const override;
  std::unique_ptr<Whitened> whiten(const Mat& lambda_sqrt, BoundMode mode) const override;
  const std::vector<ModelPtr>& parts() const { return parts_; }

 private:
  std::vector<ModelPtr> parts_;
};

class TemperedModel : public Model {
 public:
  TemperedModel(ModelPtr base, double beta);
  int dim() const override { return base_->dim(); }
  double log_density(const Vec& x) const override { return beta_ * base_->log_density(x); }
  Vec grad(const Vec& x) const override { return beta_ * base_->grad(x); }
  Mat hess(const Vec& x) const override { return beta_ * base_->hess(x); }
  std::unique_ptr<Whitened> whiten(const Mat& lambda_sqrt, BoundMode mode) const override;

 private:
  ModelPtr base_;
  double beta_;
};

// f^β. Gaussians stay Gaussian (covariance / β) so they keep exact draws.
ModelPtr temper(const ModelPtr& model, double beta);

ModelPtr product(const std::vector<ModelPtr>& parts);

// max over the box of e^F/(e^F + r)^2 where F = row·z.
double g_max(const Vec& lo, const Vec& hi, const Vec& row, double r);

}  // namespace fusion

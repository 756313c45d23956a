#include "fusion/model.hpp"

#include <cmath>

namespace fusion {

double Whitened::phi(const Vec& z) const {
  Vec g(d_);
  double tr = grad_trace(z, g);
  return 0.5 * (g.squaredNorm() + tr);
}

PhiBounds Whitened::bounds(const Vec& lo, const Vec& hi) const {
  require(lo.size() == d_ && hi.size() == d_, Errc::DimensionMismatch, "bounds box");
  require(lo.allFinite() && hi.allFinite(), Errc::UnboundedRegion, "box must be bounded");
  Mat b = hess_abs_bound(lo, hi);
  double p = operator_norm(b);
  Vec mid = 0.5 * (lo + hi);
  double r = 0.5 * (hi - lo).norm();
  Vec g(d_);
  grad_trace(mid, g);
  double gn = g.norm();
  double upper = 0.5 * ((gn + r * p) * (gn + r * p) + d_ * p);
  double lower = std::max(-0.5 * d_ * p, phi_floor());
  return {lower, upper};
}

PhiBounds phi_interval_bounds(const Whitened& w, const Vec& lo, const Vec& hi) {
  return w.bounds(lo, hi);
}

Vec Model::draw(Rng&) const {
  throw Error(Errc::BadArgument, "model has no exact sampler");
}

double phi(const Model& model, const Mat& lambda, const Vec& x) {
  require(x.size() == model.dim(), Errc::DimensionMismatch, "phi");
  Vec g = model.grad(x);
  Mat h = model.hess(x);
  return 0.5 * (g.dot(lambda * g) + (lambda * h).trace());
}

// ---------------------------------------------------------------- Gaussian

namespace {

class GaussianWhitened : public Whitened {
 public:
  GaussianWhitened(const GaussianModel& m, const Mat& s)
      : Whitened(m.dim()), s_(s), mean_(m.mean()) {
    sp_ = s * m.precision();
    p_ = sp_ * s;
    p_ = 0.5 * (p_ + p_.transpose());
    abs_ = p_.cwiseAbs();
    tr_ = -p_.trace();
  }
  double grad_trace(const Vec& z, Vec& g) const override {
    g = sp_ * (mean_ - s_ * z);
    return tr_;
  }
  Mat hess_abs_bound(const Vec&, const Vec&) const override { return abs_; }
  double phi_floor() const override { return 0.5 * tr_; }

 private:
  Mat s_;
  Vec mean_;
  Mat sp_;
  Mat p_;
  Mat abs_;
  double tr_;
};

}  // namespace

GaussianModel::GaussianModel(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  require(cov_.rows() == mean_.size() && cov_.cols() == mean_.size(), Errc::DimensionMismatch,
          "Gaussian covariance");
  prec_ = spd_inverse(cov_);
  Eigen::LLT<Mat> llt(cov_);
  chol_ = llt.matrixL();
}

double GaussianModel::log_density(const Vec& x) const {
  require(x.size() == mean_.size(), Errc::DimensionMismatch, "log_density");
  Vec r = x - mean_;
  return -0.5 * r.dot(prec_ * r);
}

Vec GaussianModel::grad(const Vec& x) const {
  require(x.size() == mean_.size(), Errc::DimensionMismatch, "grad");
  return -prec_ * (x - mean_);
}

Mat GaussianModel::hess(const Vec&) const { return -prec_; }

std::unique_ptr<Whitened> GaussianModel::whiten(const Mat& s, BoundMode) const {
  require(s.rows() == dim() && s.cols() == dim(), Errc::DimensionMismatch, "whiten");
  return std::make_unique<GaussianWhitened>(*this, s);
}

Vec GaussianModel::draw(Rng& rng) const {
  Vec e(dim());
  for (int i = 0; i < dim(); ++i) e(i) = std_normal(rng);
  return mean_ + chol_ * e;
}

// ----------------------------------------------------------------- Product

namespace {

class ProductWhitened : public Whitened {
 public:
  ProductWhitened(int d, std::vector<std::unique_ptr<Whitened>> parts)
      : Whitened(d), parts_(std::move(parts)) {}
  double grad_trace(const Vec& z, Vec& g) const override {
    g.setZero(dim());
    Vec gi(dim());
    double tr = 0;
    for (const auto& p : parts_) {
      tr += p->grad_trace(z, gi);
      g += gi;
    }
    return tr;
  }
  Mat hess_abs_bound(const Vec& lo, const Vec& hi) const override {
    Mat b = Mat::Zero(dim(), dim());
    for (const auto& p : parts_) b += p->hess_abs_bound(lo, hi);
    return b;
  }

 private:
  std::vector<std::unique_ptr<Whitened>> parts_;
};

class TemperedWhitened : public Whitened {
 public:
  TemperedWhitened(std::unique_ptr<Whitened> base, double beta)
      : Whitened(base->dim()), base_(std::move(base)), beta_(beta) {}
  double grad_trace(const Vec& z, Vec& g) const override {
    double tr = base_->grad_trace(z, g);
    g *= beta_;
    return beta_ * tr;
  }
  Mat hess_abs_bound(const Vec& lo, const Vec& hi) const override {
    return beta_ * base_->hess_abs_bound(lo, hi);
  }

 private:
  std::unique_ptr<Whitened> base_;
  double beta_;
};

}  // namespace

ProductModel::ProductModel(std::vector<ModelPtr> parts) : parts_(std::move(parts)) {
  require(!parts_.empty(), Errc::EmptyInput, "product of no factors");
  for (const auto& p : parts_)
    require(p && p->dim() == parts_.front()->dim(), Errc::DimensionMismatch, "product factors");
}

double ProductModel::log_density(const Vec& x) const {
  double s = 0;
  for (const auto& p : parts_) s += p->log_density(x);
  return s;
}

Vec ProductModel::grad(const Vec& x) const {
  Vec g = Vec::Zero(dim());
  for (const auto& p : parts_) g += p->grad(x);
  return g;
}

Mat ProductModel::hess(const Vec& x) const {
  Mat h = Mat::Zero(dim(), dim());
  for (const auto& p : parts_) h += p->hess(x);
  return h;
}

std::unique_ptr<Whitened> ProductModel::whiten(const Mat& s, BoundMode mode) const {
  std::vector<std::unique_ptr<Whitened>> w;
  w.reserve(parts_.size());
  for (const auto& p : parts_) w.push_back(p->whiten(s, mode));
  return std::make_unique<ProductWhitened>(dim(), std::move(w));
}

TemperedModel::TemperedModel(ModelPtr base, double beta) : base_(std::move(base)), beta_(beta) {
  require(beta_ > 0 && beta_ <= 1, Errc::BadBeta, "temper beta must lie in (0,1]");
}

std::unique_ptr<Whitened> TemperedModel::whiten(const Mat& s, BoundMode mode) const {
  return std::make_unique<TemperedWhitened>(base_->whiten(s, mode), beta_);
}

ModelPtr temper(const ModelPtr& model, double beta) {
  require(beta > 0 && beta <= 1, Errc::BadBeta, "temper beta must lie in (0,1]");
  if (beta == 1) return model;
  if (auto g = std::dynamic_pointer_cast<const GaussianModel>(model))
    return std::make_shared<GaussianModel>(g->mean(), g->cov() / beta);
  return std::make_shared<TemperedModel>(model, beta);
}

ModelPtr product(const std::vector<ModelPtr>& parts) {
  if (parts.size() == 1) return parts.front();
  std::vector<ModelPtr> flat;
  for (const auto& p : parts) {
    if (auto pm = std::dynamic_pointer_cast<const ProductModel>(p))
      flat.insert(flat.end(), pm->parts().begin(), pm->parts().end());
    else
      flat.push_back(p);
  }
  return std::make_shared<ProductModel>(std::move(flat));
}

// ------------------------------------------------------------------- g_max

namespace {

double g_of(double f, double r) {
  double lse = f > std::log(r) ? f + std::log1p(r * std::exp(-f)) : std::log(r) + std::log1p(std::exp(f) / r);
  return std::exp(f - 2.0 * lse);
}

}  // namespace

double g_max(const Vec& lo, const Vec& hi, const Vec& row, double r) {
  require(lo.size() == row.size() && hi.size() == row.size(), Errc::DimensionMismatch, "g_max");
  const double mode = std::log(r);
  double centre = 0.5 * row.dot(lo + hi);
  if (centre > mode) {
    double f_min = 0;
    for (Eigen::Index k = 0; k < row.size(); ++k) f_min += row(k) >= 0 ? row(k) * lo(k) : row(k) * hi(k);
    return f_min < mode ? 0.25 / r : g_of(f_min, r);
  }
  double f_max = 0;
  for (Eigen::Index k = 0; k < row.size(); ++k) f_max += row(k) >= 0 ? row(k) * hi(k) : row(k) * lo(k);
  return f_max > mode ? 0.25 / r : g_of(f_max, r);
}

}  // namespace fusion

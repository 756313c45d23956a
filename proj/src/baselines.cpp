#include "fusion/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace fusion {

Mat consensus_merge(const std::vector<Mat>& sub, std::vector<Mat> W) {
  require(!sub.empty(), Errc::EmptyInput, "no sub-posterior samples");
  const auto d = sub.front().rows(), n = sub.front().cols();
  for (const auto& s : sub)
    require(s.rows() == d && s.cols() == n, Errc::CountMismatch, "sub-posterior sample counts differ");
  if (W.empty())
    for (const auto& s : sub) W.push_back(spd_inverse(weighted_cov(s, Vec())));
  require(W.size() == sub.size(), Errc::CountMismatch, "one weight matrix per factor");
  Mat total = Mat::Zero(d, d);
  Mat acc = Mat::Zero(d, n);
  for (size_t c = 0; c < sub.size(); ++c) {
    total += W[c];
    acc += W[c] * sub[c];
  }
  return spd_inverse(total) * acc;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double weighted_quantile(const Vec& x, const Vec& w, double q) {
  std::vector<int> idx(x.size());
  for (int i = 0; i < int(idx.size()); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) < x(b); });
  double cum = 0;
  for (int i : idx) {
    cum += w(i);
    if (cum >= q) return x(i);
  }
  return x(idx.back());
}

double trapezoid(const std::vector<double>& g, const std::vector<double>& f) {
  double s = 0;
  for (size_t i = 1; i < g.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
  return s;
}

double half_l1(const std::function<double(double)>& f, const std::function<double(double)>& g,
               std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> diff(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) diff[i] = std::abs(f(grid[i]) - g(grid[i]));
  return 0.5 * trapezoid(grid, diff);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Vec normalised(const Vec& w, Eigen::Index n) {
  if (w.size() == 0) return Vec::Constant(n, 1.0 / double(n));
  require(w.size() == n, Errc::DimensionMismatch, "weights and samples differ in length");
  double s = w.sum();
  require(s > 0, Errc::AllZeroWeights, "weights sum to zero");
  // constant weights take the unweighted path so the two agree bit for bit
  if ((w.array() == w(0)).all()) return Vec::Constant(n, 1.0 / double(n));
  return w / s;
}

}  // namespace

double Kde1D::operator()(double x) const {
  const double inv_h = 1.0 / bandwidth;
  double s = 0;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    double u = (x - points(i)) * inv_h;
    if (std::abs(u) < 40) s += weights(i) * std::exp(-0.5 * u * u);
  }
  return s * kInvSqrt2Pi * inv_h;
}

Kde1D kde_1d(const Vec& x, const Vec& w_in, int grid_points) {
  require(x.size() > 0, Errc::TooFewSamples, "kde needs samples");
  Vec w = normalised(w_in, x.size());
  const double n_eff = 1.0 / w.squaredNorm();
  require(n_eff >= 10, Errc::TooFewSamples, "kde needs at least 10 effective samples");
  const double mean = w.dot(x);
  const double var = w.dot((x.array() - mean).square().matrix());
  const double sd = std::sqrt(var);
  const double iqr = weighted_quantile(x, w, 0.75) - weighted_quantile(x, w, 0.25);
  double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
  require(spread > 0, Errc::TooFewSamples, "kde needs distinct samples");
  Kde1D k;
  k.bandwidth = 0.9 * spread * std::pow(n_eff, -0.2);
  k.points = x;
  k.weights = w;
  const double lo = x.minCoeff() - 3 * k.bandwidth, hi = x.maxCoeff() + 3 * k.bandwidth;
  auto g = linspace(lo, hi, grid_points);
  k.grid = Eigen::Map<Vec>(g.data(), Eigen::Index(g.size()));
  k.density.resize(k.grid.size());
  for (Eigen::Index i = 0; i < k.grid.size(); ++i) k.density(i) = k(k.grid(i));
  return k;
}

Marginal normal_marginal(double mean, double sd) {
  require(sd > 0, Errc::BadArgument, "sd must be positive");
  return {[mean, sd](double x) {
            double u = (x - mean) / sd;
            return kInvSqrt2Pi / sd * std::exp(-0.5 * u * u);
          },
          mean - 9 * sd, mean + 9 * sd};
}

double iad(const Mat& a, const Vec& wa, const Mat& b, const Vec& wb) {
  require(a.rows() == b.rows() && a.rows() > 0, Errc::DimensionMismatch, "iad dimensions differ");
  double total = 0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    Kde1D ka = kde_1d(a.row(j).transpose(), wa);
    Kde1D kb = kde_1d(b.row(j).transpose(), wb);
    std::vector<double> grid(ka.grid.data(), ka.grid.data() + ka.grid.size());
    grid.insert(grid.end(), kb.grid.data(), kb.grid.data() + kb.grid.size());
    total += half_l1(std::cref(ka), std::cref(kb), std::move(grid));
  }
  return clamp01(total / double(a.rows()));
}

double iad(const Mat& a, const Vec& wa, const std::vector<Marginal>& ref) {
  require(Eigen::Index(ref.size()) == a.rows() && a.rows() > 0, Errc::DimensionMismatch,
          "iad needs one reference marginal per dimension");
  double total = 0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    Kde1D ka = kde_1d(a.row(j).transpose(), wa);
    std::vector<double> grid(ka.grid.data(), ka.grid.data() + ka.grid.size());
    auto rg = linspace(ref[j].lo, ref[j].hi, 2048);
    grid.insert(grid.end(), rg.begin(), rg.end());
    total += half_l1(std::cref(ka), ref[j].pdf, std::move(grid));
  }
  return clamp01(total / double(a.rows()));
}

double iad(const Marginal& a, const Marginal& b, int grid_points) {
  auto grid = linspace(std::min(a.lo, b.lo), std::max(a.hi, b.hi), grid_points);
  return clamp01(half_l1(a.pdf, b.pdf, std::move(grid)));
}

}  // namespace fusion

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fusion/linalg.hpp"

namespace testing {

using fusion::Mat;
using fusion::Vec;

inline double normal_cdf(double x, double mean = 0, double sd = 1) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// sup_x |F_w(x) - F(x)| for a weighted sample against a continuous cdf.
inline double ks_statistic(const Vec& x, const Vec& w_in, const std::function<double(double)>& cdf) {
  Vec w = w_in.size() ? Vec(w_in / w_in.sum()) : Vec(Vec::Constant(x.size(), 1.0 / double(x.size())));
  std::vector<int> idx(x.size());
  for (int i = 0; i < int(idx.size()); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) < x(b); });
  double cum = 0, d = 0;
  for (int i : idx) {
    double f = cdf(x(i));
    d = std::max(d, std::abs(f - cum));
    cum += w(i);
    d = std::max(d, std::abs(f - cum));
  }
  return d;
}

struct Moments {
  double mean, var;
};

inline Moments weighted_moments(const Vec& x, const Vec& w_in) {
  Vec w = w_in / w_in.sum();
  double m = w.dot(x);
  return {m, w.dot((x.array() - m).square().matrix())};
}

inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Mat J(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    J.col(i) = (f(a) - f(b)) / (2 * h);
  }
  return J;
}

inline double max_rel_error(const Mat& a, const Mat& b) {
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testing

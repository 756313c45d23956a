#include "fusion/bridge.hpp"

#include <cmath>

namespace fusion {

namespace {

constexpr int kSeriesCap = 10000;
constexpr long kRejectionCap = 10000000;
constexpr double kFloor = 1e-15;

// Decides u < p for a probability known through a bracketing sequence.
template <class Bracket, class Refine>
bool decide_below(double u, Bracket bracket, Refine refine) {
  for (int it = 0; it <= kSeriesCap; ++it) {
    auto [lo, hi] = bracket();
    if (u < lo) return true;
    if (u >= hi) return false;
    if (hi - lo < kFloor) return u < 0.5 * (lo + hi);
    refine();
  }
  throw Error(Errc::SeriesNonConvergence, "alternating series did not resolve the uniform");
}

}  // namespace

double layer_half_width(int level, double delta) {
  static const double base[] = {0.0, 1.0, 2.0, 4.5};
  double c = level <= 3 ? base[level] : 4.5 + 3.0 * (level - 3);
  return c * std::sqrt(delta);
}

StaySeries::StaySeries(double x, double y, double delta, double lo, double hi)
    : x_(x), y_(y), delta_(delta), lo_(lo), hi_(hi), w_(hi - lo) {
  require(delta > 0, Errc::BadArgument, "bridge interval must be positive");
  if (!(x > lo && x < hi && y > lo && y < hi)) {
    exact_ = true;
    lower_ = upper_ = 0.0;
  }
}

void StaySeries::refine() {
  if (exact_) return;
  ++j_;
  const double j = j_;
  const double shift = w_ * (j - 1);
  const double k = 2.0 / delta_;
  double sigma = std::exp(-k * (hi_ - x_ + shift) * (hi_ - y_ + shift)) +
                 std::exp(-k * (x_ - lo_ + shift) * (y_ - lo_ + shift));
  double tau = std::exp(-k * j * (w_ * w_ * j + w_ * (x_ - y_))) +
               std::exp(-k * j * (w_ * w_ * j - w_ * (x_ - y_)));
  partial_ -= sigma - tau;
  // Remaining terms are bounded by 2 exp(-2 w^2 m^2 / delta) for m >= j.
  double tail = 2.0 * std::exp(-k * w_ * w_ * j * j) / (1.0 - std::exp(-2.0 * k * w_ * w_ * j));
  if (!std::isfinite(tail)) tail = 1.0;
  lower_ = std::max(0.0, partial_ - tail);
  upper_ = std::min(1.0, partial_ + tail);
  if (lower_ > upper_) lower_ = upper_ = std::clamp(partial_, 0.0, 1.0);
}

double bridge_stay_probability(double x, double y, double delta, double lo, double hi) {
  StaySeries s(x, y, delta, lo, hi);
  for (int it = 0; it < kSeriesCap && s.upper() - s.lower() > kFloor; ++it) s.refine();
  require(s.upper() - s.lower() <= kFloor || s.terms() < kSeriesCap, Errc::SeriesNonConvergence,
          "stay probability series");
  return 0.5 * (s.lower() + s.upper());
}

LayerInfo simulate_layer(const Vec& z_start, const Vec& z_end, double t_start, double t_end,
                         Rng& rng) {
  require(z_start.size() == z_end.size(), Errc::DimensionMismatch, "layer endpoints");
  require(t_start < t_end, Errc::BadArgument, "layer interval must be increasing");
  const double delta = t_end - t_start;
  const auto d = z_start.size();
  LayerInfo L;
  L.z_start = z_start;
  L.z_end = z_end;
  L.t_start = t_start;
  L.t_end = t_end;
  L.level.assign(d, 0);
  L.lo.resize(d);
  L.hi.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double x = z_start(k), y = z_end(k);
    const double mn = std::min(x, y), mx = std::max(x, y);
    const double u = unif01(rng);
    int level = 1;
    for (;; ++level) {
      require(level <= kSeriesCap, Errc::SeriesNonConvergence, "layer level search");
      double a = layer_half_width(level, delta);
      StaySeries s(x, y, delta, mn - a, mx + a);
      if (decide_below(u, [&] { return std::pair{s.lower(), s.upper()}; }, [&] { s.refine(); })) break;
    }
    double a = layer_half_width(level, delta);
    L.level[k] = level;
    L.lo(k) = mn - a;
    L.hi(k) = mx + a;
  }
  return L;
}

void attach_original_box(LayerInfo& layer, const Mat& lambda_sqrt) {
  require(lambda_sqrt.rows() == layer.lo.size() && lambda_sqrt.cols() == layer.lo.size(),
          Errc::DimensionMismatch, "lambda_sqrt");
  layer.lambda_sqrt = lambda_sqrt;
  Vec mid = 0.5 * (layer.lo + layer.hi);
  Vec half = 0.5 * (layer.hi - layer.lo);
  Vec c = lambda_sqrt * mid;
  Vec r = lambda_sqrt.cwiseAbs() * half;
  layer.orig_lo = c - r;
  layer.orig_hi = c + r;
}

std::vector<Vec> sample_bridge_points(const LayerInfo& layer, const std::vector<double>& times,
                                      Rng& rng) {
  const size_t m = times.size();
  std::vector<Vec> out(m, Vec(layer.z_start.size()));
  if (m == 0) return out;
  for (size_t i = 0; i < m; ++i) {
    require(times[i] > layer.t_start && times[i] < layer.t_end, Errc::BadArgument,
            "bridge time outside the interval");
    require(i == 0 || times[i] >= times[i - 1], Errc::BadArgument, "bridge times must be sorted");
  }
  const double delta = layer.t_end - layer.t_start;
  std::vector<double> tt(m + 2), pts(m + 2);
  tt[0] = layer.t_start;
  tt[m + 1] = layer.t_end;
  for (size_t i = 0; i < m; ++i) tt[i + 1] = times[i];

  std::vector<StaySeries> outer, inner;
  outer.reserve(m + 1);
  inner.reserve(m + 1);
  for (Eigen::Index k = 0; k < layer.z_start.size(); ++k) {
    const double x = layer.z_start(k), y = layer.z_end(k);
    const int level = layer.level[k];
    const double mn = std::min(x, y), mx = std::max(x, y);
    const double a_out = layer_half_width(level, delta);
    const double a_in = layer_half_width(level - 1, delta);
    const double lo_out = mn - a_out, hi_out = mx + a_out;
    const bool has_inner = level > 1;
    pts[0] = x;
    pts[m + 1] = y;
    bool accepted = false;
    for (long attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
      bool inside = true;
      for (size_t i = 1; i <= m; ++i) {
        double left = tt[i] - tt[i - 1], right = tt[m + 1] - tt[i];
        double mean = pts[i - 1] + left / (left + right) * (y - pts[i - 1]);
        double sd = std::sqrt(left * right / (left + right));
        pts[i] = mean + sd * std_normal(rng);
        if (!(pts[i] > lo_out && pts[i] < hi_out)) inside = false;
      }
      const double u = unif01(rng);
      if (!inside) continue;
      outer.clear();
      inner.clear();
      for (size_t i = 0; i <= m; ++i) {
        double dt = tt[i + 1] - tt[i];
        if (dt <= 0) continue;
        outer.emplace_back(pts[i], pts[i + 1], dt, lo_out, hi_out);
        if (has_inner) inner.emplace_back(pts[i], pts[i + 1], dt, mn - a_in, mx + a_in);
      }
      auto bracket = [&] {
        double olo = 1, ohi = 1, ilo = has_inner ? 1 : 0, ihi = has_inner ? 1 : 0;
        for (const auto& s : outer) {
          olo *= s.lower();
          ohi *= s.upper();
        }
        for (const auto& s : inner) {
          ilo *= s.lower();
          ihi *= s.upper();
        }
        return std::pair{olo - ihi, ohi - ilo};
      };
      auto refine = [&] {
        for (auto& s : outer) s.refine();
        for (auto& s : inner) s.refine();
      };
      accepted = decide_below(u, bracket, refine);
    }
    require(accepted, Errc::SeriesNonConvergence, "layered bridge rejection cap reached");
    for (size_t i = 0; i < m; ++i) out[i](k) = pts[i + 1];
  }
  return out;
}

Vec unwhiten(const LayerInfo& layer, const Vec& z) {
  if (layer.lambda_sqrt.size() == 0) return z;
  require(z.size() == layer.lambda_sqrt.cols(), Errc::DimensionMismatch, "unwhiten");
  return layer.lambda_sqrt * z;
}

}  // namespace fusion

#include "fusion/guidance.hpp"

#include <cmath>

namespace fusion {

namespace {

void check_context(const GuidanceContext& ctx) {
  require(ctx.zeta > 0 && ctx.zeta < 1, Errc::BadZeta, "zeta must lie in (0,1)");
  require(ctx.zeta_prime > 0 && ctx.zeta_prime < 1, Errc::BadZeta, "zeta' must lie in (0,1)");
  require(ctx.C >= 1 && ctx.d >= 1 && ctx.m > 0 && ctx.b > 0, Errc::BadArgument,
          "guidance context");
}

}  // namespace

GuidanceContext make_context(int C, int d, double m) {
  GuidanceContext ctx;
  ctx.C = C;
  ctx.d = d;
  ctx.m = m;
  ctx.b = m / C;
  return ctx;
}

double sigma_a_sq(const std::vector<Vec>& means, const std::vector<Mat>& lambdas) {
  require(means.size() == lambdas.size() && !means.empty(), Errc::DimensionMismatch, "sigma_a_sq");
  std::vector<Mat> inv;
  for (const auto& l : lambdas) inv.push_back(spd_inverse(l));
  Pooled p = pooled_precision(lambdas);
  Vec centre = weighted_center(p.cov, inv, means);
  double s = 0;
  for (size_t c = 0; c < means.size(); ++c) {
    Vec r = means[c] - centre;
    s += r.dot(inv[c] * r);
  }
  return s / double(means.size());
}

double recommend_T(const GuidanceContext& ctx) {
  check_context(ctx);
  const double C = ctx.C, d = ctx.d, lz = std::log(ctx.zeta);
  if (ctx.regime == Regime::SH) {
    require(ctx.lambda > 0, Errc::BadArgument, "SH lambda must be positive");
    double k1 = std::sqrt(-(ctx.lambda + d / 2) / lz);
    return ctx.b * std::pow(C, 1.5) * k1 / ctx.m;
  }
  require(std::isfinite(ctx.gamma) && ctx.gamma >= 0, Errc::BadArgument, "SSH gamma unset");
  double k1 = std::sqrt(-(ctx.gamma * ctx.m / C + d / 2) / lz);
  double k2 = ctx.b * C * k1 / ctx.m;
  return std::max(ctx.b * std::pow(C, 1.5) * k1 / ctx.m, std::sqrt(C) * k2);
}

void estimate_gamma(GuidanceContext& ctx, double sigma_a2) {
  if (ctx.regime == Regime::SSH && !std::isfinite(ctx.gamma)) ctx.gamma = sigma_a2 / ctx.b;
}

double nu_hat(const std::vector<Mat>& positions, const Vec& weights, const std::vector<Vec>& means,
              const std::vector<Mat>& inverses) {
  require(positions.size() == means.size() && positions.size() == inverses.size() &&
              !positions.empty(),
          Errc::DimensionMismatch, "nu_hat");
  const auto n = positions.front().cols();
  require(weights.size() == n, Errc::DimensionMismatch, "nu_hat weights");
  const double C = double(positions.size());
  double total = 0;
  for (size_t c = 0; c < positions.size(); ++c) {
    Mat r = positions[c].colwise() - means[c];
    Vec q = (r.array() * (inverses[c] * r).array()).colwise().sum();
    total += weights.dot(q);
  }
  return total / C;
}

double nu_sup_hat(const std::vector<Mat>& positions, const Vec& weights,
                  const std::vector<Vec>& means, const std::vector<Mat>& inverses,
                  const Mat& pooled_cov) {
  double psi2 = nu_hat(positions, weights, means, inverses);
  const auto d = positions.front().rows(), n = positions.front().cols();
  Mat acc = Mat::Zero(d, n);
  for (size_t c = 0; c < positions.size(); ++c) acc += inverses[c] * positions[c];
  Mat centres = pooled_cov * acc;
  std::vector<Mat> at_centre(positions.size(), centres);
  double psi1 = nu_hat(at_centre, weights, means, inverses);
  return std::max(psi1, psi2);
}

double k4_choice(double zeta_prime, double nu, const GuidanceContext& ctx) {
  require(zeta_prime > 0 && zeta_prime < 1, Errc::BadZeta, "zeta' must lie in (0,1)");
  require(nu >= 0, Errc::BadArgument, "nu must be nonnegative");
  const double l = std::log(zeta_prime);
  const double q = nu * nu * ctx.m * ctx.m / (2.0 * ctx.b * ctx.b * ctx.C * ctx.d);
  const double bcoef = 2 * l - q;
  const double disc = std::max(0.0, q * (q - 4 * l));
  // product of the roots is l², so the smaller one is l² / larger
  return 2 * l * l / (-bcoef + std::sqrt(disc));
}

double mesh_interval(double k4, const GuidanceContext& ctx) {
  return std::sqrt(ctx.b * ctx.b * ctx.C * k4 / (2.0 * ctx.m * ctx.m * ctx.d));
}

std::vector<double> regular_mesh(double T, double nu_sup, const GuidanceContext& ctx) {
  check_context(ctx);
  require(T > 0, Errc::BadArgument, "T must be positive");
  double delta = mesh_interval(k4_choice(ctx.zeta_prime, nu_sup, ctx), ctx);
  long n = std::max(1L, long(std::ceil(T / delta - 1e-12)));
  std::vector<double> t(n + 1);
  for (long j = 0; j <= n; ++j) t[j] = std::min(T, j * delta);
  t[n] = T;
  return t;
}

double adaptive_next_time(double T, double t_prev, double nu, const GuidanceContext& ctx) {
  check_context(ctx);
  require(t_prev < T, Errc::BadArgument, "adaptive mesh already at T");
  double delta = mesh_interval(k4_choice(ctx.zeta_prime, nu, ctx), ctx);
  double t = t_prev + delta;
  return t >= T ? T : t;
}

}  // namespace fusion

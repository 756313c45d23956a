#include "fusion/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace fusion {

double log_rho_zero(const std::vector<Vec>& x, const std::vector<Mat>& inverses,
                    const Mat& pooled_cov, double T) {
  require(T > 0, Errc::BadArgument, "T must be positive");
  Vec centre = weighted_center(pooled_cov, inverses, x);
  double q = 0;
  for (size_t c = 0; c < x.size(); ++c) {
    Vec r = centre - x[c];
    q += r.dot(inverses[c] * r);
  }
  return -q / (2.0 * T);
}

double rho_zero(const std::vector<Vec>& x, const std::vector<Mat>& lambdas, double T) {
  require(x.size() == lambdas.size() && !x.empty(), Errc::DimensionMismatch, "rho_zero");
  std::vector<Mat> inv;
  for (const auto& l : lambdas) inv.push_back(spd_inverse(l));
  Pooled p = pooled_precision(lambdas);
  return std::exp(log_rho_zero(x, inv, p.cov, T));
}

double rho_zero_centered(const std::vector<Vec>& x, const std::vector<Mat>& lambdas, double T,
                         const Vec& theta_tilde) {
  require(T > 0, Errc::BadArgument, "T must be positive");
  Pooled p = pooled_precision(lambdas);
  Vec centre = weighted_center(lambdas, x);
  require(theta_tilde.size() == centre.size(), Errc::DimensionMismatch, "rho_zero_centered");
  Vec r = centre - theta_tilde;
  return std::exp(r.dot(p.precision * r) / (2.0 * T));
}

double nb_mean_gamma(const Whitened& w, const Vec& z_left, const Vec& z_right, double t_left,
                     double t_right, double upper, const EstimatorConfig& cfg) {
  const int p = std::max(2, cfg.trapezoid_points);
  const double delta = t_right - t_left;
  double integral = 0;
  for (int i = 0; i < p; ++i) {
    double s = double(i) / double(p - 1);
    double f = w.phi(z_left + s * (z_right - z_left));
    integral += (i == 0 || i == p - 1) ? 0.5 * f : f;
  }
  integral *= delta / double(p - 1);
  return std::max(cfg.gamma_floor, upper * delta - integral);
}

namespace {

double gap(double upper, double phi) {
  double g = upper - phi;
  if (g < 0) {
    require(g > -1e-9 * (1.0 + std::abs(upper)), Errc::NonFinite, "phi exceeded its upper bound");
    g = 0;
  }
  return g;
}

}  // namespace

FactorEstimate estimate_factor(const Whitened& w, const Vec& z_start, const Vec& z_end,
                               double t_start, double t_end, const EstimatorConfig& cfg, Rng& rng) {
  const double delta = t_end - t_start;
  require(delta > 0, Errc::BadArgument, "interval length must be positive");
  LayerInfo layer = simulate_layer(z_start, z_end, t_start, t_end, rng);
  PhiBounds b = w.bounds(layer.lo, layer.hi);
  FactorEstimate out{0, b.lower, b.upper, 0};

  double gamma = 0;
  if (cfg.kind == EstimatorKind::GPE1) {
    double rate = (b.upper - b.lower) * delta;
    out.kappa = rate > 0 ? int(std::poisson_distribution<long>(rate)(rng)) : 0;
  } else {
    gamma = nb_mean_gamma(w, z_start, z_end, t_start, t_end, b.upper, cfg);
    double g = std::gamma_distribution<double>(cfg.nb_beta, gamma / cfg.nb_beta)(rng);
    out.kappa = g > 0 ? int(std::poisson_distribution<long>(g)(rng)) : 0;
  }

  std::vector<double> times(out.kappa);
  for (auto& t : times) {
    do {
      t = t_start + delta * unif01(rng);
    } while (t <= t_start || t >= t_end);
  }
  std::sort(times.begin(), times.end());
  std::vector<Vec> pts = sample_bridge_points(layer, times, rng);

  double log_prod = 0;
  for (const auto& z : pts) {
    double g = gap(b.upper, w.phi(z));
    log_prod += g > 0 ? std::log(g) : -std::numeric_limits<double>::infinity();
  }

  if (cfg.kind == EstimatorKind::GPE1) {
    double width = b.upper - b.lower;
    out.log_value = -b.lower * delta + (out.kappa > 0 ? log_prod - out.kappa * std::log(width) : 0.0);
  } else {
    const double beta = cfg.nb_beta;
    const double k = out.kappa;
    out.log_value = -b.upper * delta + k * std::log(delta) + std::lgamma(beta) +
                    (beta + k) * std::log(beta + gamma) - std::lgamma(beta + k) -
                    beta * std::log(beta) - k * std::log(gamma) + log_prod;
  }
  return out;
}

double estimate_log_rho_tilde(const std::vector<const Whitened*>& factors,
                              const std::vector<Mat>& inv_sqrt, const std::vector<Vec>& x_prev,
                              const std::vector<Vec>& x_next, double t_start, double t_end,
                              const EstimatorConfig& cfg, Rng& rng) {
  require(factors.size() == inv_sqrt.size() && factors.size() == x_prev.size() &&
              factors.size() == x_next.size(),
          Errc::DimensionMismatch, "estimate_log_rho_tilde");
  double s = 0;
  for (size_t c = 0; c < factors.size(); ++c) {
    s += estimate_factor(*factors[c], inv_sqrt[c] * x_prev[c], inv_sqrt[c] * x_next[c], t_start,
                         t_end, cfg, rng)
             .log_value;
  }
  return s;
}

}  // namespace fusion

#include "fusion/sampler.hpp"

#include <cmath>

namespace fusion {

Vec find_mode(const Model& model, const Vec& x0, int max_iter) {
  Vec x = x0;
  double f = model.log_density(x);
  for (int it = 0; it < max_iter; ++it) {
    Vec g = model.grad(x);
    Mat h = model.hess(x);
    Eigen::LLT<Mat> llt(-h);
    Vec step = llt.info() == Eigen::Success ? Vec(llt.solve(g)) : Vec(1e-2 * g);
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      Vec xn = x + step;
      double fn = -std::numeric_limits<double>::infinity();
      try {
        fn = model.log_density(xn);
      } catch (const Error&) {
      }
      if (std::isfinite(fn) && fn >= f) {
        moved = fn > f + 1e-12 * (1 + std::abs(f));
        x = xn;
        f = fn;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

LeafDraws sample_leaf(const Model& model, int n, Rng& rng, const RwmConfig& cfg) {
  require(n >= 1, Errc::BadArgument, "sample_leaf needs n >= 1");
  const int d = model.dim();
  LeafDraws out{Mat(d, n), 1.0};
  if (model.has_exact_sampler()) {
    for (int i = 0; i < n; ++i) out.samples.col(i) = model.draw(rng);
    return out;
  }
  require(cfg.burn_in >= 0 && cfg.thin >= 1, Errc::BadArgument, "RWM settings");

  Vec x = find_mode(model, Vec::Zero(d));
  double lp = model.log_density(x);
  Mat prop_cov = Mat::Identity(d, d);
  {
    Eigen::LLT<Mat> llt(-model.hess(x));
    if (llt.info() == Eigen::Success) prop_cov = spd_inverse(-model.hess(x));
  }
  double log_scale = std::log(2.38 * 2.38 / d);
  Mat chol = Eigen::LLT<Mat>(prop_cov).matrixL();

  auto step = [&](double scale) {
    Vec e(d);
    for (int k = 0; k < d; ++k) e(k) = std_normal(rng);
    Vec xn = x + std::sqrt(scale) * (chol * e);
    double lpn = -std::numeric_limits<double>::infinity();
    try {
      lpn = model.log_density(xn);
    } catch (const Error&) {
    }
    double a = std::isfinite(lpn) ? std::min(0.0, lpn - lp) : -std::numeric_limits<double>::infinity();
    bool acc = std::log(unif01(rng)) < a;
    if (acc) {
      x = xn;
      lp = lpn;
    }
    return std::make_pair(acc, std::exp(a));
  };

  // Burn-in: Robbins-Monro on the log scale; the proposal covariance is
  // re-estimated once from the middle of the burn-in history.
  const int refit_at = cfg.burn_in / 2;
  Mat hist(d, std::max(0, refit_at - refit_at / 3));
  int hist_n = 0;
  for (int it = 0; it < cfg.burn_in; ++it) {
    auto [acc, a] = step(std::exp(log_scale));
    (void)acc;
    log_scale += (a - cfg.target_acceptance) / std::pow(1.0 + it / 10.0, 0.6);
    if (it >= refit_at / 3 && it < refit_at && hist_n < hist.cols()) hist.col(hist_n++) = x;
    if (it == refit_at && hist_n > 10 * d) {
      Mat c = weighted_cov(hist.leftCols(hist_n), Vec());
      c.diagonal().array() += 1e-10 * (1 + c.diagonal().maxCoeff());
      Eigen::LLT<Mat> llt(c);
      if (llt.info() == Eigen::Success) {
        chol = llt.matrixL();
        log_scale = std::log(2.38 * 2.38 / d);
      }
    }
  }

  long accepted = 0, total = 0;
  const double scale = std::exp(log_scale);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < cfg.thin; ++t) {
      accepted += step(scale).first ? 1 : 0;
      ++total;
    }
    out.samples.col(i) = x;
  }
  out.acceptance = double(accepted) / double(total);
  require(out.acceptance >= 1e-3, Errc::ChainDiverged, "random-walk acceptance below 1e-3");
  return out;
}

}  // namespace fusion

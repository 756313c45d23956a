#include "fusion/smc.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <mutex>

namespace fusion {

namespace {

constexpr int kBlock = 128;
constexpr std::uint64_t kResampleStream = 0x7265736dULL;

Vec std_normal_vec(int d, Rng& rng) {
  Vec e(d);
  for (int k = 0; k < d; ++k) e(k) = std_normal(rng);
  return e;
}

}  // namespace

Transition::Transition(const std::vector<Mat>& lambdas) : lambda(lambdas) {
  require(!lambdas.empty(), Errc::EmptyInput, "no factors");
  for (const auto& l : lambdas) {
    inverse.push_back(spd_inverse(l));
    sqrt.push_back(psd_sqrt(l));
    inv_sqrt.push_back(psd_inv_sqrt(l));
  }
  Pooled p = fusion::pooled_precision(lambdas);
  pooled_cov = p.cov;
  pooled_precision = p.precision;
  pooled_sqrt = psd_sqrt(p.cov);
}

void propagate_decomposed(const Transition& tr, std::vector<Vec>& x, double s, double t, double T,
                          Rng& rng) {
  require(int(x.size()) == tr.C(), Errc::DimensionMismatch, "propagate");
  require(s < t && t <= T, Errc::BadArgument, "propagate needs s < t <= T");
  const int d = tr.d();
  Vec centre = weighted_center(tr.pooled_cov, tr.inverse, x);
  const double rem = T - s, delta = t - s;
  if (t >= T) {
    Vec y = centre + std::sqrt(rem) * (tr.pooled_sqrt * std_normal_vec(d, rng));
    for (auto& xc : x) xc = y;
    return;
  }
  Vec common = std::sqrt(delta * delta / rem) * (tr.pooled_sqrt * std_normal_vec(d, rng));
  const double own = std::sqrt((T - t) * delta / rem);
  for (int c = 0; c < tr.C(); ++c) {
    Vec mean = ((T - t) / rem) * x[c] + (delta / rem) * centre;
    x[c] = mean + common + own * (tr.sqrt[c] * std_normal_vec(d, rng));
  }
}

void propagate_joint(const Transition& tr, std::vector<Vec>& x, double s, double t, double T,
                     Rng& rng) {
  require(int(x.size()) == tr.C(), Errc::DimensionMismatch, "propagate");
  require(s < t && t <= T, Errc::BadArgument, "propagate needs s < t <= T");
  const int d = tr.d(), C = tr.C();
  Vec centre = weighted_center(tr.pooled_cov, tr.inverse, x);
  const double rem = T - s, delta = t - s;
  if (t >= T) {
    Eigen::LLT<Mat> llt(rem * tr.pooled_cov);
    require(llt.info() == Eigen::Success, Errc::NotPSD, "terminal covariance");
    Vec y = centre + Mat(llt.matrixL()) * std_normal_vec(d, rng);
    for (auto& xc : x) xc = y;
    return;
  }
  Mat gamma(C * d, C * d);
  Vec mean(C * d);
  const Mat cross = (delta * delta / rem) * tr.pooled_cov;
  for (int i = 0; i < C; ++i) {
    mean.segment(i * d, d) = ((T - t) / rem) * x[i] + (delta / rem) * centre;
    for (int j = 0; j < C; ++j)
      gamma.block(i * d, j * d, d, d) = i == j ? Mat(cross + (delta * (T - t) / rem) * tr.lambda[i]) : cross;
  }
  Eigen::LLT<Mat> llt(gamma);
  require(llt.info() == Eigen::Success, Errc::NotPSD, "transition covariance");
  Vec draw = mean + Mat(llt.matrixL()) * std_normal_vec(C * d, rng);
  for (int i = 0; i < C; ++i) x[i] = draw.segment(i * d, d);
}

Vec normalize_log_weights(const Vec& log_w) {
  require(log_w.size() > 0, Errc::EmptyInput, "no weights");
  double m = log_w.maxCoeff();
  require(std::isfinite(m) || m == std::numeric_limits<double>::infinity(), Errc::AllZeroWeights,
          "every log-weight is -inf");
  require(!std::isnan(m), Errc::NonFinite, "NaN log-weight");
  require(m < std::numeric_limits<double>::infinity(), Errc::NonFinite, "infinite log-weight");
  Vec w = (log_w.array() - m).exp();
  return w / w.sum();
}

double ess(const Vec& w) {
  double s = w.sum();
  require(s > 0, Errc::AllZeroWeights, "ess");
  return s * s / w.squaredNorm();
}

double cess(const Vec& prev_w, const Vec& log_inc) {
  require(prev_w.size() == log_inc.size() && prev_w.size() > 0, Errc::DimensionMismatch, "cess");
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < log_inc.size(); ++i)
    if (prev_w(i) > 0) m = std::max(m, log_inc(i));
  require(std::isfinite(m), Errc::AllZeroWeights, "cess with all-zero increments");
  Vec r = (log_inc.array() - m).exp();
  Vec w = prev_w / prev_w.sum();
  double num = w.dot(r);
  double den = w.dot(r.cwiseProduct(r));
  return double(prev_w.size()) * num * num / den;
}

std::vector<int> residual_resample(const Vec& w, int N, Rng& rng) {
  require(N >= 1 && w.size() > 0, Errc::EmptyInput, "resample");
  Vec wn = w / w.sum();
  std::vector<int> idx;
  idx.reserve(N);
  Vec resid(wn.size());
  int taken = 0;
  for (Eigen::Index i = 0; i < wn.size(); ++i) {
    double nw = N * wn(i);
    int k = int(std::floor(nw));
    for (int j = 0; j < k; ++j) idx.push_back(int(i));
    taken += k;
    resid(i) = nw - k;
  }
  const int rest = N - taken;
  if (rest > 0) {
    resid /= resid.sum();
    double u = unif01(rng) / rest;
    double cum = 0;
    Eigen::Index i = 0;
    for (int k = 0; k < rest; ++k) {
      double target = u + double(k) / rest;
      while (i < resid.size() - 1 && cum + resid(i) <= target) cum += resid(i++);
      idx.push_back(int(i));
    }
  }
  return idx;
}

namespace {

void gather(std::vector<Mat>& pos, const std::vector<int>& idx) {
  for (auto& p : pos) {
    Mat q(p.rows(), Eigen::Index(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) q.col(Eigen::Index(i)) = p.col(idx[i]);
    p.swap(q);
  }
}

}  // namespace

FusionResult gbf(const std::vector<FactorInput>& inputs, const GbfConfig& cfg) {
  require(!inputs.empty(), Errc::EmptyInput, "gbf needs at least one factor");
  require(cfg.N >= 1, Errc::BadArgument, "N must be positive");
  const int C = int(inputs.size());
  const int d = int(inputs.front().samples.rows());
  Eigen::Index M = inputs.front().samples.cols();
  for (const auto& in : inputs) {
    require(in.model && in.model->dim() == d && in.samples.rows() == d && in.lambda.rows() == d,
            Errc::DimensionMismatch, "gbf inputs disagree on dimension");
    require(in.log_weights.size() == 0 || in.log_weights.size() == in.samples.cols(),
            Errc::DimensionMismatch, "gbf input weights");
    M = std::min(M, in.samples.cols());
  }
  require(M >= 1, Errc::EmptyInput, "gbf inputs have no samples");

  std::vector<Mat> lambdas;
  for (const auto& in : inputs) lambdas.push_back(in.lambda);
  const Transition tr(lambdas);
  std::vector<std::unique_ptr<Whitened>> owned;
  std::vector<const Whitened*> views;
  for (int c = 0; c < C; ++c) {
    owned.push_back(inputs[c].model->whiten(tr.sqrt[c], cfg.estimator.bounds));
    views.push_back(owned.back().get());
  }

  // Composition: index-wise pairing of the first M draws of every factor.
  std::vector<Mat> pos(C);
  std::vector<Vec> means(C);
  Vec prev_log = Vec::Zero(M);
  for (int c = 0; c < C; ++c) {
    pos[c] = inputs[c].samples.leftCols(M);
    Vec lw = inputs[c].log_weights.size() ? Vec(inputs[c].log_weights.head(M)) : Vec::Zero(M);
    prev_log += lw;
    means[c] = weighted_mean(pos[c], normalize_log_weights(lw));
  }

  GuidanceContext ctx = cfg.mesh.ctx;
  ctx.C = C;
  ctx.d = d;
  if (!(ctx.b > 0)) ctx.b = ctx.m / C;
  estimate_gamma(ctx, sigma_a_sq(means, lambdas));
  double T = cfg.mesh.T;
  if (cfg.mesh.kind == MeshKind::Fixed) {
    require(T > 0 && cfg.mesh.n >= 1, Errc::BadArgument, "fixed mesh needs T > 0 and n >= 1");
  } else if (!(T > 0)) {
    T = recommend_T(ctx);
  }

  Vec log_rho0(M);
  {
    std::vector<Vec> xs(C);
    for (Eigen::Index i = 0; i < M; ++i) {
      for (int c = 0; c < C; ++c) xs[c] = pos[c].col(i);
      log_rho0(i) = log_rho_zero(xs, tr.inverse, tr.pooled_cov, T);
    }
  }
  FusionResult res;
  res.T = T;
  Vec prev_w = normalize_log_weights(prev_log);
  double cess0 = cess(prev_w, log_rho0);
  Vec log_w = prev_log + log_rho0;
  Vec w = normalize_log_weights(log_w);
  bool resampled = false;
  if (M != cfg.N) {
    Rng rr = make_stream(cfg.seed, kResampleStream, 0);
    gather(pos, residual_resample(w, cfg.N, rr));
    log_w = Vec::Zero(cfg.N);
    w = Vec::Constant(cfg.N, 1.0 / cfg.N);
    resampled = true;
  }
  const int N = cfg.N;
  res.diagnostics.push_back({0, 0.0, cess0, ess(w), resampled, 0.0});

  std::vector<double> mesh{0.0};
  if (cfg.mesh.kind == MeshKind::Fixed) {
    for (int j = 1; j <= cfg.mesh.n; ++j) mesh.push_back(j == cfg.mesh.n ? T : T * j / cfg.mesh.n);
  } else if (cfg.mesh.kind == MeshKind::Regular) {
    mesh = regular_mesh(T, nu_sup_hat(pos, w, means, tr.inverse, tr.pooled_cov), ctx);
  }

  const int threads = std::max(1, cfg.threads);
  const int blocks = (N + kBlock - 1) / kBlock;
  Vec log_inc(N);
  double t_prev = 0;
  for (int j = 1; t_prev < T; ++j) {
    resampled = false;
    if (ess(w) < cfg.resample_threshold * N) {
      Rng rr = make_stream(cfg.seed, kResampleStream, std::uint64_t(j));
      gather(pos, residual_resample(w, N, rr));
      log_w.setZero();
      w.setConstant(1.0 / N);
      resampled = true;
    }
    double t_next;
    if (cfg.mesh.kind == MeshKind::Adaptive)
      t_next = adaptive_next_time(T, t_prev, nu_hat(pos, w, means, tr.inverse), ctx);
    else
      t_next = mesh[j];

    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (int b = 0; b < blocks; ++b) {
      try {
        Rng rng = make_stream(cfg.seed, std::uint64_t(j), std::uint64_t(b));
        std::vector<Vec> x(C), x_prev(C);
        const int end = std::min(N, (b + 1) * kBlock);
        for (int i = b * kBlock; i < end; ++i) {
          for (int c = 0; c < C; ++c) x_prev[c] = x[c] = pos[c].col(i);
          if (cfg.decomposed) propagate_decomposed(tr, x, t_prev, t_next, T, rng);
          else propagate_joint(tr, x, t_prev, t_next, T, rng);
          log_inc(i) = estimate_log_rho_tilde(views, tr.inv_sqrt, x_prev, x, t_prev, t_next,
                                              cfg.estimator, rng);
          for (int c = 0; c < C; ++c) pos[c].col(i) = x[c];
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    double cj = cess(w, log_inc);
    log_w += log_inc;
    w = normalize_log_weights(log_w);
    log_w = w.array().log();
    res.diagnostics.push_back({j, t_next, cj, ess(w), resampled, t_next - t_prev});
    if (cfg.mesh.kind == MeshKind::Adaptive) mesh.push_back(t_next);
    t_prev = t_next;
  }
  res.samples = pos[0];
  res.weights = w;
  res.mesh = mesh;
  return res;
}

McfResult mcf_rejection(const std::vector<ModelPtr>& models, double T, int n_accept, Rng& rng) {
  require(!models.empty(), Errc::EmptyInput, "mcf needs factors");
  require(T > 0 && n_accept >= 1, Errc::BadArgument, "mcf settings");
  const int C = int(models.size());
  const int d = models.front()->dim();
  const Mat eye = Mat::Identity(d, d);
  std::vector<std::unique_ptr<Whitened>> views;
  for (const auto& m : models) {
    require(m->dim() == d, Errc::DimensionMismatch, "mcf factors");
    require(m->has_exact_sampler(), Errc::BadArgument, "mcf needs exact leaf draws");
    views.push_back(m->whiten(eye, BoundMode::Local));
    require(std::isfinite(views.back()->phi_floor()), Errc::BadArgument, "mcf needs a finite phi floor");
  }
  EstimatorConfig est;
  est.kind = EstimatorKind::GPE1;
  McfResult out{Mat(d, n_accept), 0.0, 0};
  int accepted = 0;
  std::vector<Vec> x(C);
  while (accepted < n_accept) {
    ++out.proposals;
    Vec mean = Vec::Zero(d);
    for (int c = 0; c < C; ++c) {
      x[c] = models[c]->draw(rng);
      mean += x[c];
    }
    mean /= C;
    double log_p = 0;
    for (int c = 0; c < C; ++c) log_p -= (mean - x[c]).squaredNorm() / (2 * T);
    Vec y = mean + std::sqrt(T / C) * std_normal_vec(d, rng);
    for (int c = 0; c < C; ++c) {
      FactorEstimate f = estimate_factor(*views[c], x[c], y, 0.0, T, est, rng);
      log_p += f.log_value + views[c]->phi_floor() * T;
    }
    require(log_p <= 1e-10, Errc::BadArgument, "acceptance probability above one");
    if (std::log(unif01(rng)) < log_p) out.samples.col(accepted++) = y;
    if (out.proposals >= 10000000L && double(accepted) / out.proposals < 1e-6)
      throw Error(Errc::AcceptanceStarvation, "mcf acceptance rate below 1e-6");
  }
  out.acceptance_rate = double(accepted) / double(out.proposals);
  return out;
}

}  // namespace fusion

#pragma once

#include <cstdint>
#include <vector>

#include "fusion/estimator.hpp"
#include "fusion/guidance.hpp"
#include "fusion/model.hpp"

namespace fusion {

struct FactorInput {
  ModelPtr model;
  Mat lambda;       // preconditioner Λ_c
  Mat samples;      // d x M draws
  Vec log_weights;  // length M, empty for uniform
};

enum class MeshKind { Fixed, Regular, Adaptive };

struct MeshPolicy {
  MeshKind kind = MeshKind::Adaptive;
  double T = 0;  // required for Fixed; for guided meshes 0 means "recommend"
  int n = 1;     // Fixed only
  GuidanceContext ctx;  // C and d are overwritten from the inputs
};

struct GbfConfig {
  int N = 1000;
  MeshPolicy mesh;
  EstimatorConfig estimator;
  double resample_threshold = 0.5;
  bool decomposed = true;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct IterationRecord {
  int iter;
  double t;
  double cess;
  double ess;
  bool resampled;
  double delta;
};

struct FusionResult {
  Mat samples;  // d x N
  Vec weights;  // normalised
  std::vector<IterationRecord> diagnostics;
  std::vector<double> mesh;
  double T = 0;
};

// Precomputed matrices for moving a particle between mesh times.
struct Transition {
  explicit Transition(const std::vector<Mat>& lambdas);
  std::vector<Mat> lambda, inverse, sqrt, inv_sqrt;
  Mat pooled_cov, pooled_precision, pooled_sqrt;
  int C() const { return int(lambda.size()); }
  int d() const { return int(pooled_cov.rows()); }
};

// Moves the per-factor positions x from time s to t < T (or the common
// terminal point when t == T). Decomposed form: one shared ξ ~ N(0, Λ_C)
// plus independent η_c ~ N(0, Λ_c).
void propagate_decomposed(const Transition& tr, std::vector<Vec>& x, double s, double t, double T,
                          Rng& rng);

// Same law through the stacked mean and the block covariance Γ.
void propagate_joint(const Transition& tr, std::vector<Vec>& x, double s, double t, double T,
                     Rng& rng);

// Normalised weights from log-weights; AllZeroWeights when every entry is -inf.
Vec normalize_log_weights(const Vec& log_w);

double ess(const Vec& w);

// N (Σ w ρ)² / Σ w ρ² for normalised previous weights w and log increments.
double cess(const Vec& prev_w, const Vec& log_increments);

// Residual resampling: floor(N w_i) copies, the remainder by systematic
// resampling on the residual weights. Returns ancestor indices.
std::vector<int> residual_resample(const Vec& w, int N, Rng& rng);

FusionResult gbf(const std::vector<FactorInput>& inputs, const GbfConfig& cfg);

struct McfResult {
  Mat samples;
  double acceptance_rate;
  long proposals;
};

// Rejection sampler with the single interval [0, T] and identity
// preconditioners. Every factor must supply exact draws and a finite φ floor.
McfResult mcf_rejection(const std::vector<ModelPtr>& models, double T, int n_accept, Rng& rng);

}  // namespace fusion

#pragma once

#include <vector>

#include "fusion/bridge.hpp"
#include "fusion/model.hpp"

namespace fusion {

enum class EstimatorKind { GPE1, GPE2 };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::GPE2;
  double nb_beta = 10.0;
  int trapezoid_points = 2;
  double gamma_floor = 1e-8;
  BoundMode bounds = BoundMode::Local;
};

// log ρ₀ = -Σ (x̃ - x_c)ᵀ Λ_c⁻¹ (x̃ - x_c) / (2T)
double log_rho_zero(const std::vector<Vec>& x, const std::vector<Mat>& inverses,
                    const Mat& pooled_cov, double T);
double rho_zero(const std::vector<Vec>& x, const std::vector<Mat>& lambdas, double T);

// exp{(x̃ - θ̃)ᵀ Λ_C⁻¹ (x̃ - θ̃) / (2T)} for leaves drawn from the recentred factors.
double rho_zero_centered(const std::vector<Vec>& x, const std::vector<Mat>& lambdas, double T,
                         const Vec& theta_tilde);

// UΔ minus the trapezoid integral of φ along the straight chord, floored.
double nb_mean_gamma(const Whitened& w, const Vec& z_left, const Vec& z_right, double t_left,
                     double t_right, double upper, const EstimatorConfig& cfg);

struct FactorEstimate {
  double log_value;  // log of the unscaled estimator
  double lower;      // L over the layer
  double upper;      // U over the layer
  int kappa;
};

// One factor's contribution to ρ̃_j. Endpoints are in whitened coordinates.
FactorEstimate estimate_factor(const Whitened& w, const Vec& z_start, const Vec& z_end,
                               double t_start, double t_end, const EstimatorConfig& cfg, Rng& rng);

// log ρ̃_j = Σ_c log(factor estimate); positions in original coordinates.
double estimate_log_rho_tilde(const std::vector<const Whitened*>& factors,
                              const std::vector<Mat>& inv_sqrt, const std::vector<Vec>& x_prev,
                              const std::vector<Vec>& x_next, double t_start, double t_end,
                              const EstimatorConfig& cfg, Rng& rng);

}  // namespace fusion

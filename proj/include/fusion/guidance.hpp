#pragma once

#include <limits>
#include <vector>

#include "fusion/linalg.hpp"

namespace fusion {

enum class Regime { SH, SSH };

struct GuidanceContext {
  int C = 1;
  int d = 1;
  double m = 1;
  double b = 0;  // 0 means m / C
  double zeta = 0.5;
  double zeta_prime = 0.5;
  Regime regime = Regime::SH;
  double lambda = 1.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();  // SSH; NaN means estimate
};

// Context with b = m / C, the choice matching covariance-estimate preconditioners.
GuidanceContext make_context(int C, int d, double m);

double sigma_a_sq(const std::vector<Vec>& means, const std::vector<Mat>& lambdas);

double recommend_T(const GuidanceContext& ctx);

// Sets ctx.gamma = σ²_a / b when the regime is SSH and gamma was left unset.
void estimate_gamma(GuidanceContext& ctx, double sigma_a2);

// Σ_i w_i (1/C) Σ_c (x_ic - a_c)ᵀ Λ_c⁻¹ (x_ic - a_c); positions[c] is d x N.
double nu_hat(const std::vector<Mat>& positions, const Vec& weights, const std::vector<Vec>& means,
              const std::vector<Mat>& inverses);

// max of the same average taken at the particle centres and at the positions.
double nu_sup_hat(const std::vector<Mat>& positions, const Vec& weights,
                  const std::vector<Vec>& means, const std::vector<Mat>& inverses,
                  const Mat& pooled_cov);

double k4_choice(double zeta_prime, double nu, const GuidanceContext& ctx);

// sqrt(b² C k₄ / (2 m² d))
double mesh_interval(double k4, const GuidanceContext& ctx);

std::vector<double> regular_mesh(double T, double nu_sup, const GuidanceContext& ctx);

double adaptive_next_time(double T, double t_prev, double nu, const GuidanceContext& ctx);

}  // namespace fusion

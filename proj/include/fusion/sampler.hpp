#pragma once

#include "fusion/model.hpp"

namespace fusion {

struct RwmConfig {
  int burn_in = 5000;
  int thin = 10;
  double target_acceptance = 0.234;
};

struct LeafDraws {
  Mat samples;        // d x n
  double acceptance;  // post burn-in acceptance rate (1 for exact draws)
};

// Exact draws when the model offers them, otherwise an adaptive random-walk
// Metropolis chain started at the mode.
LeafDraws sample_leaf(const Model& model, int n, Rng& rng, const RwmConfig& cfg = {});

// Newton ascent from x0 with step halving; returns x0 when it cannot improve.
Vec find_mode(const Model& model, const Vec& x0, int max_iter = 100);

}  // namespace fusion

#pragma once

#include <vector>

#include "fusion/linalg.hpp"
#include "fusion/rng.hpp"

namespace fusion {

// Layer for a unit-covariance Brownian bridge in whitened coordinates.
// Coordinate k has level I_k: the path stays within
// [min(z_s,z_e) - a(I_k), max(z_s,z_e) + a(I_k)] but leaves the same box
// built with a(I_k - 1).
struct LayerInfo {
  Vec z_start, z_end;
  double t_start = 0, t_end = 0;
  std::vector<int> level;
  Vec lo, hi;              // whitened box
  Mat lambda_sqrt;         // empty when the caller does not need the original box
  Vec orig_lo, orig_hi;    // bounding box of lambda_sqrt * [lo, hi]
};

// Half-width a(i) of level i for an interval of length delta; a(0) = 0.
double layer_half_width(int level, double delta);

// Probability that a unit Brownian bridge from x to y over a time delta
// stays inside (lo, hi).
double bridge_stay_probability(double x, double y, double delta, double lo, double hi);

// Bracketing sequence for the probability above. refine() adds one pair of
// terms; [lower, upper] always contains the true value.
class StaySeries {
 public:
  StaySeries(double x, double y, double delta, double lo, double hi);
  void refine();
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  int terms() const { return j_; }

 private:
  double x_, y_, delta_, lo_, hi_, w_;
  int j_ = 0;
  double partial_ = 1.0;
  double lower_ = 0.0, upper_ = 1.0;
  bool exact_ = false;
};

LayerInfo simulate_layer(const Vec& z_start, const Vec& z_end, double t_start, double t_end,
                         Rng& rng);

// Adds the original-coordinate box for x = lambda_sqrt * z.
void attach_original_box(LayerInfo& layer, const Mat& lambda_sqrt);

// Whitened points at the given sorted times inside (t_start, t_end), drawn
// from the bridge law conditioned on the layer.
std::vector<Vec> sample_bridge_points(const LayerInfo& layer, const std::vector<double>& times,
                                      Rng& rng);

Vec unwhiten(const LayerInfo& layer, const Vec& z);

}  // namespace fusion

#pragma once

#include <cstdint>
#include <vector>

#include "fusion/sampler.hpp"
#include "fusion/smc.hpp"

namespace fusion {

enum class TreeKind { ForkJoin, BalancedBinary, Progressive, Tempered };

struct Node {
  int id = 0;
  std::vector<Node> children;  // empty iff leaf
  std::vector<int> factors;    // factor indices below this node; tempered copies repeat
  double beta = 1.0;           // tempering power applied at a leaf

  bool leaf() const { return children.empty(); }
};

// Leaves are numbered 0..L-1 left to right, internal nodes L, L+1, ... in
// creation order, so the root carries the largest id. For Tempered, copies
// = 1/β and each leaf carries β = 1/copies.
Node build_tree(TreeKind kind, int C, int copies = 1);

int count_internal(const Node& node);
int count_leaves(const Node& node);
int depth(const Node& node);

struct DcConfig {
  int N = 1000;
  int leaf_samples = 0;  // 0 means N
  MeshPolicy mesh;       // policy applied at every internal node; ctx.C, d, b are set per node
  EstimatorConfig estimator;
  RwmConfig rwm;
  double resample_threshold = 0.5;
  bool decomposed = true;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct NodeReport {
  int id;
  int children;
  double T;
  int n_mesh;
  double min_cess;  // smallest N⁻¹CESS over the node's iterations
};

struct DcResult {
  FusionResult result;
  std::vector<NodeReport> nodes;  // internal nodes in evaluation order
  int total_mesh() const;
};

// Seeds used for leaf draws and for each internal node's particle system.
std::uint64_t leaf_seed(std::uint64_t seed, int leaf_id);
std::uint64_t node_seed(std::uint64_t seed, int node_id);

DcResult dc_fusion(const Node& root, const std::vector<ModelPtr>& models, const DcConfig& cfg);

}  // namespace fusion

#include "fusion/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fusion {

namespace {

constexpr std::uint64_t kLeafStream = 0x6c656166ULL;
constexpr std::uint64_t kNodeStream = 0x6e6f6465ULL;

Node make_leaf(int id, int factor, double beta) {
  Node n;
  n.id = id;
  n.factors = {factor};
  n.beta = beta;
  return n;
}

Node join(std::vector<Node> kids, int& next_id) {
  Node n;
  n.id = next_id++;
  for (const auto& k : kids) n.factors.insert(n.factors.end(), k.factors.begin(), k.factors.end());
  n.children = std::move(kids);
  return n;
}

struct Evaluated {
  FusionResult out;
  ModelPtr model;
};

Evaluated evaluate(const Node& node, const std::vector<ModelPtr>& models, const DcConfig& cfg,
                   std::vector<NodeReport>& reports) {
  if (node.leaf()) {
    const int f = node.factors.front();
    require(f >= 0 && f < int(models.size()), Errc::DimensionMismatch, "leaf refers to a missing factor");
    ModelPtr m = temper(models[f], node.beta);
    const int n = cfg.leaf_samples > 0 ? cfg.leaf_samples : cfg.N;
    Rng rng(leaf_seed(cfg.seed, node.id));
    LeafDraws draws = sample_leaf(*m, n, rng, cfg.rwm);
    Evaluated e{{}, m};
    e.out.samples = std::move(draws.samples);
    e.out.weights = Vec::Constant(n, 1.0 / n);
    return e;
  }

  std::vector<Evaluated> kids;
  for (const auto& child : node.children) kids.push_back(evaluate(child, models, cfg, reports));

  std::vector<FactorInput> inputs;
  std::vector<ModelPtr> parts;
  for (auto& k : kids) {
    FactorInput in;
    in.model = k.model;
    in.lambda = weighted_cov(k.out.samples, k.out.weights);
    in.log_weights = k.out.weights.array().log();
    in.samples = std::move(k.out.samples);
    inputs.push_back(std::move(in));
    parts.push_back(k.model);
  }

  GbfConfig g;
  g.N = cfg.N;
  g.mesh = cfg.mesh;
  g.estimator = cfg.estimator;
  g.resample_threshold = cfg.resample_threshold;
  g.decomposed = cfg.decomposed;
  g.seed = node_seed(cfg.seed, node.id);
  g.threads = cfg.threads;

  Evaluated e{gbf(inputs, g), product(parts)};
  double min_cess = 1.0;
  for (const auto& r : e.out.diagnostics) min_cess = std::min(min_cess, r.cess / cfg.N);
  reports.push_back({node.id, int(node.children.size()), e.out.T, int(e.out.mesh.size()) - 1, min_cess});
  return e;
}

}  // namespace

Node build_tree(TreeKind kind, int C, int copies) {
  require(C >= 1, Errc::BadArgument, "tree needs at least one factor");
  if (kind == TreeKind::Tempered) {
    require(copies >= 1, Errc::BadBeta, "1/beta must be a positive integer");
  } else {
    copies = 1;
  }
  const double beta = 1.0 / copies;
  int next_id = 0;
  std::vector<Node> leaves;
  for (int k = 0; k < copies; ++k)
    for (int c = 0; c < C; ++c) leaves.push_back(make_leaf(next_id++, c, beta));
  if (leaves.size() == 1) return leaves.front();

  switch (kind) {
    case TreeKind::ForkJoin:
      return join(std::move(leaves), next_id);
    case TreeKind::BalancedBinary: {
      std::vector<Node> level = std::move(leaves);
      while (level.size() > 1) {
        std::vector<Node> up;
        for (size_t i = 0; i + 1 < level.size(); i += 2)
          up.push_back(join({std::move(level[i]), std::move(level[i + 1])}, next_id));
        if (level.size() % 2) up.push_back(std::move(level.back()));
        level = std::move(up);
      }
      return level.front();
    }
    case TreeKind::Progressive: {
      Node acc = std::move(leaves[0]);
      for (size_t i = 1; i < leaves.size(); ++i) acc = join({std::move(acc), std::move(leaves[i])}, next_id);
      return acc;
    }
    case TreeKind::Tempered: {
      if (copies == 1) return join(std::move(leaves), next_id);
      std::vector<Node> groups;
      for (int k = 0; k < copies; ++k) {
        std::vector<Node> g(std::make_move_iterator(leaves.begin() + k * C),
                            std::make_move_iterator(leaves.begin() + (k + 1) * C));
        groups.push_back(C == 1 ? std::move(g.front()) : join(std::move(g), next_id));
      }
      return join(std::move(groups), next_id);
    }
  }
  throw Error(Errc::BadArgument, "unknown tree kind");
}

int count_internal(const Node& node) {
  if (node.leaf()) return 0;
  int n = 1;
  for (const auto& c : node.children) n += count_internal(c);
  return n;
}

int count_leaves(const Node& node) {
  if (node.leaf()) return 1;
  int n = 0;
  for (const auto& c : node.children) n += count_leaves(c);
  return n;
}

int depth(const Node& node) {
  int d = 0;
  for (const auto& c : node.children) d = std::max(d, 1 + depth(c));
  return d;
}

int DcResult::total_mesh() const {
  int n = 0;
  for (const auto& r : nodes) n += r.n_mesh;
  return n;
}

std::uint64_t leaf_seed(std::uint64_t seed, int leaf_id) {
  return derive_seed(seed, kLeafStream, std::uint64_t(leaf_id));
}

std::uint64_t node_seed(std::uint64_t seed, int node_id) {
  return derive_seed(seed, kNodeStream, std::uint64_t(node_id));
}

DcResult dc_fusion(const Node& root, const std::vector<ModelPtr>& models, const DcConfig& cfg) {
  require(!models.empty(), Errc::EmptyInput, "no factors");
  require(cfg.N >= 1, Errc::BadArgument, "N must be positive");
  DcResult r;
  r.result = evaluate(root, models, cfg, r.nodes).out;
  return r;
}

}  // namespace fusion

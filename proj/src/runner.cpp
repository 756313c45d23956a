#include "fusion/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace fusion {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kMcfStream = 0x6d6366ULL;
constexpr std::uint64_t kReferenceStream = 0x726566ULL;
constexpr std::uint64_t kDataStream = 0x64617461ULL;

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw Error(Errc::ConfigInvalid, path + ": " + why);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(path + key, e.what());
  }
}

int positive_int(const json& j, const std::string& key, const std::string& path, int fallback) {
  int v = get<int>(j, key, path, fallback);
  if (v < 1) invalid(path + key, "must be a positive integer");
  return v;
}

TreeKind parse_tree(const std::string& s, const std::string& path) {
  if (s == "fork-join") return TreeKind::ForkJoin;
  if (s == "balanced-binary") return TreeKind::BalancedBinary;
  if (s == "progressive") return TreeKind::Progressive;
  if (s == "tempered") return TreeKind::Tempered;
  invalid(path, "unknown tree kind '" + s + "'");
}

void parse_mesh(const json& j, ExperimentConfig& cfg) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    kind = get<std::string>(j, "kind", "mesh.", "");
  } else {
    invalid("mesh", "expected a string or an object");
  }
  if (kind == "fixed") {
    cfg.mesh.kind = MeshKind::Fixed;
    if (!j.is_object() || !j.contains("T")) invalid("mesh.T", "fixed mesh needs T");
    cfg.mesh.T = get<double>(j, "T", "mesh.", 0);
    cfg.mesh.n = positive_int(j, "n", "mesh.", 1);
    if (!(cfg.mesh.T > 0)) invalid("mesh.T", "must be positive");
  } else if (kind == "guided-regular" || kind == "guided-adaptive") {
    cfg.mesh.kind = kind == "guided-regular" ? MeshKind::Regular : MeshKind::Adaptive;
    if (j.is_object()) cfg.mesh.T = get<double>(j, "T", "mesh.", 0);
  } else {
    invalid("mesh.kind", "expected fixed, guided-regular or guided-adaptive");
  }
}

void parse_guidance(const json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) invalid("guidance", "expected an object");
  auto& ctx = cfg.mesh.ctx;
  ctx.zeta = get<double>(j, "zeta", "guidance.", ctx.zeta);
  ctx.zeta_prime = get<double>(j, "zeta_prime", "guidance.", ctx.zeta_prime);
  if (!(ctx.zeta > 0 && ctx.zeta < 1)) invalid("guidance.zeta", "must lie in (0,1)");
  if (!(ctx.zeta_prime > 0 && ctx.zeta_prime < 1)) invalid("guidance.zeta_prime", "must lie in (0,1)");
  std::string regime = get<std::string>(j, "regime", "guidance.", "SH");
  if (regime == "SH") ctx.regime = Regime::SH;
  else if (regime == "SSH") ctx.regime = Regime::SSH;
  else invalid("guidance.regime", "expected SH or SSH");
  ctx.lambda = get<double>(j, "lambda", "guidance.", ctx.lambda);
  if (j.contains("gamma")) ctx.gamma = get<double>(j, "gamma", "guidance.", ctx.gamma);
}

void parse_estimator(const json& j, ExperimentConfig& cfg) {
  std::string kind;
  if (j.is_string()) kind = j.get<std::string>();
  else if (j.is_object()) kind = get<std::string>(j, "kind", "estimator.", "gpe2");
  else invalid("estimator", "expected a string or an object");
  if (kind == "gpe1") cfg.estimator.kind = EstimatorKind::GPE1;
  else if (kind == "gpe2") cfg.estimator.kind = EstimatorKind::GPE2;
  else invalid("estimator.kind", "expected gpe1 or gpe2");
  if (j.is_object()) {
    cfg.estimator.nb_beta = get<double>(j, "beta", "estimator.", cfg.estimator.nb_beta);
    if (!(cfg.estimator.nb_beta > 0)) invalid("estimator.beta", "must be positive");
    std::string bounds = get<std::string>(j, "bounds", "estimator.", "local");
    if (bounds == "local") cfg.estimator.bounds = BoundMode::Local;
    else if (bounds == "global") cfg.estimator.bounds = BoundMode::Global;
    else invalid("estimator.bounds", "expected local or global");
  }
}

// "dcfusion(balanced-binary)" carries its tree in parentheses.
void parse_method_field(const std::string& s, ExperimentConfig& cfg) {
  auto open = s.find('(');
  if (open != std::string::npos) {
    if (s.back() != ')') invalid("method", "unbalanced parentheses");
    cfg.method = parse_method(s.substr(0, open));
    if (cfg.method != Method::DcFusion) invalid("method", "only dcfusion takes a tree");
    cfg.tree = parse_tree(s.substr(open + 1, s.size() - open - 2), "method");
    return;
  }
  try {
    cfg.method = parse_method(s);
  } catch (const Error&) {
    invalid("method", "unknown method '" + s + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GuidanceContext run_context(const ExperimentConfig& cfg, const Problem& p) {
  GuidanceContext ctx = cfg.mesh.ctx;
  ctx.C = cfg.C;
  ctx.d = p.d;
  ctx.m = p.m;
  return ctx;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::Gbf: return "gbf";
    case Method::DcFusion: return "dcfusion";
    case Method::Mcf: return "mcf";
    case Method::Cmc: return "cmc";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "gbf") return Method::Gbf;
  if (s == "dcfusion") return Method::DcFusion;
  if (s == "mcf") return Method::Mcf;
  if (s == "cmc") return Method::Cmc;
  throw Error(Errc::ConfigInvalid, "method: unknown method '" + s + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid("<root>", e.what());
  }
  if (!j.is_object()) invalid("<root>", "expected an object");
  ExperimentConfig cfg;
  cfg.problem = get<std::string>(j, "problem", "", cfg.problem);
  static const std::vector<std::string> problems{"gaussian-synthetic", "logistic-synthetic", "logistic-csv",
                                                 "robust-csv", "negbin-csv"};
  if (std::find(problems.begin(), problems.end(), cfg.problem) == problems.end())
    invalid("problem", "unknown problem '" + cfg.problem + "'");
  cfg.data_path = get<std::string>(j, "data", "", "");
  if (cfg.problem.ends_with("-csv") && cfg.data_path.empty()) invalid("data", "csv problems need a data path");
  cfg.d = positive_int(j, "d", "", cfg.d);
  cfg.rho = get<double>(j, "rho", "", cfg.rho);
  cfg.m = get<double>(j, "m", "", cfg.m);
  if (!(cfg.m > 0)) invalid("m", "must be positive");
  cfg.shift = get<double>(j, "shift", "", cfg.shift);
  cfg.rows = positive_int(j, "rows", "", cfg.rows);
  cfg.C = positive_int(j, "C", "", cfg.C);
  cfg.N = positive_int(j, "N", "", cfg.N);
  if (!j.contains("seed")) invalid("seed", "a seed is mandatory");
  cfg.seed = get<std::uint64_t>(j, "seed", "", 0);
  if (j.contains("method")) parse_method_field(get<std::string>(j, "method", "", "gbf"), cfg);
  if (j.contains("tree")) cfg.tree = parse_tree(get<std::string>(j, "tree", "", ""), "tree");
  cfg.copies = positive_int(j, "copies", "", cfg.copies);
  if (j.contains("mesh")) parse_mesh(j["mesh"], cfg);
  if (j.contains("guidance")) parse_guidance(j["guidance"], cfg);
  if (j.contains("estimator")) parse_estimator(j["estimator"], cfg);
  cfg.threads = positive_int(j, "threads", "", cfg.threads);
  cfg.reference_samples = positive_int(j, "reference_samples", "", cfg.reference_samples);
  if (j.contains("rwm")) {
    const json& r = j["rwm"];
    cfg.rwm.burn_in = positive_int(r, "burn_in", "rwm.", cfg.rwm.burn_in);
    cfg.rwm.thin = positive_int(r, "thin", "rwm.", cfg.rwm.thin);
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.is_object()) invalid("sweep", "expected an object");
    cfg.sweep_C = get<std::vector<int>>(s, "C", "sweep.", {});
    cfg.sweep_N = get<std::vector<int>>(s, "N", "sweep.", {});
    for (int v : cfg.sweep_C)
      if (v < 1) invalid("sweep.C", "counts must be positive");
    for (int v : cfg.sweep_N)
      if (v < 1) invalid("sweep.N", "counts must be positive");
  }
  if (j.contains("methods")) {
    for (const auto& s : get<std::vector<std::string>>(j, "methods", "", {})) {
      ExperimentConfig tmp;
      parse_method_field(s, tmp);
      cfg.methods.push_back(tmp.method);
      if (tmp.method == Method::DcFusion && s.find('(') != std::string::npos) cfg.tree = tmp.tree;
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Problem make_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == "gaussian-synthetic") return gaussian_synthetic(cfg.C, cfg.d, cfg.rho, cfg.m, cfg.shift);
  if (cfg.problem == "logistic-synthetic") {
    Rng rng = make_stream(cfg.seed, kDataStream);
    return regression_problem(Family::Logistic, logistic_synthetic(cfg.rows, rng), cfg.C);
  }
  RegressionData data = load_regression_csv(cfg.data_path);
  if (cfg.problem == "logistic-csv") return regression_problem(Family::Logistic, data, cfg.C);
  if (cfg.problem == "robust-csv") return regression_problem(Family::RobustT, data, cfg.C);
  return regression_problem(Family::NegBin, data, cfg.C);
}

Mat reference_samples(const Problem& p, const ExperimentConfig& cfg) {
  Rng rng = make_stream(cfg.seed, kReferenceStream);
  return sample_leaf(*p.full, cfg.reference_samples, rng, cfg.rwm).samples;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, Method method) {
  Problem p = make_problem(cfg);
  log_line(LogLevel::Info, std::string("running ") + method_name(method) + " on " + cfg.problem +
                               " with C=" + std::to_string(cfg.C) + " N=" + std::to_string(cfg.N));
  RunOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::Gbf:
    case Method::DcFusion: {
      Node tree = method == Method::Gbf ? build_tree(TreeKind::ForkJoin, cfg.C)
                                        : build_tree(cfg.tree, cfg.C, cfg.copies);
      DcConfig dc;
      dc.N = cfg.N;
      dc.mesh = cfg.mesh;
      dc.mesh.ctx = run_context(cfg, p);
      dc.estimator = cfg.estimator;
      dc.rwm = cfg.rwm;
      dc.seed = cfg.seed;
      dc.threads = cfg.threads;
      DcResult r = dc_fusion(tree, p.factors, dc);
      out.samples = std::move(r.result.samples);
      out.weights = std::move(r.result.weights);
      out.diagnostics = std::move(r.result.diagnostics);
      out.n_mesh = r.total_mesh();
      out.T = r.result.T;
      for (const auto& n : r.nodes)
        log_line(LogLevel::Debug, "node " + std::to_string(n.id) + ": T=" + fmt(n.T) +
                                      " n=" + std::to_string(n.n_mesh) + " min CESS/N=" + fmt(n.min_cess));
      break;
    }
    case Method::Mcf: {
      double T = cfg.mesh.T;
      if (cfg.mesh.kind != MeshKind::Fixed && !(T > 0)) {
        GuidanceContext ctx = run_context(cfg, p);
        ctx.b = 1;  // identity preconditioners
        std::vector<Vec> means;
        std::vector<Mat> eyes;
        for (const auto& f : p.factors) {
          auto g = std::dynamic_pointer_cast<const GaussianModel>(f);
          require(bool(g), Errc::ConfigInvalid, "method: mcf needs Gaussian factors");
          means.push_back(g->mean());
          eyes.push_back(Mat::Identity(p.d, p.d));
        }
        estimate_gamma(ctx, sigma_a_sq(means, eyes));
        T = recommend_T(ctx);
      }
      Rng rng = make_stream(cfg.seed, kMcfStream);
      McfResult r = mcf_rejection(p.factors, T, cfg.N, rng);
      out.samples = std::move(r.samples);
      out.weights = Vec::Constant(cfg.N, 1.0 / cfg.N);
      out.acceptance_rate = r.acceptance_rate;
      out.n_mesh = 1;
      out.T = T;
      break;
    }
    case Method::Cmc: {
      std::vector<Mat> draws;
      for (int c = 0; c < cfg.C; ++c) {
        Rng rng(leaf_seed(cfg.seed, c));
        draws.push_back(sample_leaf(*p.factors[c], cfg.N, rng, cfg.rwm).samples);
      }
      out.samples = consensus_merge(draws);
      out.weights = Vec::Constant(cfg.N, 1.0 / cfg.N);
      break;
    }
  }
  out.runtime_s = seconds_since(t0);
  try {
    if (!p.reference.empty()) {
      out.iad = iad(out.samples, out.weights, p.reference);
    } else {
      Mat ref = reference_samples(p, cfg);
      out.iad = iad(out.samples, out.weights, ref, Vec());
    }
  } catch (const Error& e) {
    log_line(LogLevel::Warn, std::string("iad unavailable: ") + e.what());
  }
  return out;
}

void write_samples_csv(const std::string& path, const Mat& samples, const Vec& weights) {
  std::ofstream f(path, std::ios::binary);
  require(bool(f), Errc::ConfigInvalid, "cannot write " + path);
  for (Eigen::Index j = 0; j < samples.rows(); ++j) f << "theta" << j + 1 << ',';
  f << "weight\n";
  for (Eigen::Index i = 0; i < samples.cols(); ++i) {
    for (Eigen::Index j = 0; j < samples.rows(); ++j) f << fmt(samples(j, i)) << ',';
    f << fmt(weights(i)) << '\n';
  }
}

void read_samples_csv(const std::string& path, Mat& samples, Vec& weights) {
  std::ifstream in(path);
  require(bool(in), Errc::ConfigInvalid, "cannot open " + path);
  std::string line;
  require(bool(std::getline(in, line)), Errc::EmptyInput, path + " has no header");
  const auto cols = std::count(line.begin(), line.end(), ',') + 1;
  require(cols >= 2, Errc::DimensionMismatch, path + " needs value columns and a weight column");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(long(row.size()) == cols, Errc::DimensionMismatch, "ragged row in " + path);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), Errc::EmptyInput, path + " has no rows");
  samples.resize(cols - 1, Eigen::Index(rows.size()));
  weights.resize(Eigen::Index(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (long j = 0; j + 1 < cols; ++j) samples(j, Eigen::Index(i)) = rows[i][j];
    weights(Eigen::Index(i)) = rows[i][cols - 1];
  }
}

void write_outputs(const std::string& dir, const ExperimentConfig& cfg, Method method, const RunOutcome& out) {
  std::filesystem::create_directories(dir);
  write_samples_csv(dir + "/samples.csv", out.samples, out.weights);
  {
    std::ofstream f(dir + "/diagnostics.csv", std::ios::binary);
    require(bool(f), Errc::ConfigInvalid, "cannot write diagnostics.csv");
    f << "iter,t,cess,ess,resampled,delta\n";
    for (const auto& r : out.diagnostics)
      f << r.iter << ',' << fmt(r.t) << ',' << fmt(r.cess) << ',' << fmt(r.ess) << ',' << (r.resampled ? 1 : 0)
        << ',' << fmt(r.delta) << '\n';
  }
  json s;
  s["problem"] = cfg.problem;
  s["method"] = method_name(method);
  s["C"] = cfg.C;
  s["N"] = cfg.N;
  s["d"] = out.samples.rows();
  s["seed"] = cfg.seed;
  s["threads"] = cfg.threads;
  s["T"] = out.T;
  s["n"] = out.n_mesh;
  s["runtime_s"] = out.runtime_s;
  s["iad"] = out.iad ? json(*out.iad) : json(nullptr);
  if (out.acceptance_rate) s["acceptance_rate"] = *out.acceptance_rate;
  std::ofstream f(dir + "/summary.json", std::ios::binary);
  f << s.dump(2) << '\n';
}

LogLevel log_level() {
  const char* v = std::getenv("FUSION_LOG");
  if (!v) return LogLevel::Warn;
  std::string s(v);
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log_line(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (int(level) <= int(log_level())) std::cerr << "[" << names[int(level)] << "] " << msg << '\n';
}

void run_bench(const ExperimentConfig& base, const std::string& out_csv) {
  std::vector<Method> methods = base.methods.empty() ? std::vector<Method>{base.method} : base.methods;
  std::vector<std::pair<int, int>> points;
  if (!base.sweep_C.empty()) {
    for (int c : base.sweep_C) points.emplace_back(c, base.N);
  } else if (!base.sweep_N.empty()) {
    for (int n : base.sweep_N) points.emplace_back(base.C, n);
  } else {
    points.emplace_back(base.C, base.N);
  }
  auto parent = std::filesystem::path(out_csv).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(out_csv, std::ios::binary);
  require(bool(f), Errc::ConfigInvalid, "cannot write " + out_csv);
  f << "method,C,N,iad,runtime_s,n_mesh\n";
  for (auto [C, N] : points) {
    for (Method m : methods) {
      ExperimentConfig cfg = base;
      cfg.C = C;
      cfg.N = N;
      RunOutcome out = run_experiment(cfg, m);
      f << method_name(m) << ',' << C << ',' << N << ',' << (out.iad ? fmt(*out.iad) : std::string("nan")) << ','
        << fmt(out.runtime_s) << ',' << out.n_mesh << '\n';
      f.flush();
    }
  }
}

}  // namespace fusion

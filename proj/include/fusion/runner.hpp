#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fusion/hierarchy.hpp"
#include "fusion/problems.hpp"

namespace fusion {

enum class Method { Gbf, DcFusion, Mcf, Cmc };

struct ExperimentConfig {
  std::string problem = "gaussian-synthetic";
  std::string data_path;  // csv problems
  int d = 1;
  double rho = 0;
  double m = 1;
  double shift = 0;
  int rows = 1000;  // logistic-synthetic
  int C = 2;
  int N = 1000;
  std::uint64_t seed = 0;
  Method method = Method::Gbf;
  TreeKind tree = TreeKind::BalancedBinary;
  int copies = 1;
  MeshPolicy mesh;
  EstimatorConfig estimator;
  int threads = 1;
  int reference_samples = 10000;
  RwmConfig rwm;
  // bench
  std::vector<int> sweep_C;
  std::vector<int> sweep_N;
  std::vector<Method> methods;
};

const char* method_name(Method m);
Method parse_method(const std::string& s);

// Throws ConfigInvalid naming the offending field path.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunOutcome {
  Mat samples;  // d x N
  Vec weights;
  std::vector<IterationRecord> diagnostics;
  std::optional<double> iad;
  double runtime_s = 0;
  int n_mesh = 0;
  double T = 0;
  std::optional<double> acceptance_rate;
};

Problem make_problem(const ExperimentConfig& cfg);

// Reference draws for problems without analytic marginals.
Mat reference_samples(const Problem& p, const ExperimentConfig& cfg);

RunOutcome run_experiment(const ExperimentConfig& cfg, Method method);

void write_samples_csv(const std::string& path, const Mat& samples, const Vec& weights);
void write_outputs(const std::string& dir, const ExperimentConfig& cfg, Method method, const RunOutcome& out);

// samples.csv reader: value columns then a trailing weight column.
void read_samples_csv(const std::string& path, Mat& samples, Vec& weights);

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Verbosity from FUSION_LOG (error, warn, info, debug); warn when unset.
LogLevel log_level();
void log_line(LogLevel level, const std::string& msg);

// One row per (sweep point, method): method,C,N,iad,runtime_s,n_mesh.
void run_bench(const ExperimentConfig& cfg, const std::string& out_csv);

}  // namespace fusion

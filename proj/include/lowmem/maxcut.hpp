#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lowmem/fw_gaussian.hpp"
#include "lowmem/graph.hpp"

namespace lowmem {

/// Goemans-Williamson relaxation data: C = L/4, A = diag, b = 1, alpha = n.
struct MaxCutInstance {
  std::shared_ptr<const SparseGraph> graph;
  LinearOperator cost;
  ConstraintMap constraints;

  Index n() const { return cost.dim(); }
  double alpha() const { return static_cast<double>(n()); }
  double trace() const { return *cost.trace(); }
};

MaxCutInstance make_instance(std::shared_ptr<const SparseGraph> graph);

/// Parameters for the penalized relaxation at accuracy eps.
struct MaxCutParams {
  double eps;
  double beta;            // 4 Tr(C)
  double M;               // 4 log(2n) / eps
  double stop_threshold;  // eps Tr(C)
  double curvature;       // 16 Tr(C) log(2n) n^2 / eps
  double t_bound;         // 64 log(2n) n^2 / eps^2
  double lambda_bound;    // 5 Tr(C)
  double p;               // eps / t_bound
};

/// Requires eps in (0, 1/3) and a graph with positive total weight.
MaxCutParams choose_params(const MaxCutInstance& instance, double eps);

PenalizedSdp make_penalized_problem(const MaxCutInstance& instance, const MaxCutParams& params);

using Signs = std::vector<std::int8_t>;

struct Cut {
  Signs w;
  double value = 0.0;
};

/// Rounds one Gaussian sample z ~ N(0, X) given diag(X): adds independent
/// N(0, 1 - diag_i / max(diag)) noise to z / sqrt(max(diag)) so the covariance
/// has unit diagonal, then takes signs (sign(0) = +1).
Signs gw_round(const VecIn& sample, const VecIn& diag, Rng& rng);

/// Total weight of edges whose endpoints get different signs. Equals w^T C w
/// for C = L/4.
double cut_value(const SparseGraph& graph, std::span<const std::int8_t> w);

/// Exact MaxCut by Gray-code enumeration of the 2^(n-1) cuts with w_0 = +1.
/// Requires n <= 24.
double brute_force_opt(const SparseGraph& graph);

inline constexpr std::uint64_t kDefaultMaxIterCap = 1'000'000;

struct PipelineOptions {
  double eps = 0.1;
  Index samples = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_iters = 0;  // 0: min(t_bound, kDefaultMaxIterCap)
  bool keep_trace = true;
  TraceSink trace_sink;
};

struct PipelineResult {
  MaxCutParams params;
  SolveResult solve;
  std::vector<Cut> cuts;  // one per sample column
  std::size_t best = 0;   // index into cuts
  double mean_cut = 0.0;

  bool converged() const { return solve.status == SolveStatus::kConverged; }
  const Cut& best_cut() const { return cuts.at(best); }
};

/// choose_params -> penalized solve with S columns -> round each column ->
/// evaluate cuts.
PipelineResult run_pipeline(const MaxCutInstance& instance, const PipelineOptions& options);

}  // namespace lowmem

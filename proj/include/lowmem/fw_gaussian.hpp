#pragma once

#include <cstdint>

#include "lowmem/lmo.hpp"
#include "lowmem/operators.hpp"
#include "lowmem/penalty.hpp"
#include "lowmem/rng.hpp"
#include "lowmem/trace_log.hpp"

namespace lowmem {

/// max <C, X> - beta * phi_M(A(X) - b)  over  {X psd, Tr(X) <= alpha}.
struct PenalizedSdp {
  LinearOperator cost;
  ConstraintMap constraints;
  PenaltyParams penalty;
  double alpha;

  void validate() const;
  PenalizedObjective objective() const { return {penalty, constraints.b()}; }
};

struct SolveConfig {
  double eps = 0.1;               // stop when the gap is <= eps (objective units)
  double eta = 1.0;               // LMO accuracy parameter
  double p = 0.01;                // per-call LMO failure probability
  double curvature = 1.0;         // upper bound C_g^u on the curvature constant
  double lambda_bound = 1.0;      // >= max |lambda_i(J_t)| for every iterate
  std::uint64_t max_iters = 1000;
  Index samples = 1;              // S, sample columns sharing one LMO trajectory
  std::uint64_t seed = 0;
  std::uint64_t lmo_cap = kDefaultMatvecCap;
  bool keep_trace = true;         // store records in the returned TraceLog
  TraceSink trace_sink;           // optional streaming consumer
  // When the cheap gap passes, re-run the oracle with delta = eps/2 and stop
  // only if that gap is <= eps/2. Off: stop on the cheap gap alone.
  bool verify_stop = true;
  // If the oracle's rank-one candidate scores below the current iterate
  // (possible while delta is large), step towards X_t itself instead: the
  // state stays put, only t advances, and the reported gap is 0.
  bool hold_on_negative_gap = true;

  void validate() const;
};

/// Everything the solver keeps between iterations. z holds S columns, each
/// distributed N(0, X_t) given the LMO outputs; (u, v) = (<C, X_t>, A(X_t)).
struct SamplerState {
  std::uint64_t t = 0;
  MatrixXd z;
  VectorXd v;
  double u = 0.0;
  double gap = 0.0;
  Rng lmo_rng;
  Rng zeta_rng;
};

/// Result of the linear oracle at the current iterate, before stepping.
struct Proposal {
  UpdateDirection dir;  // includes q = A(H_t)
  double cost_image = 0.0;  // <C, H_t> = weight * w^T C w
  double gamma = 1.0;       // 2 / (t + 2)
  double gap = 0.0;
  bool hold = false;        // H_t = X_t: apply only advances t
};

SamplerState init(const PenalizedSdp& problem, const SolveConfig& config);

/// Builds J = C - beta A*(phi_grad(v - b)) and calls the power method with
/// delta = eta * gamma * C_g^u / 2. Fills the proposal's gap.
Proposal propose(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config);

/// Same, with an explicit oracle accuracy.
Proposal propose(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config,
                 double delta);

/// <(u_q, q) - (u, v), grad g(u, v)> with grad g = (1, -beta * phi_grad(v - b)).
double compute_gap(const SamplerState& state, const Proposal& proposal, const PenalizedSdp& problem);

/// z <- sqrt(1 - gamma) z + sqrt(gamma) zeta w,  v <- (1 - gamma) v + gamma q,
/// u <- (1 - gamma) u + gamma u_q, t <- t + 1. One zeta per column.
void apply(SamplerState& state, const Proposal& proposal);

/// propose + apply. Returns the proposal that was applied.
Proposal step(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config);

enum class SolveStatus { kConverged, kMaxIterations };

struct SolveResult {
  SamplerState state;
  TraceLog trace;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::uint64_t max_matvecs_per_iter = 0;
  std::uint64_t total_matvecs = 0;
  std::uint64_t verifications = 0;
};

/// Runs until the gap (checked before each step) is <= eps or max_iters steps
/// have been taken. With verify_stop, the early oracle is too coarse to trust
/// (delta_0 = eta C / 2), so a passing gap is rechecked at accuracy eps/2;
/// the true gap is then <= eps with probability >= 1 - p. A failed check is
/// used as the step and the next check waits until t grows by half.
SolveResult solve(const PenalizedSdp& problem, const SolveConfig& config);

/// Iteration budget ceil(2 C (1 + eta) / eps) - 2 after which an eps-optimal
/// iterate is reached with probability >= 1 - T p.
std::uint64_t iteration_budget(double curvature, double eta, double eps);

/// Unconditionally i.i.d. samples: `runs` independent solves (seeds derived
/// from config.seed), one column each.
MatrixXd rerun_samples(const PenalizedSdp& problem, const SolveConfig& config, Index runs);

}  // namespace lowmem

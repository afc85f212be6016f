#include "lowmem/fw_gaussian.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace lowmem {

void PenalizedSdp::validate() const {
  penalty.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("problem: alpha must be > 0");
  if (cost.dim() != constraints.n()) throw std::invalid_argument("problem: dimension mismatch");
  if (!cost.trace()) throw std::invalid_argument("problem: cost operator must carry its trace");
}

void SolveConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("solve: eps must be > 0");
  // eta = 0 would ask the power method for an exact eigenvector.
  if (!(eta > 0.0)) throw std::invalid_argument("solve: eta must be > 0 with a power-method oracle");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("solve: p must be in (0, 1)");
  if (!(curvature > 0.0)) throw std::invalid_argument("solve: curvature bound must be > 0");
  if (!(lambda_bound >= 0.0)) throw std::invalid_argument("solve: lambda_bound must be >= 0");
  if (samples < 1) throw std::invalid_argument("solve: need at least one sample column");
}

SamplerState init(const PenalizedSdp& problem, const SolveConfig& config) {
  problem.validate();
  config.validate();
  const Index n = problem.cost.dim();
  const double scale = problem.alpha / static_cast<double>(n);

  SamplerState state;
  state.t = 0;
  state.v = scale * problem.constraints.identity_image();
  state.u = scale * *problem.cost.trace();
  state.z.resize(n, config.samples);
  Rng init_rng = make_stream(config.seed, Stream::kInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(scale);
  for (Index c = 0; c < config.samples; ++c) {
    for (Index i = 0; i < n; ++i) state.z(i, c) = sd * normal(init_rng);
  }
  state.lmo_rng = make_stream(config.seed, Stream::kLmo);
  state.zeta_rng = make_stream(config.seed, Stream::kZeta);
  return state;
}

double compute_gap(const SamplerState& state, const Proposal& proposal,
                   const PenalizedSdp& problem) {
  const auto& b = problem.constraints.b();
  const VectorXd s = phi_grad(state.v - b, problem.penalty.M);
  const double cost_part = proposal.cost_image - state.u;
  const double penalty_part = s.dot(proposal.dir.q - state.v);
  return cost_part - problem.penalty.beta * penalty_part;
}

Proposal propose(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config) {
  const double gamma = 2.0 / (static_cast<double>(state.t) + 2.0);
  return propose(state, problem, config, 0.5 * config.eta * gamma * config.curvature);
}

Proposal propose(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config,
                 double delta) {
  Proposal prop;
  prop.gamma = 2.0 / (static_cast<double>(state.t) + 2.0);

  const LinearOperator grad_op = penalized_gradient_operator(
      problem.cost, problem.constraints, phi_grad(state.v - problem.constraints.b(), problem.penalty.M),
      problem.penalty.beta);
  LmoRequest req;
  req.op = &grad_op;
  req.alpha = problem.alpha;
  req.delta = delta;
  req.p = config.p;
  req.lambda_bound = config.lambda_bound;
  req.max_iterations = config.lmo_cap;
  prop.dir = power_method(req, state.lmo_rng);
  attach_image(prop.dir, problem.constraints);

  if (!prop.dir.is_zero()) {
    const VectorXd cw = problem.cost * prop.dir.w;
    prop.cost_image = prop.dir.weight * prop.dir.w.dot(cw);
    ++prop.dir.matvecs;
  }
  prop.gap = compute_gap(state, prop, problem);
  if (config.hold_on_negative_gap && prop.gap < 0.0) {
    prop.hold = true;
    prop.gap = 0.0;
  }
  return prop;
}

void apply(SamplerState& state, const Proposal& proposal) {
  if (proposal.hold) {
    ++state.t;
    return;
  }
  const double gamma = proposal.gamma;
  const double keep = std::sqrt(1.0 - gamma);
  state.z *= keep;
  if (!proposal.dir.is_zero()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double step = std::sqrt(gamma * proposal.dir.weight);
    for (Index c = 0; c < state.z.cols(); ++c) {
      state.z.col(c) += (step * normal(state.zeta_rng)) * proposal.dir.w;
    }
  }
  state.v = (1.0 - gamma) * state.v + gamma * proposal.dir.q;
  state.u = (1.0 - gamma) * state.u + gamma * proposal.cost_image;
  ++state.t;
}

Proposal step(SamplerState& state, const PenalizedSdp& problem, const SolveConfig& config) {
  Proposal prop = propose(state, problem, config);
  state.gap = prop.gap;
  apply(state, prop);
  return prop;
}

SolveResult solve(const PenalizedSdp& problem, const SolveConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SolveResult result{init(problem, config), {}, SolveStatus::kMaxIterations, 0, 0};
  SamplerState& state = result.state;
  const auto& b = problem.constraints.b();
  const double verify_delta = 0.5 * config.eps;
  std::uint64_t next_verify = 0;

  while (true) {
    Proposal prop = propose(state, problem, config);
    std::uint64_t matvecs = prop.dir.matvecs;
    bool converged = prop.gap <= config.eps;
    if (converged && config.verify_stop) {
      converged = false;
      if (state.t >= next_verify) {
        prop = propose(state, problem, config, verify_delta);
        matvecs += prop.dir.matvecs;
        ++result.verifications;
        converged = prop.gap <= config.eps - verify_delta;
        next_verify = state.t + std::max<std::uint64_t>(1, state.t / 2);
      }
    }
    state.gap = prop.gap;
    result.total_matvecs += matvecs;
    result.max_matvecs_per_iter = std::max(result.max_matvecs_per_iter, matvecs);

    TraceRecord rec;
    rec.iter = state.t;
    rec.gap = prop.gap;
    rec.infeas_inf = (state.v - b).cwiseAbs().maxCoeff();
    rec.obj = state.u;
    rec.ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (config.keep_trace) result.trace.records.push_back(rec);
    if (config.trace_sink) config.trace_sink(rec);

    if (converged) {
      result.status = SolveStatus::kConverged;
      break;
    }
    if (state.t >= config.max_iters) break;
    apply(state, prop);
  }
  return result;
}

std::uint64_t iteration_budget(double curvature, double eta, double eps) {
  const double t = std::ceil(2.0 * curvature * (1.0 + eta) / eps) - 2.0;
  return t <= 0.0 ? 0 : static_cast<std::uint64_t>(t);
}

MatrixXd rerun_samples(const PenalizedSdp& problem, const SolveConfig& config, Index runs) {
  MatrixXd out(problem.cost.dim(), runs);
  for (Index r = 0; r < runs; ++r) {
    SolveConfig cfg = config;
    cfg.samples = 1;
    cfg.keep_trace = false;
    cfg.trace_sink = nullptr;
    cfg.seed = make_stream(config.seed, Stream::kChain, static_cast<std::uint64_t>(r))();
    out.col(r) = solve(problem, cfg).state.z.col(0);
  }
  return out;
}

}  // namespace lowmem

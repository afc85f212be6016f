#include "lowmem/maxcut.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lowmem/errors.hpp"
#include "lowmem/parallel.hpp"

namespace lowmem {

MaxCutInstance make_instance(std::shared_ptr<const SparseGraph> graph) {
  if (!graph) throw std::invalid_argument("make_instance: null graph");
  const auto n = static_cast<Index>(graph->num_vertices());
  LinearOperator cost = laplacian_operator(graph);
  return MaxCutInstance{std::move(graph), std::move(cost), diagonal_constraints(n)};
}

MaxCutParams choose_params(const MaxCutInstance& instance, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 3.0)) throw std::invalid_argument("eps must lie in (0, 1/3)");
  const double tr = instance.trace();
  if (!(tr > 0.0)) throw std::invalid_argument("graph has no positive edge weight");
  const double n = static_cast<double>(instance.n());
  const double log2n = std::log(2.0 * n);

  MaxCutParams p{};
  p.eps = eps;
  p.beta = 4.0 * tr;
  p.M = 4.0 * log2n / eps;
  p.stop_threshold = eps * tr;
  p.curvature = curvature_bound(p.beta, instance.constraints.omega(), p.M, instance.alpha());
  p.t_bound = 64.0 * log2n * n * n / (eps * eps);
  p.lambda_bound = 5.0 * tr;
  p.p = eps / p.t_bound;
  return p;
}

PenalizedSdp make_penalized_problem(const MaxCutInstance& instance, const MaxCutParams& params) {
  return PenalizedSdp{instance.cost, instance.constraints, PenaltyParams{params.M, params.beta},
                      instance.alpha()};
}

Signs gw_round(const VecIn& sample, const VecIn& diag, Rng& rng) {
  if (sample.size() != diag.size()) throw std::invalid_argument("gw_round: dimension mismatch");
  if (!sample.allFinite() || !diag.allFinite()) throw NumericalError("gw_round: non-finite input");
  const double dmax = diag.maxCoeff();
  if (!(dmax > 0.0)) throw std::invalid_argument("gw_round: max(diag) must be > 0");
  const double inv_sd = 1.0 / std::sqrt(dmax);
  std::normal_distribution<double> normal(0.0, 1.0);
  Signs w(static_cast<std::size_t>(sample.size()));
  for (Index i = 0; i < sample.size(); ++i) {
    // 1 - d_i / max can round to -1e-16; clip at zero.
    const double var = std::clamp(1.0 - diag[i] / dmax, 0.0, 1.0);
    const double noise = var > 0.0 ? std::sqrt(var) * normal(rng) : 0.0;
    const double value = sample[i] * inv_sd + noise;
    w[static_cast<std::size_t>(i)] = value >= 0.0 ? 1 : -1;
  }
  return w;
}

double cut_value(const SparseGraph& graph, std::span<const std::int8_t> w) {
  if (w.size() != graph.num_vertices()) throw std::invalid_argument("cut_value: dimension mismatch");
  for (auto s : w) {
    if (s != 1 && s != -1) throw std::invalid_argument("cut_value: entries must be +1 or -1");
  }
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    if (w[e.i] != w[e.j]) total += e.w;
  }
  return total;
}

double brute_force_opt(const SparseGraph& graph) {
  const std::size_t n = graph.num_vertices();
  if (n > 24) throw std::invalid_argument("brute_force_opt: n must be <= 24");
  if (n == 1) return 0.0;

  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const Edge& e : graph.edges()) {
    adj[e.i].emplace_back(e.j, e.w);
    adj[e.j].emplace_back(e.i, e.w);
  }
  std::vector<std::int8_t> side(n, 1);
  double current = 0.0;  // all on one side
  double best = 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 1; g < patterns; ++g) {
    // Gray code: flip vertex 1 + (index of the lowest set bit of g).
    const auto v = static_cast<std::size_t>(std::countr_zero(g)) + 1;
    double delta = 0.0;
    for (const auto& [u, w] : adj[v]) delta += side[u] == side[v] ? w : -w;
    side[v] = static_cast<std::int8_t>(-side[v]);
    current += delta;
    best = std::max(best, current);
  }
  return best;
}

PipelineResult run_pipeline(const MaxCutInstance& instance, const PipelineOptions& options) {
  PipelineResult result;
  result.params = choose_params(instance, options.eps);
  const PenalizedSdp problem = make_penalized_problem(instance, result.params);

  SolveConfig config;
  config.eps = result.params.stop_threshold;
  config.eta = 1.0;
  config.p = result.params.p;
  config.curvature = result.params.curvature;
  config.lambda_bound = result.params.lambda_bound;
  config.samples = options.samples;
  config.seed = options.seed;
  config.max_iters = options.max_iters > 0
                         ? options.max_iters
                         : static_cast<std::uint64_t>(std::min(result.params.t_bound,
                                                               static_cast<double>(kDefaultMaxIterCap)));
  config.keep_trace = options.keep_trace;
  config.trace_sink = options.trace_sink;
  result.solve = solve(problem, config);

  const SamplerState& state = result.solve.state;
  const auto columns = static_cast<std::size_t>(state.z.cols());
  result.cuts.resize(columns);
  parallel_for(columns, [&](std::size_t c) {
    Rng rng = make_stream(options.seed, Stream::kRound, c);
    Cut& cut = result.cuts[c];
    cut.w = gw_round(state.z.col(static_cast<Index>(c)), state.v, rng);
    cut.value = cut_value(*instance.graph, cut.w);
  });
  double sum = 0.0;
  for (std::size_t c = 0; c < columns; ++c) {
    sum += result.cuts[c].value;
    if (result.cuts[c].value > result.cuts[result.best].value) result.best = c;
  }
  result.mean_cut = sum / static_cast<double>(columns);
  return result;
}

}  // namespace lowmem

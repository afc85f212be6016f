#include "lowmem/extreme_point.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "lowmem/errors.hpp"
#include "lowmem/parallel.hpp"

namespace lowmem {

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};

Eigen::LLT<MatrixXd> factor_information(const VecIn& v, Index m) {
  if (v.size() != m * m) throw std::invalid_argument("sensor: v must hold an m x m matrix");
  const Eigen::Map<const MatrixXd> info(v.data(), m, m);
  Eigen::LLT<MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw NumericalError("sensor: information matrix is singular");
  // rank-deficient sums can still factor with a roundoff-sized pivot
  const double pivot = llt.matrixLLT().diagonal().array().square().minCoeff();
  if (!(pivot > 1e-12 * info.diagonal().maxCoeff()))
    throw NumericalError("sensor: information matrix is singular");
  return llt;
}

}  // namespace

VectorXd to_dense(const ExtremePoint& point, Index n) {
  VectorXd x = VectorXd::Zero(n);
  std::visit(Overloaded{
                 [](const ZeroPoint&) {},
                 [&](const Subset& s) {
                   for (Index i : s.indices) x[i] = 1.0;
                 },
                 [&](const SingleIndex& s) { x[s.index] = s.magnitude; },
                 [&](const CliqueVector& c) {
                   for (std::size_t j = 0; j < c.support.size(); ++j)
                     x[c.support[j]] = c.scale * c.coeffs[static_cast<Index>(j)];
                 },
             },
             point);
  return x;
}

ExtremePoint to_extreme_point(const UpdateDirection& dir) {
  if (dir.is_zero()) return ZeroPoint{};
  CliqueVector c;
  for (Index i = 0; i < dir.w.size(); ++i) {
    if (dir.w[i] != 0.0) c.support.push_back(i);
  }
  c.coeffs.resize(static_cast<Index>(c.support.size()));
  for (std::size_t j = 0; j < c.support.size(); ++j) c.coeffs[static_cast<Index>(j)] = dir.w[c.support[j]];
  c.coeffs.normalize();
  c.scale = std::sqrt(dir.weight);
  return c;
}

// sensors

SensorProblem::SensorProblem(Index n, Index m, Index k, VectorStream sensors)
    : n_(n), m_(m), k_(k), sensors_(std::move(sensors)) {
  if (m < 1 || n < 1) throw std::invalid_argument("sensor: n and m must be >= 1");
  // k < m is allowed, but then no vertex has a nonsingular information matrix
  if (k < 1 || k > n) throw std::invalid_argument("sensor: need 1 <= k <= n");
  if (!sensors_) throw std::invalid_argument("sensor: missing sensor stream");
}

ExtremePoint SensorProblem::initial_point() const {
  Subset s;
  s.indices.resize(static_cast<std::size_t>(k_));
  for (Index i = 0; i < k_; ++i) s.indices[static_cast<std::size_t>(i)] = i;
  return s;
}

VectorXd SensorProblem::image(const ExtremePoint& point) const {
  const auto* s = std::get_if<Subset>(&point);
  if (!s) throw std::invalid_argument("sensor: extreme points are subsets");
  MatrixXd info = MatrixXd::Zero(m_, m_);
  VectorXd a(m_);
  for (Index i : s->indices) {
    sensors_(i, a);
    info.selfadjointView<Eigen::Lower>().rankUpdate(a);
  }
  info.triangularView<Eigen::StrictlyUpper>() = info.transpose();
  return info.reshaped();
}

EpLmoResult SensorProblem::lmo(const VecIn& v) const {
  const auto llt = factor_information(v, m_);
  // heap top = weakest kept entry (smallest g, then largest index)
  using Entry = std::pair<double, Index>;
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> best(worse);
  VectorXd a(m_);
  for (Index i = 0; i < n_; ++i) {
    sensors_(i, a);
    llt.matrixL().solveInPlace(a);
    const Entry e{a.squaredNorm(), i};
    if (static_cast<Index>(best.size()) < k_) {
      best.push(e);
    } else if (worse(e, best.top())) {
      best.pop();
      best.push(e);
    }
  }
  EpLmoResult out;
  Subset s;
  double total = 0.0;
  while (!best.empty()) {
    total += best.top().first;
    s.indices.push_back(best.top().second);
    best.pop();
  }
  std::sort(s.indices.begin(), s.indices.end());
  out.h = std::move(s);
  out.q = image(out.h);
  // <V^{-1}, V> = m
  out.gap = total - static_cast<double>(m_);
  return out;
}

double SensorProblem::objective(const VecIn& v) const {
  const auto llt = factor_information(v, m_);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

bool SensorProblem::is_vertex(const ExtremePoint& point) const {
  const auto* s = std::get_if<Subset>(&point);
  if (!s || static_cast<Index>(s->indices.size()) != k_) return false;
  for (std::size_t j = 0; j < s->indices.size(); ++j) {
    if (s->indices[j] < 0 || s->indices[j] >= n_) return false;
    if (j > 0 && s->indices[j] <= s->indices[j - 1]) return false;
  }
  return true;
}

VectorXd SensorProblem::gradient(const VecIn& v) const {
  const auto llt = factor_information(v, m_);
  VectorXd g(n_), a(m_);
  for (Index i = 0; i < n_; ++i) {
    sensors_(i, a);
    llt.matrixL().solveInPlace(a);
    g[i] = a.squaredNorm();
  }
  return g;
}

// compressive sensing

CsProblem::CsProblem(Index n, Index m, VectorStream columns, VectorXd y, double alpha)
    : n_(n), m_(m), columns_(std::move(columns)), y_(std::move(y)), alpha_(alpha) {
  if (n < 1 || m < 1) throw std::invalid_argument("cs: n and m must be >= 1");
  if (y_.size() != m) throw std::invalid_argument("cs: y must have length m");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("cs: alpha must be > 0");
  if (!y_.allFinite()) throw std::invalid_argument("cs: y must be finite");
  if (!columns_) throw std::invalid_argument("cs: missing column stream");
}

ExtremePoint CsProblem::initial_point() const { return ZeroPoint{}; }

VectorXd CsProblem::image(const ExtremePoint& point) const {
  VectorXd q = VectorXd::Zero(m_);
  if (std::holds_alternative<ZeroPoint>(point)) return q;
  const auto* s = std::get_if<SingleIndex>(&point);
  if (!s) throw std::invalid_argument("cs: extreme points are zero or single indices");
  columns_(s->index, q);
  q *= s->magnitude;
  return q;
}

EpLmoResult CsProblem::lmo(const VecIn& v) const {
  if (v.size() != m_) throw std::invalid_argument("cs: v must have length m");
  const VectorXd r = v - y_;
  VectorXd a(m_);
  double best = 0.0;
  Index arg = -1;
  for (Index j = 0; j < n_; ++j) {
    columns_(j, a);
    if (!a.allFinite()) throw NumericalError("cs: non-finite column");
    const double score = -a.dot(r);
    if (score > best) {
      best = score;
      arg = j;
    }
  }
  EpLmoResult out;
  if (arg < 0) {
    out.h = ZeroPoint{};
  } else {
    out.h = SingleIndex{arg, alpha_};
  }
  out.q = image(out.h);
  out.gap = r.dot(v) - r.dot(out.q);
  return out;
}

double CsProblem::objective(const VecIn& v) const { return 0.5 * (v - y_).squaredNorm(); }

bool CsProblem::is_vertex(const ExtremePoint& point) const {
  if (std::holds_alternative<ZeroPoint>(point)) return true;
  const auto* s = std::get_if<SingleIndex>(&point);
  return s && s->index >= 0 && s->index < n_ && s->magnitude == alpha_;
}

// solver

void EpConfig::validate() const {
  if (!(eps >= 0.0)) throw std::invalid_argument("ep: eps must be >= 0");
  if (chains < 1) throw std::invalid_argument("ep: need at least one chain");
  if (max_iters == 0 && !(eps > 0.0 && curvature > 0.0))
    throw std::invalid_argument("ep: give max_iters or both eps and curvature");
}

std::uint64_t EpConfig::iteration_limit() const {
  if (max_iters > 0) return max_iters;
  const double t = std::ceil(2.0 * curvature / eps) - 2.0;
  return t <= 0.0 ? 0 : static_cast<std::uint64_t>(t);
}

EpState ep_init(const EpProblem& problem, const EpConfig& config) {
  config.validate();
  EpState state;
  const ExtremePoint z0 = problem.initial_point();
  state.v = problem.image(z0);
  state.z.assign(config.chains, z0);
  state.rngs.reserve(config.chains);
  for (std::size_t c = 0; c < config.chains; ++c) state.rngs.push_back(make_stream(config.seed, Stream::kChain, c));
  return state;
}

namespace {

void switch_chains(EpState& state, const ExtremePoint& h, double gamma) {
  auto body = [&](std::size_t c) {
    std::bernoulli_distribution coin(gamma);
    if (coin(state.rngs[c])) state.z[c] = h;
  };
  const std::size_t chains = state.z.size();
  if (chains >= 1024) {
    parallel_for(chains, body);
  } else {
    for (std::size_t c = 0; c < chains; ++c) body(c);
  }
}

void advance(EpState& state, const EpLmoResult& dir) {
  const double gamma = 2.0 / (static_cast<double>(state.t) + 2.0);
  switch_chains(state, dir.h, gamma);
  state.v = (1.0 - gamma) * state.v + gamma * dir.q;
  ++state.t;
}

}  // namespace

EpLmoResult ep_step(EpState& state, const EpProblem& problem, const EpConfig&) {
  EpLmoResult dir = problem.lmo(state.v);
  state.gap = dir.gap;
  advance(state, dir);
  return dir;
}

EpResult ep_solve(const EpProblem& problem, const EpConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  EpResult result{ep_init(problem, config), {}, false};
  EpState& state = result.state;
  const std::uint64_t limit = config.iteration_limit();

  while (true) {
    EpLmoResult dir = problem.lmo(state.v);
    state.gap = dir.gap;
    TraceRecord rec;
    rec.iter = state.t;
    rec.gap = dir.gap;
    rec.obj = problem.objective(state.v);
    rec.ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (config.keep_trace) result.trace.records.push_back(rec);
    if (config.trace_sink) config.trace_sink(rec);

    if (config.eps > 0.0 && dir.gap <= config.eps) {
      result.converged = true;
      break;
    }
    if (state.t >= limit) break;
    advance(state, dir);
  }
  return result;
}

}  // namespace lowmem

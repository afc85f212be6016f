#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "lowmem/lmo.hpp"
#include "lowmem/operators.hpp"
#include "lowmem/rng.hpp"
#include "lowmem/trace_log.hpp"

namespace lowmem {

struct ZeroPoint {
  bool operator==(const ZeroPoint&) const = default;
};

/// Indicator of k distinct indices, kept sorted.
struct Subset {
  std::vector<Index> indices;
  bool operator==(const Subset&) const = default;
};

/// magnitude * e_index
struct SingleIndex {
  Index index = 0;
  double magnitude = 0.0;
  bool operator==(const SingleIndex&) const = default;
};

/// Rank-one extreme point of a chordal spectrahedron, stored as its factor
/// scale * c (zero outside `support`); c has unit norm and scale = sqrt(alpha).
struct CliqueVector {
  std::vector<Index> support;
  VectorXd coeffs;
  double scale = 0.0;
  bool operator==(const CliqueVector& o) const {
    return support == o.support && coeffs == o.coeffs && scale == o.scale;
  }
};

using ExtremePoint = std::variant<ZeroPoint, Subset, SingleIndex, CliqueVector>;

/// Dense vector of length n (the factor for CliqueVector). Tests only.
VectorXd to_dense(const ExtremePoint& point, Index n);

/// Zero for a zero direction, else a CliqueVector over the nonzeros of w.
ExtremePoint to_extreme_point(const UpdateDirection& dir);

/// Oracle output at v: the direction h, q = B(h) and the FW gap
/// <grad, h - x> (maximization) or <grad, x - h> (minimization), both >= 0.
struct EpLmoResult {
  ExtremePoint h;
  VectorXd q;
  double gap = 0.0;
};

/// Feasible set + objective g(B(x)) seen only through v = B(x).
class EpProblem {
 public:
  virtual ~EpProblem() = default;
  virtual Index n() const = 0;
  virtual Index d() const = 0;
  /// Deterministic starting vertex z_0 = x_0.
  virtual ExtremePoint initial_point() const = 0;
  virtual VectorXd image(const ExtremePoint& point) const = 0;
  virtual EpLmoResult lmo(const VecIn& v) const = 0;
  virtual double objective(const VecIn& v) const = 0;
  virtual bool is_vertex(const ExtremePoint& point) const = 0;
};

/// Regenerable vector stream: writes item i into out.
using VectorStream = std::function<void(Index i, VecOut out)>;

/// max log det(sum_i x_i a_i a_i^T)  s.t.  sum x = k, 0 <= x <= 1.
/// v is the m x m information matrix, column-major (d = m^2).
class SensorProblem final : public EpProblem {
 public:
  SensorProblem(Index n, Index m, Index k, VectorStream sensors);

  Index n() const override { return n_; }
  Index d() const override { return m_ * m_; }
  Index m() const { return m_; }
  Index k() const { return k_; }
  void sensor(Index i, VecOut out) const { sensors_(i, out); }

  ExtremePoint initial_point() const override;  // indices 0..k-1
  VectorXd image(const ExtremePoint& point) const override;
  /// Streams g_i = a_i^T V^{-1} a_i and keeps the k largest (lower index on
  /// ties). Gap = sum of kept g_i - m. Throws NumericalError if V is not
  /// positive definite.
  EpLmoResult lmo(const VecIn& v) const override;
  double objective(const VecIn& v) const override;  // log det V
  bool is_vertex(const ExtremePoint& point) const override;

  /// Gradient entries for all i. O(n) memory; tests only.
  VectorXd gradient(const VecIn& v) const;

 private:
  Index n_, m_, k_;
  VectorStream sensors_;
};

/// min 1/2 ||A x - y||^2  s.t.  ||x||_1 <= alpha, x >= 0.  v = A x (d = m).
class CsProblem final : public EpProblem {
 public:
  CsProblem(Index n, Index m, VectorStream columns, VectorXd y, double alpha);

  Index n() const override { return n_; }
  Index d() const override { return m_; }
  const VectorXd& y() const { return y_; }
  double alpha() const { return alpha_; }
  void column(Index j, VecOut out) const { columns_(j, out); }

  ExtremePoint initial_point() const override;  // Zero
  VectorXd image(const ExtremePoint& point) const override;
  /// argmax_j -(a_j^T (v - y)) as SingleIndex(j, alpha), lower j on ties;
  /// Zero when no score is positive.
  EpLmoResult lmo(const VecIn& v) const override;
  double objective(const VecIn& v) const override;
  bool is_vertex(const ExtremePoint& point) const override;

 private:
  Index n_, m_;
  VectorStream columns_;
  VectorXd y_;
  double alpha_;
};

struct EpConfig {
  double eps = 0.0;        // gap stop when > 0
  double curvature = 0.0;  // C_g^u, only used to derive the default budget
  std::uint64_t max_iters = 0;  // 0: ceil(2 C / eps) - 2
  std::size_t chains = 1;  // independent Bernoulli chains sharing v and h_t
  std::uint64_t seed = 0;
  bool keep_trace = true;
  TraceSink trace_sink;

  void validate() const;
  std::uint64_t iteration_limit() const;
};

struct EpState {
  std::uint64_t t = 0;
  std::vector<ExtremePoint> z;  // one per chain
  VectorXd v;
  double gap = 0.0;
  std::vector<Rng> rngs;
};

EpState ep_init(const EpProblem& problem, const EpConfig& config);

/// One LMO at v_t, then per chain z <- h with probability gamma_t, and
/// v <- (1 - gamma) v + gamma q. Returns the oracle output used.
EpLmoResult ep_step(EpState& state, const EpProblem& problem, const EpConfig& config);

struct EpResult {
  EpState state;
  TraceLog trace;
  bool converged = false;  // gap <= eps before the iteration limit
};

EpResult ep_solve(const EpProblem& problem, const EpConfig& config);

}  // namespace lowmem

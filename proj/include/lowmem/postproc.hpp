#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lowmem/operators.hpp"
#include "lowmem/rng.hpp"

namespace lowmem {

/// PSD matrix U diag(lambda) U^T with orthonormal U (n x r).
struct LowRankPsd {
  MatrixXd U;
  VectorXd lambda;
  bool fallback = false;  // core was not positive definite; pseudo-inverse used

  MatrixXd dense() const { return U * lambda.asDiagonal() * U.transpose(); }
};

/// Sketch Y = X_N Omega of the running second-moment matrix
/// X_N = (1/N) sum z z^T. Omega (n x k, standard normal) is regenerated from
/// the seed and never stored.
class CovSketch {
 public:
  CovSketch(Index n, Index k, std::uint64_t seed);

  Index n() const { return y_.rows(); }
  Index k() const { return y_.cols(); }
  std::uint64_t count() const { return count_; }
  const MatrixXd& sketch() const { return y_; }
  double omega(Index i, Index j) const;
  MatrixXd omega() const;

  /// Y <- N/(N+1) Y + 1/(N+1) z (z^T Omega).
  void update(const VecIn& z);

  /// Fixed-rank shifted Nystrom approximation of X_N with rank r <= k.
  LowRankPsd reconstruct(Index r) const;

 private:
  MatrixXd y_;
  std::uint64_t seed_;
  std::uint64_t count_ = 0;
};

/// Oja's streaming PCA: Q <- qr(Q + gamma_N z (z^T Q)), gamma_N = c / (N + 1).
class OjaState {
 public:
  /// clip_radius > 0 rescales samples longer than it.
  OjaState(Index n, Index k, std::uint64_t seed, double c, double clip_radius = 0.0);

  const MatrixXd& basis() const { return q_; }
  std::uint64_t count() const { return count_; }
  double next_step() const { return c_ / (static_cast<double>(count_) + 1.0); }
  /// Columns re-randomized so far after the QR lost rank.
  std::uint64_t collapses() const { return collapses_; }

  /// Returns false when a column collapsed and was replaced.
  bool update(const VecIn& z);
  /// Same with an explicit step size (count still advances).
  bool update(const VecIn& z, double gamma);

 private:
  MatrixXd q_;
  double c_;
  double clip_;
  std::uint64_t count_ = 0;
  std::uint64_t collapses_ = 0;
  Rng rng_;
};

/// Largest principal angle between the column spans of two orthonormal bases.
double principal_angle(const MatrixXd& qa, const MatrixXd& qb);

struct HeavyHitter {
  std::uint64_t item = 0;
  std::uint64_t count = 0;
  std::uint64_t overestimate = 0;
  bool operator==(const HeavyHitter&) const = default;
};

/// Space-Saving summary with m counters.
class HeavyHitterTable {
 public:
  explicit HeavyHitterTable(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return counts_.size(); }
  std::uint64_t stream_length() const { return total_; }

  /// Tracked: count + 1. Otherwise the minimum-count entry (smallest item on
  /// ties) is evicted and the newcomer gets its count + 1, overestimate = its count.
  void update(std::uint64_t item);
  /// Up to k entries by decreasing count, smaller item first on ties.
  std::vector<HeavyHitter> top(std::size_t k) const;
  /// All entries, same order.
  std::vector<HeavyHitter> entries() const { return top(size()); }

 private:
  struct Slot {
    std::uint64_t count;
    std::uint64_t overestimate;
  };
  std::size_t capacity_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::uint64_t, Slot> counts_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> order_;  // (count, item)
};

}  // namespace lowmem

#pragma once

#include <cstdint>
#include <vector>

#include "lowmem/operators.hpp"
#include "lowmem/rng.hpp"

namespace lowmem {

inline constexpr std::uint64_t kDefaultMatvecCap = 1'000'000'000ULL;

struct LmoRequest {
  const LinearOperator* op = nullptr;  // J, symmetric
  double alpha = 1.0;                  // trace bound
  double delta = 1.0;                  // additive accuracy on alpha * w^T J w
  double p = 0.1;                      // failure probability
  double lambda_bound = 0.0;           // >= max_i |lambda_i(J)|
  std::uint64_t max_iterations = kDefaultMatvecCap;

  void validate() const;
};

/// Extreme point of the trace ball chosen by the oracle: weight * w w^T with
/// weight in {0, alpha}. `q` holds the constraint-map image weight * A(w w^T)
/// once attach_image() has been called.
struct UpdateDirection {
  double weight = 0.0;
  VectorXd w;               // unit vector; empty when weight == 0
  double rayleigh = 0.0;    // w^T J w of the final iterate
  VectorXd q;
  std::uint64_t iterations = 0;  // power iterations (k)
  std::uint64_t matvecs = 0;     // k + 1: the Rayleigh quotient costs one more

  bool is_zero() const { return weight == 0.0; }
};

/// Iteration count k = ceil((lambda_bound * alpha / delta) * log(n / p^2)).
/// Throws IterationCapExceeded above `cap`.
std::uint64_t power_iterations_required(Index n, double alpha, double delta, double p,
                                        double lambda_bound, std::uint64_t cap);

/// Power method with a uniformly random unit start vector, run on the shifted
/// operator J + lambda_bound * I so that the dominant eigenvalue is the top
/// eigenvalue of J. After exactly k iterations, with probability >= 1 - p,
/// alpha * w^T J w >= alpha * lambda_max(J) - delta. Working memory: two
/// n-vectors.
UpdateDirection power_method(const LmoRequest& req, Rng& rng);

/// Fills dir.q = weight * A(w w^T) (zero when the direction is zero).
void attach_image(UpdateDirection& dir, const ConstraintMap& constraints);

/// Vertex sets of the maximal cliques of a chordal graph.
struct CliqueCover {
  std::vector<std::vector<Index>> cliques;

  void validate(Index n) const;
};

/// Linear oracle over trace-bounded PSD matrices sparse with respect to a
/// chordal graph: runs the power method on each clique's principal submatrix
/// and keeps the best Rayleigh quotient (lowest clique index on ties). The
/// returned w is zero-padded with support inside one clique.
UpdateDirection chordal_lmo(const LinearOperator& op, const CliqueCover& cover, double alpha,
                            double delta, double p, double lambda_bound, Rng& rng,
                            std::uint64_t max_iterations = kDefaultMatvecCap);

}  // namespace lowmem

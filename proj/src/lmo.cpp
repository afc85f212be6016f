#include "lowmem/lmo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lowmem/errors.hpp"

namespace lowmem {

void LmoRequest::validate() const {
  if (op == nullptr) throw std::invalid_argument("lmo: missing operator");
  if (!(alpha > 0.0)) throw std::invalid_argument("lmo: alpha must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("lmo: delta must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("lmo: p must be in (0, 1)");
  if (!(lambda_bound >= 0.0) || !std::isfinite(lambda_bound)) {
    throw std::invalid_argument("lmo: lambda_bound must be finite and >= 0");
  }
}

std::uint64_t power_iterations_required(Index n, double alpha, double delta, double p,
                                        double lambda_bound, std::uint64_t cap) {
  const double k = std::ceil(lambda_bound * alpha / delta *
                             std::log(static_cast<double>(n) / (p * p)));
  if (!std::isfinite(k) || k > static_cast<double>(cap)) {
    throw IterationCapExceeded("power method needs " + std::to_string(k) +
                               " iterations, cap is " + std::to_string(cap));
  }
  return k <= 0.0 ? 0 : static_cast<std::uint64_t>(k);
}

namespace {

struct PowerResult {
  double rayleigh;
  std::uint64_t matvecs;
};

// Runs k shifted power iterations on `x` in place, using `y` as scratch, then
// computes the Rayleigh quotient of the final unit vector.
template <typename MatVec>
PowerResult run_power_iterations(const MatVec& matvec, double shift, std::uint64_t k,
                                 VectorXd& x, VectorXd& y) {
  x.normalize();
  for (std::uint64_t it = 0; it < k; ++it) {
    matvec(x, y);
    y += shift * x;
    const double norm = y.norm();
    if (!std::isfinite(norm)) throw NumericalError("power method: non-finite matvec output");
    // A zero image means x lies in the null space of the shifted operator,
    // which then has no larger eigenvalue; keep x.
    if (norm == 0.0) continue;
    x = y / norm;
  }
  matvec(x, y);
  const double rayleigh = x.dot(y);
  if (!std::isfinite(rayleigh)) throw NumericalError("power method: non-finite Rayleigh quotient");
  return {rayleigh, k + 1};
}

void random_unit(Rng& rng, VectorXd& x) {
  // A zero draw has probability zero, but redraw rather than divide by it.
  do {
    fill_normal(rng, x);
  } while (x.squaredNorm() == 0.0);
  x.normalize();
}

}  // namespace

UpdateDirection power_method(const LmoRequest& req, Rng& rng) {
  req.validate();
  const LinearOperator& op = *req.op;
  const Index n = op.dim();
  const std::uint64_t k =
      power_iterations_required(n, req.alpha, req.delta, req.p, req.lambda_bound, req.max_iterations);

  VectorXd x(n);
  VectorXd y(n);
  random_unit(rng, x);
  auto matvec = [&op](const VectorXd& in, VectorXd& out) { op.apply(in, out); };
  const PowerResult res = run_power_iterations(matvec, req.lambda_bound, k, x, y);

  UpdateDirection dir;
  dir.rayleigh = res.rayleigh;
  dir.iterations = k;
  dir.matvecs = res.matvecs;
  if (res.rayleigh >= 0.0) {
    dir.weight = req.alpha;
    dir.w = std::move(x);
  }
  return dir;
}

void attach_image(UpdateDirection& dir, const ConstraintMap& constraints) {
  dir.q = VectorXd::Zero(constraints.d());
  if (dir.is_zero()) return;
  constraints.rank_one_image(dir.w, dir.q);
  dir.q *= dir.weight;
}

void CliqueCover::validate(Index n) const {
  if (cliques.empty()) throw std::invalid_argument("clique cover is empty");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& clique : cliques) {
    if (clique.empty()) throw std::invalid_argument("clique cover contains an empty clique");
    for (Index v : clique) {
      if (v < 0 || v >= n) throw std::invalid_argument("clique vertex out of range");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("clique cover misses a vertex");
  }
}

UpdateDirection chordal_lmo(const LinearOperator& op, const CliqueCover& cover, double alpha,
                            double delta, double p, double lambda_bound, Rng& rng,
                            std::uint64_t max_iterations) {
  const Index n = op.dim();
  cover.validate(n);
  LmoRequest check{&op, alpha, delta, p, lambda_bound, max_iterations};
  check.validate();

  UpdateDirection best;
  best.rayleigh = -std::numeric_limits<double>::infinity();
  VectorXd padded(n);
  VectorXd image(n);
  for (const auto& clique : cover.cliques) {
    const Index c = static_cast<Index>(clique.size());
    const std::uint64_t k =
        power_iterations_required(c, alpha, delta, p, lambda_bound, max_iterations);
    // Principal submatrix matvec: zero-pad, apply J, restrict.
    auto matvec = [&](const VectorXd& in, VectorXd& out) {
      padded.setZero();
      for (Index a = 0; a < c; ++a) padded[clique[a]] = in[a];
      op.apply(padded, image);
      for (Index a = 0; a < c; ++a) out[a] = image[clique[a]];
    };
    VectorXd x(c);
    VectorXd y(c);
    random_unit(rng, x);
    const PowerResult res = run_power_iterations(matvec, lambda_bound, k, x, y);
    best.iterations += k;
    best.matvecs += res.matvecs;
    if (res.rayleigh > best.rayleigh) {
      best.rayleigh = res.rayleigh;
      best.w = VectorXd::Zero(n);
      for (Index a = 0; a < c; ++a) best.w[clique[a]] = x[a];
    }
  }
  if (best.rayleigh >= 0.0) {
    best.weight = alpha;
  } else {
    best.weight = 0.0;
    best.w.resize(0);
  }
  return best;
}

}  // namespace lowmem

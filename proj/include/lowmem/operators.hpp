#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "lowmem/graph.hpp"

namespace lowmem {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using VecIn = Eigen::Ref<const VectorXd>;
using VecOut = Eigen::Ref<VectorXd>;

/// Implicit symmetric matrix, accessed through matvecs only. Immutable after
/// construction; `apply` may be called concurrently.
class LinearOperator {
 public:
  /// Writes J x into `y` (y is fully overwritten; x and y never alias).
  using MatVec = std::function<void(const VecIn& x, VecOut y)>;

  LinearOperator(Index dim, MatVec matvec, std::optional<double> trace = std::nullopt,
                 bool diagonally_dominant = false);

  Index dim() const { return dim_; }
  std::optional<double> trace() const { return trace_; }
  bool is_diagonally_dominant() const { return diagonally_dominant_; }

  void apply(const VecIn& x, VecOut y) const;
  VectorXd operator*(const VecIn& x) const;

  /// Zero operator of the given dimension (trace 0).
  static LinearOperator zero(Index dim);
  /// Dense symmetric matrix wrapped as an operator; for tests and small demos.
  static LinearOperator dense(MatrixXd matrix);

 private:
  Index dim_;
  MatVec matvec_;
  std::optional<double> trace_;
  bool diagonally_dominant_;
};

/// Linear map A: S^n -> R^d together with its adjoint and target b. Only the
/// action on rank-one inputs a(w) = A(w w^T) is exposed; that is all the
/// solvers need and it avoids ever forming an n x n matrix.
class ConstraintMap {
 public:
  /// out = A(w w^T)
  using RankOneImage = std::function<void(const VecIn& w, VecOut out)>;
  /// out += scale * A*(y) x
  using AdjointAccumulate =
      std::function<void(const VecIn& y, const VecIn& x, double scale, VecOut out)>;

  ConstraintMap(Index n, Index d, RankOneImage rank_one, AdjointAccumulate adjoint,
                VectorXd identity_image, VectorXd b, double omega);

  Index n() const { return n_; }
  Index d() const { return d_; }
  const VectorXd& b() const { return b_; }
  /// A(I), so that A((alpha/n) I) = (alpha/n) * identity_image().
  const VectorXd& identity_image() const { return identity_image_; }
  /// max_i lambda_max(A_i), the constant in the curvature bound.
  double omega() const { return omega_; }

  void rank_one_image(const VecIn& w, VecOut out) const;
  VectorXd rank_one_image(const VecIn& w) const;
  void adjoint_accumulate(const VecIn& y, const VecIn& x, double scale, VecOut out) const;
  /// A*(y) as a matvec-only operator.
  LinearOperator adjoint(VectorXd y) const;

 private:
  Index n_;
  Index d_;
  RankOneImage rank_one_;
  AdjointAccumulate adjoint_;
  VectorXd identity_image_;
  VectorXd b_;
  double omega_;
};

/// C = L_G / 4, applied by streaming over the edge list. Trace is
/// sum(deg_w) / 4 and the operator is flagged diagonally dominant.
LinearOperator laplacian_operator(std::shared_ptr<const SparseGraph> graph);

/// A(X) = diag(X), b = 1, A*(y) = diag*(y), omega = 1.
ConstraintMap diagonal_constraints(Index n);

/// J = C - beta * A*(s), never materialized. `s` is the penalty gradient.
LinearOperator penalized_gradient_operator(const LinearOperator& cost,
                                           const ConstraintMap& constraints, VectorXd s,
                                           double beta);

}  // namespace lowmem

#include "lowmem/operators.hpp"

#include <stdexcept>
#include <utility>

namespace lowmem {

LinearOperator::LinearOperator(Index dim, MatVec matvec, std::optional<double> trace,
                               bool diagonally_dominant)
    : dim_(dim),
      matvec_(std::move(matvec)),
      trace_(trace),
      diagonally_dominant_(diagonally_dominant) {
  if (dim <= 0) throw std::invalid_argument("operator dimension must be positive");
  if (!matvec_) throw std::invalid_argument("operator needs a matvec");
}

void LinearOperator::apply(const VecIn& x, VecOut y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw std::invalid_argument("operator dimension mismatch");
  }
  matvec_(x, y);
}

VectorXd LinearOperator::operator*(const VecIn& x) const {
  VectorXd y(dim_);
  apply(x, y);
  return y;
}

LinearOperator LinearOperator::zero(Index dim) {
  return LinearOperator(dim, [](const VecIn&, VecOut y) { y.setZero(); }, 0.0, true);
}

LinearOperator LinearOperator::dense(MatrixXd matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("dense operator must be square");
  const Index n = matrix.rows();
  const double trace = matrix.trace();
  bool dominant = true;
  for (Index i = 0; i < n; ++i) {
    double off = matrix.row(i).cwiseAbs().sum() - std::abs(matrix(i, i));
    if (matrix(i, i) < off) dominant = false;
  }
  auto shared = std::make_shared<const MatrixXd>(std::move(matrix));
  return LinearOperator(
      n, [shared](const VecIn& x, VecOut y) { y.noalias() = (*shared) * x; }, trace, dominant);
}

ConstraintMap::ConstraintMap(Index n, Index d, RankOneImage rank_one, AdjointAccumulate adjoint,
                             VectorXd identity_image, VectorXd b, double omega)
    : n_(n),
      d_(d),
      rank_one_(std::move(rank_one)),
      adjoint_(std::move(adjoint)),
      identity_image_(std::move(identity_image)),
      b_(std::move(b)),
      omega_(omega) {
  if (identity_image_.size() != d_ || b_.size() != d_) {
    throw std::invalid_argument("constraint map: target dimension mismatch");
  }
}

void ConstraintMap::rank_one_image(const VecIn& w, VecOut out) const {
  if (w.size() != n_ || out.size() != d_) throw std::invalid_argument("rank_one_image: dimension mismatch");
  rank_one_(w, out);
}

VectorXd ConstraintMap::rank_one_image(const VecIn& w) const {
  VectorXd out(d_);
  rank_one_image(w, out);
  return out;
}

void ConstraintMap::adjoint_accumulate(const VecIn& y, const VecIn& x, double scale,
                                       VecOut out) const {
  if (y.size() != d_ || x.size() != n_ || out.size() != n_) {
    throw std::invalid_argument("adjoint: dimension mismatch");
  }
  adjoint_(y, x, scale, out);
}

LinearOperator ConstraintMap::adjoint(VectorXd y) const {
  if (y.size() != d_) throw std::invalid_argument("adjoint: dimension mismatch");
  auto fn = adjoint_;
  return LinearOperator(n_, [fn, y = std::move(y)](const VecIn& x, VecOut out) {
    out.setZero();
    fn(y, x, 1.0, out);
  });
}

LinearOperator laplacian_operator(std::shared_ptr<const SparseGraph> graph) {
  if (!graph) throw std::invalid_argument("laplacian_operator: null graph");
  const Index n = static_cast<Index>(graph->num_vertices());
  const double trace = 2.0 * graph->total_weight() / 4.0;
  return LinearOperator(
      n,
      [graph](const VecIn& x, VecOut y) {
        y.setZero();
        for (const Edge& e : graph->edges()) {
          const auto i = static_cast<Index>(e.i);
          const auto j = static_cast<Index>(e.j);
          const double flow = 0.25 * e.w * (x[i] - x[j]);
          y[i] += flow;
          y[j] -= flow;
        }
      },
      trace, true);
}

ConstraintMap diagonal_constraints(Index n) {
  return ConstraintMap(
      n, n, [](const VecIn& w, VecOut out) { out = w.cwiseAbs2(); },
      [](const VecIn& y, const VecIn& x, double scale, VecOut out) {
        out += scale * y.cwiseProduct(x);
      },
      VectorXd::Ones(n), VectorXd::Ones(n), 1.0);
}

LinearOperator penalized_gradient_operator(const LinearOperator& cost,
                                           const ConstraintMap& constraints, VectorXd s,
                                           double beta) {
  if (cost.dim() != constraints.n() || s.size() != constraints.d()) {
    throw std::invalid_argument("penalized_gradient_operator: dimension mismatch");
  }
  return LinearOperator(cost.dim(),
                        [cost, constraints, s = std::move(s), beta](const VecIn& x, VecOut y) {
                          cost.apply(x, y);
                          constraints.adjoint_accumulate(s, x, -beta, y);
                        });
}

}  // namespace lowmem

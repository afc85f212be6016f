#include "lowmem/penalty.hpp"

#include <cmath>
#include <stdexcept>

#include "lowmem/errors.hpp"

namespace lowmem {

void PenaltyParams::validate() const {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("penalty: M must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("penalty: beta must be > 0");
}

namespace {

void check_inputs(const VecIn& v, double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("phi: M must be > 0");
  if (v.size() == 0) throw std::invalid_argument("phi: empty vector");
  if (!v.allFinite()) throw NumericalError("phi: non-finite input");
}

// Returns the shifted partition sum S = sum_i e^{M v_i - m} + e^{-M v_i - m}
// with m = M ||v||_inf. The maximizing term contributes exactly 1, so S >= 1.
double shifted_sum(const VecIn& v, double M, double shift) {
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mv = M * v[i];
    sum += std::exp(mv - shift) + std::exp(-mv - shift);
  }
  return sum;
}

}  // namespace

double phi(const VecIn& v, double M) {
  check_inputs(v, M);
  const double vmax = v.cwiseAbs().maxCoeff();
  const double sum = shifted_sum(v, M, M * vmax);
  return vmax + std::log(sum) / M;
}

VectorXd phi_grad(const VecIn& v, double M) {
  check_inputs(v, M);
  const double shift = M * v.cwiseAbs().maxCoeff();
  VectorXd s(v.size());
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mv = M * v[i];
    const double up = std::exp(mv - shift);
    const double down = std::exp(-mv - shift);
    s[i] = up - down;
    sum += up + down;
  }
  s /= sum;
  // Rounding can push the l1 norm a few ulps above 1.
  const double l1 = s.lpNorm<1>();
  if (l1 > 1.0) s /= l1;
  return s;
}

double objective(double u, const VecIn& v, const PenalizedObjective& obj) {
  if (v.size() != obj.b.size()) throw std::invalid_argument("objective: dimension mismatch");
  return u - obj.params.beta * phi(v - obj.b, obj.params.M);
}

double curvature_bound(double beta, double omega, double M, double alpha) {
  if (!(beta > 0 && omega > 0 && M > 0 && alpha > 0)) {
    throw std::invalid_argument("curvature_bound: inputs must be positive");
  }
  return beta * omega * M * alpha * alpha;
}

}  // namespace lowmem

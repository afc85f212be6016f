#pragma once

#include <Eigen/Core>

#include "lowmem/operators.hpp"

namespace lowmem {

struct PenaltyParams {
  double M;     // smoothing, > 0
  double beta;  // penalty weight, > 0

  void validate() const;
};

/// g(u, v) = u - beta * phi_M(v - b), with u = <C, X> and v = A(X).
struct PenalizedObjective {
  PenaltyParams params;
  VectorXd b;
};

/// LogSumExp smoothing of ||v||_inf:
///   phi_M(v) = (1/M) log(sum_i e^{M v_i} + sum_i e^{-M v_i}).
/// Evaluated as ||v||_inf + log(S)/M with S the max-shifted sum, so the
/// bounds ||v||_inf <= phi <= ||v||_inf + log(2d)/M hold in floating point.
double phi(const VecIn& v, double M);

/// Gradient of phi_M: s_i = (e^{M v_i} - e^{-M v_i}) / Z. Satisfies ||s||_1 <= 1.
VectorXd phi_grad(const VecIn& v, double M);

double objective(double u, const VecIn& v, const PenalizedObjective& obj);

/// Upper bound beta * omega * M * alpha^2 on the curvature constant of g over
/// the trace ball of radius alpha.
double curvature_bound(double beta, double omega, double M, double alpha);

}  // namespace lowmem

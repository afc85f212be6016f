#include "lowmem/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "lowmem/errors.hpp"

namespace lowmem {

// covariance sketch

CovSketch::CovSketch(Index n, Index k, std::uint64_t seed) : y_(MatrixXd::Zero(n, k)), seed_(seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("sketch: n and k must be >= 1");
  if (k > n) throw std::invalid_argument("sketch: k must be <= n");
}

double CovSketch::omega(Index i, Index j) const {
  return counter_normal(seed_, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
}

MatrixXd CovSketch::omega() const {
  MatrixXd om(n(), k());
  for (Index j = 0; j < k(); ++j)
    for (Index i = 0; i < n(); ++i) om(i, j) = omega(i, j);
  return om;
}

void CovSketch::update(const VecIn& z) {
  if (z.size() != n()) throw std::invalid_argument("sketch: dimension mismatch");
  VectorXd proj = VectorXd::Zero(k());
  for (Index j = 0; j < k(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < n(); ++i) s += z[i] * omega(i, j);
    proj[j] = s;
  }
  const double N = static_cast<double>(count_);
  y_ *= N / (N + 1.0);
  y_.noalias() += (1.0 / (N + 1.0)) * z * proj.transpose();
  ++count_;
}

LowRankPsd CovSketch::reconstruct(Index r) const {
  if (r < 1 || r > k()) throw std::invalid_argument("sketch: need 1 <= r <= k");
  const MatrixXd om = omega();
  const double nu = std::numeric_limits<double>::epsilon() * std::max(y_.norm(), std::numeric_limits<double>::min());
  const MatrixXd y_nu = y_ + nu * om;
  MatrixXd core = om.transpose() * y_nu;
  core = 0.5 * (core + core.transpose());

  LowRankPsd out;
  MatrixXd f;
  Eigen::LLT<MatrixXd> llt(core);
  if (llt.info() == Eigen::Success) {
    // F = Y_nu C^{-1} with core = C^T C, C upper triangular
    f = llt.matrixU().transpose().solve(y_nu.transpose()).transpose();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(core);
    const VectorXd& ev = eig.eigenvalues();
    const double tol = ev.cwiseAbs().maxCoeff() * static_cast<double>(k()) * std::numeric_limits<double>::epsilon();
    VectorXd inv_sqrt = VectorXd::Zero(k());
    for (Index j = 0; j < k(); ++j) {
      if (ev[j] > tol) inv_sqrt[j] = 1.0 / std::sqrt(ev[j]);
    }
    f = y_nu * eig.eigenvectors() * inv_sqrt.asDiagonal();
    out.fallback = true;
  }
  Eigen::JacobiSVD<MatrixXd> svd(f, Eigen::ComputeThinU);
  out.U = svd.matrixU().leftCols(r);
  out.lambda = (svd.singularValues().head(r).array().square() - nu).max(0.0);
  if (!out.U.allFinite() || !out.lambda.allFinite()) throw NumericalError("sketch: reconstruction is not finite");
  return out;
}

// Oja

namespace {

// Orthonormalizes q in place. Columns whose R diagonal vanished are replaced
// by random directions orthogonal to the rest; returns how many.
std::uint64_t orthonormalize(MatrixXd& q, Rng& rng) {
  const Index n = q.rows(), k = q.cols();
  Eigen::HouseholderQR<MatrixXd> qr(q);
  const auto& r = qr.matrixQR();
  const double scale = std::max(r.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  MatrixXd thin = qr.householderQ() * MatrixXd::Identity(n, k);
  std::uint64_t lost = 0;
  for (Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) > 1e-10 * scale) {
      // keep the sign of the original column
      if (r(j, j) < 0) thin.col(j) = -thin.col(j);
      continue;
    }
    ++lost;
    VectorXd x(n);
    fill_normal(rng, x);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < k; ++i) {
        if (i != j) x -= thin.col(i).dot(x) * thin.col(i);
      }
    }
    thin.col(j) = x.normalized();
  }
  q = std::move(thin);
  return lost;
}

}  // namespace

OjaState::OjaState(Index n, Index k, std::uint64_t seed, double c, double clip_radius)
    : q_(n, k), c_(c), clip_(clip_radius), rng_(make_stream(seed, Stream::kOja)) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("oja: need 1 <= k <= n");
  if (!(c > 0.0)) throw std::invalid_argument("oja: step constant must be > 0");
  if (!(clip_radius >= 0.0)) throw std::invalid_argument("oja: clip radius must be >= 0");
  for (Index j = 0; j < k; ++j) fill_normal(rng_, q_.col(j));
  orthonormalize(q_, rng_);
}

bool OjaState::update(const VecIn& z) { return update(z, next_step()); }

bool OjaState::update(const VecIn& z, double gamma) {
  if (z.size() != q_.rows()) throw std::invalid_argument("oja: dimension mismatch");
  if (!z.allFinite() || !std::isfinite(gamma)) throw NumericalError("oja: non-finite input");
  VectorXd x = z;
  if (clip_ > 0.0) {
    const double len = x.norm();
    if (len > clip_) x *= clip_ / len;
  }
  const Eigen::RowVectorXd proj = x.transpose() * q_;
  q_.noalias() += gamma * x * proj;
  const std::uint64_t lost = orthonormalize(q_, rng_);
  collapses_ += lost;
  ++count_;
  return lost == 0;
}

double principal_angle(const MatrixXd& qa, const MatrixXd& qb) {
  if (qa.rows() != qb.rows()) throw std::invalid_argument("principal_angle: dimension mismatch");
  // largest angle of the smaller subspace against the larger one
  const MatrixXd& small = qa.cols() <= qb.cols() ? qa : qb;
  const MatrixXd& big = qa.cols() <= qb.cols() ? qb : qa;
  Eigen::JacobiSVD<MatrixXd> svd(big.transpose() * small);
  const double c = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  // acos loses precision near 1; use the residual instead
  const MatrixXd resid = small - big * (big.transpose() * small);
  Eigen::JacobiSVD<MatrixXd> rsvd(resid);
  const double s = std::clamp(rsvd.singularValues().maxCoeff(), 0.0, 1.0);
  return std::atan2(s, c);
}

// Space-Saving

HeavyHitterTable::HeavyHitterTable(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("heavy hitters: capacity must be >= 1");
  counts_.reserve(capacity);
}

void HeavyHitterTable::update(std::uint64_t item) {
  ++total_;
  if (auto it = counts_.find(item); it != counts_.end()) {
    order_.erase({it->second.count, item});
    ++it->second.count;
    order_.insert({it->second.count, item});
    return;
  }
  if (counts_.size() < capacity_) {
    counts_.emplace(item, Slot{1, 0});
    order_.insert({1, item});
    return;
  }
  const auto [min_count, victim] = *order_.begin();
  order_.erase(order_.begin());
  counts_.erase(victim);
  counts_.emplace(item, Slot{min_count + 1, min_count});
  order_.insert({min_count + 1, item});
}

std::vector<HeavyHitter> HeavyHitterTable::top(std::size_t k) const {
  std::vector<HeavyHitter> out;
  out.reserve(std::min(k, counts_.size()));
  for (const auto& [item, slot] : counts_) out.push_back({item, slot.count, slot.overestimate});
  std::sort(out.begin(), out.end(), [](const HeavyHitter& a, const HeavyHitter& b) {
    return a.count != b.count ? a.count > b.count : a.item < b.item;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace lowmem

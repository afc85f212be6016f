// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lowmem/extreme_point.hpp"
#include "lowmem/fixtures.hpp"
#include "lowmem/fw_gaussian.hpp"
#include "lowmem/lmo.hpp"
#include "lowmem/maxcut.hpp"
#include "lowmem/penalty.hpp"
#include "lowmem/postproc.hpp"
#include "support/alloc_audit.hpp"
#include "support/oracles.hpp"

using namespace lowmem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SolveConfig maxcut_config(const MaxCutParams& params, std::uint64_t seed) {
  SolveConfig c;
  c.eps = params.stop_threshold;
  c.p = params.p;
  c.curvature = params.curvature;
  c.lambda_bound = params.lambda_bound;
  c.seed = seed;
  return c;
}

VectorXd flat(const MatrixXd& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

Outcome penalty_sandwich() {
  Rng rng(2024);
  std::uniform_real_distribution<double> logm(-3.0, 4.0);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Index d = 1 + static_cast<Index>(rng() % 100);
    VectorXd v(d);
    fill_normal(rng, v);
    v *= std::pow(10.0, logm(rng) - 1.0);
    const double M = std::pow(10.0, logm(rng));
    const double p = phi(v, M);
    const double inf = v.cwiseAbs().maxCoeff();
    if (!(inf <= p && p <= std::log(2.0 * static_cast<double>(d)) / M + inf)) ++violations;
  }
  return {violations == 0, fmt("%d violations in 10000 trials", violations)};
}

Outcome dual_track() {
  double worst_ratio = 0.0;
  for (unsigned inst = 0; inst < 20; ++inst) {
    const std::size_t n = 8 + 24 * inst / 19;  // 8 .. 32
    auto g = std::make_shared<const SparseGraph>(random_graph(n, 4, 100 + inst));
    const auto mc = make_instance(g);
    const auto params = choose_params(mc, 0.2);
    const auto problem = make_penalized_problem(mc, params);
    auto cfg = maxcut_config(params, inst);
    auto st = init(problem, cfg);
    oracle::DenseShadow shadow(static_cast<Index>(n), problem.alpha);
    for (int t = 1; t <= 1000; ++t) {
      const auto prop = step(st, problem, cfg);
      if (!prop.hold) shadow.step(prop.gamma, prop.dir.weight, prop.dir.is_zero() ? VectorXd() : prop.dir.w);
      const double err = (st.v - shadow.X.diagonal()).cwiseAbs().maxCoeff();
      worst_ratio = std::max(worst_ratio, err / (1e-9 * t));
    }
  }
  return {worst_ratio <= 1.0, fmt("max |v_t - diag X_t| / (1e-9 t) = %.3g over 20 instances, t <= 1000", worst_ratio)};
}

Outcome sample_law() {
  auto g = std::make_shared<const SparseGraph>(random_graph(8, 3, 7));
  const auto mc = make_instance(g);
  const auto params = choose_params(mc, 0.2);
  const auto problem = make_penalized_problem(mc, params);
  auto cfg = maxcut_config(params, 7);
  const double S = 10000;
  cfg.samples = static_cast<Index>(S);
  auto st = init(problem, cfg);
  oracle::DenseShadow shadow(8, problem.alpha);
  for (int t = 0; t < 200; ++t) {
    const auto prop = step(st, problem, cfg);
    if (!prop.hold) shadow.step(prop.gamma, prop.dir.weight, prop.dir.is_zero() ? VectorXd() : prop.dir.w);
  }
  const MatrixXd emp = st.z * st.z.transpose() / S;
  const double dev = (emp - shadow.X).cwiseAbs().maxCoeff();
  return {dev <= 5 / std::sqrt(S), fmt("max entry deviation %.4f, bound %.4f", dev, 5 / std::sqrt(S))};
}

Outcome power_method_guarantee() {
  const double p = 0.1, trials = 1000;
  const double limit = p + 3 * std::sqrt(p * (1 - p) / trials);
  bool ok = true;
  std::ostringstream detail;
  for (Index n : {4, 8, 16}) {
    Rng gen(31 + static_cast<std::uint64_t>(n));
    int fails = 0;
    for (int trial = 0; trial < static_cast<int>(trials); ++trial) {
      MatrixXd a(n, n);
      for (Index j = 0; j < n; ++j) fill_normal(gen, a.col(j));
      const MatrixXd J = 0.5 * (a + a.transpose());
      const double alpha = 1.0 + static_cast<double>(trial % 5);
      const double delta = 0.01 * alpha;
      const auto eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(J, Eigen::EigenvaluesOnly).eigenvalues();
      const double bound = eig.cwiseAbs().maxCoeff();
      const auto op = LinearOperator::dense(J);
      Rng rng = make_stream(77, Stream::kLmo, static_cast<std::uint64_t>(trial) + 10000 * static_cast<std::uint64_t>(n));
      const auto dir = power_method(LmoRequest{&op, alpha, delta, p, bound}, rng);
      if (alpha * dir.rayleigh < alpha * eig.maxCoeff() - delta) ++fails;
    }
    const double rate = fails / trials;
    ok = ok && rate <= limit;
    detail << "n=" << n << " rate=" << rate << " ";
  }
  detail << "limit=" << limit;
  return {ok, detail.str()};
}

Outcome maxcut_feasibility() {
  int good = 0;
  std::ostringstream detail;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto mc = make_instance(std::make_shared<const SparseGraph>(random_graph(16, 4, seed)));
    PipelineOptions opts;
    opts.eps = 0.2;
    opts.seed = seed;
    opts.keep_trace = false;
    const auto res = run_pipeline(mc, opts);
    const double infeas = (res.solve.state.v - VectorXd::Ones(16)).cwiseAbs().maxCoeff();
    if (res.converged() && infeas <= 0.2) ++good;
    detail << infeas << (res.converged() ? "" : "(cap)") << " ";
  }
  return {good >= 9, fmt("%d/10 seeds converged with ||v - 1|| <= 0.2; ", good) + detail.str()};
}

Outcome gw_guarantee() {
  const double eps = 0.2, S = 10000;
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t n : {10, 12, 14}) {
    auto g = std::make_shared<const SparseGraph>(random_graph(n, 4, 40 + n));
    PipelineOptions opts;
    opts.eps = eps;
    opts.samples = static_cast<Index>(S);
    opts.seed = n;
    opts.keep_trace = false;
    const auto res = run_pipeline(make_instance(g), opts);
    const double opt = oracle::dense_brute_force(oracle::dense_cost(*g));
    double sum = 0.0, sum2 = 0.0;
    int above = 0;
    for (const auto& cut : res.cuts) {
      sum += cut.value;
      sum2 += cut.value * cut.value;
      if (cut.value > opt + 1e-9) ++above;
    }
    const double mean = sum / S;
    const double sigma = std::sqrt(std::max(0.0, sum2 / S - mean * mean) / S);
    const double floor = oracle::kGoemansWilliamson * (1 - 3 * eps) * opt - 3 * sigma;
    ok = ok && mean >= floor && above == 0 && res.cuts.size() == S;
    detail << "n=" << n << " opt=" << opt << " mean=" << mean << " floor=" << floor << " above_opt=" << above << "; ";
  }
  return {ok, detail.str()};
}

Outcome infeasibility_trace() {
  auto g = std::make_shared<const SparseGraph>(random_graph(200, 10, 1));
  const auto mc = make_instance(g);
  PipelineOptions opts;
  opts.eps = 0.1;
  opts.seed = 1;
  opts.max_iters = 20000;
  const auto res = run_pipeline(mc, opts);
  const auto& rec = res.solve.trace.records;
  if (rec.size() < 20) return {false, "trace too short"};
  // log-log fit of infeasibility against t over the last 90 percent
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (std::size_t i = rec.size() / 10; i < rec.size(); ++i) {
    const double x = std::log(static_cast<double>(rec[i].iter) + 1.0);
    const double y = std::log(std::max(rec[i].infeas_inf, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  std::ostringstream deciles;
  for (int d = 0; d < 10; ++d) {
    const std::size_t a = rec.size() * d / 10, b = rec.size() * (d + 1) / 10;
    double m = 0;
    for (std::size_t i = a; i < b; ++i) m += rec[i].infeas_inf;
    deciles << (d ? "," : "") << fmt("%.3g", m / static_cast<double>(b - a));
  }
  const double final_infeas = (res.solve.state.v - VectorXd::Ones(200)).cwiseAbs().maxCoeff();
  const bool ok = slope < 0 && final_infeas <= 0.1;
  return {ok, fmt("iters=%llu final=%.4f slope=%.3f soft(final <= 0.01): %s; decile means ",
                  static_cast<unsigned long long>(res.solve.state.t), final_infeas, slope,
                  final_infeas <= 0.01 ? "yes" : "no") +
                  deciles.str()};
}

Outcome extreme_point_expectation() {
  auto A = std::make_shared<MatrixXd>(3, 12);
  Rng rng(11);
  for (Index j = 0; j < 12; ++j) fill_normal(rng, A->col(j));
  const SensorProblem prob(12, 3, 3, matrix_stream(A));
  EpConfig cfg;
  cfg.max_iters = 200;
  cfg.chains = 10000;
  cfg.seed = 3;
  auto st = ep_init(prob, cfg);
  VectorXd x = to_dense(prob.initial_point(), 12);
  for (int t = 0; t < 200; ++t) {
    const double gamma = 2.0 / (t + 2.0);
    const auto out = ep_step(st, prob, cfg);
    x = (1 - gamma) * x + gamma * to_dense(out.h, 12);
  }
  VectorXd mean = VectorXd::Zero(12);
  for (const auto& z : st.z) mean += to_dense(z, 12);
  mean /= 10000.0;
  double worst = 0.0;  // deviation in units of the allowed 4 sigma / 100
  for (Index i = 0; i < 12; ++i) {
    const double allowed = std::max(4 * std::sqrt(x[i] * (1 - x[i])) / 100.0, 1e-12);
    worst = std::max(worst, std::abs(mean[i] - x[i]) / allowed);
  }
  const double track = (st.v - flat(*A * x.asDiagonal() * A->transpose())).cwiseAbs().maxCoeff();
  return {worst <= 1.0, fmt("max |mean z_T - x_T| / (4 sigma / 100) = %.3f, |v - B(x)| = %.2g", worst, track)};
}

Outcome post_processing() {
  std::ostringstream detail;
  bool ok = true;

  // (a)
  double sketch_err = 0.0;
  {
    CovSketch s(8, 3, 2);
    Rng rng(3);
    MatrixXd X = MatrixXd::Zero(8, 8);
    for (int N = 1; N <= 100; ++N) {
      VectorXd z(8);
      fill_normal(rng, z);
      s.update(z);
      X += (z * z.transpose() - X) / N;
      sketch_err = std::max(sketch_err, (s.sketch() - X * s.omega()).cwiseAbs().maxCoeff());
    }
  }
  ok = ok && sketch_err <= 1e-9;
  detail << "(a) " << sketch_err;

  // (b)
  double rel = 0.0;
  {
    CovSketch s(12, 4, 9);
    Rng rng(1);
    VectorXd u(12);
    fill_normal(rng, u);
    MatrixXd X = MatrixXd::Zero(12, 12);
    std::normal_distribution<double> normal;
    for (int N = 1; N <= 50; ++N) {
      const VectorXd z = normal(rng) * u;
      s.update(z);
      X += (z * z.transpose() - X) / N;
    }
    rel = (s.reconstruct(1).dense() - X).norm() / X.norm();
  }
  ok = ok && rel <= 1e-8;
  detail << " (b) " << rel;

  // (c)
  int violations = 0;
  {
    const std::size_t universe = 10000, m = 200;
    const std::uint64_t N = 100000;
    std::vector<double> weights(universe);
    for (std::size_t i = 0; i < universe; ++i) weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), 1.1);
    std::discrete_distribution<std::uint64_t> zipf(weights.begin(), weights.end());
    Rng rng(17);
    std::map<std::uint64_t, std::uint64_t> exact;
    HeavyHitterTable t(m);
    for (std::uint64_t s = 0; s < N; ++s) {
      const auto x = zipf(rng);
      ++exact[x];
      t.update(x);
    }
    for (const auto& e : t.entries()) {
      const std::uint64_t truth = exact.count(e.item) ? exact[e.item] : 0;
      if (e.count < truth || e.count - e.overestimate > truth || e.count > truth + N / m) ++violations;
    }
  }
  ok = ok && violations == 0;
  detail << " (c) " << violations << " violations";

  // (d)
  int good = 0;
  {
    const Index n = 20;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed + 900);
      MatrixXd a(n, 1);
      fill_normal(rng, a.col(0));
      const VectorXd u = a.col(0).normalized();
      OjaState oja(n, 1, seed, 1.0);
      VectorXd z(n);
      std::normal_distribution<double> normal;
      for (int N = 0; N < 10000; ++N) {
        fill_normal(rng, z);
        z += 3.0 * normal(rng) * u;  // covariance I + 9 u u^T
        oja.update(z);
      }
      good += principal_angle(oja.basis(), MatrixXd(u)) <= 0.1;
    }
  }
  ok = ok && good >= 45;
  detail << " (d) " << good << "/50";
  return {ok, detail.str()};
}

Outcome memory_audit() {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::ostringstream detail;
  for (std::size_t n : {100, 200, 400, 800}) {
    auto g = std::make_shared<const SparseGraph>(random_graph(n, 10, 1));
    const auto mc = make_instance(g);
    const auto params = choose_params(mc, 0.1);
    const auto problem = make_penalized_problem(mc, params);
    auto cfg = maxcut_config(params, 1);
    cfg.max_iters = 40;
    cfg.samples = 1;
    cfg.keep_trace = false;
    const long long peak = audit::peak_above_baseline([&] { solve(problem, cfg); });
    const double x = std::log(static_cast<double>(n)), y = std::log(static_cast<double>(peak));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    detail << "n=" << n << ":" << peak << "B ";
  }
  const double exponent = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  detail << fmt("exponent %.3f", exponent);
  return {exponent <= 1.1, detail.str()};
}

}  // namespace

int main() {
  run(1, "penalty sandwich", 1, penalty_sandwich);
  run(2, "dual-track exactness", 30, dual_track);
  run(3, "sample law", 10, sample_law);
  run(4, "power method guarantee", 30, power_method_guarantee);
  run(5, "maxcut feasibility", 120, maxcut_feasibility);
  run(6, "GW guarantee", 120, gw_guarantee);
  run(7, "infeasibility trace", 600, infeasibility_trace);
  run(8, "extreme-point expectation", 60, extreme_point_expectation);
  run(9, "post-processing", 60, post_processing);
  run(10, "memory audit", 600, memory_audit);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

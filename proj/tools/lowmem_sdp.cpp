// lowmem-sdp: maxcut | sensors | csrecover | postproc

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lowmem/errors.hpp"
#include "lowmem/extreme_point.hpp"
#include "lowmem/fixtures.hpp"
#include "lowmem/maxcut.hpp"
#include "lowmem/postproc.hpp"

using namespace lowmem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kBadConfig = 2;
constexpr int kNotConverged = 3;

struct RunConfig {
  std::string input;
  double eps = 0.1;
  std::uint64_t seed = 0;
  long long samples = 0;  // 0: per-command default
  std::uint64_t max_iters = 0;
  std::string trace_out;
  std::string json_out;
  std::string format;
  bool eps_given = false;
};

// Thrown for bad flag values found after parsing.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "instance or sample-stream file")->required();
  sub->add_option("--eps", cfg.eps, "accuracy");
  sub->add_option("--seed", cfg.seed, "master seed")->required();
  sub->add_option("--samples", cfg.samples, "sample columns / chains")->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", cfg.max_iters, "iteration cap");
  sub->add_option("--trace-out", cfg.trace_out, "per-iteration CSV");
  sub->add_option("--json-out", cfg.json_out, "result JSON");
  sub->add_option("--format", cfg.format, "graph format")->check(CLI::IsMember({"mm", "edgelist"}));
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void write_json(const RunConfig& cfg, const Json& j) {
  if (cfg.json_out.empty()) return;
  std::ofstream out(cfg.json_out);
  if (!out) throw std::ios_base::failure("cannot write '" + cfg.json_out + "'");
  out << j.dump(2) << "\n";
}

std::unique_ptr<std::ofstream> open_trace(const RunConfig& cfg) {
  if (cfg.trace_out.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(cfg.trace_out);
  if (!*out) throw std::ios_base::failure("cannot write '" + cfg.trace_out + "'");
  *out << "iter,gap,infeas_inf,obj,ms\n";
  return out;
}

TraceSink csv_sink(std::ofstream* out) {
  if (!out) return nullptr;
  return [out](const TraceRecord& r) {
    TraceLog one;
    one.records.push_back(r);
    std::ostringstream row;
    one.write_csv(row);
    const std::string text = row.str();
    *out << text.substr(text.find('\n') + 1);  // drop the header
  };
}

int cmd_maxcut(const RunConfig& cfg) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0 / 3.0)) throw ConfigError("--eps must lie in (0, 1/3) for maxcut");
  GraphFormat fmt = GraphFormat::kEdgeList;
  if (cfg.format == "mm" || (cfg.format.empty() && cfg.input.ends_with(".mtx"))) fmt = GraphFormat::kMatrixMarket;
  auto graph = std::make_shared<const SparseGraph>(load_graph_file(cfg.input, fmt));
  const MaxCutInstance inst = make_instance(graph);

  auto trace = open_trace(cfg);
  PipelineOptions opt;
  opt.eps = cfg.eps;
  opt.samples = cfg.samples > 0 ? cfg.samples : 1;
  opt.seed = cfg.seed;
  opt.max_iters = cfg.max_iters;
  opt.keep_trace = false;
  opt.trace_sink = csv_sink(trace.get());
  const PipelineResult res = run_pipeline(inst, opt);
  const SamplerState& st = res.solve.state;
  const double infeas = (st.v - inst.constraints.b()).cwiseAbs().maxCoeff();

  Json j;
  j["schema"] = 1;
  j["n"] = inst.n();
  j["m"] = graph->num_edges();
  j["eps"] = cfg.eps;
  j["seed"] = cfg.seed;
  j["beta"] = res.params.beta;
  j["M"] = res.params.M;
  j["iters"] = st.t;
  j["gap"] = st.gap;
  j["infeas_inf"] = infeas;
  j["best_cut"] = res.best_cut().value;
  j["mean_cut"] = res.mean_cut;
  j["samples"] = opt.samples;
  j["converged"] = res.converged();
  write_json(cfg, j);

  std::cout << "n=" << inst.n() << " best_cut=" << num(res.best_cut().value) << " mean_cut=" << num(res.mean_cut)
            << " infeas=" << num(infeas) << " iters=" << st.t << "\n";
  if (!res.converged()) {
    std::cerr << "maxcut: stopped at max_iters without reaching the gap threshold\n";
    return kNotConverged;
  }
  return kOk;
}

EpConfig ep_config(const RunConfig& cfg, double curvature, std::size_t default_chains) {
  if (cfg.eps_given && !(cfg.eps > 0.0)) throw ConfigError("--eps must be > 0");
  EpConfig c;
  c.eps = cfg.eps_given ? cfg.eps : 0.0;
  c.curvature = curvature;
  c.max_iters = cfg.max_iters;
  c.chains = cfg.samples > 0 ? static_cast<std::size_t>(cfg.samples) : default_chains;
  c.seed = cfg.seed;
  c.keep_trace = false;
  if (c.max_iters == 0 && !(c.eps > 0.0 && curvature > 0.0))
    throw ConfigError("need --max-iters, or --eps with a fixture curvature");
  return c;
}

int cmd_sensors(const RunConfig& cfg) {
  const SensorFixture fx = load_sensor_fixture_file(cfg.input);
  const SensorProblem& prob = *fx.problem;
  EpConfig c = ep_config(cfg, fx.curvature, 1);
  auto trace = open_trace(cfg);
  c.trace_sink = csv_sink(trace.get());
  const EpResult res = ep_solve(prob, c);

  const auto& chosen = std::get<Subset>(res.state.z.front()).indices;
  const double logdet = prob.objective(prob.image(res.state.z.front()));
  const double relaxed = prob.objective(res.state.v);

  Json j;
  j["schema"] = 1;
  j["n"] = prob.n();
  j["m"] = prob.m();
  j["k"] = prob.k();
  j["eps"] = c.eps;
  j["seed"] = cfg.seed;
  j["iters"] = res.state.t;
  j["gap"] = res.state.gap;
  std::vector<Index> one_based(chosen);
  for (auto& i : one_based) ++i;
  j["subset"] = one_based;
  j["logdet"] = logdet;
  j["relaxed_logdet"] = relaxed;
  j["samples"] = c.chains;
  j["converged"] = res.converged;
  write_json(cfg, j);

  std::cout << "subset=";
  for (std::size_t i = 0; i < chosen.size(); ++i) std::cout << (i ? "," : "") << chosen[i] + 1;
  std::cout << " logdet=" << num(logdet) << " relaxed_logdet=" << num(relaxed) << " iters=" << res.state.t << "\n";
  if (c.eps > 0.0 && !res.converged) return kNotConverged;
  return kOk;
}

int cmd_csrecover(const RunConfig& cfg) {
  const CsFixture fx = load_cs_fixture_file(cfg.input);
  const CsProblem& prob = *fx.problem;
  EpConfig c = ep_config(cfg, fx.curvature, 1000);
  auto trace = open_trace(cfg);
  c.trace_sink = csv_sink(trace.get());
  const EpResult res = ep_solve(prob, c);

  HeavyHitterTable table(32);
  std::uint64_t zeros = 0;
  for (const auto& z : res.state.z) {
    if (const auto* s = std::get_if<SingleIndex>(&z)) {
      table.update(static_cast<std::uint64_t>(s->index));
    } else {
      ++zeros;
    }
  }
  Json hits = Json::array();
  for (const auto& h : table.entries())
    hits.push_back({{"index", h.item + 1}, {"count", h.count}, {"overestimate", h.overestimate}});

  Json j;
  j["schema"] = 1;
  j["n"] = prob.n();
  j["m"] = prob.d();
  j["eps"] = c.eps;
  j["seed"] = cfg.seed;
  j["iters"] = res.state.t;
  j["gap"] = res.state.gap;
  j["objective"] = prob.objective(res.state.v);
  j["samples"] = c.chains;
  j["zero_draws"] = zeros;
  j["heavy_hitters"] = hits;
  j["converged"] = res.converged;
  write_json(cfg, j);

  std::cout << "top=";
  const auto best = table.top(8);
  for (std::size_t i = 0; i < best.size(); ++i) std::cout << (i ? "," : "") << best[i].item + 1 << ":" << best[i].count;
  std::cout << " objective=" << num(prob.objective(res.state.v)) << " iters=" << res.state.t << "\n";
  if (c.eps > 0.0 && !res.converged) return kNotConverged;
  return kOk;
}

// Sample stream: optional `rank <r>` / `sketch <k>` lines, then one sample
// per line. '#' starts a comment.
struct SampleStream {
  Index rank = 1;
  Index sketch = 0;
  std::vector<VectorXd> rows;
};

SampleStream read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  SampleStream s;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "rank" || first == "sketch") {
      long long v = 0;
      if (!(fields >> v) || v < 1 || !s.rows.empty()) throw ParseError(no, "bad '" + first + "' directive");
      (first == "rank" ? s.rank : s.sketch) = static_cast<Index>(v);
      continue;
    }
    std::vector<double> vals;
    fields.clear();
    fields.str(line);
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(x)) throw ParseError(no, "bad sample entry '" + tok + "'");
      vals.push_back(x);
    }
    if (!s.rows.empty() && static_cast<Index>(vals.size()) != s.rows.front().size())
      throw ParseError(no, "sample length differs from the first sample");
    s.rows.push_back(Eigen::Map<const VectorXd>(vals.data(), static_cast<Index>(vals.size())));
  }
  if (s.rows.empty()) throw ParseError(0, "no samples in '" + path + "'");
  return s;
}

int cmd_postproc(const RunConfig& cfg) {
  const SampleStream stream = read_samples(cfg.input);
  const Index n = stream.rows.front().size();
  const Index r = stream.rank;
  const Index k = stream.sketch > 0 ? stream.sketch : std::min(n, 2 * r + 2);
  if (r > k || k > n) throw ConfigError("need rank <= sketch <= n");

  CovSketch sketch(n, k, cfg.seed);
  OjaState oja(n, r, cfg.seed, 1.0);
  MatrixXd exact = MatrixXd::Zero(n, n);  // diagnostic only
  for (const auto& z : stream.rows) {
    sketch.update(z);
    oja.update(z);
    exact.noalias() += z * z.transpose();
  }
  exact /= static_cast<double>(stream.rows.size());
  const LowRankPsd rec = sketch.reconstruct(r);
  const double scale = std::max(exact.norm(), std::numeric_limits<double>::min());
  const double rel_err = (exact - rec.dense()).norm() / scale;
  const double angle = principal_angle(oja.basis(), rec.U);

  Json j;
  j["schema"] = 1;
  j["n"] = n;
  j["seed"] = cfg.seed;
  j["samples"] = stream.rows.size();
  j["rank"] = r;
  j["sketch"] = k;
  j["eigenvalues"] = std::vector<double>(rec.lambda.data(), rec.lambda.data() + rec.lambda.size());
  j["reconstruction_rel_error"] = rel_err;
  j["fallback"] = rec.fallback;
  j["oja_angle"] = angle;
  j["oja_collapses"] = oja.collapses();
  write_json(cfg, j);

  std::cout << "n=" << n << " samples=" << stream.rows.size() << " rank=" << r << " rel_error=" << num(rel_err)
            << " oja_angle=" << num(angle) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-memory Frank-Wolfe SDP toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  CLI::App* maxcut = app.add_subcommand("maxcut", "MaxCut via Gaussian-sampled FW + rounding");
  CLI::App* sensors = app.add_subcommand("sensors", "sensor selection by extreme-point sampling");
  CLI::App* cs = app.add_subcommand("csrecover", "nonnegative sparse recovery + heavy hitters");
  CLI::App* post = app.add_subcommand("postproc", "sketch and streaming PCA of a sample stream");
  for (CLI::App* sub : {maxcut, sensors, cs, post}) add_common(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  try {
    for (CLI::App* sub : {maxcut, sensors, cs, post}) {
      if (sub->parsed()) cfg.eps_given = sub->get_option("--eps")->count() > 0;
    }
    if (maxcut->parsed()) return cmd_maxcut(cfg);
    if (sensors->parsed()) return cmd_sensors(cfg);
    if (cs->parsed()) return cmd_csrecover(cfg);
    return cmd_postproc(cfg);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << cfg.input << ": " << e.what() << "\n";
    return kIoError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
}

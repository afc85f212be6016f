#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include <Eigen/Dense>

#include "lowmem/fixtures.hpp"

using namespace lowmem;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("lowmem_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string(LOWMEM_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

nlohmann::json json_of(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Drops the last (wall-clock) column of each CSV row.
std::string without_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

const char* kK3 = "1 2\n2 3\n1 3\n";

}  // namespace

TEST_CASE("maxcut on K3") {
  const auto g = write_file("k3.txt", kK3);
  const auto js = scratch() / "k3.json";
  const auto r = run("maxcut --input " + g.string() + " --eps 0.2 --seed 7 --samples 100 --json-out " + js.string());
  CHECK(r.code == 0);
  const auto j = json_of(js);
  CHECK(j["best_cut"].get<double>() == 2.0);
  CHECK(j["schema"] == 1);
  CHECK(j["n"] == 3);
  CHECK(j["m"] == 3);
  CHECK(j["seed"] == 7);
  CHECK(j["samples"] == 100);
  CHECK(j["converged"] == true);
  for (const char* key : {"eps", "beta", "M", "iters", "gap", "infeas_inf", "mean_cut"}) CHECK(j.contains(key));
  CHECK(j["infeas_inf"].get<double>() <= 0.2);
  CHECK(r.out.rfind("n=3 best_cut=2 mean_cut=", 0) == 0);
  CHECK(r.out.find(" infeas=") != std::string::npos);
  CHECK(r.out.find(" iters=") != std::string::npos);
}

TEST_CASE("maxcut errors and exit codes") {
  const auto missing = run("maxcut --input /nonexistent/graph.txt --eps 0.2 --seed 1");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("/nonexistent/graph.txt") != std::string::npos);

  const auto g = write_file("k3b.txt", kK3);
  CHECK(run("maxcut --input " + g.string() + " --eps 0.5 --seed 1").code == 2);
  CHECK(run("maxcut --input " + g.string() + " --eps 0.2").code == 2);  // seed is mandatory
  CHECK(run("maxcut --input " + g.string() + " --eps 0.2 --seed 1 --format csv").code == 2);
  CHECK(run("maxcut --input " + g.string() + " --eps 0.2 --seed 1 --samples 0").code == 2);

  const auto bad = write_file("bad.txt", "1 2\n2 x\n");
  CHECK(run("maxcut --input " + bad.string() + " --eps 0.2 --seed 1").code == 1);

  // an odd cycle cannot converge in 5 iterations (an even one is solved by
  // the first step)
  std::string ring;
  for (int i = 1; i <= 15; ++i) ring += std::to_string(i) + " " + std::to_string(i % 15 + 1) + "\n";
  const auto rg = write_file("ring.txt", ring);
  const auto r = run("maxcut --input " + rg.string() + " --eps 0.2 --seed 1 --max-iters 5");
  CHECK(r.code == 3);
}

TEST_CASE("maxcut reads Matrix Market by extension") {
  const auto g = write_file("k3.mtx",
                            "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 3\n2 1\n3 1\n3 2\n");
  const auto js = scratch() / "mtx.json";
  CHECK(run("maxcut --input " + g.string() + " --eps 0.2 --seed 3 --samples 20 --json-out " + js.string()).code == 0);
  CHECK(json_of(js)["best_cut"].get<double>() == 2.0);
  // forcing the edge-list reader on the same file fails to parse
  CHECK(run("maxcut --input " + g.string() + " --eps 0.2 --seed 3 --format edgelist").code == 1);
}

TEST_CASE("identical config and seed give identical outputs") {
  std::string text;
  for (int i = 1; i <= 12; ++i)
    for (int j = i + 1; j <= 12; ++j)
      if ((i * 7 + j * 3) % 4 == 0) text += std::to_string(i) + " " + std::to_string(j) + "\n";
  const auto g = write_file("g12.txt", text);
  std::string js[2], csv[2];
  for (int rep = 0; rep < 2; ++rep) {
    const auto jp = scratch() / ("rep" + std::to_string(rep) + ".json");
    const auto cp = scratch() / ("rep" + std::to_string(rep) + ".csv");
    const auto r = run("maxcut --input " + g.string() + " --eps 0.25 --seed 11 --samples 50 --json-out " + jp.string() +
                       " --trace-out " + cp.string());
    CHECK(r.code == 0);
    js[rep] = slurp(jp);
    csv[rep] = slurp(cp);
  }
  CHECK(js[0] == js[1]);
  CHECK(without_ms(csv[0]) == without_ms(csv[1]));
  CHECK(csv[0].rfind("iter,gap,infeas_inf,obj,ms\n", 0) == 0);

  // iteration column is 0, 1, 2, ...
  std::istringstream in(csv[0]);
  std::string line;
  std::getline(in, line);
  long expect = 0;
  while (std::getline(in, line)) CHECK(std::stol(line.substr(0, line.find(','))) == expect++);
  CHECK(expect > 1);
}

TEST_CASE("sensors with k = n selects everything") {
  const auto fx = write_file("s4.txt", "sensors 4 2 4\nrows\n1 0\n0 2\n1 1\n-1 3\n");
  const auto js = scratch() / "s4.json";
  const auto r = run("sensors --input " + fx.string() + " --seed 1 --max-iters 20 --json-out " + js.string());
  CHECK(r.code == 0);
  const auto j = json_of(js);
  CHECK(j["subset"] == std::vector<int>{1, 2, 3, 4});
  MatrixXd A(2, 4);
  A << 1, 0, 1, -1, 0, 2, 1, 3;
  const double expect = std::log(MatrixXd(A * A.transpose()).determinant());
  CHECK(j["logdet"].get<double>() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.out.rfind("subset=1,2,3,4 ", 0) == 0);
}

TEST_CASE("sensors needs a budget") {
  const auto fx = write_file("s5.txt", "sensors 30 3 4\ngaussian 2\n");
  CHECK(run("sensors --input " + fx.string() + " --seed 1").code == 2);
  CHECK(run("sensors --input " + fx.string() + " --seed 1 --eps 0.1").code == 2);  // no curvature in the file
  const auto withc = write_file("s6.txt", "sensors 30 3 4\ncurvature 2\ngaussian 2\n");
  CHECK(run("sensors --input " + withc.string() + " --seed 1 --eps 0.5").code != 2);
}

TEST_CASE("csrecover finds a planted 2-sparse signal") {
  const Index n = 50, m = 20;
  const auto planted = planted_cs(n, m, {7, 31}, (VectorXd(2) << 1.0, 0.6).finished(), 5);
  const auto& prob = *planted.problem;
  std::ostringstream text;
  text.precision(17);
  text << "cs " << n << " " << m << " " << prob.alpha() << "\ny";
  for (Index i = 0; i < m; ++i) text << " " << prob.y()[i];
  text << "\ncolumns\n";
  MatrixXd A(m, n);
  VectorXd c(m);
  for (Index j = 0; j < n; ++j) {
    prob.column(j, c);
    A.col(j) = c;
    for (Index i = 0; i < m; ++i) text << c[i] << (i + 1 < m ? " " : "\n");
  }
  // independent check that FW on this instance recovers the support
  VectorXd x = VectorXd::Zero(n);
  for (int t = 0; t < 20000; ++t) {
    const VectorXd score = -(A.transpose() * (A * x - prob.y()));
    Index j;
    const double top = score.maxCoeff(&j);
    const double gamma = 2.0 / (t + 2.0);
    x *= 1 - gamma;
    if (top > 0) x[j] += gamma * prob.alpha();
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] > x[b]; });
  REQUIRE(std::min(order[0], order[1]) == 7);
  REQUIRE(std::max(order[0], order[1]) == 31);

  const auto fx = write_file("cs.txt", text.str());
  const auto js = scratch() / "cs.json";
  const auto r = run("csrecover --input " + fx.string() + " --seed 4 --max-iters 3000 --json-out " + js.string());
  CHECK(r.code == 0);
  const auto j = json_of(js);
  REQUIRE(j["heavy_hitters"].size() >= 2);
  std::vector<int> top2{j["heavy_hitters"][0]["index"].get<int>(), j["heavy_hitters"][1]["index"].get<int>()};
  std::sort(top2.begin(), top2.end());
  CHECK(top2 == std::vector<int>{8, 32});  // 1-based
  CHECK(j["samples"] == 1000);
  CHECK(r.out.rfind("top=", 0) == 0);
}

TEST_CASE("postproc on a rank-1 stream") {
  std::ostringstream text;
  text.precision(17);
  text << "# rank-one samples\nrank 1\n";
  const double u[6] = {0.5, -1.0, 2.0, 0.0, 1.5, -0.25};
  for (int s = 0; s < 40; ++s) {
    const double c = std::sin(1.0 + s * 0.7) * 3.0;
    for (int i = 0; i < 6; ++i) text << c * u[i] << (i < 5 ? " " : "\n");
  }
  const auto fx = write_file("rank1.txt", text.str());
  const auto js = scratch() / "pp.json";
  const auto r = run("postproc --input " + fx.string() + " --seed 2 --json-out " + js.string());
  CHECK(r.code == 0);
  const auto j = json_of(js);
  CHECK(j["reconstruction_rel_error"].get<double>() < 1e-6);
  CHECK(j["rank"] == 1);
  CHECK(j["samples"] == 40);
  CHECK(j["oja_angle"].get<double>() < 1e-6);

  const auto bad = write_file("ragged.txt", "1 2 3\n1 2\n");
  CHECK(run("postproc --input " + bad.string() + " --seed 2").code == 1);
  const auto big = write_file("bigrank.txt", "rank 4\n1 2 3\n");
  CHECK(run("postproc --input " + big.string() + " --seed 2").code == 2);
}

TEST_CASE("unknown subcommand") { CHECK(run("frobnicate --input x --seed 1").code == 2); }

#include "lowmem/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "lowmem/errors.hpp"

namespace lowmem {

VectorStream gaussian_stream(std::uint64_t seed, Index dim, double scale) {
  return [seed, dim, scale](Index i, VecOut out) {
    for (Index j = 0; j < dim; ++j)
      out[j] = scale * counter_normal(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
  };
}

VectorStream matrix_stream(std::shared_ptr<const MatrixXd> data) {
  if (!data) throw std::invalid_argument("matrix_stream: null data");
  return [data = std::move(data)](Index i, VecOut out) { out = data->col(i); };
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

class Tokens {
 public:
  explicit Tokens(std::istream& in) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string tok;
      while (fields >> tok) toks_.push_back({tok, no});
    }
    if (in.bad()) throw std::ios_base::failure("read error");
  }

  bool done() const { return pos_ >= toks_.size(); }
  std::size_t line() const { return done() ? (toks_.empty() ? 0 : toks_.back().line) : toks_[pos_].line; }

  std::string word(const char* what) {
    if (done()) throw ParseError(line(), std::string("unexpected end of input, expected ") + what);
    return toks_[pos_++].text;
  }

  double number(const char* what) {
    const std::size_t at = line();
    const std::string tok = word(what);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ParseError(at, std::string("bad ") + what + " '" + tok + "'");
    if (!std::isfinite(x)) throw ParseError(at, std::string("non-finite ") + what);
    return x;
  }

  Index count(const char* what) {
    const std::size_t at = line();
    const double x = number(what);
    if (x < 1 || x != std::floor(x) || x > 1e12) throw ParseError(at, std::string(what) + " must be a positive integer");
    return static_cast<Index>(x);
  }

  std::uint64_t seed() {
    const std::size_t at = line();
    const std::string tok = word("seed");
    try {
      std::size_t used = 0;
      const auto s = std::stoull(tok, &used);
      if (used == tok.size()) return s;
    } catch (const std::exception&) {
    }
    throw ParseError(at, "bad seed '" + tok + "'");
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::shared_ptr<const MatrixXd> read_block(Tokens& toks, Index dim, Index count) {
  auto data = std::make_shared<MatrixXd>(dim, count);
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < dim; ++j) (*data)(j, i) = toks.number("matrix entry");
  }
  return data;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return in;
}

}  // namespace

SensorFixture load_sensor_fixture(std::istream& in) {
  Tokens toks(in);
  if (toks.done()) throw ParseError(0, "empty sensor fixture");
  const std::size_t head = toks.line();
  if (toks.word("header") != "sensors") throw ParseError(head, "expected 'sensors <n> <m> <k>'");
  const Index n = toks.count("n");
  const Index m = toks.count("m");
  const Index k = toks.count("k");
  if (k < m || k > n) throw ParseError(head, "need m <= k <= n");

  SensorFixture fx;
  VectorStream stream;
  while (!toks.done()) {
    const std::size_t at = toks.line();
    const std::string key = toks.word("keyword");
    if (key == "curvature") {
      fx.curvature = toks.number("curvature");
      if (!(fx.curvature > 0.0)) throw ParseError(at, "curvature must be > 0");
    } else if (key == "gaussian" && !stream) {
      stream = gaussian_stream(toks.seed(), m);
    } else if (key == "rows" && !stream) {
      stream = matrix_stream(read_block(toks, m, n));
    } else {
      throw ParseError(at, "unexpected '" + key + "'");
    }
  }
  if (!stream) throw ParseError(0, "sensor fixture needs 'gaussian <seed>' or 'rows'");
  fx.problem = std::make_shared<const SensorProblem>(n, m, k, std::move(stream));
  return fx;
}

CsFixture load_cs_fixture(std::istream& in) {
  Tokens toks(in);
  if (toks.done()) throw ParseError(0, "empty cs fixture");
  const std::size_t head = toks.line();
  if (toks.word("header") != "cs") throw ParseError(head, "expected 'cs <n> <m> <alpha>'");
  const Index n = toks.count("n");
  const Index m = toks.count("m");
  const double alpha = toks.number("alpha");
  if (!(alpha > 0.0)) throw ParseError(head, "alpha must be > 0");

  CsFixture fx;
  VectorStream stream;
  VectorXd y;
  while (!toks.done()) {
    const std::size_t at = toks.line();
    const std::string key = toks.word("keyword");
    if (key == "curvature") {
      fx.curvature = toks.number("curvature");
      if (!(fx.curvature > 0.0)) throw ParseError(at, "curvature must be > 0");
    } else if (key == "y" && y.size() == 0) {
      y.resize(m);
      for (Index i = 0; i < m; ++i) y[i] = toks.number("y entry");
    } else if (key == "gaussian" && !stream) {
      stream = gaussian_stream(toks.seed(), m, 1.0 / std::sqrt(static_cast<double>(m)));
    } else if (key == "columns" && !stream) {
      stream = matrix_stream(read_block(toks, m, n));
    } else {
      throw ParseError(at, "unexpected '" + key + "'");
    }
  }
  if (!stream) throw ParseError(0, "cs fixture needs 'gaussian <seed>' or 'columns'");
  if (y.size() == 0) throw ParseError(0, "cs fixture needs 'y'");
  fx.problem = std::make_shared<const CsProblem>(n, m, std::move(stream), std::move(y), alpha);
  return fx;
}

SensorFixture load_sensor_fixture_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_sensor_fixture(in);
}

CsFixture load_cs_fixture_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_cs_fixture(in);
}

std::shared_ptr<const SensorProblem> random_sensor_problem(Index n, Index m, Index k, std::uint64_t seed) {
  return std::make_shared<const SensorProblem>(n, m, k, gaussian_stream(seed, m));
}

PlantedCs planted_cs(Index n, Index m, std::vector<Index> support, VectorXd values, std::uint64_t seed) {
  if (static_cast<Index>(support.size()) != values.size()) throw std::invalid_argument("planted_cs: support/values mismatch");
  if (values.size() == 0 || (values.array() <= 0.0).any())
    throw std::invalid_argument("planted_cs: values must be positive");
  VectorStream columns = gaussian_stream(seed, m, 1.0 / std::sqrt(static_cast<double>(m)));
  VectorXd y = VectorXd::Zero(m);
  VectorXd a(m);
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] < 0 || support[j] >= n) throw std::invalid_argument("planted_cs: index out of range");
    columns(support[j], a);
    y += values[static_cast<Index>(j)] * a;
  }
  PlantedCs out;
  out.problem = std::make_shared<const CsProblem>(n, m, std::move(columns), std::move(y), values.sum());
  out.support = std::move(support);
  out.values = std::move(values);
  return out;
}

}  // namespace lowmem

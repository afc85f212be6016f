#include "lowmem/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lowmem/errors.hpp"

namespace lowmem {

SparseGraph SparseGraph::from_edges(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) throw std::invalid_argument("graph has zero vertices");
  for (auto& e : edges) {
    if (e.i >= n || e.j >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.i == e.j) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.i + 1));
    if (!std::isfinite(e.w)) throw std::invalid_argument("non-finite edge weight");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const auto& e : edges) {
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j) {
      merged.back().w += e.w;
    } else {
      merged.push_back(e);
    }
  }
  return SparseGraph(n, std::move(merged));
}

std::vector<double> SparseGraph::weighted_degrees() const {
  std::vector<double> deg(n_, 0.0);
  for (const auto& e : edges_) {
    deg[e.i] += e.w;
    deg[e.j] += e.w;
  }
  return deg;
}

double SparseGraph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

namespace {

bool is_blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#' || line[pos] == '%';
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Reads a 1-based vertex index and converts it to 0-based.
std::size_t parse_index(std::istringstream& fields, std::size_t line_no) {
  long long v = 0;
  if (!(fields >> v)) throw ParseError(line_no, "expected vertex index");
  if (v < 1) throw ParseError(line_no, "vertex index must be >= 1");
  return static_cast<std::size_t>(v - 1);
}

SparseGraph parse_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream fields(line);
    std::size_t i = parse_index(fields, line_no);
    std::size_t j = parse_index(fields, line_no);
    double w = 1.0;
    std::string extra;
    if (fields >> extra) {
      try {
        std::size_t used = 0;
        w = std::stod(extra, &used);
        if (used != extra.size()) throw std::invalid_argument(extra);
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad edge weight '" + extra + "'");
      }
      if (fields >> extra) throw ParseError(line_no, "trailing fields");
    }
    if (i == j) throw ParseError(line_no, "self-loop");
    if (!std::isfinite(w)) throw ParseError(line_no, "non-finite edge weight");
    n = std::max({n, i + 1, j + 1});
    edges.push_back({i, j, w});
  }
  if (n == 0) throw ParseError(0, "graph has zero vertices");
  return SparseGraph::from_edges(n, std::move(edges));
}

SparseGraph parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(0, "empty Matrix Market input");
  ++line_no;
  std::istringstream header(lowercase(line));
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix") {
    throw ParseError(line_no, "missing %%MatrixMarket matrix banner");
  }
  if (layout != "coordinate") throw ParseError(line_no, "only coordinate layout is supported");
  if (field != "real" && field != "pattern" && field != "integer") {
    throw ParseError(line_no, "unsupported field '" + field + "'");
  }
  if (symmetry != "symmetric") throw ParseError(line_no, "matrix must be symmetric");
  const bool pattern = field == "pattern";

  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream fields(line);
    if (!have_size) {
      if (!(fields >> rows >> cols >> nnz)) throw ParseError(line_no, "bad size line");
      if (rows != cols) throw ParseError(line_no, "matrix must be square");
      if (rows == 0) throw ParseError(line_no, "graph has zero vertices");
      have_size = true;
      edges.reserve(nnz);
      continue;
    }
    std::size_t i = parse_index(fields, line_no);
    std::size_t j = parse_index(fields, line_no);
    double w = 1.0;
    if (!pattern && !(fields >> w)) throw ParseError(line_no, "missing value");
    if (i >= rows || j >= rows) throw ParseError(line_no, "index out of range");
    if (i == j) throw ParseError(line_no, "diagonal entries are not allowed");
    if (!std::isfinite(w)) throw ParseError(line_no, "non-finite edge weight");
    edges.push_back({i, j, w});
  }
  if (!have_size) throw ParseError(line_no, "missing size line");
  if (edges.size() != nnz) {
    throw ParseError(line_no, "expected " + std::to_string(nnz) + " entries, found " +
                                  std::to_string(edges.size()));
  }
  return SparseGraph::from_edges(rows, std::move(edges));
}

}  // namespace

SparseGraph load_graph(std::istream& in, GraphFormat format) {
  return format == GraphFormat::kMatrixMarket ? parse_matrix_market(in) : parse_edge_list(in);
}

SparseGraph load_graph_file(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return load_graph(in, format);
}

SparseGraph random_graph(std::size_t n, double average_degree, unsigned long long seed) {
  if (n < 2) throw std::invalid_argument("random_graph needs n >= 2");
  std::mt19937_64 rng(seed);
  const double prob = std::min(1.0, average_degree / static_cast<double>(n - 1));
  std::bernoulli_distribution coin(prob);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({i, j, 1.0});
    }
  }
  return SparseGraph::from_edges(n, std::move(edges));
}

}  // namespace lowmem

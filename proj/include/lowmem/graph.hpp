#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

namespace lowmem {

struct Edge {
  std::size_t i;  // 0-based, i < j after canonicalization
  std::size_t j;
  double w;
};

enum class GraphFormat { kMatrixMarket, kEdgeList };

/// Undirected weighted graph without self-loops. Edges are canonical: i < j,
/// sorted, duplicates merged by summing weights.
class SparseGraph {
 public:
  /// Canonicalizes `edges` (0-based). Throws std::invalid_argument on
  /// self-loops, out-of-range endpoints, non-finite weights or n == 0.
  static SparseGraph from_edges(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Sum of incident edge weights per vertex.
  std::vector<double> weighted_degrees() const;
  double total_weight() const;

 private:
  SparseGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {}

  std::size_t n_;
  std::vector<Edge> edges_;
};

/// Parses an edge list (`i j [w]`, 1-based, `#`/`%` comments) or a Matrix
/// Market `coordinate {real,pattern} symmetric` file. Throws ParseError.
SparseGraph load_graph(std::istream& in, GraphFormat format);
SparseGraph load_graph_file(const std::filesystem::path& path, GraphFormat format);

/// Erdos-Renyi style random graph with the given expected average degree and
/// unit weights; used for experiments and tests.
SparseGraph random_graph(std::size_t n, double average_degree, unsigned long long seed);

}  // namespace lowmem

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lowmem/extreme_point.hpp"

namespace lowmem {

/// Item i has entries counter_normal(seed, i, j) * scale, j < dim.
VectorStream gaussian_stream(std::uint64_t seed, Index dim, double scale = 1.0);

/// Item i is column i of `data` (dim x count).
VectorStream matrix_stream(std::shared_ptr<const MatrixXd> data);

struct SensorFixture {
  std::shared_ptr<const SensorProblem> problem;
  double curvature = 0.0;  // 0 when the file gives none
};

struct CsFixture {
  std::shared_ptr<const CsProblem> problem;
  double curvature = 0.0;
};

/// Text fixtures, '#' starts a comment:
///
///   sensors <n> <m> <k>        |  cs <n> <m> <alpha>
///   curvature <C>              |  curvature <C>
///                              |  y <m numbers>
///   gaussian <seed>            |  gaussian <seed>
///   or: rows, then n*m numbers |  or: columns, then n*m numbers
///
/// Gaussian CS columns are scaled by 1/sqrt(m).
SensorFixture load_sensor_fixture(std::istream& in);
CsFixture load_cs_fixture(std::istream& in);
SensorFixture load_sensor_fixture_file(const std::string& path);
CsFixture load_cs_fixture_file(const std::string& path);

/// Gaussian sensors a_i ~ N(0, I_m).
std::shared_ptr<const SensorProblem> random_sensor_problem(Index n, Index m, Index k, std::uint64_t seed);

struct PlantedCs {
  std::shared_ptr<const CsProblem> problem;
  std::vector<Index> support;
  VectorXd values;
};

/// y = A x0 with A's columns N(0, I/m), x0 >= 0 supported on `support`;
/// alpha = ||x0||_1, so x0 is optimal with objective 0.
PlantedCs planted_cs(Index n, Index m, std::vector<Index> support, VectorXd values, std::uint64_t seed);

}  // namespace lowmem

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copula_lab/copula.hpp"

namespace copula_lab {

enum class StationaryClass { Max, Min, Saddle };

std::string to_string(StationaryClass c);

struct StationaryPoint {
  Eigen::Vector2d u;
  StationaryClass kind;
  double value;               // log c2(u) - log c1(u)
  Eigen::Vector2d eigenvalues;
};

struct StationaryAnalysis {
  std::vector<StationaryPoint> points;  // sorted by (u1, u2)
  bool degenerate = false;              // c1 and c2 agree on every seed
  int seeds = 0;
  int skipped = 0;                      // seeds whose Newton run did not converge
};

/// Stationary points of g(u) = log c2(u) - log c1(u) on (0,1)^2, found by damped Newton
/// from a grid x grid lattice of seeds at (i+1)/(grid+1). Roots closer than 1e-6 merge.
StationaryAnalysis classify_stationary_points(const CopulaSpec& c1, const CopulaSpec& c2,
                                              int grid = 101);

}  // namespace copula_lab

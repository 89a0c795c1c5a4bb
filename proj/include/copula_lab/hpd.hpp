#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "copula_lab/kde.hpp"

namespace copula_lab {

struct HpdOptions {
  int qmc_points = 4096;      // per replicate
  int qmc_replicates = 8;     // independent digital shifts
  std::uint64_t seed = 0;     // seeds the shifts
};

struct HpdResult {
  double level = 0.0;
  double threshold = 0.0;       // density cut-off
  double mass_above = 0.0;      // grid mass with density >= threshold (grid total normalised to 1)
  bool contains_target = false;
  bool target_out_of_bounds = false;
  double target_density = 0.0;
  double area = 0.0;            // of {density >= threshold} within the grid box
  double area_se = 0.0;

  bool member(const KdeSurface& s, double x, double y) const { return s.interpolate(x, y) >= threshold; }
};

/// Highest-density region of a KDE surface. The threshold is the largest node density t
/// whose superlevel set holds at least `level` of the grid mass. The area integrates the
/// indicator of the bilinear surface over the grid box with digitally shifted Sobol points.
HpdResult hpd_region(const KdeSurface& surface, double level, const std::optional<Eigen::Vector2d>& target,
                     const HpdOptions& options = {});

}  // namespace copula_lab

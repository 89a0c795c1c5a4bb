#include "copula_lab/hpd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/random/sobol.hpp>

#include "copula_lab/errors.hpp"
#include "copula_lab/rng.hpp"

namespace copula_lab {

HpdResult hpd_region(const KdeSurface& surface, double level, const std::optional<Eigen::Vector2d>& target,
                     const HpdOptions& options) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("hpd_region: level must lie in (0,1)");
  if (options.qmc_points < 1 || options.qmc_replicates < 2) throw ArgumentError("hpd_region: need QMC points and >= 2 replicates");
  const Eigen::MatrixXd& dens = surface.density;
  std::vector<double> values(dens.data(), dens.data() + dens.size());
  std::sort(values.begin(), values.end(), std::greater<>());
  double total = 0.0;
  for (double v : values) total += v;
  if (!(total > 0.0)) throw ArgumentError("hpd_region: surface has no mass");

  HpdResult out;
  out.level = level;
  double acc = 0.0;
  std::size_t k = 0;
  for (; k < values.size(); ++k) {
    acc += values[k];
    if (acc >= level * total) break;
  }
  k = std::min(k, values.size() - 1);
  // Include every node tied with the cut-off value.
  while (k + 1 < values.size() && values[k + 1] == values[k]) acc += values[++k];
  out.threshold = values[k];
  out.mass_above = acc / total;

  if (target) {
    const double x = (*target)[0], y = (*target)[1];
    out.target_out_of_bounds = !surface.contains(x, y);
    out.target_density = surface.interpolate(x, y);
    out.contains_target = !out.target_out_of_bounds && out.target_density >= out.threshold;
  }

  const double x0 = surface.gx[0], x1 = surface.gx[surface.gx.size() - 1];
  const double y0 = surface.gy[0], y1 = surface.gy[surface.gy.size() - 1];
  const double box = (x1 - x0) * (y1 - y0);
  Rng shifts(stream_seed(options.seed, {0x4850ULL}));
  std::vector<double> estimates;
  for (int r = 0; r < options.qmc_replicates; ++r) {
    const std::uint64_t sx = shifts(), sy = shifts();
    boost::random::sobol qrng(2);
    std::int64_t inside = 0;
    for (int i = 0; i < options.qmc_points; ++i) {
      const std::uint64_t a = qrng() ^ sx;
      const std::uint64_t b = qrng() ^ sy;
      const double ux = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
      const double uy = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
      if (surface.interpolate(x0 + ux * (x1 - x0), y0 + uy * (y1 - y0)) >= out.threshold) ++inside;
    }
    estimates.push_back(box * static_cast<double>(inside) / options.qmc_points);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(estimates.size() - 1);
  out.area = mean;
  out.area_se = std::sqrt(var / static_cast<double>(estimates.size()));
  return out;
}

}  // namespace copula_lab

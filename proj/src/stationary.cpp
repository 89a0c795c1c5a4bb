#include "copula_lab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "copula_lab/errors.hpp"

namespace copula_lab {

namespace {

struct Eval {
  double value;
  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
};

Eval difference(const CopulaSpec& c1, const CopulaSpec& c2, const Eigen::Vector2d& u, int order) {
  const double pt[2] = {u[0], u[1]};
  const double cb[2] = {1.0 - u[0], 1.0 - u[1]};
  const auto a = c1.log_density_derivatives(pt, cb, order);
  const auto b = c2.log_density_derivatives(pt, cb, order);
  Eval e{b.value - a.value, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero()};
  if (order >= 1) e.grad = b.gradient - a.gradient;
  if (order >= 2) e.hess = b.hessian - a.hessian;
  return e;
}

std::optional<Eigen::Vector2d> newton_root(const CopulaSpec& c1, const CopulaSpec& c2, Eigen::Vector2d u) {
  constexpr double kEdge = 1e-9;
  Eval e = difference(c1, c2, u, 2);
  for (int it = 0; it < 100; ++it) {
    const double gnorm = e.grad.norm();
    if (gnorm < 1e-10) return u;
    Eigen::Vector2d step = e.hess.fullPivLu().solve(-e.grad);
    if (!step.allFinite()) return std::nullopt;
    // Keep the iterate inside the open square.
    double scale = 1.0;
    for (int j = 0; j < 2; ++j) {
      if (u[j] + step[j] <= 0.0) scale = std::min(scale, 0.5 * u[j] / -step[j]);
      if (u[j] + step[j] >= 1.0) scale = std::min(scale, 0.5 * (1.0 - u[j]) / step[j]);
    }
    step *= scale;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::Vector2d trial = u + step;
      const Eval t = difference(c1, c2, trial, 2);
      if (t.grad.allFinite() && t.grad.norm() < gnorm) {
        u = trial;
        e = t;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return e.grad.norm() < 1e-7 ? std::optional<Eigen::Vector2d>(u) : std::nullopt;
    if (u.minCoeff() < kEdge || u.maxCoeff() > 1.0 - kEdge) return std::nullopt;
    if (step.norm() < 1e-14) return e.grad.norm() < 1e-7 ? std::optional<Eigen::Vector2d>(u) : std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(StationaryClass c) {
  switch (c) {
    case StationaryClass::Max: return "max";
    case StationaryClass::Min: return "min";
    case StationaryClass::Saddle: return "saddle";
  }
  return "unknown";
}

StationaryAnalysis classify_stationary_points(const CopulaSpec& c1, const CopulaSpec& c2, int grid) {
  if (c1.dim() != 2 || c2.dim() != 2) throw ArgumentError("classify_stationary_points: only d = 2 is supported");
  if (grid < 2) throw ArgumentError("classify_stationary_points: grid must be >= 2");
  StationaryAnalysis out;
  out.seeds = grid * grid;

  bool all_equal = true;
  for (int i = 0; i < grid && all_equal; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Eigen::Vector2d u((i + 1.0) / (grid + 1.0), (j + 1.0) / (grid + 1.0));
      if (std::abs(difference(c1, c2, u, 0).value) > 1e-12) {
        all_equal = false;
        break;
      }
    }
  }
  if (all_equal) {
    out.degenerate = true;
    return out;
  }

  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Eigen::Vector2d seed((i + 1.0) / (grid + 1.0), (j + 1.0) / (grid + 1.0));
      const auto root = newton_root(c1, c2, seed);
      if (!root) {
        ++out.skipped;
        continue;
      }
      const bool seen = std::any_of(out.points.begin(), out.points.end(), [&](const StationaryPoint& p) {
        return (p.u - *root).norm() < 1e-6;
      });
      if (seen) continue;
      const Eval e = difference(c1, c2, *root, 2);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(e.hess);
      const Eigen::Vector2d lam = eig.eigenvalues();
      StationaryClass kind = StationaryClass::Saddle;
      if (lam.maxCoeff() < 0.0) kind = StationaryClass::Max;
      else if (lam.minCoeff() > 0.0) kind = StationaryClass::Min;
      out.points.push_back({*root, kind, e.value, lam});
    }
  }
  std::sort(out.points.begin(), out.points.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
    return a.u[0] < b.u[0] || (a.u[0] == b.u[0] && a.u[1] < b.u[1]);
  });
  return out;
}

}  // namespace copula_lab

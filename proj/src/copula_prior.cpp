#include "copula_lab/copula_prior.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "copula_lab/errors.hpp"

namespace copula_lab {

CopulaPrior::CopulaPrior(std::vector<MarginalPrior> marginals, CopulaSpec copula)
    : marginals_(std::move(marginals)), copula_(std::move(copula)) {
  if (marginals_.empty()) throw ParameterError("copula prior needs at least one marginal");
  if (copula_.dim() != dim()) throw ParameterError("copula dimension does not match the number of marginals");
}

bool CopulaPrior::in_support(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j)
    if (!marginals_[static_cast<std::size_t>(j)].in_support(theta[static_cast<std::size_t>(j)])) return false;
  return true;
}

double CopulaPrior::log_pdf(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim()) throw ArgumentError("prior_log_pdf: wrong dimension");
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  double total = 0.0;
  std::vector<double> u(theta.size()), ubar(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    total += marginals_[j].log_pdf(theta[j]);
    marginals_[j].tails(theta[j], u[j], ubar[j]);
  }
  if (copula_.family() == CopulaFamily::Independence) return total;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    // Far enough into a tail that the CDF rounds to 0 or 1: the density is effectively 0.
    if (!(u[j] > 0.0 && ubar[j] > 0.0)) return -std::numeric_limits<double>::infinity();
  }
  return total + copula_.log_density(u, ubar);
}

double CopulaPrior::log_copula_term(std::span<const double> theta) const {
  if (copula_.family() == CopulaFamily::Independence) return in_support(theta) ? 0.0 : -std::numeric_limits<double>::infinity();
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  double u[8], ubar[8];
  std::vector<double> uv, ubv;
  double* pu = u;
  double* pb = ubar;
  if (theta.size() > 8) {
    uv.resize(theta.size());
    ubv.resize(theta.size());
    pu = uv.data();
    pb = ubv.data();
  }
  for (std::size_t j = 0; j < theta.size(); ++j) {
    marginals_[j].tails(theta[j], pu[j], pb[j]);
    if (!(pu[j] > 0.0 && pb[j] > 0.0)) return -std::numeric_limits<double>::infinity();
  }
  return copula_.log_density({pu, theta.size()}, {pb, theta.size()});
}

LogDensityDerivatives CopulaPrior::log_pdf_derivatives(std::span<const double> theta, int order) const {
  if (!in_support(theta)) throw DomainError("prior derivatives require theta inside the support");
  const int d = dim();
  std::vector<double> u(theta.size()), ubar(theta.size());
  Eigen::VectorXd f(d), dlf(d), d2lf(d);
  double marg = 0.0;
  for (int j = 0; j < d; ++j) {
    const auto& m = marginals_[static_cast<std::size_t>(j)];
    const double t = theta[static_cast<std::size_t>(j)];
    marg += m.log_pdf(t);
    f[j] = m.pdf(t);
    dlf[j] = m.d_log_pdf(t);
    d2lf[j] = m.d2_log_pdf(t);
    m.tails(t, u[static_cast<std::size_t>(j)], ubar[static_cast<std::size_t>(j)]);
  }
  const LogDensityDerivatives c = copula_.log_density_derivatives(u, ubar, order);
  LogDensityDerivatives out;
  out.value = marg + c.value;
  if (order >= 1) out.gradient = dlf + c.gradient.cwiseProduct(f);
  if (order >= 2) {
    // d u_j / d theta_j = f_j and d^2 u_j / d theta_j^2 = f_j (log f_j)'.
    out.hessian = f.asDiagonal() * c.hessian * f.asDiagonal();
    out.hessian.diagonal() += d2lf + c.gradient.cwiseProduct(f.cwiseProduct(dlf));
  }
  return out;
}

PointMatrix CopulaPrior::sample(std::size_t n, Rng& rng) const {
  PointMatrix u = copula_.sample(n, rng);
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (int j = 0; j < dim(); ++j) u(i, j) = marginals_[static_cast<std::size_t>(j)].quantile(u(i, j));
  return u;
}

CopulaPrior CopulaPrior::with_copula(CopulaSpec copula) const { return CopulaPrior(marginals_, std::move(copula)); }

std::string CopulaPrior::describe() const {
  std::ostringstream os;
  for (const auto& m : marginals_) os << m.describe() << " x ";
  os << copula_.describe();
  return os.str();
}

}  // namespace copula_lab

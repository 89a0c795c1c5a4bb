#include "copula_lab/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "copula_lab/errors.hpp"
#include "copula_lab/special.hpp"

namespace copula_lab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.83787706640934548356;

void require_size(const ModelSpec& m, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != m.dim())
    throw ArgumentError("theta has dimension " + std::to_string(theta.size()) + ", model expects " +
                        std::to_string(m.dim()));
}

double exp_pair_log_likelihood(const ModelSpec& m, std::span<const double> theta, const Dataset& data) {
  const double lambda = theta[0], kappa = theta[1];
  const CopulaSpec& c = *m.pair_copula;
  const bool independent = c.family() == CopulaFamily::Independence;
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.pairs.rows(); ++i) {
    const double y = data.pairs(i, 0), ys = data.pairs(i, 1);
    total += std::log(lambda) - lambda * y + std::log(kappa) - kappa * ys;
    if (independent) continue;
    const double u[2] = {-std::expm1(-lambda * y), -std::expm1(-kappa * ys)};
    const double ub[2] = {std::exp(-lambda * y), std::exp(-kappa * ys)};
    if (!(u[0] > 0.0 && u[1] > 0.0 && ub[0] > 0.0 && ub[1] > 0.0)) return kNegInf;
    total += c.log_density(u, ub);
  }
  return total;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::MultinomialConditional: return "multinomial";
    case ModelKind::NormalMeanVar: return "normal";
    case ModelKind::GammaShapeRate: return "gamma";
    case ModelKind::LinRegKnownVar: return "regression";
    case ModelKind::ExpPairCopula: return "exp_pair";
  }
  return "unknown";
}

ModelSpec ModelSpec::multinomial(int categories) {
  if (categories < 2) throw ParameterError("multinomial model needs at least 2 categories");
  ModelSpec m;
  m.kind = ModelKind::MultinomialConditional;
  m.categories = categories;
  return m;
}

ModelSpec ModelSpec::normal_mean_var() {
  ModelSpec m;
  m.kind = ModelKind::NormalMeanVar;
  return m;
}

ModelSpec ModelSpec::gamma_shape_rate() {
  ModelSpec m;
  m.kind = ModelKind::GammaShapeRate;
  return m;
}

ModelSpec ModelSpec::linreg_known_var(double noise_variance, int covariates) {
  if (!(noise_variance > 0.0)) throw ParameterError("regression noise variance must be positive");
  if (covariates < 1) throw ParameterError("regression needs at least one covariate");
  ModelSpec m;
  m.kind = ModelKind::LinRegKnownVar;
  m.noise_variance = noise_variance;
  m.covariates = covariates;
  return m;
}

ModelSpec ModelSpec::exp_pair(CopulaSpec copula) {
  if (copula.dim() != 2) throw ParameterError("exponential pair model needs a bivariate copula");
  ModelSpec m;
  m.kind = ModelKind::ExpPairCopula;
  m.pair_copula = std::move(copula);
  return m;
}

int ModelSpec::dim() const {
  switch (kind) {
    case ModelKind::MultinomialConditional: return categories - 1;
    case ModelKind::LinRegKnownVar: return covariates;
    default: return 2;
  }
}

bool ModelSpec::in_interior(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim()) return false;
  for (double t : theta)
    if (!std::isfinite(t)) return false;
  switch (kind) {
    case ModelKind::MultinomialConditional:
      for (double z : theta)
        if (!(z > 0.0 && z < 1.0)) return false;
      return true;
    case ModelKind::NormalMeanVar: return theta[1] > 0.0;
    case ModelKind::GammaShapeRate:
    case ModelKind::ExpPairCopula: return theta[0] > 0.0 && theta[1] > 0.0;
    case ModelKind::LinRegKnownVar: return true;
  }
  return false;
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == ModelKind::MultinomialConditional) os << "(w=" << categories << ")";
  if (kind == ModelKind::LinRegKnownVar) os << "(noise_variance=" << noise_variance << ", p=" << covariates << ")";
  if (kind == ModelKind::ExpPairCopula) os << "(" << pair_copula->describe() << ")";
  return os.str();
}

void Dataset::validate() const {
  if (n < 0) throw ArgumentError("dataset size must be nonnegative");
  if (kind == ModelKind::MultinomialConditional) {
    std::int64_t total = 0;
    for (auto c : counts) {
      if (c < 0) throw ArgumentError("multinomial counts must be nonnegative");
      total += c;
    }
    if (total != n) throw ArgumentError("multinomial counts must sum to n");
  }
  if (kind == ModelKind::LinRegKnownVar) {
    if (xtx.rows() != xtx.cols() || xtx.rows() != xty.size()) throw ArgumentError("regression statistics have mismatched sizes");
    if ((xtx - xtx.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + xtx.cwiseAbs().maxCoeff()))
      throw ArgumentError("X'X must be symmetric");
  }
}

Eigen::VectorXd z_from_p(std::span<const double> p) {
  if (p.size() < 2) throw ArgumentError("z_from_p: need at least 2 probabilities");
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("z_from_p: probabilities must lie strictly inside (0,1)");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("z_from_p: probabilities must sum to 1");
  Eigen::VectorXd z(static_cast<Eigen::Index>(p.size() - 1));
  double remaining = 1.0;
  for (std::size_t v = 0; v + 1 < p.size(); ++v) {
    z[static_cast<Eigen::Index>(v)] = p[v] / remaining;
    remaining -= p[v];
  }
  return z;
}

Eigen::VectorXd p_from_z(std::span<const double> z) {
  if (z.empty()) throw ArgumentError("p_from_z: need at least one component");
  Eigen::VectorXd p(static_cast<Eigen::Index>(z.size() + 1));
  double stick = 1.0;
  for (std::size_t v = 0; v < z.size(); ++v) {
    if (!(z[v] > 0.0 && z[v] < 1.0)) throw DomainError("p_from_z: Z must lie strictly inside (0,1)");
    p[static_cast<Eigen::Index>(v)] = z[v] * stick;
    stick *= 1.0 - z[v];
  }
  p[static_cast<Eigen::Index>(z.size())] = stick;
  return p;
}

double log_likelihood(const ModelSpec& model, std::span<const double> theta, const Dataset& data) {
  require_size(model, theta);
  if (!model.in_interior(theta)) return kNegInf;
  if (model.kind == ModelKind::ExpPairCopula) return exp_pair_log_likelihood(model, theta, data);
  return log_likelihood_derivatives(model, theta, data, 0).value;
}

LogDensityDerivatives log_likelihood_derivatives(const ModelSpec& model, std::span<const double> theta,
                                                 const Dataset& data, int order) {
  require_size(model, theta);
  if (!model.in_interior(theta)) throw DomainError("log-likelihood derivatives need an interior theta");
  const int d = model.dim();
  LogDensityDerivatives out;
  out.gradient = Eigen::VectorXd::Zero(d);
  out.hessian = Eigen::MatrixXd::Zero(d, d);
  const auto n = static_cast<double>(data.n);
  switch (model.kind) {
    case ModelKind::MultinomialConditional: {
      if (static_cast<int>(data.counts.size()) != model.categories) throw ArgumentError("count vector length mismatch");
      double later = 0.0;
      for (int v = d; v >= 0; --v) {
        const auto nv = static_cast<double>(data.counts[static_cast<std::size_t>(v)]);
        if (v < d) {
          const double z = theta[static_cast<std::size_t>(v)];
          out.value += nv * std::log(z) + later * std::log1p(-z);
          out.gradient[v] = nv / z - later / (1.0 - z);
          out.hessian(v, v) = -nv / (z * z) - later / ((1.0 - z) * (1.0 - z));
        }
        later += nv;
      }
      break;
    }
    case ModelKind::NormalMeanVar: {
      const double mu = theta[0], s2 = theta[1];
      const double ss = data.sum_y2 - 2.0 * mu * data.sum_y + n * mu * mu;
      out.value = -0.5 * n * (kLog2Pi + std::log(s2)) - 0.5 * ss / s2;
      out.gradient << (data.sum_y - n * mu) / s2, -0.5 * n / s2 + 0.5 * ss / (s2 * s2);
      out.hessian << -n / s2, -(data.sum_y - n * mu) / (s2 * s2), -(data.sum_y - n * mu) / (s2 * s2),
          0.5 * n / (s2 * s2) - ss / (s2 * s2 * s2);
      break;
    }
    case ModelKind::GammaShapeRate: {
      const double a = theta[0], b = theta[1];
      out.value = n * (a * std::log(b) - log_gamma(a)) + (a - 1.0) * data.sum_log_y - b * data.sum_y;
      out.gradient << n * (std::log(b) - digamma(a)) + data.sum_log_y, n * a / b - data.sum_y;
      out.hessian << -n * trigamma(a), n / b, n / b, -n * a / (b * b);
      break;
    }
    case ModelKind::LinRegKnownVar: {
      const Eigen::Map<const Eigen::VectorXd> beta(theta.data(), d);
      const double s2 = model.noise_variance;
      const Eigen::VectorXd xtxb = data.xtx * beta;
      out.value = -0.5 * n * (kLog2Pi + std::log(s2)) -
                  0.5 * (data.yty - 2.0 * beta.dot(data.xty) + beta.dot(xtxb)) / s2;
      out.gradient = (data.xty - xtxb) / s2;
      out.hessian = -data.xtx / s2;
      break;
    }
    case ModelKind::ExpPairCopula: {
      out.value = exp_pair_log_likelihood(model, theta, data);
      if (order < 1) break;
      // Central differences on a relative step.
      std::vector<double> t(theta.begin(), theta.end());
      auto f = [&](const std::vector<double>& x) { return exp_pair_log_likelihood(model, x, data); };
      for (int j = 0; j < d; ++j) {
        const double h = 1e-5 * theta[static_cast<std::size_t>(j)];
        auto up = t, dn = t;
        up[static_cast<std::size_t>(j)] += h;
        dn[static_cast<std::size_t>(j)] -= h;
        out.gradient[j] = (f(up) - f(dn)) / (2.0 * h);
        if (order < 2) continue;
        for (int k = 0; k <= j; ++k) {
          const double hk = 1e-4 * theta[static_cast<std::size_t>(k)];
          const double hj = 1e-4 * theta[static_cast<std::size_t>(j)];
          auto pp = t, pm = t, mp = t, mm = t;
          pp[static_cast<std::size_t>(j)] += hj; pp[static_cast<std::size_t>(k)] += hk;
          pm[static_cast<std::size_t>(j)] += hj; pm[static_cast<std::size_t>(k)] -= hk;
          mp[static_cast<std::size_t>(j)] -= hj; mp[static_cast<std::size_t>(k)] += hk;
          mm[static_cast<std::size_t>(j)] -= hj; mm[static_cast<std::size_t>(k)] -= hk;
          out.hessian(j, k) = out.hessian(k, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hj * hk);
        }
      }
      break;
    }
  }
  return out;
}

Dataset generate_data(const ModelSpec& model, std::span<const double> theta0, std::int64_t n, Rng& rng) {
  require_size(model, theta0);
  if (!model.in_interior(theta0)) throw DomainError("generate_data: theta0 must lie in the interior");
  if (n < 1) throw ArgumentError("generate_data: n must be >= 1");
  Dataset data;
  data.kind = model.kind;
  data.n = n;
  const auto nd = static_cast<double>(n);
  switch (model.kind) {
    case ModelKind::MultinomialConditional: {
      // Sequential conditional binomials: n_v ~ Bin(remaining, Z_v).
      std::int64_t remaining = n;
      for (int v = 0; v < model.dim(); ++v) {
        std::binomial_distribution<std::int64_t> bin(remaining, theta0[static_cast<std::size_t>(v)]);
        const std::int64_t c = bin(rng);
        data.counts.push_back(c);
        remaining -= c;
      }
      data.counts.push_back(remaining);
      break;
    }
    case ModelKind::NormalMeanVar: {
      const double mu = theta0[0], s2 = theta0[1];
      data.sum_y = nd * mu + std::sqrt(nd * s2) * standard_normal(rng);
      const double within = n > 1 ? s2 * 2.0 * gamma_variate(rng, 0.5 * (nd - 1.0), 1.0) : 0.0;
      data.sum_y2 = within + data.sum_y * data.sum_y / nd;
      break;
    }
    case ModelKind::GammaShapeRate: {
      const double a = theta0[0], b = theta0[1];
      for (std::int64_t i = 0; i < n; ++i) {
        const double ly = log_gamma_variate(rng, a, b);
        data.sum_log_y += ly;
        data.sum_y += std::exp(ly);
      }
      break;
    }
    case ModelKind::LinRegKnownVar: {
      const int p = model.covariates;
      const Eigen::Map<const Eigen::VectorXd> beta(theta0.data(), p);
      const double sigma = std::sqrt(model.noise_variance);
      if (n <= p) {
        data.xtx = Eigen::MatrixXd::Zero(p, p);
        data.xty = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd x(p);
        for (std::int64_t i = 0; i < n; ++i) {
          for (int j = 0; j < p; ++j) x[j] = standard_normal(rng);
          const double y = x.dot(beta) + sigma * standard_normal(rng);
          data.xtx += x * x.transpose();
          data.xty += x * y;
          data.yty += y * y;
        }
        break;
      }
      // Bartlett factor: X'X = A A' ~ Wishart_p(I, n).
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
      for (int i = 0; i < p; ++i) {
        a(i, i) = std::sqrt(2.0 * gamma_variate(rng, 0.5 * (nd - i), 1.0));
        for (int j = 0; j < i; ++j) a(i, j) = standard_normal(rng);
      }
      data.xtx = a * a.transpose();
      // X'e = sigma A z and ||P e||^2 = sigma^2 ||z||^2; the residual part is sigma^2 chi^2_{n-p}.
      Eigen::VectorXd z(p);
      for (int j = 0; j < p; ++j) z[j] = standard_normal(rng);
      const Eigen::VectorXd xte = sigma * (a * z);
      const double resid = n > p ? model.noise_variance * 2.0 * gamma_variate(rng, 0.5 * (nd - p), 1.0) : 0.0;
      data.xty = data.xtx * beta + xte;
      data.yty = beta.dot(data.xtx * beta) + 2.0 * beta.dot(xte) + model.noise_variance * z.squaredNorm() + resid;
      break;
    }
    case ModelKind::ExpPairCopula: {
      const PointMatrix u = model.pair_copula->sample(static_cast<std::size_t>(n), rng);
      data.pairs.resize(u.rows(), 2);
      for (Eigen::Index i = 0; i < u.rows(); ++i) {
        data.pairs(i, 0) = -std::log1p(-u(i, 0)) / theta0[0];
        data.pairs(i, 1) = -std::log1p(-u(i, 1)) / theta0[1];
      }
      break;
    }
  }
  return data;
}

std::pair<Eigen::VectorXd, Dataset> prior_predictive_generate(const ModelSpec& model, const CopulaPrior& design,
                                                              std::int64_t n, Rng& rng) {
  if (design.dim() != model.dim()) throw ArgumentError("design prior dimension does not match the model");
  const PointMatrix draw = design.sample(1, rng);
  Eigen::VectorXd theta0 = draw.row(0).transpose();
  Dataset data = generate_data(model, {theta0.data(), static_cast<std::size_t>(theta0.size())}, n, rng);
  return {std::move(theta0), std::move(data)};
}

Eigen::VectorXd regression_mle(const Dataset& data) {
  if (data.kind != ModelKind::LinRegKnownVar) throw ArgumentError("regression_mle: not a regression dataset");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(data.xtx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) throw SingularMatrixError("regression_mle: X'X is singular", 0.0);
  return ldlt.solve(data.xty);
}

}  // namespace copula_lab

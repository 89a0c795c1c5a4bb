#include "copula_lab/dvine.hpp"

#include <cmath>
#include <sstream>

#include "copula_lab/errors.hpp"

namespace copula_lab {

std::string VineEdge::label() const {
  std::ostringstream os;
  os << a + 1 << "," << b + 1 << "|";
  if (given.empty()) {
    os << "∅";
  } else {
    for (std::size_t k = 0; k < given.size(); ++k) os << (k ? "," : "") << given[k] + 1;
  }
  return os.str();
}

std::vector<VineEdge> enumerate_dvine_edges(int d) {
  if (d < 2) throw ArgumentError("enumerate_dvine_edges: d must be >= 2");
  std::vector<VineEdge> edges;
  edges.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
  for (int j = 1; j < d; ++j) {
    for (int i = 0; i + j < d; ++i) {
      VineEdge e;
      e.tree = j;
      e.a = i;
      e.b = i + j;
      for (int k = i + 1; k < i + j; ++k) e.given.push_back(k);
      edges.push_back(std::move(e));
    }
  }
  return edges;
}

DVine::DVine(int d) : dim_(d), edges_(enumerate_dvine_edges(d)) {}

DVine::DVine(int d, const std::vector<double>& taus) : DVine(d) {
  if (taus.size() != edges_.size())
    throw ArgumentError("DVine: expected " + std::to_string(edges_.size()) + " edge taus");
  for (std::size_t k = 0; k < taus.size(); ++k) set_tau(k, taus[k]);
}

void DVine::set_tau(std::size_t edge, double tau) {
  if (edge >= edges_.size()) throw ArgumentError("DVine: edge index out of range");
  if (!(tau > -1.0 && tau < 1.0)) throw ParameterError("DVine: edge tau must lie strictly inside (-1,1)");
  edges_[edge].tau = tau;
}

}  // namespace copula_lab

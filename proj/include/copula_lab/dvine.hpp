#pragma once

#include <string>
#include <vector>

namespace copula_lab {

/// Edge (a, b | given) of a D-vine. Variables are 0-based; labels are 1-based.
struct VineEdge {
  int tree = 1;                 // 1 .. d-1
  int a = 0;
  int b = 1;
  std::vector<int> given;       // a+1 .. b-1
  double tau = 0.0;
  std::string family;           // optional bivariate family tag

  /// "1,3|2", or "1,2|∅" for an empty conditioning set.
  std::string label() const;
};

/// Edges of the d-dimensional D-vine, tree by tree: tree j joins i and i+j given the
/// variables strictly between them. Throws ArgumentError when d < 2.
std::vector<VineEdge> enumerate_dvine_edges(int d);

/// D-vine structure carrying one Kendall's tau per edge.
class DVine {
 public:
  /// All edge taus zero.
  explicit DVine(int d);
  /// taus given in enumerate_dvine_edges order; each must lie strictly inside (-1, 1).
  DVine(int d, const std::vector<double>& taus);

  int dim() const { return dim_; }
  const std::vector<VineEdge>& edges() const { return edges_; }
  void set_tau(std::size_t edge, double tau);

 private:
  int dim_;
  std::vector<VineEdge> edges_;
};

}  // namespace copula_lab

#pragma once

#include <optional>
#include <vector>

#include "heatsum/errors.hpp"

namespace heatsum::oracle {

// Direct O(n) elimination for k independent tridiagonal chains coupled
// through a single hub unknown (the star-graph "arrowhead" pattern). Cells in
// a chain are ordered from the hub outward. When no hub is present the chains
// are solved independently by the Thomas algorithm.
//
// Unknown layout in rhs/solution vectors: [hub (if present), chain 0 cells,
// chain 1 cells, ...].
class ArrowheadSystem {
 public:
  struct Chain {
    std::vector<double> lower;  // lower[j] couples cell j to j-1; lower[0] unused
    std::vector<double> diag;
    std::vector<double> upper;  // upper[j] couples cell j to j+1; upper[n-1] unused
    double hub_col = 0.0;       // coefficient of the hub unknown in the cell-0 equation
    double hub_row = 0.0;       // coefficient of the cell-0 unknown in the hub equation
  };

  ArrowheadSystem(std::vector<Chain> chains, std::optional<double> hub_diag);

  int size() const { return size_; }
  bool has_hub() const { return hub_diag_.has_value(); }

  // Eliminates each chain once; subsequent solves are O(n) back/forward
  // sweeps. Requires (and relies on) diagonal dominance, which holds for
  // every (aI - sL) system assembled from a StarGrid.
  void factor();

  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  std::vector<Chain> chains_;
  std::optional<double> hub_diag_;
  int size_ = 0;
  bool factored_ = false;
  std::vector<std::vector<double>> cp_;  // scaled super-diagonals
  std::vector<std::vector<double>> dd_;  // pivots
  std::vector<std::vector<double>> z_;   // chain response to the hub coupling
  double schur_ = 0.0;
};

}  // namespace heatsum::oracle

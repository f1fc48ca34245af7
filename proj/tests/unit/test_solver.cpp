#include <cmath>
#include <vector>

#include "doctest.h"
#include "heatsum/solver.hpp"

using namespace heatsum;
using heatsum::oracle::ArrowheadSystem;

namespace {

// Dense Gaussian elimination with partial pivoting, the reference for the
// structured solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

struct Built {
  ArrowheadSystem sys;
  std::vector<std::vector<double>> dense;
};

// Deterministic diagonally dominant arrowhead test matrix.
Built make_system(int k, int n, bool hub) {
  std::vector<ArrowheadSystem::Chain> chains;
  int total = (hub ? 1 : 0) + k * n;
  std::vector<std::vector<double>> dense(total, std::vector<double>(total, 0.0));
  double hub_diag = 3.0;
  int pos = hub ? 1 : 0;
  for (int c = 0; c < k; ++c) {
    ArrowheadSystem::Chain ch;
    ch.lower.assign(n, 0.0);
    ch.diag.assign(n, 0.0);
    ch.upper.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double lo = (j > 0) ? -(0.3 + 0.01 * ((j + c) % 7)) : 0.0;
      double up = (j + 1 < n) ? -(0.4 + 0.02 * ((j + 2 * c) % 5)) : 0.0;
      double di = 2.0 + 0.05 * ((j + 3 * c) % 11);
      ch.lower[j] = lo;
      ch.diag[j] = di;
      ch.upper[j] = up;
      dense[pos + j][pos + j] = di;
      if (j > 0) dense[pos + j][pos + j - 1] = lo;
      if (j + 1 < n) dense[pos + j][pos + j + 1] = up;
    }
    if (hub) {
      ch.hub_col = -0.21 - 0.01 * c;
      ch.hub_row = -0.17 - 0.02 * c;
      dense[pos][0] = ch.hub_col;
      dense[0][pos] = ch.hub_row;
    }
    chains.push_back(ch);
    pos += n;
  }
  if (hub) dense[0][0] = hub_diag;
  return {ArrowheadSystem(std::move(chains),
                          hub ? std::optional<double>(hub_diag) : std::nullopt),
          std::move(dense)};
}

}  // namespace

TEST_CASE("arrowhead solve matches dense elimination") {
  for (bool hub : {true, false}) {
    for (int k : {1, 2, 3}) {
      auto built = make_system(k, 9, hub);
      built.sys.factor();
      std::vector<double> rhs(built.sys.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::sin(1.0 + 0.37 * i);
      auto x = built.sys.solve(rhs);
      auto ref = dense_solve(built.dense, rhs);
      for (std::size_t i = 0; i < rhs.size(); ++i)
        CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("arrowhead solve is reusable after one factorization") {
  auto built = make_system(3, 50, true);
  built.sys.factor();
  std::vector<double> e0(built.sys.size(), 0.0);
  e0[0] = 1.0;
  auto first = built.sys.solve(e0);
  auto second = built.sys.solve(first);
  auto ref = dense_solve(built.dense, first);
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(second[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("arrowhead rejects malformed input") {
  auto built = make_system(2, 4, true);
  CHECK_THROWS_AS(built.sys.solve(std::vector<double>(built.sys.size(), 0.0)), SolverError);
  built.sys.factor();
  CHECK_THROWS_AS(built.sys.solve(std::vector<double>(3, 0.0)), DomainError);
}

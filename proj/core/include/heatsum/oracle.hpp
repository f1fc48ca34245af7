#pragma once

#include <vector>

#include "heatsum/geometry.hpp"
#include "heatsum/solver.hpp"

namespace heatsum::oracle {

struct GridSpec {
  double r_max = 0.0;          // outer radius of every end
  int n_cells_per_end = 0;
  double spacing_ratio = 1.0;  // geometric cell-width ratio q in [1, 1.05]
  double t_max = 0.0;          // declared horizon; requires r_max >= 4*sqrt(t_max)
};

// Finite-volume discretization of k weighted half-lines glued at one center
// vertex. Cell 0 is the center (mass = center_mass); end i occupies indices
// [1 + i*n, 1 + (i+1)*n) ordered inward to outward. The generator L acts as
// (Lu)_j = sum_faces c (u_nb - u_j) / m_j, so m_j L_jk = m_k L_kj exactly and
// row sums vanish at interior cells and at the reflecting outer boundary.
struct StarGrid {
  geometry::SumSpec sum;
  GridSpec spec;
  std::vector<double> mass;                // size(); mass[0] = center_mass
  std::vector<double> radius;              // cell centers; radius[0] = 0
  std::vector<std::vector<double>> faces;  // per end, n+1 face radii, faces[i][0] = 0
  std::vector<std::vector<double>> cond;   // per end, n conductances; cond[i][0] joins the center

  int size() const { return 1 + sum.k() * spec.n_cells_per_end; }
  int center_index() const { return 0; }
  int index(int end, int local) const { return 1 + end * spec.n_cells_per_end + local; }
  // Cell of end `end` whose faces bracket the radius rho (clamped to the grid).
  int cell_at(int end, double rho) const;
  // Shifted coordinate |x| = rho + e of a cell.
  double abs_coordinate(int cell) const;
  int end_of(int cell) const;  // -1 for the center
};

StarGrid build_grid(const geometry::SumSpec& sum, const GridSpec& spec);

// Restriction of a solve: cells outside the region are absorbing (held at 0).
struct Omega {
  enum class Kind { Whole, End, CenterComplement, CenterBall };
  Kind kind = Kind::Whole;
  int end = -1;
  double ball_radius = 0.0;

  static Omega whole() { return {}; }
  static Omega end_only(int i) { return {Kind::End, i, 0.0}; }
  static Omega center_complement() { return {Kind::CenterComplement, -1, 0.0}; }
  static Omega center_ball(double radius) { return {Kind::CenterBall, -1, radius}; }
  bool contains_center() const {
    return kind == Kind::Whole || kind == Kind::CenterBall;
  }
};

// Trapezoidal (Crank-Nicolson) stepping with geometric step growth; the
// first smoothing_steps are implicit-Euler half-steps that damp the
// oscillatory transient of the delta initial condition.
struct SteppingConfig {
  double dt0 = 1e-3;
  double growth = 1.05;
  int smoothing_steps = 4;
  double positivity_tol = 1e-10;  // relative to the current max density
};

struct KernelSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> density;  // density[s][cell], zero outside omega
  std::vector<double> total_mass;            // sum_j density * m_j at each sample
};

struct ExitSeries {
  std::vector<double> times;
  std::vector<double> psi;   // 1 - remaining mass
  std::vector<double> dpsi;  // instantaneous absorbed flux
};

// p(t, x, .) from u(0) = delta_x / m_x; conservative on the whole grid.
KernelSeries heat_kernel(const StarGrid& grid, int source, const std::vector<double>& t_grid,
                         const SteppingConfig& stepping = {});

// Same solver with absorbing condition outside omega; p_Omega <= p pointwise.
KernelSeries dirichlet_kernel(const StarGrid& grid, const Omega& omega, int source,
                              const std::vector<double>& t_grid,
                              const SteppingConfig& stepping = {});

// psi_Omega(x, t) = P_x(tau_Omega <= t) and its time derivative. With
// record_steps the series is sampled at every solver step instead of t_grid
// (t_grid.back() still sets the horizon).
ExitSeries exit_probability(const StarGrid& grid, const Omega& omega, int source,
                            const std::vector<double>& t_grid,
                            const SteppingConfig& stepping = {}, bool record_steps = false);

struct ResolventSample {
  double lambda = 0.0;
  double gamma = 0.0;           // gamma_lambda at the center
  double gamma_dot = 0.0;       // -d gamma / d lambda at the center
  double gamma_ball = 0.0;      // Dirichlet variant on the ball A = {rho < r_probe}
  std::vector<double> phi;      // per end: Phi_lambda^{E_i} at the probe cell
  std::vector<double> psi_big;  // per end: Psi_lambda^{E_i} at the probe cell
};

// Direct structured solves of (lambda - L) u = f. Each lambda must satisfy
// the truncation floor lambda * r_max^2 >= 10.
std::vector<ResolventSample> resolvent(const StarGrid& grid,
                                       const std::vector<double>& lambda_grid,
                                       double r_probe);

// Dense generator matrix restricted to omega. Diagnostic for small grids;
// the production path never materializes it.
std::vector<std::vector<double>> dense_generator(const StarGrid& grid, const Omega& omega);

// Active cells of omega, in system order (center first when present).
std::vector<int> active_cells(const StarGrid& grid, const Omega& omega);

}  // namespace heatsum::oracle

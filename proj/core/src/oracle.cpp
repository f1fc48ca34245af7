#include "heatsum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heatsum::oracle {

namespace {

using geometry::volume_ball;
using geometry::weight_density;

struct ActiveLayout {
  bool hub = false;
  struct ChainPart {
    int end = 0;
    int count = 0;        // active cells, always starting at local 0
    bool truncated = false;  // absorbing face at local index `count`
  };
  std::vector<ChainPart> chains;
  int total = 0;
};

ActiveLayout make_layout(const StarGrid& grid, const Omega& omega) {
  const int n = grid.spec.n_cells_per_end;
  ActiveLayout lay;
  switch (omega.kind) {
    case Omega::Kind::Whole:
      lay.hub = true;
      for (int i = 0; i < grid.sum.k(); ++i) lay.chains.push_back({i, n, false});
      break;
    case Omega::Kind::End:
      if (omega.end < 0 || omega.end >= grid.sum.k())
        throw DomainError("omega end index out of range");
      lay.hub = false;
      lay.chains.push_back({omega.end, n, false});
      break;
    case Omega::Kind::CenterComplement:
      lay.hub = false;
      for (int i = 0; i < grid.sum.k(); ++i) lay.chains.push_back({i, n, false});
      break;
    case Omega::Kind::CenterBall: {
      lay.hub = true;
      for (int i = 0; i < grid.sum.k(); ++i) {
        int count = 0;
        while (count < n && grid.radius[grid.index(i, count)] < omega.ball_radius) ++count;
        if (count == 0)
          throw DomainError("center ball omega excludes every cell of an end");
        lay.chains.push_back({i, count, count < n});
      }
      break;
    }
  }
  lay.total = lay.hub ? 1 : 0;
  for (const auto& c : lay.chains) lay.total += c.count;
  return lay;
}

// System of (a*I - s*L) restricted to the active cells.
ArrowheadSystem assemble(const StarGrid& grid, const ActiveLayout& lay, double a, double s) {
  const int n = grid.spec.n_cells_per_end;
  std::vector<ArrowheadSystem::Chain> chains;
  double hub_diag = a;
  const double m0 = grid.mass[grid.center_index()];
  for (const auto& part : lay.chains) {
    ArrowheadSystem::Chain ch;
    ch.lower.assign(part.count, 0.0);
    ch.diag.assign(part.count, 0.0);
    ch.upper.assign(part.count, 0.0);
    for (int j = 0; j < part.count; ++j) {
      double m = grid.mass[grid.index(part.end, j)];
      double c_in = grid.cond[part.end][j];
      double c_out = (j + 1 < n) ? grid.cond[part.end][j + 1] : 0.0;
      double diag = a + s * c_in / m;
      if (j + 1 < n) diag += s * c_out / m;  // flux through the outer face, active or not
      ch.diag[j] = diag;
      if (j > 0) ch.lower[j] = -s * c_in / m;
      if (j + 1 < part.count) ch.upper[j] = -s * c_out / m;
    }
    if (lay.hub) {
      double c0 = grid.cond[part.end][0];
      ch.hub_col = -s * c0 / grid.mass[grid.index(part.end, 0)];
      ch.hub_row = -s * c0 / m0;
      hub_diag += s * c0 / m0;
    }
    chains.push_back(std::move(ch));
  }
  return ArrowheadSystem(std::move(chains),
                         lay.hub ? std::optional<double>(hub_diag) : std::nullopt);
}

// v = (a*I + s*L) u on the active cells, zero Dirichlet data outside.
std::vector<double> apply_shifted(const StarGrid& grid, const ActiveLayout& lay, double a,
                                  double s, const std::vector<double>& u) {
  const int n = grid.spec.n_cells_per_end;
  std::vector<double> v(u.size(), 0.0);
  int pos = lay.hub ? 1 : 0;
  double hub_flux = 0.0;
  double u_hub = lay.hub ? u[0] : 0.0;
  for (const auto& part : lay.chains) {
    for (int j = 0; j < part.count; ++j) {
      double m = grid.mass[grid.index(part.end, j)];
      double c_in = grid.cond[part.end][j];
      double c_out = (j + 1 < n) ? grid.cond[part.end][j + 1] : 0.0;
      double u_j = u[pos + j];
      double u_in = (j > 0) ? u[pos + j - 1] : u_hub;
      double u_out = (j + 1 < part.count) ? u[pos + j + 1] : 0.0;
      double flux = c_in * (u_in - u_j);
      if (j + 1 < n) flux += c_out * (u_out - u_j);
      v[pos + j] = a * u_j + s * flux / m;
      if (lay.hub && j == 0) hub_flux += c_in * (u_j - u_hub);
    }
    pos += part.count;
  }
  if (lay.hub) v[0] = a * u_hub + s * hub_flux / grid.mass[grid.center_index()];
  return v;
}

int system_position(const ActiveLayout& lay, const StarGrid& grid, int cell) {
  if (cell == grid.center_index()) {
    if (!lay.hub) return -1;
    return 0;
  }
  int pos = lay.hub ? 1 : 0;
  int end = grid.end_of(cell);
  int local = cell - grid.index(end, 0);
  for (const auto& part : lay.chains) {
    if (part.end == end) return (local < part.count) ? pos + local : -1;
    pos += part.count;
  }
  return -1;
}

double active_mass_sum(const StarGrid& grid, const ActiveLayout& lay,
                       const std::vector<double>& u) {
  double acc = lay.hub ? u[0] * grid.mass[grid.center_index()] : 0.0;
  int pos = lay.hub ? 1 : 0;
  for (const auto& part : lay.chains) {
    for (int j = 0; j < part.count; ++j)
      acc += u[pos + j] * grid.mass[grid.index(part.end, j)];
    pos += part.count;
  }
  return acc;
}

// Flux through every absorbing face; this is d psi / dt.
double absorbed_flux(const StarGrid& grid, const ActiveLayout& lay,
                     const std::vector<double>& u) {
  double flux = 0.0;
  int pos = lay.hub ? 1 : 0;
  for (const auto& part : lay.chains) {
    if (!lay.hub) flux += grid.cond[part.end][0] * u[pos];
    if (part.truncated) flux += grid.cond[part.end][part.count] * u[pos + part.count - 1];
    pos += part.count;
  }
  return flux;
}

void check_positivity(const std::vector<double>& u, double tol, double t, int step) {
  double umin = 0.0, umax = 0.0;
  for (double x : u) {
    umin = std::min(umin, x);
    umax = std::max(umax, x);
  }
  if (umin < -tol * std::max(umax, 1e-300)) {
    std::ostringstream msg;
    msg << "negative density beyond tolerance: min=" << umin << " max=" << umax << " at t=" << t
        << " (step " << step << ")";
    throw SolverError(msg.str());
  }
}

struct StepRecorder {
  const StarGrid& grid;
  const ActiveLayout& lay;
  KernelSeries* kernel = nullptr;
  ExitSeries* exit = nullptr;

  void record(double t, const std::vector<double>& u) {
    if (kernel) {
      kernel->times.push_back(t);
      std::vector<double> full(grid.size(), 0.0);
      int pos = lay.hub ? 1 : 0;
      if (lay.hub) full[grid.center_index()] = u[0];
      for (const auto& part : lay.chains) {
        for (int j = 0; j < part.count; ++j) full[grid.index(part.end, j)] = u[pos + j];
        pos += part.count;
      }
      kernel->density.push_back(std::move(full));
      kernel->total_mass.push_back(active_mass_sum(grid, lay, u));
    }
    if (exit) {
      exit->times.push_back(t);
      exit->psi.push_back(1.0 - active_mass_sum(grid, lay, u));
      exit->dpsi.push_back(absorbed_flux(grid, lay, u));
    }
  }
};

void run_diffusion(const StarGrid& grid, const Omega& omega, int source,
                   const std::vector<double>& t_grid, const SteppingConfig& stepping,
                   bool record_steps, StepRecorder& recorder) {
  if (t_grid.empty()) throw DomainError("empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] <= 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw DomainError("time grid must be positive and strictly increasing");
  }
  if (t_grid.back() > grid.spec.t_max * (1.0 + 1e-12))
    throw ConfigError("time grid exceeds the grid's declared t_max");
  if (!(stepping.dt0 > 0.0) || !(stepping.growth >= 1.0))
    throw ConfigError("bad stepping parameters");
  if (t_grid.front() < 4.0 * stepping.dt0)
    throw ConfigError("first sample time must exceed 4*dt0");

  ActiveLayout lay = make_layout(grid, omega);
  int src_pos = system_position(lay, grid, source);
  if (src_pos < 0) throw DomainError("source cell lies outside omega");

  std::vector<double> u(lay.total, 0.0);
  u[src_pos] = 1.0 / grid.mass[source];

  double t = 0.0;
  int step = 0;

  // Implicit-Euler startup damps the stiff modes excited by the delta.
  for (int s = 0; s < stepping.smoothing_steps; ++s) {
    double dt = 0.5 * stepping.dt0;
    ArrowheadSystem sys = assemble(grid, lay, 1.0, dt);
    sys.factor();
    u = sys.solve(u);
    t += dt;
    ++step;
  }

  double dt_nominal = stepping.dt0;
  std::size_t next = 0;
  while (next < t_grid.size()) {
    double target = t_grid[next];
    if (target - t <= 1e-12 * target) {
      recorder.record(record_steps ? t : target, u);
      ++next;
      continue;
    }
    double dt = std::min(dt_nominal, target - t);
    bool capped = dt < dt_nominal;
    ArrowheadSystem sys = assemble(grid, lay, 1.0, 0.5 * dt);
    sys.factor();
    std::vector<double> rhs = apply_shifted(grid, lay, 1.0, 0.5 * dt, u);
    u = sys.solve(rhs);
    t = capped ? target : t + dt;
    ++step;
    check_positivity(u, stepping.positivity_tol, t, step);
    if (record_steps) recorder.record(t, u);
    if (capped) {
      if (!record_steps) recorder.record(target, u);
      ++next;
    } else {
      dt_nominal *= stepping.growth;
    }
  }
}

}  // namespace

int StarGrid::cell_at(int end, double rho) const {
  if (end < 0 || end >= sum.k()) throw DomainError("cell_at: end index out of range");
  const auto& f = faces[end];
  auto it = std::upper_bound(f.begin(), f.end(), rho);
  int j = static_cast<int>(it - f.begin()) - 1;
  return index(end, std::clamp(j, 0, spec.n_cells_per_end - 1));
}

double StarGrid::abs_coordinate(int cell) const { return radius[cell] + geometry::kOffsetE; }

int StarGrid::end_of(int cell) const {
  if (cell == 0) return -1;
  return (cell - 1) / spec.n_cells_per_end;
}

StarGrid build_grid(const geometry::SumSpec& sum, const GridSpec& spec) {
  if (!(spec.r_max > 0.0)) throw ConfigError("grid r_max must be positive");
  if (spec.n_cells_per_end < 2) throw ConfigError("grid needs at least two cells per end");
  if (!(spec.spacing_ratio >= 1.0) || spec.spacing_ratio > 1.05)
    throw ConfigError("grid spacing ratio must lie in [1, 1.05]");
  if (!(spec.t_max > 0.0)) throw ConfigError("grid t_max must be positive");
  if (spec.r_max < 4.0 * std::sqrt(spec.t_max))
    throw ConfigError("boundary contamination: r_max must be >= 4*sqrt(t_max)");

  StarGrid grid;
  grid.sum = sum;
  grid.spec = spec;
  const int n = spec.n_cells_per_end;
  const int k = sum.k();
  grid.mass.assign(1 + k * n, 0.0);
  grid.radius.assign(1 + k * n, 0.0);
  grid.mass[0] = sum.center_mass;
  grid.faces.resize(k);
  grid.cond.resize(k);

  std::vector<double> f(n + 1, 0.0);
  const double q = spec.spacing_ratio;
  if (q == 1.0) {
    for (int j = 0; j <= n; ++j) f[j] = spec.r_max * j / n;
  } else {
    double w0 = spec.r_max * (q - 1.0) / (std::pow(q, n) - 1.0);
    double w = w0;
    for (int j = 1; j <= n; ++j) {
      f[j] = f[j - 1] + w;
      w *= q;
    }
    f[n] = spec.r_max;
  }

  for (int i = 0; i < k; ++i) {
    grid.faces[i] = f;
    grid.cond[i].assign(n, 0.0);
    double prev_center = 0.0;  // the hub sits at rho = 0
    for (int j = 0; j < n; ++j) {
      int g = grid.index(i, j);
      grid.radius[g] = 0.5 * (f[j] + f[j + 1]);
      grid.mass[g] = volume_ball(sum.ends[i], f[j + 1]) -
                     (j == 0 ? 0.0 : volume_ball(sum.ends[i], f[j]));
      double sigma = weight_density(sum.ends[i], f[j]);
      grid.cond[i][j] = sigma / (grid.radius[g] - prev_center);
      prev_center = grid.radius[g];
    }
  }
  return grid;
}

KernelSeries heat_kernel(const StarGrid& grid, int source, const std::vector<double>& t_grid,
                         const SteppingConfig& stepping) {
  return dirichlet_kernel(grid, Omega::whole(), source, t_grid, stepping);
}

KernelSeries dirichlet_kernel(const StarGrid& grid, const Omega& omega, int source,
                              const std::vector<double>& t_grid,
                              const SteppingConfig& stepping) {
  KernelSeries series;
  ActiveLayout lay = make_layout(grid, omega);
  StepRecorder rec{grid, lay, &series, nullptr};
  run_diffusion(grid, omega, source, t_grid, stepping, false, rec);
  return series;
}

ExitSeries exit_probability(const StarGrid& grid, const Omega& omega, int source,
                            const std::vector<double>& t_grid, const SteppingConfig& stepping,
                            bool record_steps) {
  if (omega.kind == Omega::Kind::Whole)
    throw DomainError("exit probability needs an absorbing omega");
  ExitSeries series;
  ActiveLayout lay = make_layout(grid, omega);
  StepRecorder rec{grid, lay, nullptr, &series};
  run_diffusion(grid, omega, source, t_grid, stepping, record_steps, rec);
  return series;
}

std::vector<ResolventSample> resolvent(const StarGrid& grid,
                                       const std::vector<double>& lambda_grid,
                                       double r_probe) {
  const double floor = 10.0 / (grid.spec.r_max * grid.spec.r_max);
  std::vector<ResolventSample> out;
  ActiveLayout whole = make_layout(grid, Omega::whole());
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0)) throw DomainError("resolvent needs lambda > 0");
    if (lambda < floor * (1.0 - 1e-9))
      throw DomainError("truncation contamination: lambda * r_max^2 must be >= 10");
    ResolventSample s;
    s.lambda = lambda;

    ArrowheadSystem sys = assemble(grid, whole, lambda, 1.0);
    sys.factor();
    std::vector<double> rhs(whole.total, 0.0);
    rhs[0] = 1.0;  // indicator of the center cell
    std::vector<double> gamma = sys.solve(rhs);
    std::vector<double> gamma_dot = sys.solve(gamma);
    s.gamma = gamma[0];
    s.gamma_dot = gamma_dot[0];

    for (int i = 0; i < grid.sum.k(); ++i) {
      ActiveLayout lay = make_layout(grid, Omega::end_only(i));
      ArrowheadSystem chain = assemble(grid, lay, lambda, 1.0);
      chain.factor();
      std::vector<double> ones(lay.total, lambda);
      std::vector<double> phi = chain.solve(ones);
      std::vector<double> resid(lay.total, 0.0);
      for (int j = 0; j < lay.total; ++j) resid[j] = 1.0 - phi[j];
      std::vector<double> psi = chain.solve(resid);
      int probe_local = grid.cell_at(i, r_probe) - grid.index(i, 0);
      s.phi.push_back(phi[probe_local]);
      s.psi_big.push_back(psi[probe_local]);
    }

    ActiveLayout ball = make_layout(grid, Omega::center_ball(r_probe));
    ArrowheadSystem ball_sys = assemble(grid, ball, lambda, 1.0);
    ball_sys.factor();
    std::vector<double> ball_rhs(ball.total, 0.0);
    ball_rhs[0] = 1.0;
    s.gamma_ball = ball_sys.solve(ball_rhs)[0];

    out.push_back(std::move(s));
  }
  return out;
}

std::vector<int> active_cells(const StarGrid& grid, const Omega& omega) {
  ActiveLayout lay = make_layout(grid, omega);
  std::vector<int> cells;
  if (lay.hub) cells.push_back(grid.center_index());
  for (const auto& part : lay.chains)
    for (int j = 0; j < part.count; ++j) cells.push_back(grid.index(part.end, j));
  return cells;
}

std::vector<std::vector<double>> dense_generator(const StarGrid& grid, const Omega& omega) {
  ActiveLayout lay = make_layout(grid, omega);
  std::vector<int> cells = active_cells(grid, omega);
  int m = static_cast<int>(cells.size());
  // L = ((0*I - (-1)*L)); reuse the assembler by reading coefficients off
  // matvec columns of (I - s L) with s = -1 ... simpler: assemble directly.
  std::vector<std::vector<double>> L(m, std::vector<double>(m, 0.0));
  const int n = grid.spec.n_cells_per_end;
  auto pos_of = [&](int cell) { return system_position(lay, grid, cell); };
  for (int p = 0; p < m; ++p) {
    int cell = cells[p];
    double mass = grid.mass[cell];
    if (cell == grid.center_index()) {
      for (int i = 0; i < grid.sum.k(); ++i) {
        double c = grid.cond[i][0];
        int nb = pos_of(grid.index(i, 0));
        L[p][p] -= c / mass;
        if (nb >= 0) L[p][nb] += c / mass;
      }
      continue;
    }
    int end = grid.end_of(cell);
    int local = cell - grid.index(end, 0);
    double c_in = grid.cond[end][local];
    int inner = (local == 0) ? grid.center_index() : grid.index(end, local - 1);
    L[p][p] -= c_in / mass;
    int nb = pos_of(inner);
    if (nb >= 0) L[p][nb] += c_in / mass;
    if (local + 1 < n) {
      double c_out = grid.cond[end][local + 1];
      L[p][p] -= c_out / mass;
      int outer = pos_of(grid.index(end, local + 1));
      if (outer >= 0) L[p][outer] += c_out / mass;
    }
  }
  return L;
}

}  // namespace heatsum::oracle

#include "heatsum/solver.hpp"

#include <cmath>

namespace heatsum::oracle {

ArrowheadSystem::ArrowheadSystem(std::vector<Chain> chains, std::optional<double> hub_diag)
    : chains_(std::move(chains)), hub_diag_(hub_diag) {
  size_ = hub_diag_.has_value() ? 1 : 0;
  for (const auto& c : chains_) {
    if (c.diag.empty() || c.diag.size() != c.lower.size() || c.diag.size() != c.upper.size())
      throw DomainError("arrowhead chain arrays must be nonempty and equally sized");
    size_ += static_cast<int>(c.diag.size());
  }
  if (!hub_diag_.has_value()) {
    for (const auto& c : chains_)
      if (c.hub_col != 0.0 || c.hub_row != 0.0)
        throw DomainError("hub coupling given but no hub unknown present");
  }
}

void ArrowheadSystem::factor() {
  cp_.assign(chains_.size(), {});
  dd_.assign(chains_.size(), {});
  z_.assign(chains_.size(), {});
  double schur = hub_diag_.value_or(1.0);
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    const Chain& ch = chains_[c];
    std::size_t n = ch.diag.size();
    auto& cp = cp_[c];
    auto& dd = dd_[c];
    cp.assign(n, 0.0);
    dd.assign(n, 0.0);
    dd[0] = ch.diag[0];
    if (dd[0] == 0.0) throw SolverError("zero pivot in chain elimination");
    cp[0] = n > 1 ? ch.upper[0] / dd[0] : 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      dd[j] = ch.diag[j] - ch.lower[j] * cp[j - 1];
      if (dd[j] == 0.0) throw SolverError("zero pivot in chain elimination");
      if (j + 1 < n) cp[j] = ch.upper[j] / dd[j];
    }
    if (hub_diag_.has_value()) {
      // z = T^{-1} (hub_col * e_0); only z[0] enters the Schur complement but
      // the full vector is needed to update the chain after the hub solve.
      auto& z = z_[c];
      z.assign(n, 0.0);
      z[0] = ch.hub_col / dd[0];
      for (std::size_t j = 1; j < n; ++j) z[j] = (-ch.lower[j] * z[j - 1]) / dd[j];
      for (std::size_t j = n - 1; j-- > 0;) z[j] -= cp[j] * z[j + 1];
      schur -= ch.hub_row * z[0];
    }
  }
  if (hub_diag_.has_value()) {
    if (schur == 0.0) throw SolverError("singular hub Schur complement");
    schur_ = schur;
  }
  factored_ = true;
}

std::vector<double> ArrowheadSystem::solve(const std::vector<double>& rhs) const {
  if (!factored_) throw SolverError("arrowhead system used before factor()");
  if (static_cast<int>(rhs.size()) != size_)
    throw DomainError("rhs size does not match the system");
  std::vector<double> x(rhs.size(), 0.0);
  std::size_t offset = hub_diag_.has_value() ? 1 : 0;

  double hub_acc = hub_diag_.has_value() ? rhs[0] : 0.0;
  std::size_t pos = offset;
  // Forward/backward sweeps per chain; with a hub, accumulate the Schur rhs.
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    const Chain& ch = chains_[c];
    std::size_t n = ch.diag.size();
    double* w = x.data() + pos;
    const double* r = rhs.data() + pos;
    w[0] = r[0] / dd_[c][0];
    for (std::size_t j = 1; j < n; ++j) w[j] = (r[j] - ch.lower[j] * w[j - 1]) / dd_[c][j];
    for (std::size_t j = n - 1; j-- > 0;) w[j] -= cp_[c][j] * w[j + 1];
    if (hub_diag_.has_value()) hub_acc -= ch.hub_row * w[0];
    pos += n;
  }
  if (hub_diag_.has_value()) {
    double hub = hub_acc / schur_;
    x[0] = hub;
    pos = offset;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      std::size_t n = chains_[c].diag.size();
      for (std::size_t j = 0; j < n; ++j) x[pos + j] -= z_[c][j] * hub;
      pos += n;
    }
  }
  return x;
}

}  // namespace heatsum::oracle

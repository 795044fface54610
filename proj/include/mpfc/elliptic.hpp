#ifndef MPFC_ELLIPTIC_HPP
#define MPFC_ELLIPTIC_HPP

#include <cmath>
#include <string>
#include <vector>

#include "mpfc/errors.hpp"
#include "mpfc/grid.hpp"
#include "mpfc/transfer.hpp"

namespace mpfc {

struct EllipticConfig {
  double rel_tol = 1e-10;  // in (0,1), relative to ||f||_2
  int max_iters = 200;     // V-cycle budget
};

namespace detail {

struct PoissonLevel {
  explicit PoissonLevel(const GridSpec& g) : spec(g), u(g), rhs(g), res(g) {}
  GridSpec spec;
  CellField u, rhs, res;
};

inline constexpr int kPoissonCoarsestDim = 4;
inline constexpr int kPoissonCoarsePasses = 50;

// One red-black Gauss-Seidel pass for -lap(u) = rhs.  Ghosts are
// refreshed between colors; boundary ghosts lag by one color sweep,
// which leaves the sweep convergent under either boundary class.
inline void poisson_rbgs_pass(PoissonLevel& lv) {
  const int m = lv.spec.m, n = lv.spec.n;
  const double h2 = lv.spec.h * lv.spec.h;
  for (int color = 0; color < 2; ++color) {
    for (int j = 1; j <= n; ++j) {
      const double* rs = lv.rhs.row(j);
      const double* us = lv.u.row(j - 1);
      double* uc = lv.u.row(j);
      const double* un = lv.u.row(j + 1);
      for (int i = 1 + ((j + color) & 1); i <= m; i += 2)
        uc[i] = 0.25 * (uc[i - 1] + uc[i + 1] + us[i] + un[i] + h2 * rs[i]);
    }
    fill_ghosts(lv.u);
  }
}

inline void poisson_residual(PoissonLevel& lv) {
  const int m = lv.spec.m, n = lv.spec.n;
  const double inv_h = 1.0 / lv.spec.h;
  for (int j = 1; j <= n; ++j) {
    const double* us = lv.u.row(j - 1);
    const double* uc = lv.u.row(j);
    const double* un = lv.u.row(j + 1);
    const double* rs = lv.rhs.row(j);
    double* re = lv.res.row(j);
    for (int i = 1; i <= m; ++i) {
      const double lap =
          ((uc[i + 1] - uc[i]) * inv_h - (uc[i] - uc[i - 1]) * inv_h) * inv_h +
          ((un[i] - uc[i]) * inv_h - (uc[i] - us[i]) * inv_h) * inv_h;
      re[i] = rs[i] + lap;
    }
  }
}

inline void subtract_mean(CellField& f) {
  const double mu = mean(f);
  const int m = f.m(), n = f.n();
  for (int j = 1; j <= n; ++j) {
    double* fr = f.row(j);
    for (int i = 1; i <= m; ++i) fr[i] -= mu;
  }
  fill_ghosts(f);
}

inline void poisson_vcycle(std::vector<PoissonLevel>& levels,
                           std::size_t ell) {
  PoissonLevel& lv = levels[ell];
  if (ell + 1 == levels.size()) {
    for (int p = 0; p < kPoissonCoarsePasses; ++p) poisson_rbgs_pass(lv);
    subtract_mean(lv.u);  // pin the null space on the singular coarse solve
    return;
  }
  poisson_rbgs_pass(lv);
  poisson_rbgs_pass(lv);
  poisson_residual(lv);
  PoissonLevel& cv = levels[ell + 1];
  restrict_into(lv.res, cv.rhs);
  cv.u.fill(0.0);
  poisson_vcycle(levels, ell + 1);
  prolong_add_into(cv.u, lv.u);
  poisson_rbgs_pass(lv);
  poisson_rbgs_pass(lv);
}

}  // namespace detail

/// Solves -lap(psi) = f for the mean-zero psi under the grid's boundary
/// tags, to ||lap(psi) + f||_2 <= rel_tol * ||f||_2.  The input must be
/// mean zero up to 1e-12 * rms(f); the tiny remainder is subtracted.
inline CellField inv_laplacian(const CellField& f,
                               const EllipticConfig& cfg = {}) {
  const GridSpec& g = f.spec();
  const double nf = norm2(f);
  CellField psi(g);
  if (nf == 0.0) return psi;

  const double mu = mean(f);
  const double rms = nf / std::sqrt(g.area());
  if (std::abs(mu) > 1e-12 * rms)
    throw NonZeroMean("inv_laplacian: input mean " + std::to_string(mu) +
                      " exceeds 1e-12 * rms " + std::to_string(rms));

  std::vector<detail::PoissonLevel> levels;
  levels.emplace_back(g);
  while (can_coarsen(levels.back().spec, detail::kPoissonCoarsestDim))
    levels.emplace_back(coarsen_spec(levels.back().spec));

  detail::PoissonLevel& fine = levels.front();
  const int m = g.m, n = g.n;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    double* rr = fine.rhs.row(j);
    for (int i = 1; i <= m; ++i) rr[i] = fr[i] - mu;
  }
  fill_ghosts(fine.rhs);
  fine.u.fill(0.0);

  const double target = cfg.rel_tol * nf;
  std::vector<double> history;
  for (int cycle = 0; cycle <= cfg.max_iters; ++cycle) {
    detail::poisson_residual(fine);
    const double rn = norm2(fine.res);
    history.push_back(rn);
    if (rn <= target) {
      detail::subtract_mean(fine.u);
      return fine.u;
    }
    if (cycle == cfg.max_iters) break;
    detail::poisson_vcycle(levels, 0);
    detail::subtract_mean(fine.u);
  }
  throw NoConvergence("inv_laplacian: residual " +
                          std::to_string(history.back()) + " above target " +
                          std::to_string(target) + " after " +
                          std::to_string(cfg.max_iters) + " V-cycles",
                      history);
}

/// Discrete H^{-1} inner product on mean-zero fields,
/// h^2 <f||g>_{-1} = inner_edge(grad psi_f, grad psi_g).
inline double hminus_inner(const CellField& f, const CellField& g,
                           const EllipticConfig& cfg = {}) {
  if (!f.same_grid(g)) throw GridMismatch("hminus_inner: grids differ");
  const CellField psi_f = inv_laplacian(f, cfg);
  const CellField psi_g = inv_laplacian(g, cfg);
  auto [fx, fy] = gradient(psi_f);
  auto [gx, gy] = gradient(psi_g);
  return inner_edge(fx, gx, fy, gy);
}

inline double hminus_norm(const CellField& f, const EllipticConfig& cfg = {}) {
  const CellField psi = inv_laplacian(f, cfg);
  auto [gx, gy] = gradient(psi);
  return std::sqrt(std::max(0.0, inner_edge(gx, gx, gy, gy)));
}

}  // namespace mpfc

#endif  // MPFC_ELLIPTIC_HPP

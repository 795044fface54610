#ifndef MPFC_GRID_HPP
#define MPFC_GRID_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mpfc/errors.hpp"

namespace mpfc {

enum class Bc { Periodic, Neumann };

/// Uniform cell-centered grid on (0, m*h) x (0, n*h) with per-axis
/// boundary-condition tags.  Cell centers sit at p_r = (r - 1/2) h.
struct GridSpec {
  int m = 0;
  int n = 0;
  double h = 0.0;
  Bc bc_x = Bc::Periodic;
  Bc bc_y = Bc::Periodic;

  double lx() const { return m * h; }
  double ly() const { return n * h; }
  double area() const { return lx() * ly(); }
  double cell_x(int i) const { return (i - 0.5) * h; }
  double cell_y(int j) const { return (j - 0.5) * h; }

  bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int m, int n, double h, Bc bc_x = Bc::Periodic,
                          Bc bc_y = Bc::Periodic) {
  if (m < 2 || n < 2) throw ConfigError("grid needs m >= 2 and n >= 2");
  if (!(h > 0.0)) throw ConfigError("grid needs h > 0");
  return GridSpec{m, n, h, bc_x, bc_y};
}

/// Cell-centered scalar grid function with a one-cell ghost ring.
/// Interior indices run i = 1..m, j = 1..n; the ring (i = 0, m+1 and
/// j = 0, n+1) is set by fill_ghosts according to the axis tags.
class CellField {
 public:
  CellField() = default;
  explicit CellField(const GridSpec& spec, double value = 0.0)
      : spec_(spec),
        data_(static_cast<std::size_t>(spec.m + 2) * (spec.n + 2), value) {}

  const GridSpec& spec() const { return spec_; }
  int m() const { return spec_.m; }
  int n() const { return spec_.n; }
  double h() const { return spec_.h; }

  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  double* row(int j) { return data_.data() + idx(0, j); }
  const double* row(int j) const { return data_.data() + idx(0, j); }

  void fill(double value) { data_.assign(data_.size(), value); }

  bool same_grid(const CellField& other) const { return spec_ == other.spec_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * (spec_.m + 2) + i;
  }

  GridSpec spec_;
  std::vector<double> data_;
};

/// East-west edge values u(i+1/2, j) for i = 0..m, j = 1..n.
class EdgeFieldEW {
 public:
  EdgeFieldEW() = default;
  explicit EdgeFieldEW(const GridSpec& spec, double value = 0.0)
      : spec_(spec),
        data_(static_cast<std::size_t>(spec.m + 1) * spec.n, value) {}

  const GridSpec& spec() const { return spec_; }
  double& at(int i, int j) { return data_[idx(i, j)]; }
  double at(int i, int j) const { return data_[idx(i, j)]; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * (spec_.m + 1) + i;
  }
  GridSpec spec_;
  std::vector<double> data_;
};

/// North-south edge values v(i, j+1/2) for i = 1..m, j = 0..n.
class EdgeFieldNS {
 public:
  EdgeFieldNS() = default;
  explicit EdgeFieldNS(const GridSpec& spec, double value = 0.0)
      : spec_(spec),
        data_(static_cast<std::size_t>(spec.m) * (spec.n + 1), value) {}

  const GridSpec& spec() const { return spec_; }
  double& at(int i, int j) { return data_[idx(i, j)]; }
  double at(int i, int j) const { return data_[idx(i, j)]; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * spec_.m + (i - 1);
  }
  GridSpec spec_;
  std::vector<double> data_;
};

/// Sets the ghost ring so the per-axis boundary identities hold.  The
/// y rule is applied over i = 1..m first, then the x rule over the
/// extended range j = 0..n+1, which fixes the corners.
inline void fill_ghosts(CellField& f) {
  const int m = f.m(), n = f.n();
  const GridSpec& g = f.spec();
  if (g.bc_y == Bc::Periodic) {
    for (int i = 1; i <= m; ++i) {
      f(i, 0) = f(i, n);
      f(i, n + 1) = f(i, 1);
    }
  } else {
    for (int i = 1; i <= m; ++i) {
      f(i, 0) = f(i, 1);
      f(i, n + 1) = f(i, n);
    }
  }
  if (g.bc_x == Bc::Periodic) {
    for (int j = 0; j <= n + 1; ++j) {
      f(0, j) = f(m, j);
      f(m + 1, j) = f(1, j);
    }
  } else {
    for (int j = 0; j <= n + 1; ++j) {
      f(0, j) = f(1, j);
      f(m + 1, j) = f(m, j);
    }
  }
}

/// 5-point Laplacian, written in flux-difference form so that
/// edge_divergence(gradient(f)) reproduces it bit for bit.  Ghosts of
/// the result are filled (kappa and mu are grid functions of the same
/// boundary class as phi).
inline void laplacian_into(const CellField& f, CellField& out) {
  const int m = f.m(), n = f.n();
  const double inv_h = 1.0 / f.h();
  for (int j = 1; j <= n; ++j) {
    const double* fs = f.row(j - 1);
    const double* fc = f.row(j);
    const double* fn = f.row(j + 1);
    double* o = out.row(j);
    for (int i = 1; i <= m; ++i) {
      const double gxe = (fc[i + 1] - fc[i]) * inv_h;
      const double gxw = (fc[i] - fc[i - 1]) * inv_h;
      const double gyn = (fn[i] - fc[i]) * inv_h;
      const double gys = (fc[i] - fs[i]) * inv_h;
      o[i] = (gxe - gxw) * inv_h + (gyn - gys) * inv_h;
    }
  }
  fill_ghosts(out);
}

inline CellField laplacian(const CellField& f) {
  CellField out(f.spec());
  laplacian_into(f, out);
  return out;
}

/// Center-to-edge differences (D_x, D_y): the discrete gradient.
inline void gradient_into(const CellField& f, EdgeFieldEW& gx,
                          EdgeFieldNS& gy) {
  const int m = f.m(), n = f.n();
  const double inv_h = 1.0 / f.h();
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= m; ++i) gx.at(i, j) = (f(i + 1, j) - f(i, j)) * inv_h;
  for (int j = 0; j <= n; ++j)
    for (int i = 1; i <= m; ++i) gy.at(i, j) = (f(i, j + 1) - f(i, j)) * inv_h;
}

inline std::pair<EdgeFieldEW, EdgeFieldNS> gradient(const CellField& f) {
  EdgeFieldEW gx(f.spec());
  EdgeFieldNS gy(f.spec());
  gradient_into(f, gx, gy);
  return {std::move(gx), std::move(gy)};
}

/// Center-to-edge averages (A_x, A_y).
inline std::pair<EdgeFieldEW, EdgeFieldNS> average_edge(const CellField& f) {
  const int m = f.m(), n = f.n();
  EdgeFieldEW ax(f.spec());
  EdgeFieldNS ay(f.spec());
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= m; ++i) ax.at(i, j) = 0.5 * (f(i + 1, j) + f(i, j));
  for (int j = 0; j <= n; ++j)
    for (int i = 1; i <= m; ++i) ay.at(i, j) = 0.5 * (f(i, j + 1) + f(i, j));
  return {std::move(ax), std::move(ay)};
}

/// Edge-to-center differences (d_x u + d_y v).
inline void edge_divergence_into(const EdgeFieldEW& u, const EdgeFieldNS& v,
                                 CellField& out) {
  if (!(u.spec() == v.spec()))
    throw GridMismatch("edge_divergence: edge fields on different grids");
  const int m = out.m(), n = out.n();
  const double inv_h = 1.0 / out.h();
  for (int j = 1; j <= n; ++j)
    for (int i = 1; i <= m; ++i)
      out(i, j) = (u.at(i, j) - u.at(i - 1, j)) * inv_h +
                  (v.at(i, j) - v.at(i, j - 1)) * inv_h;
  fill_ghosts(out);
}

inline CellField edge_divergence(const EdgeFieldEW& u, const EdgeFieldNS& v) {
  CellField out(u.spec());
  edge_divergence_into(u, v, out);
  return out;
}

/// Weighted cell inner product h^2 <f||g> over the interior.  Summation
/// order is fixed (j outer, i inner) for reproducibility.
inline double inner_cell(const CellField& f, const CellField& g) {
  if (!f.same_grid(g)) throw GridMismatch("inner_cell: grids differ");
  const int m = f.m(), n = f.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    const double* gr = g.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) row += fr[i] * gr[i];
    total += row;
  }
  return f.h() * f.h() * total;
}

/// Weighted edge inner product h^2 ([u1||u2]_ew + [v1||v2]_ns).  The two
/// boundary edges on each axis carry weight 1/2, which makes the discrete
/// summation-by-parts and Green identities exact under either boundary
/// class (under periodicity the first and last edge coincide, so the two
/// halves count that edge once).
inline double inner_edge(const EdgeFieldEW& u1, const EdgeFieldEW& u2,
                         const EdgeFieldNS& v1, const EdgeFieldNS& v2) {
  if (!(u1.spec() == u2.spec()) || !(v1.spec() == v2.spec()) ||
      !(u1.spec() == v1.spec()))
    throw GridMismatch("inner_edge: grids differ");
  const GridSpec& g = u1.spec();
  const int m = g.m, n = g.n;
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    double row = 0.5 * u1.at(0, j) * u2.at(0, j);
    for (int i = 1; i < m; ++i) row += u1.at(i, j) * u2.at(i, j);
    row += 0.5 * u1.at(m, j) * u2.at(m, j);
    total += row;
  }
  for (int j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
    double row = 0.0;
    for (int i = 1; i <= m; ++i) row += v1.at(i, j) * v2.at(i, j);
    total += w * row;
  }
  return g.h * g.h * total;
}

inline double norm2(const CellField& f) {
  const int m = f.m(), n = f.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) row += fr[i] * fr[i];
    total += row;
  }
  return std::sqrt(f.h() * f.h() * total);
}

inline double norm4(const CellField& f) {
  const int m = f.m(), n = f.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) {
      const double sq = fr[i] * fr[i];
      row += sq * sq;
    }
    total += row;
  }
  return std::pow(f.h() * f.h() * total, 0.25);
}

inline double norm_inf(const CellField& f) {
  const int m = f.m(), n = f.n();
  double best = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    for (int i = 1; i <= m; ++i) best = std::max(best, std::abs(fr[i]));
  }
  return best;
}

/// || grad_h f ||_2 computed through the weighted edge inner product.
/// Requires filled ghosts.
inline double grad_norm2(const CellField& f) {
  auto [gx, gy] = gradient(f);
  return std::sqrt(std::max(0.0, inner_edge(gx, gx, gy, gy)));
}

inline double mean(const CellField& f) {
  const int m = f.m(), n = f.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) row += fr[i];
    total += row;
  }
  return total / (static_cast<double>(m) * n);
}

}  // namespace mpfc

#endif  // MPFC_GRID_HPP

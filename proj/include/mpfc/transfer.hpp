#ifndef MPFC_TRANSFER_HPP
#define MPFC_TRANSFER_HPP

#include "mpfc/grid.hpp"

namespace mpfc {

inline bool can_coarsen(const GridSpec& g, int coarsest_dim) {
  return g.m % 2 == 0 && g.n % 2 == 0 && g.m / 2 >= coarsest_dim &&
         g.n / 2 >= coarsest_dim;
}

inline GridSpec coarsen_spec(const GridSpec& g) {
  return GridSpec{g.m / 2, g.n / 2, 2.0 * g.h, g.bc_x, g.bc_y};
}

/// Cell-centered full weighting: each coarse cell is the mean of its
/// four fine children.  Preserves the field mean exactly up to rounding.
inline void restrict_into(const CellField& fine, CellField& coarse) {
  const int mc = coarse.m(), nc = coarse.n();
  for (int J = 1; J <= nc; ++J) {
    const double* lo = fine.row(2 * J - 1);
    const double* hi = fine.row(2 * J);
    double* c = coarse.row(J);
    for (int I = 1; I <= mc; ++I) {
      const int i = 2 * I - 1;
      c[I] = 0.25 * (lo[i] + lo[i + 1] + hi[i] + hi[i + 1]);
    }
  }
  fill_ghosts(coarse);
}

inline CellField restrict_field(const CellField& fine) {
  CellField coarse(coarsen_spec(fine.spec()));
  restrict_into(fine, coarse);
  return coarse;
}

namespace detail {

// Bilinear cell-centered interpolation: a fine cell sits a quarter cell
// off its parent's center, so the parent weighs 3/4 and the coarse
// neighbor on the offset side 1/4, per axis.  Coarse ghosts must be
// filled; they supply the boundary neighbors.
template <bool Add>
inline void prolong_impl(const CellField& coarse, CellField& fine) {
  const int mf = fine.m(), nf = fine.n();
  for (int j = 1; j <= nf; ++j) {
    const int J = (j + 1) / 2;
    const int Jn = (j % 2 == 1) ? J - 1 : J + 1;
    for (int i = 1; i <= mf; ++i) {
      const int I = (i + 1) / 2;
      const int In = (i % 2 == 1) ? I - 1 : I + 1;
      const double v = (9.0 * coarse(I, J) + 3.0 * coarse(In, J) +
                        3.0 * coarse(I, Jn) + coarse(In, Jn)) /
                       16.0;
      if constexpr (Add)
        fine(i, j) += v;
      else
        fine(i, j) = v;
    }
  }
  fill_ghosts(fine);
}

}  // namespace detail

inline void prolong_into(const CellField& coarse, CellField& fine) {
  detail::prolong_impl<false>(coarse, fine);
}

inline void prolong_add_into(const CellField& coarse, CellField& fine) {
  detail::prolong_impl<true>(coarse, fine);
}

inline CellField prolong_field(const CellField& coarse,
                               const GridSpec& fine_spec) {
  CellField fine(fine_spec);
  prolong_into(coarse, fine);
  return fine;
}

}  // namespace mpfc

#endif  // MPFC_TRANSFER_HPP

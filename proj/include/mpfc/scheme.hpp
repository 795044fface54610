#ifndef MPFC_SCHEME_HPP
#define MPFC_SCHEME_HPP

#include <utility>

#include "mpfc/grid.hpp"
#include "mpfc/model.hpp"

namespace mpfc {

/// The nonlinear system N(u) = S advanced once per time step, with
/// u = (phi, mu, kappa).  Everything explicit is folded into the three
/// source fields; phi_k (and the pin weight) stay frozen inside N.
///
/// First order:
///   N1 = phi - a lap(mu),                      a = s M / (beta + 1/s)
///   N2 = mu - phi^3 - alpha phi - lap(kappa)   (- 2 w phi when pinned)
///   N3 = kappa - lap(phi)
///   S1 = phi^k + psi^k / (beta + 1/s),  S2 = 2 lap(phi^k)  (- 2 w target),
///   S3 = 0
///
/// Second order:
///   N1 = phi - a lap(mu),                      a = s M / (beta + 2/s)
///   N2 = mu - chi(phi, phi^k) (phi + phi^k)/2 - (alpha/2) phi
///        - lap(kappa)                          (- w phi when pinned)
///   N3 = kappa - lap(phi)/2
///   S1 = phi^k + 2 psi^k / (beta + 2/s)
///   S2 = (alpha/2) phi^k + 2 lap((3 phi^k - phi^{k-1})/2)
///        (+ w (phi^k - 2 target))
///   S3 = lap(phi^k)/2
/// with chi(a, b) = (a^2 + b^2)/2.  The pin terms implement
/// mu_tilde = mu + 2 w (phi_implicit - target), the implicit density
/// penalty; its phi part sits inside N so the smoother diagonal grows.
struct NonlinearSystem {
  SchemeTag tag = SchemeTag::FirstOrder;
  GridSpec spec;
  Params params;
  double a = 0.0;  // Laplacian coupling coefficient of N1
  CellField phi_k;
  CellField s1, s2, s3;
  bool pinned = false;
  CellField pin_w;
  CellField pin_target;
};

namespace detail {

inline CellField scaled_laplacian(const CellField& f, double c) {
  CellField out = laplacian(f);
  const GridSpec& g = f.spec();
  for (int j = 0; j <= g.n + 1; ++j) {
    double* o = out.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] *= c;
  }
  return out;
}

}  // namespace detail

inline NonlinearSystem assemble_first(const SchemeState& st,
                                      const Params& params,
                                      const PinningSpec& pin = {}) {
  params.validate();
  pin.validate(st.phi.spec());
  const GridSpec& g = st.phi.spec();
  const double denom = params.beta + 1.0 / params.s;

  NonlinearSystem sys;
  sys.tag = SchemeTag::FirstOrder;
  sys.spec = g;
  sys.params = params;
  sys.a = params.s * params.M / denom;
  sys.phi_k = st.phi;
  sys.pinned = pin.active;

  sys.s1 = CellField(g);
  const double cpsi = 1.0 / denom;
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* p = st.phi.row(j);
    const double* q = st.psi.row(j);
    double* o = sys.s1.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] = p[i] + cpsi * q[i];
  }

  sys.s2 = detail::scaled_laplacian(st.phi, 2.0);
  sys.s3 = CellField(g, 0.0);

  if (pin.active) {
    sys.pin_w = pin.weight;
    sys.pin_target = pin.target;
    for (int j = 0; j <= g.n + 1; ++j) {
      const double* w = pin.weight.row(j);
      const double* t = pin.target.row(j);
      double* o = sys.s2.row(j);
      for (int i = 0; i <= g.m + 1; ++i) o[i] -= 2.0 * w[i] * t[i];
    }
  }
  return sys;
}

inline NonlinearSystem assemble_second(const SchemeState& st,
                                       const Params& params,
                                       const PinningSpec& pin = {}) {
  params.validate();
  pin.validate(st.phi.spec());
  const GridSpec& g = st.phi.spec();
  const double denom = params.beta + 2.0 / params.s;

  NonlinearSystem sys;
  sys.tag = SchemeTag::SecondOrder;
  sys.spec = g;
  sys.params = params;
  sys.a = params.s * params.M / denom;
  sys.phi_k = st.phi;
  sys.pinned = pin.active;

  sys.s1 = CellField(g);
  const double cpsi = 2.0 / denom;
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* p = st.phi.row(j);
    const double* q = st.psi.row(j);
    double* o = sys.s1.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] = p[i] + cpsi * q[i];
  }

  // 2 lap(phi_tilde), phi_tilde = (3 phi^k - phi^{k-1})/2
  CellField phi_tilde(g);
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* p = st.phi.row(j);
    const double* q = st.phi_prev.row(j);
    double* o = phi_tilde.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] = 0.5 * (3.0 * p[i] - q[i]);
  }
  sys.s2 = detail::scaled_laplacian(phi_tilde, 2.0);
  const double half_alpha = 0.5 * params.alpha();
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* p = st.phi.row(j);
    double* o = sys.s2.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] += half_alpha * p[i];
  }

  sys.s3 = detail::scaled_laplacian(st.phi, 0.5);

  if (pin.active) {
    sys.pin_w = pin.weight;
    sys.pin_target = pin.target;
    for (int j = 0; j <= g.n + 1; ++j) {
      const double* w = pin.weight.row(j);
      const double* t = pin.target.row(j);
      const double* p = st.phi.row(j);
      double* o = sys.s2.row(j);
      for (int i = 0; i <= g.m + 1; ++i) o[i] += w[i] * (p[i] - 2.0 * t[i]);
    }
  }
  return sys;
}

/// psi^{k+1} = (phi^{k+1} - phi^k) / s.
inline SchemeState finalize_first(CellField phi_new, const SchemeState& st,
                                  const Params& params) {
  const GridSpec& g = st.phi.spec();
  fill_ghosts(phi_new);
  SchemeState out;
  out.psi = CellField(g);
  const double inv_s = 1.0 / params.s;
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* pn = phi_new.row(j);
    const double* pk = st.phi.row(j);
    double* o = out.psi.row(j);
    for (int i = 0; i <= g.m + 1; ++i) o[i] = (pn[i] - pk[i]) * inv_s;
  }
  out.phi_prev = st.phi;
  out.phi = std::move(phi_new);
  out.k = st.k + 1;
  out.t = params.s * static_cast<double>(out.k);
  return out;
}

/// psi^{k+1} = (2/s)(phi^{k+1} - phi^k) - psi^k.
inline SchemeState finalize_second(CellField phi_new, const SchemeState& st,
                                   const Params& params) {
  const GridSpec& g = st.phi.spec();
  fill_ghosts(phi_new);
  SchemeState out;
  out.psi = CellField(g);
  const double two_inv_s = 2.0 / params.s;
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* pn = phi_new.row(j);
    const double* pk = st.phi.row(j);
    const double* qk = st.psi.row(j);
    double* o = out.psi.row(j);
    for (int i = 0; i <= g.m + 1; ++i)
      o[i] = (pn[i] - pk[i]) * two_inv_s - qk[i];
  }
  out.phi_prev = st.phi;
  out.phi = std::move(phi_new);
  out.k = st.k + 1;
  out.t = params.s * static_cast<double>(out.k);
  return out;
}

inline NonlinearSystem assemble(SchemeTag tag, const SchemeState& st,
                                const Params& params,
                                const PinningSpec& pin = {}) {
  return tag == SchemeTag::FirstOrder ? assemble_first(st, params, pin)
                                      : assemble_second(st, params, pin);
}

inline SchemeState finalize(SchemeTag tag, CellField phi_new,
                            const SchemeState& st, const Params& params) {
  return tag == SchemeTag::FirstOrder
             ? finalize_first(std::move(phi_new), st, params)
             : finalize_second(std::move(phi_new), st, params);
}

}  // namespace mpfc

#endif  // MPFC_SCHEME_HPP

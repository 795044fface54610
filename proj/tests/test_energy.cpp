#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mpfc/energy.hpp"
#include "mpfc/init.hpp"
#include "mpfc/step.hpp"

using namespace mpfc;

namespace {

// Test-only oracle: term-by-term summation of the discrete energy on a
// fully periodic grid with its own modular indexing; independent of the
// grid operators under test.
double oracle_energy_periodic(const CellField& phi, double alpha) {
  const GridSpec& g = phi.spec();
  const int m = g.m, n = g.n;
  const double h = g.h;
  auto at = [&](int i, int j) {
    const int iw = (i - 1 + m) % m + 1;
    const int jw = (j - 1 + n) % n + 1;
    return phi(iw, jw);
  };
  double quartic = 0.0, quadratic = 0.0, gradient_sq = 0.0, lap_sq = 0.0;
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= m; ++i) {
      const double p = at(i, j);
      quartic += 0.25 * p * p * p * p;
      quadratic += 0.5 * alpha * p * p;
      const double gx = (at(i + 1, j) - p) / h;
      const double gy = (at(i, j + 1) - p) / h;
      gradient_sq += gx * gx + gy * gy;
      const double lap = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) +
                          at(i, j - 1) - 4.0 * p) /
                         (h * h);
      lap_sq += 0.5 * lap * lap;
    }
  }
  return h * h * (quartic + quadratic - gradient_sq + lap_sq);
}

CellField random_field(const GridSpec& g, std::uint64_t seed, double amp) {
  CellField f(g);
  std::mt19937_64 rng(seed);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i)
      f(i, j) = amp * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) -
                       1.0);
  fill_ghosts(f);
  return f;
}

}  // namespace

TEST_CASE("energy split of trivial fields", "[energy]") {
  Params params;
  params.epsilon = 0.025;
  const GridSpec g = make_grid(32, 32, 1.0, Bc::Periodic, Bc::Periodic);

  CellField zero(g, 0.0);
  const EnergySplit e0 = energy_split(zero, params);
  REQUIRE(e0.fc == 0.0);
  REQUIRE(e0.fe == 0.0);
  REQUIRE(e0.f == 0.0);

  // Constant c on (0,32)^2: gradient and Laplacian vanish, so
  // F = 1024 (c^4/4 + alpha c^2 / 2).
  const double c = 0.3;
  CellField cf(g, c);
  fill_ghosts(cf);
  const EnergySplit ec = energy_split(cf, params);
  const double expect =
      1024.0 * (0.25 * c * c * c * c + 0.5 * params.alpha() * c * c);
  REQUIRE_THAT(ec.f, Catch::Matchers::WithinRel(expect, 1e-13));
  REQUIRE(ec.fe == 0.0);
}

TEST_CASE("energy of the benchmark density matches the direct-summation "
          "oracle", "[energy]") {
  Params params;
  params.epsilon = 0.025;
  const GridSpec g = make_grid(128, 128, 0.25, Bc::Periodic, Bc::Periodic);
  const CellField phi = init_benchmark(g);
  const EnergySplit e = energy_split(phi, params);
  const double oracle = oracle_energy_periodic(phi, params.alpha());
  REQUIRE_THAT(e.f, Catch::Matchers::WithinRel(oracle, 1e-12));
}

TEST_CASE("energy split consistency on random fields", "[energy]") {
  Params params;
  const GridSpec g = make_grid(24, 16, 0.5, Bc::Periodic, Bc::Periodic);
  for (std::uint64_t seed : {1, 2, 3}) {
    const CellField f = random_field(g, seed, 0.8);
    const EnergySplit e = energy_split(f, params);
    REQUIRE_THAT(e.f, Catch::Matchers::WithinRel(e.fc - e.fe, 1e-13));
    const double oracle = oracle_energy_periodic(f, params.alpha());
    REQUIRE_THAT(e.f, Catch::Matchers::WithinAbs(oracle, 1e-12 *
                                                 (std::abs(oracle) + 1.0)));
  }
}

TEST_CASE("pseudo energy reduces to F at psi = 0 and adds the kinetic "
          "term for an eigenmode", "[energy]") {
  Params params;
  params.M = 2.0;
  const GridSpec g = make_grid(16, 16, 0.5, Bc::Periodic, Bc::Periodic);
  const CellField phi = random_field(g, 9, 0.3);

  REQUIRE(pseudo_energy(phi, CellField(g, 0.0), params) ==
          energy_split(phi, params).f);

  constexpr double kPi = 3.14159265358979323846;
  CellField psi(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i)
      psi(i, j) = std::cos(2.0 * kPi * g.cell_x(i) / g.lx());
  fill_ghosts(psi);
  const double lam = std::pow(2.0 / g.h * std::sin(kPi * g.h / g.lx()), 2);
  const double n2 = norm2(psi);
  const double f = energy_split(phi, params).f;
  const double pseudo = pseudo_energy(phi, psi, params);
  REQUIRE_THAT(pseudo - f,
               Catch::Matchers::WithinRel(n2 * n2 / (2.0 * params.M * lam),
                                          1e-8));
}

TEST_CASE("modified pseudo energy dominates pseudo and matches it for "
          "equal arguments", "[energy]") {
  Params params;
  const GridSpec g = make_grid(12, 12, 0.5, Bc::Periodic, Bc::Periodic);
  const CellField phi = random_field(g, 13, 0.4);
  CellField psi = random_field(g, 14, 0.2);
  const double mu = mean(psi);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) psi(i, j) -= mu;
  fill_ghosts(psi);

  const double pseudo = pseudo_energy(phi, psi, params);
  REQUIRE(modified_pseudo_energy(phi, phi, psi, params) == pseudo);

  const CellField other = random_field(g, 15, 0.4);
  REQUIRE(modified_pseudo_energy(phi, other, psi, params) >= pseudo);
}

TEST_CASE("dissipation residual is exactly zero at a constant steady state",
          "[energy]") {
  Params params;
  params.s = 0.7;
  const GridSpec g = make_grid(8, 8, 1.0, Bc::Periodic, Bc::Periodic);
  CellField c(g, 0.07);
  fill_ghosts(c);
  const SchemeState prev = initial_state(c);
  SchemeState next = prev;
  next.k = 1;
  next.t = params.s;
  REQUIRE(dissipation_residual(prev, next, params) == 0.0);
}

TEST_CASE("one benchmark step keeps the dissipation identity within the "
          "frozen bound", "[energy]") {
  Params params;
  params.epsilon = 0.025;
  params.beta = 0.9;
  params.s = 0.1;
  const GridSpec g = make_grid(128, 128, 0.25, Bc::Periodic, Bc::Periodic);
  const SchemeState st0 = initial_state(init_benchmark(g));

  MgConfig mg;
  mg.tol = 1e-9;
  StepOptions opts;
  opts.with_energy = false;
  auto [st1, diag] =
      step(st0, SchemeTag::SecondOrder, params, mg, {}, {}, opts);
  const double r = dissipation_residual(st0, st1, params);
  // Regression bound, recorded from the run itself; roughly
  // 100 x the stopping residual times the field-norm scale.
  REQUIRE(r <= 1e-6);
  REQUIRE(r <= 100.0 * diag.tol_abs * 32.0 * 32.0);
}

TEST_CASE("dissipation residual shrinks when the solver tolerance "
          "tightens 10x", "[energy]") {
  Params params;
  params.epsilon = 0.025;
  params.beta = 0.9;
  params.s = 0.1;
  const GridSpec g = make_grid(64, 64, 0.5, Bc::Periodic, Bc::Periodic);
  const SchemeState st0 = initial_state(init_benchmark(g));
  StepOptions opts;
  opts.with_energy = false;

  EllipticConfig tight_elliptic;
  tight_elliptic.rel_tol = 1e-12;

  auto residual_at = [&](double tol) {
    MgConfig mg;
    mg.tol = tol;
    auto [st1, diag] =
        step(st0, SchemeTag::SecondOrder, params, mg, {}, tight_elliptic,
             opts);
    return dissipation_residual(st0, st1, params, tight_elliptic);
  };
  const double loose = residual_at(1e-5);
  const double tight = residual_at(1e-6);
  REQUIRE(tight < 0.5 * loose);
}

TEST_CASE("short second-order run dissipates the modified energy",
          "[energy]") {
  Params params;
  params.epsilon = 0.025;
  params.beta = 0.9;
  params.s = 1.0;
  const GridSpec g = make_grid(64, 64, 0.5, Bc::Periodic, Bc::Periodic);
  SchemeState st = initial_state(init_benchmark(g));
  MgConfig mg;
  EllipticConfig ecfg;
  double prev = modified_pseudo_energy(st.phi, st.phi_prev, st.psi, params,
                                       ecfg);
  for (int k = 0; k < 20; ++k) {
    auto [next, diag] = step(st, SchemeTag::SecondOrder, params, mg);
    st = std::move(next);
    const double cur = diag.energy.modified;
    const double slack = 10.0 * diag.tol_abs * (1.0 + std::abs(cur));
    REQUIRE(cur <= prev + slack);
    prev = cur;
  }
}

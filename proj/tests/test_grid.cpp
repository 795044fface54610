#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "mpfc/grid.hpp"
#include "mpfc/transfer.hpp"

using namespace mpfc;

namespace {

constexpr double kPi = 3.14159265358979323846;

CellField random_field(const GridSpec& g, std::uint64_t seed) {
  CellField f(g);
  std::mt19937_64 rng(seed);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i)
      f(i, j) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  fill_ghosts(f);
  return f;
}

EdgeFieldEW random_ew(const GridSpec& g, std::uint64_t seed) {
  EdgeFieldEW u(g);
  std::mt19937_64 rng(seed);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 0; i <= g.m; ++i)
      u.at(i, j) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return u;
}

// Boundary sums of the summation-by-parts / Green identities, assembled
// directly from edge values:  -h <a(1/2)||e(1/2)> + h <a(m+1/2)||e(m+1/2)>.
double x_boundary_sum(const EdgeFieldEW& a, const EdgeFieldEW& e) {
  const GridSpec& g = a.spec();
  double lo = 0.0, hi = 0.0;
  for (int j = 1; j <= g.n; ++j) {
    lo += a.at(0, j) * e.at(0, j);
    hi += a.at(g.m, j) * e.at(g.m, j);
  }
  return g.h * (hi - lo);
}

double y_boundary_sum(const EdgeFieldNS& a, const EdgeFieldNS& e) {
  const GridSpec& g = a.spec();
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= g.m; ++i) {
    lo += a.at(i, 0) * e.at(i, 0);
    hi += a.at(i, g.n) * e.at(i, g.n);
  }
  return g.h * (hi - lo);
}

}  // namespace

TEST_CASE("ghost fill satisfies the periodic identities", "[grid]") {
  const GridSpec g = make_grid(4, 3, 0.5, Bc::Periodic, Bc::Periodic);
  CellField f(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) f(i, j) = 10.0 * i + j;
  fill_ghosts(f);
  for (int j = 1; j <= g.n; ++j) {
    REQUIRE(f(0, j) == f(4, j));
    REQUIRE(f(5, j) == f(1, j));
  }
  for (int i = 0; i <= g.m + 1; ++i) {
    REQUIRE(f(i, 0) == f(i, 3));
    REQUIRE(f(i, 4) == f(i, 1));
  }
}

TEST_CASE("ghost fill satisfies the Neumann identities", "[grid]") {
  const GridSpec g = make_grid(4, 4, 1.0, Bc::Neumann, Bc::Neumann);
  CellField f(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) f(i, j) = std::sin(i * 1.7 + j * 0.3);
  fill_ghosts(f);
  for (int j = 1; j <= g.n; ++j) {
    REQUIRE(f(0, j) == f(1, j));
    REQUIRE(f(5, j) == f(4, j));
  }
  for (int i = 0; i <= g.m + 1; ++i) {
    REQUIRE(f(i, 0) == f(i, 1));
    REQUIRE(f(i, 5) == f(i, 4));
  }
}

TEST_CASE("constant fields get constant ghosts under either tag", "[grid]") {
  for (Bc bx : {Bc::Periodic, Bc::Neumann})
    for (Bc by : {Bc::Periodic, Bc::Neumann}) {
      CellField f(make_grid(5, 4, 0.25, bx, by), 3.25);
      fill_ghosts(f);
      for (int j = 0; j <= 5; ++j)
        for (int i = 0; i <= 6; ++i) REQUIRE(f(i, j) == 3.25);
    }
}

TEST_CASE("laplacian of a constant vanishes and telescopes", "[grid]") {
  for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
    CellField f(make_grid(6, 6, 0.5, bc, bc), 2.0);
    fill_ghosts(f);
    const CellField lap = laplacian(f);
    for (int j = 1; j <= 6; ++j)
      for (int i = 1; i <= 6; ++i) REQUIRE(lap(i, j) == 0.0);
  }
  // Periodic: interior sum of the Laplacian telescopes to zero.
  const GridSpec g = make_grid(8, 8, 0.75, Bc::Periodic, Bc::Periodic);
  const CellField f = random_field(g, 11);
  const CellField lap = laplacian(f);
  double sum = 0.0;
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) sum += lap(i, j);
  REQUIRE(std::abs(sum) < 1e-12 * g.m * g.n);
}

TEST_CASE("laplacian eigenmode matches the stencil symbol", "[grid]") {
  // f = cos(2 pi x / L): 5-point stencil gives -(2/h sin(pi h / L))^2 f.
  const GridSpec g = make_grid(8, 8, 1.0, Bc::Periodic, Bc::Periodic);
  CellField f(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i)
      f(i, j) = std::cos(2.0 * kPi * g.cell_x(i) / g.lx());
  fill_ghosts(f);
  const double lam = std::pow(2.0 / g.h * std::sin(kPi * g.h / g.lx()), 2);
  const CellField lap = laplacian(f);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i)
      REQUIRE_THAT(lap(i, j), Catch::Matchers::WithinAbs(-lam * f(i, j),
                                                         1e-13 * lam));
}

TEST_CASE("gradient of constants and linears", "[grid]") {
  const GridSpec g = make_grid(6, 5, 0.5, Bc::Neumann, Bc::Neumann);
  CellField c(g, 4.0);
  fill_ghosts(c);
  auto [gx, gy] = gradient(c);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 0; i <= g.m; ++i) REQUIRE(gx.at(i, j) == 0.0);
  for (int j = 0; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) REQUIRE(gy.at(i, j) == 0.0);

  CellField lin(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) lin(i, j) = g.cell_x(i);
  fill_ghosts(lin);
  auto [lx, ly] = gradient(lin);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i < g.m; ++i)  // interior edges
      REQUIRE_THAT(lx.at(i, j), Catch::Matchers::WithinRel(1.0, 1e-14));
}

TEST_CASE("average_edge of constants and linears", "[grid]") {
  const GridSpec g = make_grid(5, 7, 0.25, Bc::Periodic, Bc::Periodic);
  CellField c(g, -1.5);
  fill_ghosts(c);
  auto [ax, ay] = average_edge(c);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 0; i <= g.m; ++i) REQUIRE(ax.at(i, j) == -1.5);

  CellField lin(g);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) lin(i, j) = 3.0 * g.cell_y(j);
  fill_ghosts(lin);
  auto [bx, by] = average_edge(lin);
  for (int j = 1; j < g.n; ++j)  // interior NS edges: exact midpoints
    for (int i = 1; i <= g.m; ++i)
      REQUIRE_THAT(by.at(i, j),
                   Catch::Matchers::WithinRel(3.0 * (g.cell_y(j) + 0.5 * g.h),
                                              1e-14));
}

TEST_CASE("edge_divergence of gradient equals laplacian bitwise", "[grid]") {
  for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
    const GridSpec g = make_grid(8, 8, 0.37, bc, bc);
    const CellField f = random_field(g, 23 + static_cast<int>(bc));
    auto [gx, gy] = gradient(f);
    const CellField div = edge_divergence(gx, gy);
    const CellField lap = laplacian(f);
    for (int j = 1; j <= g.n; ++j)
      for (int i = 1; i <= g.m; ++i) {
        const double a = div(i, j), b = lap(i, j);
        REQUIRE(std::memcmp(&a, &b, sizeof(double)) == 0);
      }
  }
}

TEST_CASE("edge_divergence of zero or constant edges vanishes", "[grid]") {
  const GridSpec g = make_grid(6, 6, 1.0, Bc::Periodic, Bc::Periodic);
  const EdgeFieldEW u(g, 2.5);
  const EdgeFieldNS v(g, -0.5);
  const CellField div = edge_divergence(u, v);
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) REQUIRE(div(i, j) == 0.0);
}

TEST_CASE("cell inner product basics", "[grid]") {
  const GridSpec g = make_grid(8, 4, 0.5, Bc::Periodic, Bc::Periodic);
  CellField one(g, 1.0), zero(g, 0.0);
  REQUIRE_THAT(inner_cell(one, one),
               Catch::Matchers::WithinRel(g.lx() * g.ly(), 1e-14));
  const CellField f = random_field(g, 7);
  REQUIRE(inner_cell(f, zero) == 0.0);
  const CellField h = random_field(g, 8);
  REQUIRE(inner_cell(f, h) == inner_cell(h, f));
}

TEST_CASE("summation by parts in x is exact", "[grid]") {
  for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
    for (int m : {4, 6, 8}) {
      const GridSpec g = make_grid(m, m - 1, 0.6, bc, bc);
      const CellField phi = random_field(g, 100 + m);
      const EdgeFieldEW f = random_ew(g, 200 + m);
      const EdgeFieldNS zns(g, 0.0);
      auto [dphi_x, dphi_y] = gradient(phi);
      auto [aphi_x, aphi_y] = average_edge(phi);

      const double lhs = inner_edge(dphi_x, f, zns, zns);
      const CellField dxf = edge_divergence(f, zns);
      const double rhs = -inner_cell(phi, dxf) + x_boundary_sum(aphi_x, f);
      REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12));
    }
  }
}

TEST_CASE("Green's first identity with boundary sums is exact", "[grid]") {
  for (Bc bx : {Bc::Periodic, Bc::Neumann})
    for (Bc by : {Bc::Periodic, Bc::Neumann}) {
      const GridSpec g = make_grid(5, 7, 0.8, bx, by);
      const CellField phi = random_field(g, 31);
      const CellField psi = random_field(g, 32);
      auto [dphi_x, dphi_y] = gradient(phi);
      auto [dpsi_x, dpsi_y] = gradient(psi);
      auto [aphi_x, aphi_y] = average_edge(phi);

      const double lhs = inner_edge(dphi_x, dpsi_x, dphi_y, dpsi_y);
      const double rhs = -inner_cell(phi, laplacian(psi)) +
                         x_boundary_sum(aphi_x, dpsi_x) +
                         y_boundary_sum(aphi_y, dpsi_y);
      REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12));
    }
}

TEST_CASE("Green's first identity boundary sums vanish under both tags",
          "[grid]") {
  // The working form used by the energies: <grad f, grad g> = -<f, lap g>.
  for (Bc bx : {Bc::Periodic, Bc::Neumann})
    for (Bc by : {Bc::Periodic, Bc::Neumann}) {
      const GridSpec g = make_grid(6, 6, 0.4, bx, by);
      const CellField f = random_field(g, 41);
      const CellField gfield = random_field(g, 42);
      auto [fx, fy] = gradient(f);
      auto [gx, gy] = gradient(gfield);
      const double lhs = inner_edge(fx, gx, fy, gy);
      const double rhs = -inner_cell(f, laplacian(gfield));
      REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12));
    }
}

TEST_CASE("Green's second identity with boundary sums is exact", "[grid]") {
  for (Bc bx : {Bc::Periodic, Bc::Neumann})
    for (Bc by : {Bc::Periodic, Bc::Neumann}) {
      const GridSpec g = make_grid(5, 7, 1.1, bx, by);
      const CellField phi = random_field(g, 51);
      const CellField psi = random_field(g, 52);
      auto [dphi_x, dphi_y] = gradient(phi);
      auto [dpsi_x, dpsi_y] = gradient(psi);
      auto [aphi_x, aphi_y] = average_edge(phi);
      auto [apsi_x, apsi_y] = average_edge(psi);

      const double lhs = inner_cell(phi, laplacian(psi));
      const double rhs = inner_cell(laplacian(phi), psi) +
                         x_boundary_sum(aphi_x, dpsi_x) -
                         x_boundary_sum(dphi_x, apsi_x) +
                         y_boundary_sum(aphi_y, dpsi_y) -
                         y_boundary_sum(dphi_y, apsi_y);
      REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12));
    }
}

TEST_CASE("norms of simple fields", "[grid]") {
  const GridSpec g = make_grid(32, 32, 1.0, Bc::Periodic, Bc::Periodic);
  CellField one(g, 1.0);
  fill_ghosts(one);
  REQUIRE_THAT(norm2(one) * norm2(one),
               Catch::Matchers::WithinRel(1024.0, 1e-13));
  REQUIRE(grad_norm2(one) == 0.0);

  CellField two(g, 2.0);
  fill_ghosts(two);
  const double n4 = norm4(two);
  REQUIRE_THAT(n4 * n4 * n4 * n4,
               Catch::Matchers::WithinRel(16.0 * 1024.0, 1e-13));
  REQUIRE_THAT(mean(two), Catch::Matchers::WithinRel(2.0, 1e-14));

  CellField f = random_field(g, 61);
  double max_abs = 0.0;
  for (int j = 1; j <= g.n; ++j)
    for (int i = 1; i <= g.m; ++i) max_abs = std::max(max_abs, std::abs(f(i, j)));
  REQUIRE(norm_inf(f) == max_abs);
}

TEST_CASE("restriction preserves constants, means, and slopes", "[grid]") {
  const GridSpec g = make_grid(8, 8, 0.5, Bc::Periodic, Bc::Periodic);
  CellField c(g, 1.75);
  fill_ghosts(c);
  const CellField rc = restrict_field(c);
  for (int j = 1; j <= 4; ++j)
    for (int i = 1; i <= 4; ++i) REQUIRE(rc(i, j) == 1.75);

  const CellField f = random_field(g, 71);
  const CellField rf = restrict_field(f);
  REQUIRE_THAT(mean(rf), Catch::Matchers::WithinAbs(mean(f), 1e-14));

  // Linear-in-x data restricts to the same slope at coarse centers.
  const GridSpec gn = make_grid(8, 8, 0.5, Bc::Neumann, Bc::Neumann);
  CellField lin(gn);
  for (int j = 1; j <= gn.n; ++j)
    for (int i = 1; i <= gn.m; ++i) lin(i, j) = 2.0 * gn.cell_x(i) + 1.0;
  fill_ghosts(lin);
  const CellField rl = restrict_field(lin);
  const GridSpec gc = rl.spec();
  for (int j = 1; j <= gc.n; ++j)
    for (int i = 1; i <= gc.m; ++i)
      REQUIRE_THAT(rl(i, j),
                   Catch::Matchers::WithinRel(2.0 * gc.cell_x(i) + 1.0,
                                              1e-13));
}

TEST_CASE("prolongation of constants is exact both ways", "[grid]") {
  const GridSpec gf = make_grid(8, 6, 0.5, Bc::Periodic, Bc::Periodic);
  const GridSpec gc = coarsen_spec(gf);
  CellField c(gc, -2.5);
  fill_ghosts(c);
  const CellField p = prolong_field(c, gf);
  for (int j = 1; j <= gf.n; ++j)
    for (int i = 1; i <= gf.m; ++i) REQUIRE(p(i, j) == -2.5);
  const CellField back = restrict_field(p);
  for (int j = 1; j <= gc.n; ++j)
    for (int i = 1; i <= gc.m; ++i) REQUIRE(back(i, j) == -2.5);
}

TEST_CASE("restrict-prolong round trip reproduces coarse linears", "[grid]") {
  const GridSpec gf = make_grid(16, 16, 0.25, Bc::Neumann, Bc::Neumann);
  const GridSpec gc = coarsen_spec(gf);
  CellField lin(gc);
  for (int j = 1; j <= gc.n; ++j)
    for (int i = 1; i <= gc.m; ++i)
      lin(i, j) = 1.5 * gc.cell_x(i) - 0.5 * gc.cell_y(j);
  fill_ghosts(lin);
  const CellField fine = prolong_field(lin, gf);
  const CellField back = restrict_field(fine);
  // Interior coarse cells: bilinear interpolation then averaging is exact
  // on linears; boundary cells see the Neumann ghost clamp.
  for (int j = 2; j < gc.n; ++j)
    for (int i = 2; i < gc.m; ++i)
      REQUIRE_THAT(back(i, j), Catch::Matchers::WithinAbs(lin(i, j), 1e-13));
}

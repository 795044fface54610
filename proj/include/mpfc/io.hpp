#ifndef MPFC_IO_HPP
#define MPFC_IO_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "mpfc/energy.hpp"
#include "mpfc/errors.hpp"
#include "mpfc/grid.hpp"

namespace mpfc {

/// One sampled row of the run diagnostics.  The CSV columns are the
/// documented subset; tol_abs stays in memory for the test harness.
struct EnergyRow {
  long step = 0;
  double t = 0.0;
  EnergyReport energy;
  int vcycles = 0;
  double residual = 0.0;
  double tol_abs = 0.0;
};

namespace detail {

inline void require_little_endian() {
  static_assert(sizeof(double) == 8, "field files assume 8-byte doubles");
  if constexpr (std::endian::native != std::endian::little)
    throw IoError("field files are little-endian only", "");
}

template <typename T>
inline void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
inline T get(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated field file", path);
  return value;
}

inline constexpr char kFieldMagic[8] = {'M', 'P', 'F', 'C',
                                        'F', 'L', 'D', '\0'};
inline constexpr std::uint32_t kFieldVersion = 1;

}  // namespace detail

/// Field file layout (all little-endian):
///   bytes 0..7   magic "MPFCFLD\0"
///   u32          version (1)
///   u32 m, u32 n
///   u32 bc_x, u32 bc_y   (0 = periodic, 1 = neumann)
///   f64 h, f64 time
///   m*n f64      interior values, j = 1..n outer, i = 1..m inner
inline void write_field(const CellField& f, double time,
                        const std::string& path) {
  detail::require_little_endian();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  const GridSpec& g = f.spec();
  out.write(detail::kFieldMagic, 8);
  detail::put<std::uint32_t>(out, detail::kFieldVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.m));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
  detail::put<std::uint32_t>(out, g.bc_x == Bc::Periodic ? 0u : 1u);
  detail::put<std::uint32_t>(out, g.bc_y == Bc::Periodic ? 0u : 1u);
  detail::put<double>(out, g.h);
  detail::put<double>(out, time);
  for (int j = 1; j <= g.n; ++j)
    out.write(reinterpret_cast<const char*>(f.row(j) + 1),
              static_cast<std::streamsize>(g.m) * sizeof(double));
  if (!out) throw IoError("write failed", path);
}

struct FieldFile {
  CellField field;
  double time = 0.0;
};

inline FieldFile read_field(const std::string& path) {
  detail::require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kFieldMagic, 8) != 0)
    throw IoError("not a field file (bad magic)", path);
  const auto version = detail::get<std::uint32_t>(in, path);
  if (version != detail::kFieldVersion)
    throw IoError("unsupported field file version " + std::to_string(version),
                  path);
  const auto m = detail::get<std::uint32_t>(in, path);
  const auto n = detail::get<std::uint32_t>(in, path);
  const auto bx = detail::get<std::uint32_t>(in, path);
  const auto by = detail::get<std::uint32_t>(in, path);
  const double h = detail::get<double>(in, path);
  const double time = detail::get<double>(in, path);
  if (m < 2 || n < 2 || !(h > 0.0) || bx > 1 || by > 1)
    throw IoError("corrupt field header", path);

  FieldFile out;
  out.time = time;
  out.field = CellField(make_grid(static_cast<int>(m), static_cast<int>(n), h,
                                  bx == 0 ? Bc::Periodic : Bc::Neumann,
                                  by == 0 ? Bc::Periodic : Bc::Neumann));
  for (std::uint32_t j = 1; j <= n; ++j) {
    in.read(reinterpret_cast<char*>(out.field.row(static_cast<int>(j)) + 1),
            static_cast<std::streamsize>(m) * sizeof(double));
    if (!in) throw IoError("truncated field payload", path);
  }
  fill_ghosts(out.field);
  return out;
}

/// Plain CSV: step,t,F,Fc,Fe,pseudo,modified,mass,psi_mean,vcycles,residual.
/// Values are printed with %.17g so identical runs give identical bytes.
inline void write_energy_series(const std::vector<EnergyRow>& rows,
                                const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out << "step,t,F,Fc,Fe,pseudo,modified,mass,psi_mean,vcycles,residual\n";
  char buf[512];
  for (const EnergyRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,"
                  "%.17g\n",
                  r.step, r.t, r.energy.f, r.energy.fc, r.energy.fe,
                  r.energy.pseudo, r.energy.modified, r.energy.mass,
                  r.energy.psi_mean, r.vcycles, r.residual);
    out << buf;
  }
  if (!out) throw IoError("write failed", path);
}

}  // namespace mpfc

#endif  // MPFC_IO_HPP

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>

#include "sepform/matrix.hpp"

namespace sepform {

/// Truncated box [-R, R]^{2n} in C^n = R^{2n}, sampled at cell centres
/// x_k = -R + (k + 1/2) h with h = 2R / points.
struct BoxDomain {
  std::size_t n = 1;
  double half_width = 1.0;
  std::size_t points = 64;
};

/// Complex torus C^n / 2pi(Z + iZ)^n, sampled at x_k = 2 pi k / points.
struct TorusDomain {
  std::size_t n = 1;
  std::size_t points = 16;
};

using Domain = std::variant<BoxDomain, TorusDomain>;

inline constexpr std::size_t kMinGridPoints = 8;

/// Per-axis geometry shared by both domain kinds. Axes are ordered
/// (x_1, y_1, ..., x_n, y_n); node indices are row-major with axis 0 slowest.
struct GridGeometry {
  std::size_t n = 0;
  std::size_t points = 0;
  double step = 0.0;
  double origin = 0.0;
  bool periodic = false;

  std::size_t axes() const noexcept { return 2 * n; }
  std::size_t node_count() const;
  double coordinate(std::size_t k) const noexcept { return origin + static_cast<double>(k) * step; }
  /// Lebesgue volume of one cell, step^(2n).
  double cell_volume() const;
  /// z_s = x_s + i y_s at the given node.
  CVector point(std::size_t node) const;
};

GridGeometry geometry(const Domain& d);

/// Sampled map Phi: C^n -> C^m. samples[node * m + i] = Phi_i(z_node).
struct GridField {
  Domain domain;
  std::size_t m = 1;
  CVector samples;

  GridGeometry geometry() const { return sepform::geometry(domain); }
  std::size_t n() const { return geometry().n; }
  std::span<const Complex> at(std::size_t node) const { return {samples.data() + node * m, m}; }
};

/// Sampled conjugate differential: samples[node * m * n + i * n + j] = dbar_{z_j} Phi_i.
struct DerivativeField {
  Domain domain;
  std::size_t m = 1;
  std::size_t n = 1;
  CVector samples;

  GridGeometry geometry() const { return sepform::geometry(domain); }
};

/// Callback filling out[0..m) with Phi(z).
using FieldFunction = std::function<void(std::span<const Complex> z, std::span<Complex> out)>;

/// Pointwise sampling of an arbitrary map, node by node.
GridField sample_field(const Domain& domain, std::size_t m, const FieldFunction& fn);

/// Throws InputError for inconsistent domains (n = 0, points below the
/// minimum, nonpositive width, or more than 2^28 complex samples).
void validate_domain(const Domain& d, std::size_t m = 1);

/// Little-endian binary dump: magic "SEPFGRID", u32 version, u32 kind
/// (0 box, 1 torus), u32 n, u32 m, u32 points, f64 half_width (0 for the
/// torus), then re/im interleaved f64 samples in node order.
void write_grid(std::ostream& os, const GridField& f);
GridField read_grid(std::istream& is);
void write_grid_file(const std::string& path, const GridField& f);
GridField read_grid_file(const std::string& path);

}  // namespace sepform

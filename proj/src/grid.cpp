#include "sepform/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

namespace sepform {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'P', 'F', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kMaxSamples = std::size_t{1} << 28;

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InputError("grid dump: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > kMaxSamples * 16 / std::max<std::size_t>(base, 1)) return kMaxSamples * 16;
    r *= base;
  }
  return r;
}

}  // namespace

std::size_t GridGeometry::node_count() const { return ipow(points, axes()); }

double GridGeometry::cell_volume() const { return std::pow(step, static_cast<double>(axes())); }

CVector GridGeometry::point(std::size_t node) const {
  CVector z(n);
  std::size_t rest = node;
  for (std::size_t a = axes(); a-- > 0;) {
    const std::size_t k = rest % points;
    rest /= points;
    const double c = coordinate(k);
    if (a % 2 == 0)
      z[a / 2] += Complex(c, 0.0);
    else
      z[a / 2] += Complex(0.0, c);
  }
  return z;
}

GridGeometry geometry(const Domain& d) {
  GridGeometry g;
  if (const auto* box = std::get_if<BoxDomain>(&d)) {
    g.n = box->n;
    g.points = box->points;
    g.step = box->points ? 2.0 * box->half_width / static_cast<double>(box->points) : 0.0;
    g.origin = -box->half_width + 0.5 * g.step;
    g.periodic = false;
  } else {
    const auto& torus = std::get<TorusDomain>(d);
    g.n = torus.n;
    g.points = torus.points;
    g.step = torus.points ? 2.0 * std::numbers::pi / static_cast<double>(torus.points) : 0.0;
    g.origin = 0.0;
    g.periodic = true;
  }
  return g;
}

void validate_domain(const Domain& d, std::size_t m) {
  const GridGeometry g = geometry(d);
  if (g.n == 0) throw InputError("domain dimension n must be positive");
  if (m == 0) throw InputError("field dimension m must be positive");
  if (g.points < kMinGridPoints) throw InputError("grid needs at least 8 points per axis");
  if (const auto* box = std::get_if<BoxDomain>(&d); box && !(box->half_width > 0.0))
    throw InputError("box half width must be positive");
  if (g.node_count() > kMaxSamples / m) throw InputError("grid too large (more than 2^28 complex samples)");
}

GridField sample_field(const Domain& domain, std::size_t m, const FieldFunction& fn) {
  validate_domain(domain, m);
  const GridGeometry g = geometry(domain);
  GridField f{domain, m, CVector(g.node_count() * m)};
  CVector z(g.n);
  std::vector<std::size_t> idx(g.axes(), 0);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    for (std::size_t s = 0; s < g.n; ++s) z[s] = Complex(g.coordinate(idx[2 * s]), g.coordinate(idx[2 * s + 1]));
    fn(z, std::span<Complex>(f.samples.data() + node * m, m));
    for (std::size_t a = g.axes(); a-- > 0;) {
      if (++idx[a] < g.points) break;
      idx[a] = 0;
    }
  }
  for (const auto& v : f.samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("field has non-finite samples");
  return f;
}

void write_grid(std::ostream& os, const GridField& f) {
  const GridGeometry g = f.geometry();
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::uint32_t>(os, std::holds_alternative<BoxDomain>(f.domain) ? 0u : 1u);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.m));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.points));
  const auto* box = std::get_if<BoxDomain>(&f.domain);
  put_le<double>(os, box ? box->half_width : 0.0);
  for (const auto& v : f.samples) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) throw Error("grid dump: write failed");
}

GridField read_grid(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InputError("grid dump: bad magic");
  if (get_le<std::uint32_t>(is) != kVersion) throw InputError("grid dump: unsupported version");
  const auto kind = get_le<std::uint32_t>(is);
  const auto n = get_le<std::uint32_t>(is);
  const auto m = get_le<std::uint32_t>(is);
  const auto points = get_le<std::uint32_t>(is);
  const auto half_width = get_le<double>(is);
  GridField f;
  if (kind == 0)
    f.domain = BoxDomain{n, half_width, points};
  else if (kind == 1)
    f.domain = TorusDomain{n, points};
  else
    throw InputError("grid dump: unknown domain kind");
  f.m = m;
  validate_domain(f.domain, m);
  f.samples.resize(f.geometry().node_count() * m);
  for (auto& v : f.samples) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = Complex(re, im);
  }
  return f;
}

void write_grid_file(const std::string& path, const GridField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_grid(os, f);
}

GridField read_grid_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path);
  return read_grid(is);
}

}  // namespace sepform

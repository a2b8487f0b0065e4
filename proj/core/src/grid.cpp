#include "parastencil/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace parastencil {

GridSpec::GridSpec(int nx, int ny, int nz, int halo) : nx_(nx), ny_(ny), nz_(nz), halo_(halo) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw std::invalid_argument("grid extents must be >= 1, got " + to_string(*this));
  if (halo < 1) throw std::invalid_argument("halo width must be >= 1");
}

std::string to_string(const GridSpec& g) {
  std::ostringstream os;
  os << g.nx() << "x" << g.ny() << "x" << g.nz() << " (halo " << g.halo() << ")";
  return os.str();
}

Field3::Field3(const GridSpec& spec, double fill) : spec_(spec), data_(spec.storage_size(), fill) {}

std::vector<double> Field3::interior_values() const {
  std::vector<double> out;
  out.reserve(spec_.interior_size());
  for (int k = 0; k < spec_.nz(); ++k)
    for (int j = 0; j < spec_.ny(); ++j) {
      const double* row = data_.data() + spec_.index(0, j, k);
      out.insert(out.end(), row, row + spec_.nx());
    }
  return out;
}

void Field3::set_interior(std::span<const double> values) {
  if (values.size() != spec_.interior_size())
    throw ShapeError("interior value count does not match grid " + to_string(spec_));
  auto it = values.begin();
  for (int k = 0; k < spec_.nz(); ++k)
    for (int j = 0; j < spec_.ny(); ++j) {
      std::copy_n(it, spec_.nx(), data_.begin() + static_cast<std::ptrdiff_t>(spec_.index(0, j, k)));
      it += spec_.nx();
    }
}

bool Field3::interior_equals(const Field3& other) const {
  if (!(spec_ == other.spec_)) return false;
  for (int k = 0; k < spec_.nz(); ++k)
    for (int j = 0; j < spec_.ny(); ++j) {
      const std::size_t base = spec_.index(0, j, k);
      // memcmp semantics: -0.0 and 0.0 differ, NaN payloads compare by bits
      if (!std::equal(data_.begin() + base, data_.begin() + base + spec_.nx(),
                      other.data_.begin() + base, [](double a, double b) {
                        return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
                      }))
        return false;
    }
  return true;
}

void require_same_grid(const Field3& a, const Field3& b) {
  if (!(a.spec() == b.spec()))
    throw ShapeError("grid mismatch: " + to_string(a.spec()) + " vs " + to_string(b.spec()));
}

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

void halo_exchange(Field3& f) {
  const GridSpec& g = f.spec();
  const int h = g.halo();
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();

  // x pass over interior j,k
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int m = 1; m <= h; ++m) {
        f(-m, j, k) = f(wrap(-m, nx), j, k);
        f(nx - 1 + m, j, k) = f(wrap(nx - 1 + m, nx), j, k);
      }
  // y pass over full x extent
  for (int k = 0; k < nz; ++k)
    for (int m = 1; m <= h; ++m)
      for (int i = -h; i < nx + h; ++i) {
        f(i, -m, k) = f(i, wrap(-m, ny), k);
        f(i, ny - 1 + m, k) = f(i, wrap(ny - 1 + m, ny), k);
      }
  // z pass over full x and y extent
  for (int m = 1; m <= h; ++m)
    for (int j = -h; j < ny + h; ++j)
      for (int i = -h; i < nx + h; ++i) {
        f(i, j, -m) = f(i, j, wrap(-m, nz));
        f(i, j, nz - 1 + m) = f(i, j, wrap(nz - 1 + m, nz));
      }
}

double inf_norm(const Field3& f) {
  const GridSpec& g = f.spec();
  double m = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      const double* row = f.data() + g.index(0, j, k);
      for (int i = 0; i < g.nx(); ++i) m = std::max(m, std::abs(row[i]));
    }
  return m;
}

double inf_norm_diff(const Field3& a, const Field3& b) {
  require_same_grid(a, b);
  const GridSpec& g = a.spec();
  double m = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t base = g.index(0, j, k);
      for (int i = 0; i < g.nx(); ++i)
        m = std::max(m, std::abs(a.data()[base + i] - b.data()[base + i]));
    }
  return m;
}

void axpy3(double a, const Field3& x, double b, const Field3& y, double c, const Field3& z,
           Field3& out) {
  require_same_grid(x, y);
  require_same_grid(x, z);
  require_same_grid(x, out);
  const GridSpec& g = x.spec();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t base = g.index(0, j, k);
      const double* xr = x.data() + base;
      const double* yr = y.data() + base;
      const double* zr = z.data() + base;
      double* o = out.data() + base;
      for (int i = 0; i < g.nx(); ++i) o[i] = a * xr[i] + b * yr[i] + c * zr[i];
    }
}

Field3 axpy3(double a, const Field3& x, double b, const Field3& y, double c, const Field3& z) {
  Field3 out(x.spec());
  axpy3(a, x, b, y, c, z, out);
  return out;
}

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 2) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

double mean(const Field3& f) {
  const GridSpec& g = f.spec();
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(g.ny()) * g.nz());
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      const double* row = f.data() + g.index(0, j, k);
      double s = 0.0;
      for (int i = 0; i < g.nx(); ++i) s += row[i];
      rows.push_back(s);
    }
  return pairwise_sum(rows) / static_cast<double>(g.interior_size());
}

}  // namespace parastencil

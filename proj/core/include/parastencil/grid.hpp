#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace parastencil {

/// Thrown when two fields that must share a layout do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Periodic structured grid on the unit cube. Spacing is derived from nx
/// (dx = 1/nx); stencils assume isotropic spacing.
class GridSpec {
 public:
  static constexpr int kDefaultHalo = 2;

  GridSpec(int nx, int ny, int nz, int halo = kDefaultHalo);
  static GridSpec cube(int n, int halo = kDefaultHalo) { return {n, n, n, halo}; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  int halo() const { return halo_; }
  double dx() const { return 1.0 / nx_; }

  // Allocated extents including halos.
  int sx() const { return nx_ + 2 * halo_; }
  int sy() const { return ny_ + 2 * halo_; }
  int sz() const { return nz_ + 2 * halo_; }

  std::ptrdiff_t stride_j() const { return sx(); }
  std::ptrdiff_t stride_k() const { return static_cast<std::ptrdiff_t>(sx()) * sy(); }

  std::size_t interior_size() const {
    return static_cast<std::size_t>(nx_) * ny_ * nz_;
  }
  std::size_t storage_size() const {
    return static_cast<std::size_t>(sx()) * sy() * sz();
  }

  /// Storage offset of interior coordinate (i,j,k); valid for halo cells too,
  /// i.e. i in [-halo, nx+halo). The x index is the fastest.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(
        (static_cast<std::ptrdiff_t>(k + halo_) * sy() + (j + halo_)) * sx() + (i + halo_));
  }

  bool operator==(const GridSpec&) const = default;

 private:
  int nx_;
  int ny_;
  int nz_;
  int halo_;
};

std::string to_string(const GridSpec& g);

/// Scalar field over a GridSpec, interior plus halo, double precision.
class Field3 {
 public:
  explicit Field3(const GridSpec& spec, double fill = 0.0);

  const GridSpec& spec() const { return spec_; }

  double& operator()(int i, int j, int k) { return data_[spec_.index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[spec_.index(i, j, k)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> storage() { return data_; }
  std::span<const double> storage() const { return data_; }

  /// Copies interior values in x-fastest order.
  std::vector<double> interior_values() const;
  void set_interior(std::span<const double> values);

  /// Sets every interior point to fn(i,j,k).
  template <class Fn>
  void fill_interior(Fn&& fn) {
    for (int k = 0; k < spec_.nz(); ++k)
      for (int j = 0; j < spec_.ny(); ++j)
        for (int i = 0; i < spec_.nx(); ++i) (*this)(i, j, k) = fn(i, j, k);
  }

  /// Bitwise comparison of interior values.
  bool interior_equals(const Field3& other) const;

 private:
  GridSpec spec_;
  std::vector<double> data_;
};

void require_same_grid(const Field3& a, const Field3& b);

/// Fills every halo cell with its periodic image. Axes are exchanged in the
/// order x, y, z, each pass covering the halos already written by the
/// previous one, so edges and corners come out right.
void halo_exchange(Field3& f);

/// max |f| over the interior.
double inf_norm(const Field3& f);

/// inf_norm(a - b) without allocating.
double inf_norm_diff(const Field3& a, const Field3& b);

/// out = a*x + b*y + c*z over the interior. Halos of out are left stale.
void axpy3(double a, const Field3& x, double b, const Field3& y, double c, const Field3& z,
           Field3& out);
Field3 axpy3(double a, const Field3& x, double b, const Field3& y, double c, const Field3& z);

/// Interior mean. Each x-row is summed left to right, rows are combined by a
/// pairwise tree; the order depends only on the grid shape.
double mean(const Field3& f);

}  // namespace parastencil

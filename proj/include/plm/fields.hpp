#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plm/multilinear.hpp"

namespace plm {

// Uniform box in n parameters. Sample index is x-fastest: i0 + N0*(i1 + N1*(...)).
struct GridSpec {
  std::vector<double> origin;
  std::vector<double> spacing;
  std::vector<int> dims;

  int ndim() const { return static_cast<int>(dims.size()); }
  std::size_t count() const;
  std::size_t flat(std::span<const int> idx) const;
  std::vector<int> unflat(std::size_t k) const;
  double coord(int axis, int i) const { return origin[axis] + i * spacing[axis]; }
  void validate() const;

  // [lo, hi] sampled with step h on every axis; hi is hit up to rounding
  static GridSpec box(int ndim, double lo, double hi, double h);
  static GridSpec box2(double x0, double x1, double hx, double y0, double y1, double hy);
};

bool same_layout(const GridSpec& a, const GridSpec& b);

class FieldGrid {
 public:
  FieldGrid(GridSpec spec, int vdim);

  const GridSpec& spec() const { return spec_; }
  int vdim() const { return vdim_; }
  int nx() const { return spec_.dims[0]; }
  int ny() const { return spec_.dims.size() > 1 ? spec_.dims[1] : 1; }

  Vec& at(int i, int j) { return values_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx()) * j]; }
  const Vec& at(int i, int j) const {
    return values_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx()) * j];
  }
  Vec& at(std::span<const int> idx) { return values_[spec_.flat(idx)]; }
  const Vec& at(std::span<const int> idx) const { return values_[spec_.flat(idx)]; }

  std::vector<Vec>& values() { return values_; }
  const std::vector<Vec>& values() const { return values_; }

 private:
  GridSpec spec_;
  int vdim_;
  std::vector<Vec> values_;
};

// A vector and its partials at one parameter point.
struct JetRecord {
  Vec value, d_x, d_y, d_xx, d_xy, d_yy;
  std::optional<Vec> d_xxx, d_yyy;

  int order() const { return (d_xxx && d_yyy) ? 3 : 2; }
  bool finite() const;
};

// Component-wise linear map and scaling of whole jets.
JetRecord operator*(double s, const JetRecord& j);
JetRecord negate(const JetRecord& j);

// Points needed on each side of (i,j) for a jet of the given order.
int jet_margin(int order, int stencil);

JetRecord jet_at(const FieldGrid& grid, int i, int j, int order = 2, int stencil = 4);

// Central-difference partials at an nD index. partial2 with a != b is the
// tensor product of two first-derivative stencils.
Vec partial1(const FieldGrid& grid, std::span<const int> idx, int axis, int stencil);
Vec partial2(const FieldGrid& grid, std::span<const int> idx, int a, int b, int stencil);
Vec partial3(const FieldGrid& grid, std::span<const int> idx, int axis, int stencil);

// Integer-lattice field with labelled sites [lo1, lo1+M1) x [lo2, lo2+M2).
class LatticeField {
 public:
  LatticeField(int m1, int m2, int vdim, int lo1 = 0, int lo2 = 0);

  int extent1() const { return m1_; }
  int extent2() const { return m2_; }
  int lo1() const { return lo1_; }
  int lo2() const { return lo2_; }
  int hi1() const { return lo1_ + m1_; }
  int hi2() const { return lo2_ + m2_; }
  int vdim() const { return vdim_; }

  bool contains(int n1, int n2) const { return n1 >= lo1_ && n1 < hi1() && n2 >= lo2_ && n2 < hi2(); }
  Vec& at(int n1, int n2);
  const Vec& at(int n1, int n2) const;

  std::vector<Vec>& values() { return values_; }
  const std::vector<Vec>& values() const { return values_; }

 private:
  void check(int n1, int n2) const;

  int m1_, m2_, vdim_, lo1_, lo2_;
  std::vector<Vec> values_;
};

// T_dir^steps: the result at n equals the input at n + steps*e_dir, defined on
// the labelled sites where both exist. An empty overlap is a boundary error.
LatticeField shift(const LatticeField& lat, int dir, int steps);

}  // namespace plm

#include "plm/fields.hpp"

#include <array>
#include <cmath>

namespace plm {

std::size_t GridSpec::count() const {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

std::size_t GridSpec::flat(std::span<const int> idx) const {
  std::size_t k = 0;
  for (int a = ndim() - 1; a >= 0; --a) k = k * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(idx[a]);
  return k;
}

std::vector<int> GridSpec::unflat(std::size_t k) const {
  std::vector<int> idx(dims.size());
  for (int a = 0; a < ndim(); ++a) {
    idx[a] = static_cast<int>(k % static_cast<std::size_t>(dims[a]));
    k /= static_cast<std::size_t>(dims[a]);
  }
  return idx;
}

void GridSpec::validate() const {
  if (dims.empty() || origin.size() != dims.size() || spacing.size() != dims.size())
    throw DomainError("grid spec with inconsistent axis counts");
  for (int a = 0; a < ndim(); ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw DomainError("grid spacing must be positive");
    if (dims[a] < 1) throw DomainError("grid dimension must be positive");
    if (!std::isfinite(origin[a])) throw DomainError("grid origin must be finite");
  }
}

GridSpec GridSpec::box(int ndim, double lo, double hi, double h) {
  if (!(h > 0.0) || !(hi > lo)) throw DomainError("box needs lo < hi and h > 0");
  const int n = static_cast<int>(std::lround((hi - lo) / h)) + 1;
  GridSpec g;
  g.origin.assign(ndim, lo);
  g.spacing.assign(ndim, h);
  g.dims.assign(ndim, n);
  return g;
}

GridSpec GridSpec::box2(double x0, double x1, double hx, double y0, double y1, double hy) {
  if (!(hx > 0.0) || !(hy > 0.0) || !(x1 > x0) || !(y1 > y0)) throw DomainError("box needs lo < hi and h > 0");
  GridSpec g;
  g.origin = {x0, y0};
  g.spacing = {hx, hy};
  g.dims = {static_cast<int>(std::lround((x1 - x0) / hx)) + 1, static_cast<int>(std::lround((y1 - y0) / hy)) + 1};
  return g;
}

bool same_layout(const GridSpec& a, const GridSpec& b) {
  if (a.dims != b.dims) return false;
  for (int k = 0; k < a.ndim(); ++k) {
    const double tol = 1e-12 * std::max(1.0, std::abs(a.origin[k]));
    if (std::abs(a.origin[k] - b.origin[k]) > tol) return false;
    if (std::abs(a.spacing[k] - b.spacing[k]) > 1e-12 * a.spacing[k]) return false;
  }
  return true;
}

FieldGrid::FieldGrid(GridSpec spec, int vdim) : spec_(std::move(spec)), vdim_(vdim) {
  spec_.validate();
  values_.assign(spec_.count(), Vec(vdim));
}

bool JetRecord::finite() const {
  for (const Vec* v : {&value, &d_x, &d_y, &d_xx, &d_xy, &d_yy})
    if (!all_finite(*v)) return false;
  if (d_xxx && !all_finite(*d_xxx)) return false;
  if (d_yyy && !all_finite(*d_yyy)) return false;
  return true;
}

JetRecord operator*(double s, const JetRecord& j) {
  JetRecord r{s * j.value, s * j.d_x, s * j.d_y, s * j.d_xx, s * j.d_xy, s * j.d_yy, {}, {}};
  if (j.d_xxx) r.d_xxx = s * *j.d_xxx;
  if (j.d_yyy) r.d_yyy = s * *j.d_yyy;
  return r;
}

JetRecord negate(const JetRecord& j) { return -1.0 * j; }

namespace {

// weights on offsets -3..3
using Weights = std::array<double, 7>;

const Weights& first_weights(int stencil) {
  static const Weights w2{0, 0, -0.5, 0, 0.5, 0, 0};
  static const Weights w4{0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0};
  return stencil == 2 ? w2 : w4;
}

const Weights& second_weights(int stencil) {
  static const Weights w2{0, 0, 1, -2, 1, 0, 0};
  static const Weights w4{0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0};
  return stencil == 2 ? w2 : w4;
}

const Weights& third_weights(int stencil) {
  static const Weights w2{0, -0.5, 1, 0, -1, 0.5, 0};
  static const Weights w4{1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8};
  return stencil == 2 ? w2 : w4;
}

void check_stencil(int stencil) {
  if (stencil != 2 && stencil != 4) throw DomainError("stencil must be 2 or 4");
}

void check_reach(const FieldGrid& g, std::span<const int> idx, int axis, int reach) {
  if (axis < 0 || axis >= g.spec().ndim()) throw DomainError("axis outside grid dimension");
  const int i = idx[axis];
  if (i - reach < 0 || i + reach >= g.spec().dims[axis])
    throw BoundaryError("index " + std::to_string(i) + " on axis " + std::to_string(axis) +
                        " is closer than " + std::to_string(reach) + " points to the boundary");
}

Vec apply1(const FieldGrid& g, std::span<const int> idx, int axis, const Weights& w, double scale) {
  std::vector<int> k(idx.begin(), idx.end());
  Vec out(g.vdim());
  for (int o = -3; o <= 3; ++o) {
    const double c = w[o + 3];
    if (c == 0.0) continue;
    k[axis] = idx[axis] + o;
    out += c * g.at(std::span<const int>(k));
  }
  return out / scale;
}

}  // namespace

int jet_margin(int order, int stencil) {
  check_stencil(stencil);
  if (order != 2 && order != 3) throw DomainError("jet order must be 2 or 3");
  return stencil / 2 + (order - 2);
}

Vec partial1(const FieldGrid& g, std::span<const int> idx, int axis, int stencil) {
  check_stencil(stencil);
  check_reach(g, idx, axis, stencil / 2);
  return apply1(g, idx, axis, first_weights(stencil), g.spec().spacing[axis]);
}

Vec partial2(const FieldGrid& g, std::span<const int> idx, int a, int b, int stencil) {
  check_stencil(stencil);
  check_reach(g, idx, a, stencil / 2);
  check_reach(g, idx, b, stencil / 2);
  const double ha = g.spec().spacing[a], hb = g.spec().spacing[b];
  if (a == b) return apply1(g, idx, a, second_weights(stencil), ha * ha);
  const Weights& w = first_weights(stencil);
  std::vector<int> k(idx.begin(), idx.end());
  Vec out(g.vdim());
  for (int p = -2; p <= 2; ++p)
    for (int q = -2; q <= 2; ++q) {
      const double c = w[p + 3] * w[q + 3];
      if (c == 0.0) continue;
      k[a] = idx[a] + p;
      k[b] = idx[b] + q;
      out += c * g.at(std::span<const int>(k));
    }
  return out / (ha * hb);
}

Vec partial3(const FieldGrid& g, std::span<const int> idx, int axis, int stencil) {
  check_stencil(stencil);
  check_reach(g, idx, axis, stencil / 2 + 1);
  const double h = g.spec().spacing[axis];
  return apply1(g, idx, axis, third_weights(stencil), h * h * h);
}

JetRecord jet_at(const FieldGrid& g, int i, int j, int order, int stencil) {
  if (g.spec().ndim() != 2) throw DomainError("jet_at needs a 2D grid");
  const int m = jet_margin(order, stencil);
  if (i < m || j < m || i >= g.nx() - m || j >= g.ny() - m)
    throw BoundaryError("point (" + std::to_string(i) + "," + std::to_string(j) + ") inside the " +
                        std::to_string(m) + "-point boundary margin");
  const std::array<int, 2> idx{i, j};
  JetRecord r;
  r.value = g.at(i, j);
  r.d_x = partial1(g, idx, 0, stencil);
  r.d_y = partial1(g, idx, 1, stencil);
  r.d_xx = partial2(g, idx, 0, 0, stencil);
  r.d_xy = partial2(g, idx, 0, 1, stencil);
  r.d_yy = partial2(g, idx, 1, 1, stencil);
  if (order == 3) {
    r.d_xxx = partial3(g, idx, 0, stencil);
    r.d_yyy = partial3(g, idx, 1, stencil);
  }
  return r;
}

LatticeField::LatticeField(int m1, int m2, int vdim, int lo1, int lo2)
    : m1_(m1), m2_(m2), vdim_(vdim), lo1_(lo1), lo2_(lo2) {
  if (m1 < 0 || m2 < 0) throw DomainError("negative lattice extent");
  values_.assign(static_cast<std::size_t>(m1) * m2, Vec(vdim));
}

void LatticeField::check(int n1, int n2) const {
  if (!contains(n1, n2))
    throw BoundaryError("lattice site (" + std::to_string(n1) + "," + std::to_string(n2) + ") outside [" +
                        std::to_string(lo1_) + "," + std::to_string(hi1()) + ")x[" + std::to_string(lo2_) + "," +
                        std::to_string(hi2()) + ")");
}

Vec& LatticeField::at(int n1, int n2) {
  check(n1, n2);
  return values_[static_cast<std::size_t>(n1 - lo1_) + static_cast<std::size_t>(m1_) * (n2 - lo2_)];
}

const Vec& LatticeField::at(int n1, int n2) const {
  check(n1, n2);
  return values_[static_cast<std::size_t>(n1 - lo1_) + static_cast<std::size_t>(m1_) * (n2 - lo2_)];
}

LatticeField shift(const LatticeField& lat, int dir, int steps) {
  if (dir != 1 && dir != 2) throw DomainError("shift direction must be 1 or 2");
  const int s1 = dir == 1 ? steps : 0, s2 = dir == 2 ? steps : 0;
  const int lo1 = std::max(lat.lo1(), lat.lo1() - s1), hi1 = std::min(lat.hi1(), lat.hi1() - s1);
  const int lo2 = std::max(lat.lo2(), lat.lo2() - s2), hi2 = std::min(lat.hi2(), lat.hi2() - s2);
  if (hi1 <= lo1 || hi2 <= lo2)
    throw BoundaryError("shift by " + std::to_string(steps) + " along direction " + std::to_string(dir) +
                        " leaves no sites inside the lattice");
  LatticeField out(hi1 - lo1, hi2 - lo2, lat.vdim(), lo1, lo2);
  for (int n2 = lo2; n2 < hi2; ++n2)
    for (int n1 = lo1; n1 < hi1; ++n1) out.at(n1, n2) = lat.at(n1 + s1, n2 + s2);
  return out;
}

}  // namespace plm

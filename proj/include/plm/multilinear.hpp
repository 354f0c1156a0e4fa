#pragma once

// Small-dimension exterior algebra. Indices are 0-based everywhere except
// levi_civita_sign, which takes 1-based labels.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "plm/errors.hpp"

namespace plm {

inline constexpr int kMaxDim = 6;

template <class T>
class BasicVec {
 public:
  BasicVec() = default;
  explicit BasicVec(int d) : n_(d) {
    if (d < 1 || d > kMaxDim) throw DomainError("vector dimension " + std::to_string(d) + " outside 1..6");
  }
  BasicVec(std::initializer_list<T> xs) : BasicVec(static_cast<int>(xs.size())) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }

  static BasicVec unit(int d, int i) {
    BasicVec e(d);
    e[i] = T(1);
    return e;
  }

  int size() const { return n_; }
  T& operator[](int i) { return c_[i]; }
  const T& operator[](int i) const { return c_[i]; }
  const T* begin() const { return c_.data(); }
  const T* end() const { return c_.data() + n_; }

  BasicVec& operator+=(const BasicVec& o) {
    same_dim(o);
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  BasicVec& operator-=(const BasicVec& o) {
    same_dim(o);
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BasicVec& operator*=(const T& s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }
  BasicVec& operator/=(const T& s) {
    for (int i = 0; i < n_; ++i) c_[i] /= s;
    return *this;
  }

  friend BasicVec operator+(BasicVec a, const BasicVec& b) { return a += b; }
  friend BasicVec operator-(BasicVec a, const BasicVec& b) { return a -= b; }
  friend BasicVec operator*(BasicVec a, const T& s) { return a *= s; }
  friend BasicVec operator*(const T& s, BasicVec a) { return a *= s; }
  friend BasicVec operator/(BasicVec a, const T& s) { return a /= s; }
  friend BasicVec operator-(BasicVec a) {
    for (int i = 0; i < a.n_; ++i) a.c_[i] = -a.c_[i];
    return a;
  }
  friend bool operator==(const BasicVec& a, const BasicVec& b) {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }

 private:
  void same_dim(const BasicVec& o) const {
    if (o.n_ != n_) throw DomainError("dimension mismatch");
  }

  std::array<T, kMaxDim> c_{};
  int n_ = 0;
};

using Vec = BasicVec<double>;

inline double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

template <class T>
T pair(const BasicVec<T>& f, const BasicVec<T>& nu) {
  if (f.size() != nu.size()) throw DomainError("pairing of vectors with different dimensions");
  T s{};
  for (int i = 0; i < f.size(); ++i) s += f[i] * nu[i];
  return s;
}

namespace detail {

struct PermTable {
  std::vector<std::array<int, kMaxDim>> perms;
  std::vector<int> signs;
};

inline int inversion_sign(const int* p, int d) {
  int inv = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2) ? -1 : 1;
}

// every permutation of 0..d-1 with its sign, built once per process
inline const PermTable& perm_table(int d) {
  static const std::array<PermTable, kMaxDim + 1> tables = [] {
    std::array<PermTable, kMaxDim + 1> t;
    for (int d = 0; d <= kMaxDim; ++d) {
      std::array<int, kMaxDim> p{};
      for (int i = 0; i < d; ++i) p[i] = i;
      do {
        t[d].perms.push_back(p);
        t[d].signs.push_back(inversion_sign(p.data(), d));
      } while (std::next_permutation(p.begin(), p.begin() + d));
    }
    return t;
  }();
  return tables.at(d);
}

// sign of a 0-based index tuple; repeats give 0
inline int epsilon0(std::span<const int> idx) {
  const int d = static_cast<int>(idx.size());
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (idx[i] == idx[j]) return 0;
  return inversion_sign(idx.data(), d);
}

}  // namespace detail

inline int levi_civita_sign(std::span<const int> p) {
  const int d = static_cast<int>(p.size());
  std::array<int, 16> z{};
  if (d > 16) throw DomainError("too many indices");
  for (int i = 0; i < d; ++i) {
    if (p[i] < 1 || p[i] > d)
      throw DomainError("index " + std::to_string(p[i]) + " outside 1.." + std::to_string(d));
    z[i] = p[i] - 1;
  }
  return detail::epsilon0(std::span<const int>(z.data(), d));
}

inline int levi_civita_sign(std::initializer_list<int> p) {
  return levi_civita_sign(std::span<const int>(p.begin(), p.size()));
}

template <class T>
class BasicBivector {
 public:
  explicit BasicBivector(int d = 4) : n_(d) {
    if (d < 2 || d > kMaxDim) throw DomainError("bivector dimension outside 2..6");
  }

  int dim() const { return n_; }
  const T& operator()(int i, int j) const { return b_[i * kMaxDim + j]; }

  // writes both (i,j) and (j,i) so antisymmetry holds by construction
  void set(int i, int j, const T& v) {
    if (i == j) {
      if (!(v == T(0))) throw DomainError("diagonal of a bivector must vanish");
      return;
    }
    b_[i * kMaxDim + j] = v;
    b_[j * kMaxDim + i] = -v;
  }

  BasicBivector& operator+=(const BasicBivector& o) {
    for (std::size_t k = 0; k < b_.size(); ++k) b_[k] += o.b_[k];
    return *this;
  }
  BasicBivector& operator-=(const BasicBivector& o) {
    for (std::size_t k = 0; k < b_.size(); ++k) b_[k] -= o.b_[k];
    return *this;
  }
  BasicBivector& operator*=(const T& s) {
    for (auto& x : b_) x *= s;
    return *this;
  }
  friend BasicBivector operator+(BasicBivector a, const BasicBivector& b) { return a += b; }
  friend BasicBivector operator-(BasicBivector a, const BasicBivector& b) { return a -= b; }
  friend BasicBivector operator*(const T& s, BasicBivector a) { return a *= s; }
  friend BasicBivector operator-(BasicBivector a) { return a *= T(-1); }
  friend bool operator==(const BasicBivector& a, const BasicBivector& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t k = 0; k < a.b_.size(); ++k)
      if (!(a.b_[k] == b.b_[k])) return false;
    return true;
  }

 private:
  std::array<T, kMaxDim * kMaxDim> b_{};
  int n_;
};

using Bivector = BasicBivector<double>;

inline double norm(const Bivector& b) {
  double s = 0.0;
  for (int i = 0; i < b.dim(); ++i)
    for (int j = i + 1; j < b.dim(); ++j) s += b(i, j) * b(i, j);
  return std::sqrt(s);
}

template <class T>
BasicBivector<T> wedge2(const BasicVec<T>& a, const BasicVec<T>& b) {
  if (a.size() != b.size()) throw DomainError("wedge of vectors with different dimensions");
  BasicBivector<T> w(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) w.set(i, j, a[i] * b[j] - a[j] * b[i]);
  return w;
}

template <class T>
BasicBivector<T> hodge_star(const BasicBivector<T>& B) {
  if (B.dim() != 4) throw DomainError("hodge_star is defined for d = 4 only");
  BasicBivector<T> out(4);
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l) {
      T s{};
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          const int idx[4] = {i, j, k, l};
          const int e = detail::epsilon0(idx);
          if (e > 0) s += B(i, j);
          if (e < 0) s -= B(i, j);
        }
      out.set(k, l, s);
    }
  return out;
}

// [a_1, ..., a_{d-1}]_i = eps_{i i2 .. id} a_1[i2] ... a_{d-1}[id]
template <class T>
BasicVec<T> cross_n(std::span<const BasicVec<T>> vs) {
  const int d = static_cast<int>(vs.size()) + 1;
  if (d < 2 || d > kMaxDim) throw DomainError("cross_n needs between 1 and 5 vectors");
  for (const auto& v : vs)
    if (v.size() != d)
      throw DomainError("cross_n of " + std::to_string(d - 1) + " vectors needs dimension " + std::to_string(d));
  const auto& tab = detail::perm_table(d);
  BasicVec<T> out(d);
  for (std::size_t k = 0; k < tab.perms.size(); ++k) {
    const auto& p = tab.perms[k];
    T term(tab.signs[k]);
    for (int m = 0; m < d - 1; ++m) term *= vs[m][p[m + 1]];
    out[p[0]] += term;
  }
  return out;
}

// star of v_1 ^ ... ^ v_n in d = n + 2: (star)_{kl} = eps_{i1..in k l} v_1[i1] ... v_n[in]
template <class T>
BasicBivector<T> star_of_wedge(std::span<const BasicVec<T>> vs) {
  const int d = static_cast<int>(vs.size()) + 2;
  if (d < 3 || d > kMaxDim) throw DomainError("star_of_wedge needs between 1 and 4 vectors");
  for (const auto& v : vs)
    if (v.size() != d) throw DomainError("star_of_wedge dimension mismatch");
  const auto& tab = detail::perm_table(d);
  std::array<T, kMaxDim * kMaxDim> raw{};
  for (std::size_t k = 0; k < tab.perms.size(); ++k) {
    const auto& p = tab.perms[k];
    T term(tab.signs[k]);
    for (int m = 0; m < d - 2; ++m) term *= vs[m][p[m]];
    raw[p[d - 2] * kMaxDim + p[d - 1]] += term;
  }
  BasicBivector<T> out(d);
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) out.set(k, l, raw[k * kMaxDim + l]);
  return out;
}

namespace detail {

template <class T>
T cofactor_det(const std::array<std::array<T, 4>, 4>& m, int d, unsigned used_cols, int row) {
  if (row == d) return T(1);
  T s{};
  int parity = 0;
  for (int c = 0; c < d; ++c) {
    if (used_cols & (1u << c)) continue;
    if (!(m[row][c] == T(0))) {
      T minor = cofactor_det(m, d, used_cols | (1u << c), row + 1);
      if (parity % 2) s -= m[row][c] * minor;
      else s += m[row][c] * minor;
    }
    ++parity;
  }
  return s;
}

}  // namespace detail

// rows are the vectors; Laplace expansion for d <= 4, pivoted elimination above
template <class T>
T det_n(std::span<const BasicVec<T>> rows) {
  const int d = static_cast<int>(rows.size());
  if (d < 1 || d > kMaxDim) throw DomainError("det_n needs between 1 and 6 vectors");
  for (const auto& r : rows)
    if (r.size() != d) throw DomainError("det_n needs d vectors of dimension d");
  if (d <= 4) {
    std::array<std::array<T, 4>, 4> m{};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m[i][j] = rows[i][j];
    return detail::cofactor_det(m, d, 0u, 0);
  }
  using std::abs;
  std::array<std::array<T, kMaxDim>, kMaxDim> m{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] = rows[i][j];
  T det(1);
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
    if (m[piv][c] == T(0)) return T(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < d; ++r) {
      T f = m[r][c] / m[c][c];
      for (int k = c; k < d; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

template <class T>
T det_n(const std::vector<BasicVec<T>>& rows) {
  return det_n(std::span<const BasicVec<T>>(rows));
}

template <class T>
BasicVec<T> cross_n(const std::vector<BasicVec<T>>& vs) {
  return cross_n(std::span<const BasicVec<T>>(vs));
}

template <class T>
BasicBivector<T> star_of_wedge(const std::vector<BasicVec<T>>& vs) {
  return star_of_wedge(std::span<const BasicVec<T>>(vs));
}

template <class T, class... R>
T det(const BasicVec<T>& a, const R&... rest) {
  const std::array<BasicVec<T>, 1 + sizeof...(R)> rows{a, rest...};
  return det_n(std::span<const BasicVec<T>>(rows));
}

template <class T, class... R>
BasicVec<T> cross(const BasicVec<T>& a, const R&... rest) {
  const std::array<BasicVec<T>, 1 + sizeof...(R)> vs{a, rest...};
  return cross_n(std::span<const BasicVec<T>>(vs));
}

// Least-squares fit of target in span(basis) through the normal equations.
struct SpanFit {
  std::vector<double> coeffs;
  double residual = 0.0;       // |target - sum c_k b_k|
  double volume_ratio = 0.0;   // Gram determinant over the product of squared norms
  bool rank_deficient = false;
};

SpanFit span_fit(std::span<const Vec> basis, const Vec& target, double rank_tol = 1e-20);

// Dense square solve with partial pivoting; throws DegenerateError on a zero pivot.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n);

}  // namespace plm

namespace plm {

// Distance between two projective points: both are scaled to last component 1
// when it is usable, otherwise compared as sign-aligned unit vectors.
inline double projective_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DomainError("projective_distance dimension mismatch");
  const int l = a.size() - 1;
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return na == nb ? 0.0 : 1.0;
  if (std::abs(a[l]) > 1e-8 * na && std::abs(b[l]) > 1e-8 * nb) return norm(a / a[l] - b / b[l]);
  const Vec ua = a / na, ub = b / nb;
  return std::min(norm(ua - ub), norm(ua + ub));
}

}  // namespace plm

#include "plm/multilinear.hpp"

#include <cmath>

namespace plm {

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) throw DegenerateError("singular linear system");
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[piv * n + k], a[c * n + k]);
      std::swap(b[piv], b[c]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

SpanFit span_fit(std::span<const Vec> basis, const Vec& target, double rank_tol) {
  const int m = static_cast<int>(basis.size());
  SpanFit fit;
  std::vector<double> g(m * m), rhs(m);
  double norm_prod = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g[i * m + j] = pair(basis[i], basis[j]);
    rhs[i] = pair(basis[i], target);
    norm_prod *= g[i * m + i];
  }
  // Gram determinant by elimination on a copy
  {
    std::vector<double> t = g;
    double d = 1.0;
    for (int c = 0; c < m; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::abs(t[r * m + c]) > std::abs(t[piv * m + c])) piv = r;
      if (piv != c)
        for (int k = 0; k < m; ++k) std::swap(t[piv * m + k], t[c * m + k]);
      d *= t[c * m + c];
      if (t[c * m + c] == 0.0) break;
      for (int r = c + 1; r < m; ++r) {
        const double f = t[r * m + c] / t[c * m + c];
        for (int k = c; k < m; ++k) t[r * m + k] -= f * t[c * m + k];
      }
    }
    fit.volume_ratio = norm_prod > 0.0 ? std::abs(d) / norm_prod : 0.0;
  }
  if (!(fit.volume_ratio > rank_tol)) {
    fit.rank_deficient = true;
    fit.coeffs.assign(m, 0.0);
    fit.residual = norm(target);
    return fit;
  }
  fit.coeffs = solve_dense(g, rhs, m);
  Vec r = target;
  for (int i = 0; i < m; ++i) r -= fit.coeffs[i] * basis[i];
  fit.residual = norm(r);
  return fit;
}

}  // namespace plm

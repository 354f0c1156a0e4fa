#include "plm/plm_hyper.hpp"

#include <cmath>

#include "plm/csv_io.hpp"
#include "sweep.hpp"

namespace plm {

using detail::Check;

AMatrix::AMatrix(int n, std::vector<double> rowmajor) : n_(n), a_(std::move(rowmajor)) {
  if (n < 2 || n > 4) throw DomainError("A matrix size " + std::to_string(n) + " outside 2..4");
  if (a_.size() != static_cast<std::size_t>(n) * n) throw DomainError("A matrix needs n*n entries");
  for (double v : a_)
    if (!std::isfinite(v)) throw DomainError("A matrix has a non-finite entry");
  if (determinant() == 0.0) throw DomainError("A matrix is singular");
}

AMatrix AMatrix::identity(int n, double s) {
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = s;
  return AMatrix(n, std::move(v));
}

double AMatrix::determinant() const {
  std::vector<Vec> rows;
  for (int i = 0; i < n_; ++i) {
    Vec r(n_);
    for (int j = 0; j < n_; ++j) r[j] = (*this)(i, j);
    rows.push_back(r);
  }
  return det_n(rows);
}

void HyperJet::validate() const {
  if (n < 2 || n > 4) throw DomainError("hypersurface dimension outside 2..4");
  if (value.size() != n + 2) throw DomainError("hyper jet needs (n+2)-vectors");
  if (d.size() != static_cast<std::size_t>(n)) throw DomainError("hyper jet needs n first partials");
  for (const auto& v : d)
    if (v.size() != n + 2) throw DomainError("hyper jet partial has wrong dimension");
}

HyperJet hyper_jet(const FieldGrid& grid, std::span<const int> idx, int stencil) {
  HyperJet j;
  j.n = grid.spec().ndim();
  if (grid.vdim() != j.n + 2)
    throw DomainError("grid over " + std::to_string(j.n) + " parameters must carry " + std::to_string(j.n + 2) +
                      "-vectors");
  j.value = grid.at(idx);
  for (int a = 0; a < j.n; ++a) j.d.push_back(partial1(grid, idx, a, stencil));
  j.dd.resize(static_cast<std::size_t>(j.n) * j.n);
  for (int a = 0; a < j.n; ++a)
    for (int b = a; b < j.n; ++b) {
      j.dd[static_cast<std::size_t>(a) * j.n + b] = partial2(grid, idx, a, b, stencil);
      j.dd[static_cast<std::size_t>(b) * j.n + a] = j.dd[static_cast<std::size_t>(a) * j.n + b];
    }
  return j;
}

std::vector<std::vector<int>> interior_indices(const GridSpec& spec, int margin) {
  std::vector<std::vector<int>> out;
  for (std::size_t k = 0; k < spec.count(); ++k) {
    auto idx = spec.unflat(k);
    bool inside = true;
    for (int a = 0; a < spec.ndim(); ++a)
      if (idx[a] < margin || idx[a] >= spec.dims[a] - margin) inside = false;
    if (inside) out.push_back(std::move(idx));
  }
  return out;
}

namespace {

Vec conormal_cross(const HyperJet& nu) {
  std::vector<Vec> vs{nu.value};
  vs.insert(vs.end(), nu.d.begin(), nu.d.end());
  return cross_n(vs);
}

}  // namespace

Vec hyper_reconstruct(const HyperJet& nu, const AMatrix& A, int a, int g) {
  nu.validate();
  if (A.n() != nu.n) throw DomainError("A matrix size does not match the jet");
  if (a < 0 || a >= nu.n || g < 0 || g >= nu.n) throw DomainError("pivot index out of range");
  if (nu.dd.size() != static_cast<std::size_t>(nu.n) * nu.n) throw DomainError("hyper jet lacks second partials");
  std::vector<Vec> rows{nu.second(a, g), nu.value};
  rows.insert(rows.end(), nu.d.begin(), nu.d.end());
  const double dt = det_n(rows);
  double scale = 1.0;
  for (const auto& r : rows) scale *= norm(r);
  const double Aag = A(a, g);
  if (Aag == 0.0)
    throw DegenerateError("pivot (" + std::to_string(a) + "," + std::to_string(g) + ") has A entry 0");
  if (std::abs(dt) <= 1e-10 * scale) throw DegenerateError("non-generic point: vanishing pivot determinant");
  const double ratio = Aag / dt;
  if (ratio < 0.0)
    throw ChartMismatchError("pivot-mismatch: A_" + std::to_string(a) + std::to_string(g) +
                             " / det is negative");
  return -std::sqrt(ratio) * conormal_cross(nu);
}

AMatrix recover_A(const HyperJet& f, const HyperJet& nu) {
  nu.validate();
  if (f.n != nu.n || f.value.size() != nu.value.size() || f.d.size() != nu.d.size())
    throw DomainError("f and nu jets do not match");
  const Vec c = conormal_cross(nu);
  const double cc = pair(c, c);
  double scale = norm(nu.value);
  for (const auto& v : nu.d) scale *= norm(v);
  if (std::sqrt(cc) <= 1e-12 * scale) throw DegenerateError("nu and its first partials are dependent");
  const double fc = pair(f.value, c);
  std::vector<double> a(static_cast<std::size_t>(nu.n) * nu.n);
  for (int i = 0; i < nu.n; ++i)
    for (int g = 0; g < nu.n; ++g) a[static_cast<std::size_t>(i) * nu.n + g] = -pair(f.d[i], nu.d[g]) * fc / cc;
  return AMatrix(nu.n, std::move(a));
}

AField AField::constant(const GridSpec& spec, const AMatrix& A) { return AField{spec, {A}}; }

AField read_a_field_csv(const std::string& path) {
  const auto t = read_csv_table(path);
  // reuse the grid reader for the coordinate layout: a11.. become v1..
  CsvTable renamed = t;
  int n = 0;
  while (t.column("a" + std::to_string(n + 1) + std::to_string(n + 1)) >= 0) ++n;
  if (n < 2 || n > 4) throw ParseError(1, "missing column 'a11'..'ann' for n in 2..4");
  int k = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const std::string name = "a" + std::to_string(i) + std::to_string(j);
      const int c = t.column(name);
      if (c < 0) throw ParseError(1, "missing column '" + name + "'");
      renamed.header[c] = "v" + std::to_string(++k);
    }
  FieldGrid g = grid_from_table(renamed);
  if (g.spec().ndim() != n) throw ParseError(1, "A field dimension does not match its coordinate count");
  AField out;
  out.spec = g.spec();
  for (std::size_t r = 0; r < g.values().size(); ++r) {
    const Vec& v = g.values()[r];
    try {
      out.values.emplace_back(n, std::vector<double>(v.begin(), v.end()));
    } catch (const DomainError& e) {
      throw ParseError(t.lines[r], e.what());
    }
  }
  return out;
}

namespace {

std::vector<HyperSample> grid_samples(const FieldGrid* f, const FieldGrid& nu, const AField& A, int stencil) {
  if (f && !same_layout(f->spec(), nu.spec())) throw DomainError("f and nu grids do not match");
  if (A.values.size() != 1 && !same_layout(A.spec, nu.spec())) throw DomainError("A field does not match nu grid");
  const auto idx = interior_indices(nu.spec(), stencil / 2);
  if (idx.empty()) throw DomainError("grid interior is empty for this stencil");
  std::vector<HyperSample> out(idx.size());
  parallel_for(idx.size(), [&](std::size_t k) {
    auto& s = out[k];
    s.site.assign(idx[k].begin(), idx[k].end());
    s.nu = hyper_jet(nu, idx[k], stencil);
    if (f) s.f = hyper_jet(*f, idx[k], stencil);
    s.A = A.at(nu.spec().flat(idx[k]));
  });
  return out;
}

std::function<std::vector<long>(std::size_t)> sites(const std::vector<HyperSample>& s) {
  return [&s](std::size_t i) { return s[i].site; };
}

}  // namespace

InvariantReport hyper_plm_residual(const std::vector<HyperSample>& s, double tol) {
  if (s.empty()) return {};
  const int n = s.front().nu.n;
  std::vector<Check> checks;
  for (int a = 0; a < n; ++a) checks.push_back({"hyper.plm." + std::to_string(a + 1), tol});
  checks.push_back({"hyper.<f,nu>", tol});
  checks.push_back({"hyper.<f_a,nu>", tol});
  checks.push_back({"hyper.<f,nu_a>", tol});
  auto rep = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* out) {
    const auto& f = s[i].f;
    const auto& nu = s[i].nu;
    nu.validate();
    f.validate();
    if (f.n != n || nu.n != n || s[i].A.n() != n) throw DomainError("mixed hypersurface dimensions");
    std::vector<Bivector> stars;
    for (int b = 0; b < n; ++b) {
      std::vector<Vec> vs = nu.d;
      vs[b] = nu.value;
      stars.push_back(star_of_wedge(vs));
    }
    for (int a = 0; a < n; ++a) {
      const Bivector l = wedge2(f.value, f.d[a]);
      Bivector r(n + 2);
      for (int b = 0; b < n; ++b) r += s[i].A(a, b) * stars[b];
      const double sc = std::max(norm(l), norm(r));
      out[a] = sc > 0.0 ? norm(l - r) / sc : 0.0;
    }
    double scale = norm(f.value) * norm(nu.value);
    for (int a = 0; a < n; ++a) scale = std::max({scale, norm(f.d[a]) * norm(nu.value), norm(f.value) * norm(nu.d[a])});
    if (!(scale > 0.0)) scale = 1.0;
    out[n] = std::abs(pair(f.value, nu.value)) / scale;
    double fa = 0.0, na = 0.0;
    for (int a = 0; a < n; ++a) {
      fa = std::max(fa, std::abs(pair(f.d[a], nu.value)) / scale);
      na = std::max(na, std::abs(pair(f.value, nu.d[a])) / scale);
    }
    out[n + 1] = fa;
    out[n + 2] = na;
  });
  rep.metadata["n"] = n;
  return rep;
}

InvariantReport hyper_compat_residual(const std::vector<HyperSample>& s, double tol) {
  if (s.empty()) return {};
  const int n = s.front().nu.n;
  std::vector<Check> checks{{"hyper.compat", tol}, {"hyper.compat.diagonal", tol, false, "a=b, g=d quadruples"}};
  auto rep = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* out) {
    const auto& nu = s[i].nu;
    const auto& A = s[i].A;
    nu.validate();
    std::vector<Vec> basis{nu.value};
    basis.insert(basis.end(), nu.d.begin(), nu.d.end());
    double worst = 0.0, diag = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g)
          for (int d = 0; d < n; ++d) {
            const Vec v = A(a, g) * nu.second(b, d) - A(b, d) * nu.second(a, g);
            const SpanFit fit = span_fit(basis, v);
            if (fit.rank_deficient) throw DegenerateError("nu and its first partials are dependent");
            const double sc =
                std::max(1.0, std::abs(A(a, g)) * norm(nu.second(b, d)) + std::abs(A(b, d)) * norm(nu.second(a, g)));
            const double r = fit.residual / sc;
            if (a == b && g == d) diag = std::max(diag, norm(v));
            else worst = std::max(worst, r);
          }
    out[0] = worst;
    out[1] = diag;
  });
  rep.metadata["n"] = n;
  return rep;
}

InvariantReport hyper_plm_residual(const FieldGrid& f, const FieldGrid& nu, const AField& A, int stencil,
                                   double tol) {
  return hyper_plm_residual(grid_samples(&f, nu, A, stencil), tol);
}

InvariantReport hyper_compat_residual(const FieldGrid& nu, const AField& A, int stencil, double tol) {
  return hyper_compat_residual(grid_samples(nullptr, nu, A, stencil), tol);
}

}  // namespace plm

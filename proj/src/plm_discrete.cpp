#include "plm/plm_discrete.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "plm/csv_io.hpp"
#include "sweep.hpp"

namespace plm {

using detail::Check;
using detail::kSkip;
using detail::rel_diff;

namespace {

std::string site_str(int n1, int n2) { return "(" + std::to_string(n1) + "," + std::to_string(n2) + ")"; }

struct Site {
  int n1, n2;
};

std::vector<Site> all_sites(const LatticeField& l) {
  std::vector<Site> s;
  for (int n2 = l.lo2(); n2 < l.hi2(); ++n2)
    for (int n1 = l.lo1(); n1 < l.hi1(); ++n1) s.push_back({n1, n2});
  return s;
}

std::function<std::vector<long>(std::size_t)> sites_of(const std::vector<Site>& s) {
  return [&s](std::size_t i) { return std::vector<long>{s[i].n1, s[i].n2}; };
}

double moutard_defect(const Vec& a, const Vec& a1, const Vec& a2, const Vec& a12) {
  const Vec p = a + a12, q = a1 + a2;
  const double np = norm(p), nq = norm(q);
  const double c = norm(cross(p, q));
  return (np > 0.0 && nq > 0.0) ? c / (np * nq) : c;
}

void require_vdim(const LatticeField& l, int d, const char* what) {
  if (l.vdim() != d) throw DomainError(std::string(what) + " must carry " + std::to_string(d) + "-vectors");
}

// Quad-precision helpers for identities whose two sides cancel badly near
// parabolic sites.
using LD = boost::multiprecision::cpp_bin_float_quad;
using LV = std::array<LD, 4>;

LV ld(const Vec& v) {
  LV out{0, 0, 0, 0};
  for (int i = 0; i < v.size() && i < 4; ++i) out[i] = v[i];
  return out;
}

LV ld_sub(const LV& a, const LV& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }

LD ld_dot(const LV& a, const LV& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

LD ld_det3(const LV& a, const LV& b, const LV& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

// rows a, b, c, d
LD ld_det4(const LV& a, const LV& b, const LV& c, const LV& d) {
  auto m2 = [&](int i, int j) { return c[i] * d[j] - c[j] * d[i]; };
  auto m3 = [&](int i, int j, int k) { return b[i] * m2(j, k) - b[j] * m2(i, k) + b[k] * m2(i, j); };
  return a[0] * m3(1, 2, 3) - a[1] * m3(0, 2, 3) + a[2] * m3(0, 1, 3) - a[3] * m3(0, 1, 2);
}

// <cross4(a,b,c), d> = det(a,b,c,d)
LV ld_cross4(const LV& a, const LV& b, const LV& c) {
  LV out{};
  for (int i = 0; i < 4; ++i) {
    LV e{0, 0, 0, 0};
    e[i] = 1;
    out[i] = ld_det4(a, b, c, e);
  }
  return out;
}

LD ld_norm(const LV& a) { return sqrt(ld_dot(a, a)); }

double ld_rel(LD a, LD b, LD scale) {
  const LD s = std::max({LD(abs(a)), LD(abs(b)), LD(1e-14 * scale)});
  return s > 0 ? static_cast<double>(LD(abs(a - b)) / s) : 0.0;
}

struct SpanSolve {
  std::array<double, 3> coeffs{};
  double defect = 0.0;  // |det|b0,b1,b2,t|| over the product of norms
  bool rank_deficient = false;
};

// t = c0 b0 + c1 b1 + c2 b2 by generalized Cramer against the normal n of the span
SpanSolve span_solve(const Vec& b0v, const Vec& b1v, const Vec& b2v, const Vec& tv) {
  const LV b0 = ld(b0v), b1 = ld(b1v), b2 = ld(b2v), t = ld(tv);
  SpanSolve out;
  const LV n = ld_cross4(b0, b1, b2);
  const LD nn = ld_dot(n, n);
  const LD p = ld_norm(b0) * ld_norm(b1) * ld_norm(b2);
  if (!(nn > LD(1e-20) * p * p)) {
    out.rank_deficient = true;
    return out;
  }
  out.coeffs[0] = static_cast<double>(ld_dot(ld_cross4(t, b1, b2), n) / nn);
  out.coeffs[1] = static_cast<double>(ld_dot(ld_cross4(b0, t, b2), n) / nn);
  out.coeffs[2] = static_cast<double>(ld_dot(ld_cross4(b0, b1, t), n) / nn);
  const LD sc = p * ld_norm(t);
  out.defect = sc > 0 ? static_cast<double>(LD(abs(ld_dot(n, t))) / sc) : 0.0;
  return out;
}

}  // namespace

LatticeField moutard_evolve(const std::vector<Vec>& row, const std::vector<Vec>& col, const MoutardCoeff& H) {
  if (row.empty() || col.empty()) throw DomainError("Moutard evolution needs non-empty strips");
  if (!(row.front() == col.front())) throw DomainError("row and column strips disagree at the corner");
  const int m1 = static_cast<int>(row.size()), m2 = static_cast<int>(col.size());
  if (H.m1 < m1 - 1 || H.m2 < m2 - 1) throw DomainError("Moutard coefficient does not cover the rectangle");
  const int d = row.front().size();
  LatticeField nu(m1, m2, d);
  for (int n1 = 0; n1 < m1; ++n1) {
    if (row[n1].size() != d) throw DomainError("strip vectors have mixed dimensions");
    nu.at(n1, 0) = row[n1];
  }
  for (int n2 = 0; n2 < m2; ++n2) {
    if (col[n2].size() != d) throw DomainError("strip vectors have mixed dimensions");
    nu.at(0, n2) = col[n2];
  }
  for (int n2 = 0; n2 + 1 < m2; ++n2)
    for (int n1 = 0; n1 + 1 < m1; ++n1) {
      const Vec v = H.at(n1, n2) * (nu.at(n1 + 1, n2) + nu.at(n1, n2 + 1)) - nu.at(n1, n2);
      if (!all_finite(v)) throw OverflowError("non-finite value at site " + site_str(n1 + 1, n2 + 1));
      nu.at(n1 + 1, n2 + 1) = v;
    }
  return nu;
}

InvariantReport moutard_report(const LatticeField& nu, double tol) {
  const auto s = all_sites(nu);
  return detail::sweep({{"moutard.plaquette", tol}}, s.size(), sites_of(s), [&](std::size_t i, double* out) {
    const auto [n1, n2] = s[i];
    if (!nu.contains(n1 + 1, n2 + 1)) return;
    out[0] = moutard_defect(nu.at(n1, n2), nu.at(n1 + 1, n2), nu.at(n1, n2 + 1), nu.at(n1 + 1, n2 + 1));
  });
}

LatticeField discrete_affine_integrate(const LatticeField& nu, const Vec& f0, double tol) {
  require_vdim(nu, 3, "affine conormal lattice");
  if (f0.size() != 3) throw DomainError("f0 must have 3 components");
  double worst = 0.0;
  int w1 = nu.lo1(), w2 = nu.lo2();
  for (int n2 = nu.lo2(); n2 + 1 < nu.hi2(); ++n2)
    for (int n1 = nu.lo1(); n1 + 1 < nu.hi1(); ++n1) {
      const double r = moutard_defect(nu.at(n1, n2), nu.at(n1 + 1, n2), nu.at(n1, n2 + 1), nu.at(n1 + 1, n2 + 1));
      if (!(r <= worst)) {
        worst = r;
        w1 = n1;
        w2 = n2;
      }
    }
  if (!(worst <= tol))
    throw ClosureError("conormal lattice is not a Moutard net: worst plaquette " + site_str(w1, w2) +
                       " defect " + std::to_string(worst));
  LatticeField f(nu.extent1(), nu.extent2(), 3, nu.lo1(), nu.lo2());
  f.at(nu.lo1(), nu.lo2()) = f0;
  for (int n1 = nu.lo1(); n1 + 1 < nu.hi1(); ++n1)
    f.at(n1 + 1, nu.lo2()) = f.at(n1, nu.lo2()) + cross(nu.at(n1, nu.lo2()), nu.at(n1 + 1, nu.lo2()));
  for (int n1 = nu.lo1(); n1 < nu.hi1(); ++n1)
    for (int n2 = nu.lo2(); n2 + 1 < nu.hi2(); ++n2)
      f.at(n1, n2 + 1) = f.at(n1, n2) - cross(nu.at(n1, n2), nu.at(n1, n2 + 1));
  return f;
}

InvariantReport plaquette_closure(const LatticeField& nu, const LatticeField& f, double tol) {
  require_vdim(nu, 3, "affine conormal lattice");
  require_vdim(f, 3, "affine surface lattice");
  const auto s = all_sites(nu);
  std::vector<Check> checks{{"closure.path", tol, false, "stored f against both increment paths"},
                            {"closure.increments", tol, false, "difference of the two increment sums"}};
  return detail::sweep(checks, s.size(), sites_of(s), [&](std::size_t i, double* out) {
    const auto [n1, n2] = s[i];
    if (!nu.contains(n1 + 1, n2 + 1) || !f.contains(n1, n2) || !f.contains(n1 + 1, n2 + 1)) return;
    const Vec& v = nu.at(n1, n2);
    const Vec& v1 = nu.at(n1 + 1, n2);
    const Vec& v2 = nu.at(n1, n2 + 1);
    const Vec& v12 = nu.at(n1 + 1, n2 + 1);
    const Vec p1 = cross(v, v1) - cross(v1, v12);
    const Vec p2 = -cross(v, v2) + cross(v2, v12);
    const Vec df = f.at(n1 + 1, n2 + 1) - f.at(n1, n2);
    out[0] = std::max(norm(df - p1), norm(df - p2));
    out[1] = norm(p1 - p2);
  });
}

DiscreteSurfacePair lift_to_projective(const DiscreteSurfacePair& a) {
  if (a.gauge != DiscreteGauge::Affine) throw DomainError("lift_to_projective expects an affine pair");
  require_vdim(a.nu, 3, "affine conormal lattice");
  require_vdim(a.f, 3, "affine surface lattice");
  const int lo1 = std::max(a.nu.lo1(), a.f.lo1()), lo2 = std::max(a.nu.lo2(), a.f.lo2());
  const int hi1 = std::min(a.nu.hi1(), a.f.hi1()), hi2 = std::min(a.nu.hi2(), a.f.hi2());
  if (hi1 <= lo1 || hi2 <= lo2) throw BoundaryError("f and nu lattices do not overlap");
  DiscreteSurfacePair out{LatticeField(hi1 - lo1, hi2 - lo2, 4, lo1, lo2),
                          LatticeField(hi1 - lo1, hi2 - lo2, 4, lo1, lo2), DiscreteGauge::Projective};
  for (int n2 = lo2; n2 < hi2; ++n2)
    for (int n1 = lo1; n1 < hi1; ++n1) {
      const Vec& bf = a.f.at(n1, n2);
      const Vec& bn = a.nu.at(n1, n2);
      out.f.at(n1, n2) = Vec{bf[0], bf[1], bf[2], -1.0};
      out.nu.at(n1, n2) = Vec{bn[0], bn[1], bn[2], pair(bf, bn)};
    }
  return out;
}

Vec discrete_direction(const LatticeField& nu, int n1, int n2) {
  require_vdim(nu, 4, "projective conormal lattice");
  if (!nu.contains(n1 + 1, n2) || !nu.contains(n1, n2 + 1) || !nu.contains(n1, n2))
    throw BoundaryError("site " + site_str(n1, n2) + " lacks a forward neighbour");
  const Vec& v = nu.at(n1, n2);
  const Vec& v1 = nu.at(n1 + 1, n2);
  const Vec& v2 = nu.at(n1, n2 + 1);
  const Vec c = cross(v, v1, v2);
  if (norm(c) <= 1e-14 * norm(v) * norm(v1) * norm(v2))
    throw DegenerateError("nu, nu1, nu2 are dependent at site " + site_str(n1, n2));
  return c;
}

namespace {

void span_test(const LatticeField& nu, double span_tol) {
  for (int n2 = nu.lo2(); n2 < nu.hi2(); ++n2)
    for (int n1 = nu.lo1(); n1 < nu.hi1(); ++n1) {
      if (!nu.contains(n1 + 1, n2 + 1)) continue;
      const Vec& v = nu.at(n1, n2);
      const Vec& v12 = nu.at(n1 + 1, n2 + 1);
      auto test = [&](const Vec& side, const Vec& target, int dir) {
        const SpanSolve fit = span_solve(v12, side, v, target);
        if (fit.rank_deficient) throw DegenerateError("nu12, nu_i, nu dependent at site " + site_str(n1, n2));
        const double rel = fit.defect;
        if (rel > span_tol)
          throw NotCompatibleError("nu" + std::string(dir == 1 ? "11" : "22") +
                                   " leaves span{nu12, nu_i, nu} at site " + site_str(n1, n2) +
                                   " (relative residual " + format_double(rel) + ")");
      };
      if (nu.contains(n1 + 2, n2)) test(nu.at(n1 + 1, n2), nu.at(n1 + 2, n2), 1);
      if (nu.contains(n1, n2 + 2)) test(nu.at(n1, n2 + 1), nu.at(n1, n2 + 2), 2);
    }
}

double row_det(const LatticeField& nu, int n1, int n2) {
  return det(nu.at(n1, n2 + 1), nu.at(n1 + 1, n2), nu.at(n1 + 2, n2), nu.at(n1 + 1, n2 + 1));
}

double col_det(const LatticeField& nu, int n1, int n2) {
  return det(nu.at(n1 + 1, n2), nu.at(n1, n2 + 1), nu.at(n1 + 1, n2 + 1), nu.at(n1, n2 + 2));
}

}  // namespace

LatticeField discrete_scale_propagate(const LatticeField& nu, std::optional<double> s0, double span_tol,
                                      double consistency_tol) {
  require_vdim(nu, 4, "projective conormal lattice");
  if (nu.extent1() < 3 || nu.extent2() < 3) throw DomainError("scale propagation needs at least a 3x3 lattice");
  span_test(nu, span_tol);
  const int lo1 = nu.lo1(), lo2 = nu.lo2();
  const int m1 = nu.extent1() - 1, m2 = nu.extent2() - 1;
  const Vec c0 = discrete_direction(nu, lo1, lo2);
  const double start = s0 ? *s0 : -c0[3];
  if (start == 0.0 || !std::isfinite(start))
    throw DegenerateError("initial scale is zero (pass a nonzero s0 when the corner direction has c4 = 0)");
  std::vector<double> s(static_cast<std::size_t>(m1) * m2, 0.0);
  auto S = [&](int n1, int n2) -> double& {
    return s[static_cast<std::size_t>(n1 - lo1) + static_cast<std::size_t>(m1) * (n2 - lo2)];
  };
  auto step = [&](double prev, double d, int n1, int n2) {
    if (d == 0.0 || !std::isfinite(d)) throw DegenerateError("zero determinant in scale recursion at " + site_str(n1, n2));
    return d / prev;
  };
  S(lo1, lo2) = start;
  for (int n1 = lo1; n1 + 1 < lo1 + m1; ++n1) S(n1 + 1, lo2) = step(S(n1, lo2), row_det(nu, n1, lo2), n1, lo2);
  for (int n1 = lo1; n1 < lo1 + m1; ++n1)
    for (int n2 = lo2; n2 + 1 < lo2 + m2; ++n2) S(n1, n2 + 1) = step(S(n1, n2), col_det(nu, n1, n2), n1, n2);
  for (int n2 = lo2 + 1; n2 < lo2 + m2; ++n2)
    for (int n1 = lo1; n1 + 1 < lo1 + m1; ++n1) {
      const double want = row_det(nu, n1, n2);
      const double got = S(n1, n2) * S(n1 + 1, n2);
      if (rel_diff(got, want, 0.0) > consistency_tol)
        throw GaugeObstructionError("row and column scale propagation disagree at site " + site_str(n1, n2));
    }
  LatticeField f(m1, m2, 4, lo1, lo2);
  for (int n2 = lo2; n2 < lo2 + m2; ++n2)
    for (int n1 = lo1; n1 < lo1 + m1; ++n1) f.at(n1, n2) = discrete_direction(nu, n1, n2) / S(n1, n2);
  return f;
}

InvariantReport discrete_residual(const DiscreteSurfacePair& pair_in, double tol) {
  const DiscreteSurfacePair p = pair_in.gauge == DiscreteGauge::Affine ? lift_to_projective(pair_in) : pair_in;
  require_vdim(p.nu, 4, "projective conormal lattice");
  require_vdim(p.f, 4, "projective surface lattice");
  const auto s = all_sites(p.f);
  std::vector<Check> checks{{"discrete.plm.1", tol},         {"discrete.plm.2", tol},
                            {"discrete.<f,nu>", tol},        {"discrete.<f_i,nu>", tol},
                            {"discrete.<f,nu_i>", tol},      {"discrete.<f1,nu2>-<f2,nu1>", tol},
                            {"discrete.<f,nu12>-<f12,nu>", tol}};
  const auto& F = p.f;
  const auto& N = p.nu;
  auto have = [&](int a, int b) { return F.contains(a, b) && N.contains(a, b); };
  auto rel_biv = [](const Bivector& l, const Bivector& r) {
    const double sc = std::max(norm(l), norm(r));
    return sc > 0.0 ? norm(l - r) / sc : 0.0;
  };
  auto npair = [](const Vec& a, const Vec& b) {
    const double sc = norm(a) * norm(b);
    return sc > 0.0 ? std::abs(pair(a, b)) / sc : 0.0;
  };
  auto rep = detail::sweep(checks, s.size(), sites_of(s), [&](std::size_t i, double* out) {
    const auto [n1, n2] = s[i];
    if (!have(n1, n2)) return;
    const Vec& f = F.at(n1, n2);
    const Vec& v = N.at(n1, n2);
    out[2] = npair(f, v);
    double fi = 0.0, vi = 0.0;
    bool any = false;
    const bool h1 = have(n1 + 1, n2), h2 = have(n1, n2 + 1);
    if (h1) {
      out[0] = rel_biv(wedge2(f, F.at(n1 + 1, n2)), hodge_star(wedge2(v, N.at(n1 + 1, n2))));
      fi = std::max(fi, npair(F.at(n1 + 1, n2), v));
      vi = std::max(vi, npair(f, N.at(n1 + 1, n2)));
      any = true;
    }
    if (h2) {
      out[1] = rel_biv(wedge2(f, F.at(n1, n2 + 1)), -hodge_star(wedge2(v, N.at(n1, n2 + 1))));
      fi = std::max(fi, npair(F.at(n1, n2 + 1), v));
      vi = std::max(vi, npair(f, N.at(n1, n2 + 1)));
      any = true;
    }
    if (any) {
      out[3] = fi;
      out[4] = vi;
    }
    if (h1 && h2) {
      const Vec& f1 = F.at(n1 + 1, n2);
      const Vec& f2 = F.at(n1, n2 + 1);
      const Vec& v1 = N.at(n1 + 1, n2);
      const Vec& v2 = N.at(n1, n2 + 1);
      const double sc = std::max({norm(f1) * norm(v2), norm(f2) * norm(v1), 1e-300});
      out[5] = std::abs(pair(f1, v2) - pair(f2, v1)) / sc;
    }
    if (have(n1 + 1, n2 + 1)) {
      const Vec& f12 = F.at(n1 + 1, n2 + 1);
      const Vec& v12 = N.at(n1 + 1, n2 + 1);
      const double sc = std::max({norm(f) * norm(v12), norm(f12) * norm(v), 1e-300});
      out[6] = std::abs(pair(f, v12) - pair(f12, v)) / sc;
    }
  });
  rep.metadata["gauge"] = pair_in.gauge == DiscreteGauge::Affine ? "affine" : "projective";
  return rep;
}

InvariantReport discrete_det_invariance(const DiscreteSurfacePair& pair_in, double tol) {
  const bool affine = pair_in.gauge == DiscreteGauge::Affine;
  const DiscreteSurfacePair p = affine ? lift_to_projective(pair_in) : pair_in;
  const auto s = all_sites(p.f);
  std::vector<Check> checks{{"det.discrete.projective", tol, false, "det|f,f1,f2,f12| = det|nu,nu1,nu2,nu12|"}};
  if (affine)
    checks.push_back({"det.discrete.affine", tol, false, "det|f1-f,f2-f,f12-f| = det|nu,nu1,nu12| det|nu,nu1,nu2|"});
  auto have = [&](const LatticeField& a, const LatticeField& b, int n1, int n2) {
    return a.contains(n1, n2) && a.contains(n1 + 1, n2 + 1) && b.contains(n1, n2) && b.contains(n1 + 1, n2 + 1);
  };
  return detail::sweep(checks, s.size(), sites_of(s), [&](std::size_t i, double* out) {
    const auto [n1, n2] = s[i];
    if (!have(p.f, p.nu, n1, n2)) return;
    const std::array<std::pair<int, int>, 4> at{{{n1, n2}, {n1 + 1, n2}, {n1, n2 + 1}, {n1 + 1, n2 + 1}}};
    std::array<LV, 4> f, v;
    for (int k = 0; k < 4; ++k) {
      const auto [a, b] = at[k];
      if (affine) {
        // lift in extended precision so nu4 = <f,nu> carries no extra rounding
        const LV bf = ld(pair_in.f.at(a, b)), bn = ld(pair_in.nu.at(a, b));
        f[k] = {bf[0], bf[1], bf[2], -1};
        v[k] = {bn[0], bn[1], bn[2], LD(bf[0] * bn[0] + bf[1] * bn[1] + bf[2] * bn[2])};
      } else {
        f[k] = ld(p.f.at(a, b));
        v[k] = ld(p.nu.at(a, b));
      }
    }
    const LD df = ld_det4(f[0], f[1], f[2], f[3]), dv = ld_det4(v[0], v[1], v[2], v[3]);
    LD sc = 1, sv = 1;
    for (int k = 0; k < 4; ++k) {
      sc *= ld_norm(f[k]);
      sv *= ld_norm(v[k]);
    }
    out[0] = ld_rel(df, dv, std::max(sc, sv));
    if (affine) {
      const LV a = ld_sub(f[1], f[0]), b = ld_sub(f[2], f[0]), c = ld_sub(f[3], f[0]);
      const LV& n0 = v[0];
      const LV& n1v = v[1];
      const LV& n2v = v[2];
      const LV& n12 = v[3];
      const LD l = ld_det3(a, b, c);
      const LD r = ld_det3(n0, n1v, n12) * ld_det3(n0, n1v, n2v);
      auto n3 = [](const LV& x) { return LD(sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
      const LD nv = n3(n0) * n3(n1v);
      out[1] = ld_rel(l, r, std::max(n3(a) * n3(b) * n3(c), nv * n3(n12) * nv * n3(n2v)));
    }
  });
}

DiscreteForms discrete_forms(const DiscreteSurfacePair& pair_in, double tol) {
  const bool affine = pair_in.gauge == DiscreteGauge::Affine;
  const DiscreteSurfacePair p = affine ? lift_to_projective(pair_in) : pair_in;
  const auto s = all_sites(p.f);
  DiscreteForms out;
  out.points.resize(s.size());
  std::vector<Check> checks{
      {"forms.Omega2", tol, false, "<f2-f,nu1-nu> = det|nu,nu1,nu2|"},
      {"forms.Omega3", tol, false, "<f1-f_-1,nu-nu_-1> = -det|nu_-1,nu,nu1|"},
      {"forms.Omega3tilde", tol, false, "<f2-f_-2,nu-nu_-2> = det|nu_-2,nu,nu2|"},
      {"forms.Omega3_printed", tol, true, "printed -det|nu_-1,nu,nu2|"},
      {"forms.Omega3tilde_printed", tol, true, "printed -det|nu_-2,nu,nu2|"},
      {"forms.F2d_pairing", tol, false, "<f12,nu><f1,nu2> = -det|f,f1,f2,f12|"},
      {"forms.F3d_pairing", tol, false, "-<f1,nu111><f11,nu> = det|f,f1,f11,f111|"},
      {"forms.F3dtilde_pairing", tol, false, "<f2,nu222><f22,nu> = det|f,f2,f22,f222|"},
  };
  auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  out.checks = detail::sweep(checks, s.size(), sites_of(s), [&](std::size_t i, double* r) {
    const auto [n1, n2] = s[i];
    DiscreteFormPoint& pt = out.points[i];
    pt.n1 = n1;
    pt.n2 = n2;
    auto has = [&](int a, int b) { return p.f.contains(a, b) && p.nu.contains(a, b); };
    if (affine) {
      const auto& bf = pair_in.f;
      const auto& bn = pair_in.nu;
      auto bh = [&](int a, int b) { return bf.contains(a, b) && bn.contains(a, b); };
      if (bh(n1, n2) && bh(n1 + 1, n2) && bh(n1, n2 + 1)) {
        pt.Omega2 = pair(bf.at(n1, n2 + 1) - bf.at(n1, n2), bn.at(n1 + 1, n2) - bn.at(n1, n2));
        pt.Omega2_det = det(bn.at(n1, n2), bn.at(n1 + 1, n2), bn.at(n1, n2 + 1));
        r[0] = rel_diff(*pt.Omega2, *pt.Omega2_det);
      }
      if (bh(n1 - 1, n2) && bh(n1, n2) && bh(n1 + 1, n2)) {
        pt.Omega3 = pair(bf.at(n1 + 1, n2) - bf.at(n1 - 1, n2), bn.at(n1, n2) - bn.at(n1 - 1, n2));
        pt.Omega3_det = -det(bn.at(n1 - 1, n2), bn.at(n1, n2), bn.at(n1 + 1, n2));
        r[1] = rel_diff(*pt.Omega3, *pt.Omega3_det);
        if (bh(n1, n2 + 1)) r[3] = rel_diff(*pt.Omega3, -det(bn.at(n1 - 1, n2), bn.at(n1, n2), bn.at(n1, n2 + 1)));
      }
      if (bh(n1, n2 - 1) && bh(n1, n2) && bh(n1, n2 + 1)) {
        pt.Omega3t = pair(bf.at(n1, n2 + 1) - bf.at(n1, n2 - 1), bn.at(n1, n2) - bn.at(n1, n2 - 1));
        pt.Omega3t_det = det(bn.at(n1, n2 - 1), bn.at(n1, n2), bn.at(n1, n2 + 1));
        r[2] = rel_diff(*pt.Omega3t, *pt.Omega3t_det);
        r[4] = rel_diff(*pt.Omega3t, -*pt.Omega3t_det);
      }
    }
    const auto& F = p.f;
    const auto& N = p.nu;
    if (has(n1, n2) && has(n1 + 1, n2) && has(n1, n2 + 1) && has(n1 + 1, n2 + 1)) {
      const double d = det(F.at(n1, n2), F.at(n1 + 1, n2), F.at(n1, n2 + 1), F.at(n1 + 1, n2 + 1));
      pt.F2d = std::sqrt(std::abs(d));
      pt.F2d_sign = sgn(d);
      r[5] = rel_diff(pair(F.at(n1 + 1, n2 + 1), N.at(n1, n2)) * pair(F.at(n1 + 1, n2), N.at(n1, n2 + 1)), -d);
    }
    if (has(n1, n2) && has(n1 + 1, n2) && has(n1 + 2, n2) && has(n1 + 3, n2)) {
      const double d = det(F.at(n1, n2), F.at(n1 + 1, n2), F.at(n1 + 2, n2), F.at(n1 + 3, n2));
      pt.F3d = std::sqrt(std::abs(d));
      pt.F3d_sign = sgn(d);
      r[6] = rel_diff(-pair(F.at(n1 + 1, n2), N.at(n1 + 3, n2)) * pair(F.at(n1 + 2, n2), N.at(n1, n2)), d);
    }
    if (has(n1, n2) && has(n1, n2 + 1) && has(n1, n2 + 2) && has(n1, n2 + 3)) {
      const double d = det(F.at(n1, n2), F.at(n1, n2 + 1), F.at(n1, n2 + 2), F.at(n1, n2 + 3));
      pt.F3dt = std::sqrt(std::abs(d));
      pt.F3dt_sign = sgn(d);
      r[7] = rel_diff(pair(F.at(n1, n2 + 1), N.at(n1, n2 + 3)) * pair(F.at(n1, n2 + 2), N.at(n1, n2)), d);
    }
  });
  return out;
}

DiscreteCompat discrete_compat_coeffs(const LatticeField& nu, const LatticeField* f, double span_tol, double tol) {
  require_vdim(nu, 4, "projective conormal lattice");
  if (f) require_vdim(*f, 4, "projective surface lattice");
  std::vector<Site> s;
  for (int n2 = nu.lo2(); n2 + 2 < nu.hi2(); ++n2)
    for (int n1 = nu.lo1(); n1 + 2 < nu.hi1(); ++n1) s.push_back({n1, n2});
  DiscreteCompat out;
  out.points.resize(s.size());
  std::vector<Check> checks{{"compat.discrete.span", span_tol, false, "|det|nu12,nu_i,nu,nu_ii|| over the product of norms"},
                            {"compat.discrete.A1", tol, false, "A1 = -<f11,nu>/<f12,nu>"},
                            {"compat.discrete.C1", tol, false, "C1 = <f11,nu12>/<f12,nu>"},
                            {"compat.discrete.A2", tol, false, "A2 = -<f22,nu>/<f12,nu>"},
                            {"compat.discrete.C2", tol, false, "C2 = <f22,nu12>/<f12,nu>"},
                            {"compat.discrete.C2_printed", tol, true, "printed C2 = -<f22,nu12>/<f12,nu>"}};
  out.checks = detail::sweep(checks, s.size(), sites_of(s), [&](std::size_t i, double* r) {
    const auto [n1, n2] = s[i];
    const Vec& v = nu.at(n1, n2);
    const Vec& v1 = nu.at(n1 + 1, n2);
    const Vec& v2 = nu.at(n1, n2 + 1);
    const Vec& v12 = nu.at(n1 + 1, n2 + 1);
    const Vec& v11 = nu.at(n1 + 2, n2);
    const Vec& v22 = nu.at(n1, n2 + 2);
    auto fit = [&](const Vec& side, const Vec& target) {
      const SpanSolve sf = span_solve(v12, side, v, target);
      if (sf.rank_deficient) throw DegenerateError("nu12, nu_i, nu dependent at site " + site_str(n1, n2));
      const double rel = sf.defect;
      if (rel > span_tol)
        throw NotCompatibleError("second shift leaves span{nu12, nu_i, nu} at site " + site_str(n1, n2) +
                                 " (relative residual " + format_double(rel) + ")");
      return std::make_pair(sf.coeffs, rel);
    };
    auto [a, ra] = fit(v1, v11);
    auto [b, rb] = fit(v2, v22);
    auto& c = out.points[i];
    c.n1 = n1;
    c.n2 = n2;
    c.A1 = a[0], c.B1 = a[1], c.C1 = a[2];
    c.A2 = b[0], c.B2 = b[1], c.C2 = b[2];
    c.span_residual = std::max(ra, rb);
    r[0] = c.span_residual;
    if (f && f->contains(n1, n2) && f->contains(n1 + 2, n2) && f->contains(n1, n2 + 2) &&
        f->contains(n1 + 1, n2 + 1)) {
      const LV lv = ld(v), lv12 = ld(v12);
      const LD q = ld_dot(ld(f->at(n1 + 1, n2 + 1)), lv);
      if (q == 0) return;
      const LV f11 = ld(f->at(n1 + 2, n2));
      const LV f22 = ld(f->at(n1, n2 + 2));
      auto ratio = [&](LD x) { return static_cast<double>(x / q); };
      r[1] = rel_diff(c.A1, ratio(-ld_dot(f11, lv)));
      r[2] = rel_diff(c.C1, ratio(ld_dot(f11, lv12)));
      r[3] = rel_diff(c.A2, ratio(-ld_dot(f22, lv)));
      r[4] = rel_diff(c.C2, ratio(ld_dot(f22, lv12)));
      r[5] = rel_diff(c.C2, ratio(-ld_dot(f22, lv12)));
    }
  });
  return out;
}

InvariantReport affine_sphere_check(const DiscreteSurfacePair& p, double tol) {
  if (p.gauge != DiscreteGauge::Affine) throw DomainError("affine sphere check expects an affine pair");
  const auto s = all_sites(p.f);
  return detail::sweep({{"affine_sphere", tol, false, "<f,nu> = 1"}}, s.size(), sites_of(s),
                       [&](std::size_t i, double* out) {
                         const auto [n1, n2] = s[i];
                         if (!p.nu.contains(n1, n2)) return;
                         out[0] = std::abs(pair(p.f.at(n1, n2), p.nu.at(n1, n2)) - 1.0);
                       });
}

}  // namespace plm

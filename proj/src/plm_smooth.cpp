#include "plm/plm_smooth.hpp"

#include <cmath>

#include "plm/csv_io.hpp"
#include "sweep.hpp"

namespace plm {

using detail::Check;
using detail::kSkip;
using detail::rel_diff;

const char* to_string(Chart c) { return c == Chart::Asymptotic ? "asymptotic" : "conjugate"; }

Chart parse_chart(const std::string& s) {
  if (s == "asymptotic") return Chart::Asymptotic;
  if (s == "conjugate") return Chart::Conjugate;
  throw DomainError("unknown chart '" + s + "' (expected asymptotic or conjugate)");
}

double jet_scale(const JetRecord& j) {
  double s = std::max({norm(j.value), norm(j.d_x), norm(j.d_y), norm(j.d_xx), norm(j.d_xy), norm(j.d_yy)});
  if (j.d_xxx) s = std::max(s, norm(*j.d_xxx));
  if (j.d_yyy) s = std::max(s, norm(*j.d_yyy));
  return s;
}

Vec lelieuvre_point(const Vec& a, const Vec& a_x, const Vec& a_y, const Vec& a_2, double radicand_sign,
                    const Vec* other) {
  if (a.size() != 4) throw DomainError("surface reconstruction needs 4-component jets");
  const double d = radicand_sign * det(a, a_x, a_y, a_2);
  const double second = other ? std::max(norm(a_2), norm(*other)) : norm(a_2);
  const double eps = 1e-10 * norm(a) * norm(a_x) * norm(a_y) * second;
  if (d > eps) return cross(a, a_x, a_y) / std::sqrt(d);
  if (d < -eps) throw ChartMismatchError("negative radicand " + format_double(d) + " for this chart");
  if (other) {
    const double o = det(a, a_x, a_y, *other);
    if (std::abs(o) > 1e-6 * norm(a) * norm(a_x) * norm(a_y) * second)
      throw ChartMismatchError("vanishing radicand with a non-vanishing determinant of the other chart");
  }
  throw DegenerateError("non-generic point: planar/parabolic locus (radicand " + format_double(d) + ")");
}

Vec reconstruct_point(const JetRecord& nu, Chart chart) {
  if (chart == Chart::Asymptotic) return lelieuvre_point(nu.value, nu.d_x, nu.d_y, nu.d_xy, 1.0, &nu.d_xx);
  return lelieuvre_point(nu.value, nu.d_x, nu.d_y, nu.d_xx, 1.0, &nu.d_xy);
}

Vec inverse_reconstruct_point(const JetRecord& f, Chart chart) {
  if (chart == Chart::Asymptotic) return lelieuvre_point(f.value, f.d_x, f.d_y, f.d_xy, 1.0, &f.d_xx);
  return lelieuvre_point(f.value, f.d_x, f.d_y, f.d_xx, -1.0, &f.d_xy);
}

Vec reconstruct_point_alt(const JetRecord& nu, Axis axis) {
  const bool ax = axis == Axis::X;
  const auto& third = ax ? nu.d_xxx : nu.d_yyy;
  if (!third) throw DomainError("reconstruct_point_alt needs third derivatives");
  const Vec& d1 = ax ? nu.d_x : nu.d_y;
  const Vec& d2 = ax ? nu.d_xx : nu.d_yy;
  const double d = (ax ? 1.0 : -1.0) * det(nu.value, d1, d2, *third);
  const double eps = 1e-10 * norm(nu.value) * norm(d1) * norm(d2) * norm(*third);
  if (d < -eps) throw ChartMismatchError(std::string("wrong-sign third-order radicand on axis ") + (ax ? "x" : "y"));
  if (d <= eps) throw DegenerateError("non-generic point: vanishing third-order radicand (ruled or quadric)");
  return -cross(nu.value, d1, d2) / std::sqrt(d);
}

int fd_order_for(const FieldGrid& g, int stencil) {
  const int m3 = jet_margin(3, stencil);
  return (g.nx() > 2 * m3 && g.ny() > 2 * m3) ? 3 : 2;
}

namespace {

void check_grid2(const FieldGrid& g, const char* what) {
  if (g.spec().ndim() != 2) throw DomainError(std::string(what) + " grid must be 2D");
  if (g.vdim() != 4) throw DomainError(std::string(what) + " grid must carry 4-component vectors");
}

std::vector<JetSample> fd_impl(const FieldGrid* f, const FieldGrid& nu, int order, int stencil) {
  check_grid2(nu, "nu");
  if (f) {
    check_grid2(*f, "f");
    if (!same_layout(f->spec(), nu.spec())) throw DomainError("f and nu grids do not match");
  }
  const int m = jet_margin(order, stencil);
  const int ni = nu.nx() - 2 * m, nj = nu.ny() - 2 * m;
  if (ni <= 0 || nj <= 0) throw DomainError("grid interior is empty for this stencil");
  std::vector<JetSample> out(static_cast<std::size_t>(ni) * nj);
  parallel_for(out.size(), [&](std::size_t k) {
    const int i = m + static_cast<int>(k % ni), j = m + static_cast<int>(k / ni);
    JetSample& s = out[k];
    s.site = {i, j};
    s.x = nu.spec().coord(0, i);
    s.y = nu.spec().coord(1, j);
    s.nu = jet_at(nu, i, j, order, stencil);
    if (f) s.f = jet_at(*f, i, j, order, stencil);
    s.has_f = f != nullptr;
  });
  return out;
}

std::function<std::vector<long>(std::size_t)> sites(const std::vector<JetSample>& s) {
  return [&s](std::size_t i) { return s[i].site; };
}

void require_f(const std::vector<JetSample>& s) {
  for (const auto& p : s)
    if (!p.has_f) throw DomainError("this report needs f jets");
}

InvariantReport with_meta(InvariantReport r, const std::vector<JetSample>& s, Chart chart) {
  r.metadata["chart"] = to_string(chart);
  r.metadata["samples"] = s.size();
  return r;
}

}  // namespace

std::vector<JetSample> fd_samples(const FieldGrid& f, const FieldGrid& nu, int order, int stencil) {
  return fd_impl(&f, nu, order, stencil);
}

std::vector<JetSample> fd_samples(const FieldGrid& nu, int order, int stencil) {
  return fd_impl(nullptr, nu, order, stencil);
}

InvariantReport plm_residual(const std::vector<JetSample>& s, Chart chart, double tol) {
  require_f(s);
  std::vector<Check> checks{{"plm.x", tol}, {"plm.y", tol}};
  auto rep = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* out) {
    const auto& f = s[i].f;
    const auto& nu = s[i].nu;
    const Bivector sx = hodge_star(wedge2(nu.value, nu.d_x));
    const Bivector sy = hodge_star(wedge2(nu.value, nu.d_y));
    const Bivector lx = wedge2(f.value, f.d_x), ly = wedge2(f.value, f.d_y);
    const Bivector rx = chart == Chart::Asymptotic ? sx : -sy;
    const Bivector ry = chart == Chart::Asymptotic ? -sy : sx;
    auto rel = [](const Bivector& l, const Bivector& r) {
      const double scale = std::max(norm(l), norm(r));
      const double d = norm(l - r);
      return scale > 0.0 ? d / scale : d;
    };
    out[0] = rel(lx, rx);
    out[1] = rel(ly, ry);
  });
  return with_meta(std::move(rep), s, chart);
}

InvariantReport orthogonality_report(const std::vector<JetSample>& s, Chart chart, double tol) {
  require_f(s);
  struct Term {
    const char* name;
    const Vec JetRecord::*a;
    const Vec JetRecord::*b;
  };
  using J = JetRecord;
  static const std::vector<Term> asym{
      {"<f,nu>", &J::value, &J::value},    {"<f_x,nu>", &J::d_x, &J::value},     {"<f_x,nu_x>", &J::d_x, &J::d_x},
      {"<f_xx,nu>", &J::d_xx, &J::value},  {"<f,nu_xx>", &J::value, &J::d_xx},   {"<f_xx,nu_xx>", &J::d_xx, &J::d_xx},
      {"<f_y,nu>", &J::d_y, &J::value},    {"<f_y,nu_y>", &J::d_y, &J::d_y},     {"<f_yy,nu>", &J::d_yy, &J::value},
      {"<f,nu_yy>", &J::value, &J::d_yy},  {"<f_yy,nu_yy>", &J::d_yy, &J::d_yy},
  };
  static const std::vector<Term> conj{
      {"<f,nu>", &J::value, &J::value},  {"<f,nu_x>", &J::value, &J::d_x},  {"<f_x,nu>", &J::d_x, &J::value},
      {"<f,nu_y>", &J::value, &J::d_y},  {"<f_y,nu>", &J::d_y, &J::value},  {"<f_x,nu_y>", &J::d_x, &J::d_y},
      {"<f_y,nu_x>", &J::d_y, &J::d_x},  {"<f_xy,nu>", &J::d_xy, &J::value}, {"<f,nu_xy>", &J::value, &J::d_xy},
  };
  const auto& terms = chart == Chart::Asymptotic ? asym : conj;
  std::vector<Check> checks;
  for (const auto& t : terms) checks.push_back({std::string("orth.") + t.name, tol});
  if (chart == Chart::Conjugate) checks.push_back({"orth.<f_x,nu_x>-<f_y,nu_y>", tol});
  auto rep = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* out) {
    const auto& f = s[i].f;
    const auto& nu = s[i].nu;
    double scale = jet_scale(f) * jet_scale(nu);
    if (!(scale > 0.0)) scale = 1.0;
    for (std::size_t k = 0; k < terms.size(); ++k) out[k] = std::abs(pair(f.*terms[k].a, nu.*terms[k].b)) / scale;
    if (chart == Chart::Conjugate)
      out[terms.size()] = std::abs(pair(f.d_x, nu.d_x) - pair(f.d_y, nu.d_y)) / scale;
  });
  return with_meta(std::move(rep), s, chart);
}

InvariantReport det_invariance_report(const std::vector<JetSample>& s, Chart chart, double tol) {
  require_f(s);
  std::vector<Check> checks;
  if (chart == Chart::Asymptotic) {
    checks = {{"det.xy", tol}, {"det.x3", tol}, {"det.y3", tol}};
  } else {
    checks = {{"det.xx_flip", tol},
              {"det.yy_flip", tol},
              {"det.conj_xy_vanishes", tol},
              {"det.conj_yy_equals_xx", tol, false, "det|nu,nu_x,nu_y,nu_yy| = det|nu,nu_x,nu_y,nu_xx|"},
              {"det.conj_yy_equals_minus_xx_printed", tol, true, "printed sign; fails on conjugate data"}};
  }
  auto rep = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* out) {
    const auto& f = s[i].f;
    const auto& nu = s[i].nu;
    if (chart == Chart::Asymptotic) {
      out[0] = rel_diff(det(f.value, f.d_x, f.d_y, f.d_xy), det(nu.value, nu.d_x, nu.d_y, nu.d_xy));
      if (f.d_xxx && nu.d_xxx)
        out[1] = rel_diff(det(f.value, f.d_x, f.d_xx, *f.d_xxx), det(nu.value, nu.d_x, nu.d_xx, *nu.d_xxx));
      if (f.d_yyy && nu.d_yyy)
        out[2] = rel_diff(det(f.value, f.d_y, f.d_yy, *f.d_yyy), det(nu.value, nu.d_y, nu.d_yy, *nu.d_yyy));
    } else {
      const double nxx = det(nu.value, nu.d_x, nu.d_y, nu.d_xx);
      const double nyy = det(nu.value, nu.d_x, nu.d_y, nu.d_yy);
      out[0] = rel_diff(det(f.value, f.d_x, f.d_y, f.d_xx), -nxx);
      out[1] = rel_diff(det(f.value, f.d_x, f.d_y, f.d_yy), -nyy);
      out[2] = std::abs(det(nu.value, nu.d_x, nu.d_y, nu.d_xy)) / std::max(1.0, std::abs(nxx));
      out[3] = rel_diff(nyy, nxx);
      out[4] = rel_diff(nyy, -nxx);
    }
  });
  return with_meta(std::move(rep), s, chart);
}

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// threshold under which a third-order radicand of the wrong sign is treated as noise
double cubic_sign_eps(const Vec& a, const Vec& a1, const Vec& a2, const Vec& a3) {
  const double n1 = norm(a1);
  return 1e-6 * norm(a) * n1 * std::max(norm(a2), n1) * std::max(norm(a3), n1);
}

}  // namespace

FubiniForms fubini_forms(const std::vector<JetSample>& s, double tol) {
  require_f(s);
  FubiniForms out;
  out.points.resize(s.size());
  std::vector<Check> checks{
      {"fubini.F2_squared", tol, false, "F2^2 = 4 det|nu,nu_x,nu_y,nu_xy|"},
      {"fubini.F2_symmetric", tol, false, "<f_x,nu_y> = <f_y,nu_x>"},
      {"fubini.F3_pairing", tol, false, "<f_x,nu_xx>^2 = det|nu,nu_x,nu_xx,nu_xxx|"},
      {"fubini.F3tilde_pairing", tol, false, "<f_y,nu_yy>^2 = -det|nu,nu_y,nu_yy,nu_yyy|"},
      {"fubini.F3tilde_printed", tol, true, "printed <f_y,nu_y>^2 = -det|nu,nu_y,nu_yy,nu_yyy|"},
  };
  out.checks = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* r) {
    const auto& f = s[i].f;
    const auto& nu = s[i].nu;
    FubiniPoint& p = out.points[i];
    p.site = s[i].site;
    p.x = s[i].x;
    p.y = s[i].y;
    const double fxny = pair(f.d_x, nu.d_y);
    p.F2 = 2.0 * fxny;
    const double d2 = det(nu.value, nu.d_x, nu.d_y, nu.d_xy);
    r[0] = rel_diff(p.F2 * p.F2, 4.0 * d2);
    r[1] = rel_diff(fxny, pair(f.d_y, nu.d_x));
    if (nu.d_xxx && nu.d_yyy) {
      const double dx = det(nu.value, nu.d_x, nu.d_xx, *nu.d_xxx);
      const double dy = det(nu.value, nu.d_y, nu.d_yy, *nu.d_yyy);
      if (dx < -cubic_sign_eps(nu.value, nu.d_x, nu.d_xx, *nu.d_xxx))
        throw ChartMismatchError("det|nu,nu_x,nu_xx,nu_xxx| < 0 at site (" + std::to_string(p.site[0]) + "," +
                                 std::to_string(p.site[1]) + ")");
      if (dy > cubic_sign_eps(nu.value, nu.d_y, nu.d_yy, *nu.d_yyy))
        throw ChartMismatchError("det|nu,nu_y,nu_yy,nu_yyy| > 0 at site (" + std::to_string(p.site[0]) + "," +
                                 std::to_string(p.site[1]) + ")");
      const double fxnxx = pair(f.d_x, nu.d_xx), fynyy = pair(f.d_y, nu.d_yy);
      p.F3 = sgn(fxnxx) * std::sqrt(std::max(dx, 0.0));
      p.F3tilde = sgn(fynyy) * std::sqrt(std::max(-dy, 0.0));
      p.has_cubic = true;
      r[2] = rel_diff(fxnxx * fxnxx, dx);
      r[3] = rel_diff(fynyy * fynyy, -dy);
      const double fyny = pair(f.d_y, nu.d_y);
      r[4] = rel_diff(fyny * fyny, -dy);
    }
  });
  out.checks.metadata["samples"] = s.size();
  return out;
}

CompatCoeffs compat_coeffs(const std::vector<JetSample>& s, Chart chart, double span_tol, double tol) {
  CompatCoeffs out;
  out.chart = chart;
  out.points.resize(s.size());
  const bool asym = chart == Chart::Asymptotic;
  std::vector<Check> checks;
  if (asym) {
    checks = {{"compat.span", span_tol},
              {"compat.V1_squared", tol, false, "V1^2 = det|nu,nu_x,nu_xx,nu_xxx| / det|nu,nu_x,nu_y,nu_xy|"},
              {"compat.U2_squared", tol, false, "U2^2 = -det|nu,nu_y,nu_yy,nu_yyy| / det|nu,nu_x,nu_y,nu_xy|"},
              {"compat.f_xx", tol, false, "f_xx = U1 f_x - V1 f_y + Wt1 f"},
              {"compat.f_yy", tol, false, "f_yy = -U2 f_x + V2 f_y + Wt2 f"}};
  } else {
    checks = {{"compat.span", span_tol},
              {"compat.f_xy", tol, false, "f_xy = Ut f_x + Vt f_y + Wt f"},
              {"compat.f_yy-f_xx", tol, false, "f_yy - f_xx = -2V f_x + 2U f_y + Ct f"}};
  }
  auto site_str = [](const JetSample& p) {
    return "(" + std::to_string(p.site.size() > 0 ? p.site[0] : 0) + "," +
           std::to_string(p.site.size() > 1 ? p.site[1] : 0) + ")";
  };
  out.checks = detail::sweep(checks, s.size(), sites(s), [&](std::size_t i, double* r) {
    const auto& nu = s[i].nu;
    CompatPoint& c = out.points[i];
    c.site = s[i].site;
    c.x = s[i].x;
    c.y = s[i].y;
    const std::array<Vec, 3> basis{nu.d_x, nu.d_y, nu.value};
    const double base = std::max({norm(nu.value), norm(nu.d_x), norm(nu.d_y)});
    auto fit = [&](const Vec& target) {
      SpanFit sf = span_fit(basis, target);
      if (sf.rank_deficient)
        throw DegenerateError("nu, nu_x, nu_y are linearly dependent at site " + site_str(s[i]));
      const double rel = sf.residual / (norm(target) + base);
      if (rel > span_tol)
        throw NotCompatibleError("second derivative leaves span{nu_x,nu_y,nu} (relative residual " +
                                 format_double(rel) + ") at site " + site_str(s[i]));
      return std::make_pair(sf.coeffs, rel);
    };
    auto fit_f = [&](const Vec& target) {
      const std::array<Vec, 3> fb{s[i].f.d_x, s[i].f.d_y, s[i].f.value};
      return span_fit(fb, target).coeffs;
    };
    if (asym) {
      auto [a, ra] = fit(nu.d_xx);
      auto [b, rb] = fit(nu.d_yy);
      c.U1 = a[0], c.V1 = a[1], c.W1 = a[2];
      c.U2 = b[0], c.V2 = b[1], c.W2 = b[2];
      c.span_residual = std::max(ra, rb);
      r[0] = c.span_residual;
      if (nu.d_xxx && nu.d_yyy) {
        const double dxy = det(nu.value, nu.d_x, nu.d_y, nu.d_xy);
        if (std::abs(dxy) > 0.0) {
          r[1] = rel_diff(c.V1 * c.V1, det(nu.value, nu.d_x, nu.d_xx, *nu.d_xxx) / dxy);
          r[2] = rel_diff(c.U2 * c.U2, -det(nu.value, nu.d_y, nu.d_yy, *nu.d_yyy) / dxy);
        }
      }
      if (s[i].has_f) {
        const auto fx = fit_f(s[i].f.d_xx);
        const auto fy = fit_f(s[i].f.d_yy);
        c.Wt1 = fx[2];
        c.Wt2 = fy[2];
        r[3] = std::max(rel_diff(fx[0], c.U1), rel_diff(fx[1], -c.V1));
        r[4] = std::max(rel_diff(fy[0], -c.U2), rel_diff(fy[1], c.V2));
      }
    } else {
      auto [a, ra] = fit(nu.d_xy);
      auto [b, rb] = fit(nu.d_yy - nu.d_xx);
      c.U = a[0], c.V = a[1], c.W = a[2];
      c.Vt = -0.5 * b[0], c.Ut = 0.5 * b[1], c.C = b[2];
      c.span_residual = std::max(ra, rb);
      r[0] = c.span_residual;
      if (s[i].has_f) {
        const auto fa = fit_f(s[i].f.d_xy);
        const auto fb = fit_f(s[i].f.d_yy - s[i].f.d_xx);
        c.Wt = fa[2];
        c.Ct = fb[2];
        r[1] = std::max(rel_diff(fa[0], c.Ut), rel_diff(fa[1], c.Vt));
        r[2] = std::max(rel_diff(fb[0], -2.0 * c.V), rel_diff(fb[1], 2.0 * c.U));
      }
    }
  });
  out.checks.metadata["chart"] = to_string(chart);
  return out;
}

InvariantReport plm_residual(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil, double tol) {
  return plm_residual(fd_samples(f, nu, 2, stencil), chart, tol);
}

InvariantReport orthogonality_report(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil, double tol) {
  return orthogonality_report(fd_samples(f, nu, 2, stencil), chart, tol);
}

InvariantReport det_invariance_report(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil,
                                      double tol) {
  return det_invariance_report(fd_samples(f, nu, fd_order_for(nu, stencil), stencil), chart, tol);
}

FubiniForms fubini_forms(const FieldGrid& f, const FieldGrid& nu, int stencil, double tol) {
  return fubini_forms(fd_samples(f, nu, fd_order_for(nu, stencil), stencil), tol);
}

CompatCoeffs compat_coeffs(const FieldGrid& nu, Chart chart, int stencil, double span_tol, double tol) {
  return compat_coeffs(fd_samples(nu, fd_order_for(nu, stencil), stencil), chart, span_tol, tol);
}

}  // namespace plm

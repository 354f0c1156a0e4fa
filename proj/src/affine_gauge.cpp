#include "plm/affine_gauge.hpp"

#include <cmath>

#include "plm/csv_io.hpp"
#include "sweep.hpp"

namespace plm {

using detail::Check;
using detail::rel_diff;

namespace {

void check_affine_grid(const FieldGrid& g, const char* what) {
  if (g.spec().ndim() != 2) throw DomainError(std::string(what) + " grid must be 2D");
  if (g.vdim() != 3) throw DomainError(std::string(what) + " grid must carry 3-vectors");
}

}  // namespace

LelieuvreIntegration classical_lelieuvre_integrate(const FieldGrid& nu, const Vec& f0, PathOrder order,
                                                   double closure_tol) {
  check_affine_grid(nu, "affine conormal");
  if (f0.size() != 3) throw DomainError("f0 must have 3 components");
  const int nx = nu.nx(), ny = nu.ny();
  const double hx = nu.spec().spacing[0], hy = nu.spec().spacing[1];

  std::vector<long> cells;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) cells.push_back(static_cast<long>(i) + static_cast<long>(nx) * j);
  auto rep = detail::sweep(
      {{"closure.cell", closure_tol, false, "|(nu+nu12) x (nu1+nu2)| / (2 hx hy |nu_c|^2)"}}, cells.size(),
      [&](std::size_t k) { return std::vector<long>{cells[k] % nx, cells[k] / nx}; },
      [&](std::size_t k, double* out) {
        const int i = static_cast<int>(cells[k] % nx), j = static_cast<int>(cells[k] / nx);
        const Vec& a = nu.at(i, j);
        const Vec& a1 = nu.at(i + 1, j);
        const Vec& a2 = nu.at(i, j + 1);
        const Vec& a12 = nu.at(i + 1, j + 1);
        const Vec c = 0.25 * (a + a1 + a2 + a12);
        const double cc = pair(c, c);
        const double defect = norm(cross(a + a12, a1 + a2));
        out[0] = cc > 0.0 ? defect / (2.0 * hx * hy * cc) : defect;
      });
  if (const auto* r = rep.find("closure.cell"); r && !r->pass) {
    std::string where = r->argmax_site.size() == 2
                            ? "(" + std::to_string(r->argmax_site[0]) + "," + std::to_string(r->argmax_site[1]) + ")"
                            : "?";
    throw ClosureError("conormal violates nu_xy || nu: worst cell " + where + " defect " +
                       format_double(r->max_residual));
  }

  FieldGrid f(nu.spec(), 3);
  auto step_x = [&](int i, int j) { f.at(i + 1, j) = f.at(i, j) + cross(nu.at(i, j), nu.at(i + 1, j)); };
  auto step_y = [&](int i, int j) { f.at(i, j + 1) = f.at(i, j) - cross(nu.at(i, j), nu.at(i, j + 1)); };
  f.at(0, 0) = f0;
  if (order == PathOrder::RowFirst) {
    for (int i = 0; i + 1 < nx; ++i) step_x(i, 0);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j + 1 < ny; ++j) step_y(i, j);
  } else {
    for (int j = 0; j + 1 < ny; ++j) step_y(0, j);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) step_x(i, j);
  }
  rep.metadata["path"] = order == PathOrder::RowFirst ? "row-first" : "column-first";
  return {std::move(f), std::move(rep)};
}

std::pair<FieldGrid, FieldGrid> lift_affine(const AffineSurfacePair& p) {
  check_affine_grid(p.f, "affine surface");
  check_affine_grid(p.nu, "affine conormal");
  if (!same_layout(p.f.spec(), p.nu.spec())) throw DomainError("f and nu grids do not match");
  FieldGrid f(p.f.spec(), 4), nu(p.nu.spec(), 4);
  for (std::size_t k = 0; k < p.f.values().size(); ++k) {
    const Vec& a = p.f.values()[k];
    const Vec& b = p.nu.values()[k];
    f.values()[k] = Vec{a[0], a[1], a[2], -1.0};
    nu.values()[k] = Vec{b[0], b[1], b[2], pair(a, b)};
  }
  return {std::move(f), std::move(nu)};
}

std::pair<JetRecord, JetRecord> lift_jets(const JetRecord& f, const JetRecord& nu) {
  auto ext = [](const Vec& v, double last) { return Vec{v[0], v[1], v[2], last}; };
  JetRecord F, N;
  F.value = ext(f.value, -1.0);
  F.d_x = ext(f.d_x, 0.0);
  F.d_y = ext(f.d_y, 0.0);
  F.d_xx = ext(f.d_xx, 0.0);
  F.d_xy = ext(f.d_xy, 0.0);
  F.d_yy = ext(f.d_yy, 0.0);
  N.value = ext(nu.value, pair(f.value, nu.value));
  N.d_x = ext(nu.d_x, pair(f.d_x, nu.value) + pair(f.value, nu.d_x));
  N.d_y = ext(nu.d_y, pair(f.d_y, nu.value) + pair(f.value, nu.d_y));
  N.d_xx = ext(nu.d_xx, pair(f.d_xx, nu.value) + 2.0 * pair(f.d_x, nu.d_x) + pair(f.value, nu.d_xx));
  N.d_yy = ext(nu.d_yy, pair(f.d_yy, nu.value) + 2.0 * pair(f.d_y, nu.d_y) + pair(f.value, nu.d_yy));
  N.d_xy = ext(nu.d_xy, pair(f.d_xy, nu.value) + pair(f.d_x, nu.d_y) + pair(f.d_y, nu.d_x) + pair(f.value, nu.d_xy));
  if (f.d_xxx && nu.d_xxx) {
    F.d_xxx = ext(*f.d_xxx, 0.0);
    N.d_xxx = ext(*nu.d_xxx, pair(*f.d_xxx, nu.value) + 3.0 * pair(f.d_xx, nu.d_x) + 3.0 * pair(f.d_x, nu.d_xx) +
                                 pair(f.value, *nu.d_xxx));
  }
  if (f.d_yyy && nu.d_yyy) {
    F.d_yyy = ext(*f.d_yyy, 0.0);
    N.d_yyy = ext(*nu.d_yyy, pair(*f.d_yyy, nu.value) + 3.0 * pair(f.d_yy, nu.d_y) + 3.0 * pair(f.d_y, nu.d_yy) +
                                 pair(f.value, *nu.d_yyy));
  }
  return {F, N};
}

std::vector<AffineSample> affine_fd_samples(const AffineSurfacePair& p, int order, int stencil) {
  check_affine_grid(p.f, "affine surface");
  check_affine_grid(p.nu, "affine conormal");
  if (!same_layout(p.f.spec(), p.nu.spec())) throw DomainError("f and nu grids do not match");
  const int m = jet_margin(order, stencil);
  const int ni = p.nu.nx() - 2 * m, nj = p.nu.ny() - 2 * m;
  if (ni <= 0 || nj <= 0) throw DomainError("grid interior is empty for this stencil");
  std::vector<AffineSample> out(static_cast<std::size_t>(ni) * nj);
  parallel_for(out.size(), [&](std::size_t k) {
    const int i = m + static_cast<int>(k % ni), j = m + static_cast<int>(k / ni);
    auto& s = out[k];
    s.site = {i, j};
    s.x = p.nu.spec().coord(0, i);
    s.y = p.nu.spec().coord(1, j);
    s.f = jet_at(p.f, i, j, order, stencil);
    s.nu = jet_at(p.nu, i, j, order, stencil);
  });
  return out;
}

AffineForms affine_forms(const std::vector<AffineSample>& s, double tol) {
  AffineForms out;
  out.points.resize(s.size());
  std::vector<Check> checks{
      {"affine.nu_xy_parallel_nu", tol, false, "|nu_xy - U4 nu| / max(|nu_xy|, |nu_x||nu_y|/|nu|)"},
      {"affine.<f_x,nu_y>=F", tol},
      {"affine.<f_y,nu_x>=F", tol},
      {"affine.lift_det=F^2", tol, false, "det|nu,nu_x,nu_y,nu_xy| of the lift"},
      {"affine.det|f_x,f_y,f_xy|=F^2", tol},
      {"affine.<f_xx,nu_x>=-A", tol},
      {"affine.<f_yy,nu_y>=B", tol},
      {"affine.<f_xx,nu_x>_printed", tol, true, "printed sign +det|nu,nu_x,nu_xx|"},
      {"affine.<f_yy,nu_y>_printed", tol, true, "printed sign -det|nu,nu_y,nu_yy|"},
      {"affine.A^2=det|f_x,f_xx,f_xxx|", tol},
      {"affine.-B^2=det|f_y,f_yy,f_yyy|", tol},
  };
  out.checks = detail::sweep(
      checks, s.size(), [&](std::size_t i) { return s[i].site; },
      [&](std::size_t i, double* r) {
        const auto& f = s[i].f;
        const auto& nu = s[i].nu;
        if (f.value.size() != 3 || nu.value.size() != 3) throw DomainError("affine jets must be 3-vectors");
        auto& p = out.points[i];
        p.site = s[i].site;
        p.x = s[i].x;
        p.y = s[i].y;
        p.F = det(nu.value, nu.d_x, nu.d_y);
        const double scale = std::max(norm(nu.d_xy), norm(nu.d_x) * norm(nu.d_y) / norm(nu.value));
        if (scale > 0.0) {
          const double u4 = pair(nu.d_xy, nu.value) / pair(nu.value, nu.value);
          r[0] = norm(nu.d_xy - u4 * nu.value) / scale;
        } else {
          r[0] = 0.0;
        }
        r[1] = rel_diff(pair(f.d_x, nu.d_y), p.F);
        r[2] = rel_diff(pair(f.d_y, nu.d_x), p.F);
        const auto [F4, N4] = lift_jets(f, nu);
        r[3] = rel_diff(det(N4.value, N4.d_x, N4.d_y, N4.d_xy), p.F * p.F);
        r[4] = rel_diff(det(f.d_x, f.d_y, f.d_xy), p.F * p.F);
        const double A = det(nu.value, nu.d_x, nu.d_xx);
        const double B = det(nu.value, nu.d_y, nu.d_yy);
        p.A_cubic = A;
        p.B_cubic = B;
        r[5] = rel_diff(pair(f.d_xx, nu.d_x), -A);
        r[6] = rel_diff(pair(f.d_yy, nu.d_y), B);
        r[7] = rel_diff(pair(f.d_xx, nu.d_x), A);
        r[8] = rel_diff(pair(f.d_yy, nu.d_y), -B);
        if (f.d_xxx && f.d_yyy) {
          const double dx = det(f.d_x, f.d_xx, *f.d_xxx);
          const double dy = det(f.d_y, f.d_yy, *f.d_yyy);
          const double ex = 1e-6 * norm(f.d_x) * std::max(norm(f.d_xx), norm(f.d_x)) *
                            std::max(norm(*f.d_xxx), norm(f.d_x));
          const double ey = 1e-6 * norm(f.d_y) * std::max(norm(f.d_yy), norm(f.d_y)) *
                            std::max(norm(*f.d_yyy), norm(f.d_y));
          if (dx < -ex) throw ChartMismatchError("det|f_x,f_xx,f_xxx| < 0 at a sample");
          if (dy > ey) throw ChartMismatchError("det|f_y,f_yy,f_yyy| > 0 at a sample");
          p.has_cubic = true;
          r[9] = rel_diff(A * A, dx);
          r[10] = rel_diff(-B * B, dy);
        }
      });
  return out;
}

AffineForms affine_forms(const AffineSurfacePair& pair, int stencil, double tol) {
  const int m3 = jet_margin(3, stencil);
  const int order = (pair.nu.nx() > 2 * m3 && pair.nu.ny() > 2 * m3) ? 3 : 2;
  return affine_forms(affine_fd_samples(pair, order, stencil), tol);
}

}  // namespace plm

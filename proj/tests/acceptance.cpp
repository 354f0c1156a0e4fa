// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "plm/affine_gauge.hpp"
#include "plm/plm_discrete.hpp"
#include "plm/plm_hyper.hpp"
#include "plm/plm_smooth.hpp"
#include "plm/scenarios.hpp"

using namespace plm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double order_fit(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vec normalized(const Vec& v) { return v / -v[v.size() - 1]; }

HyperJet as_hyper(const JetRecord& j) {
  HyperJet h;
  h.n = 2;
  h.value = j.value;
  h.d = {j.d_x, j.d_y};
  h.dd = {j.d_xx, j.d_xy, j.d_xy, j.d_yy};
  return h;
}

ScenarioBundle gauged_hypar(double h) {
  ScenarioParams p;
  p.gauge_a = 0.4;
  p.gauge_b = -0.3;
  p.h = h;
  return make_scenario("hypar", p);
}

// 1: determinant invariance
Outcome determinants() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = make_scenario("hypar");
  double worst = 0.0;
  for (const auto& s : b.jets) {
    const double df = det(s.f.value, s.f.d_x, s.f.d_y, s.f.d_xy);
    const double dn = det(s.nu.value, s.nu.d_x, s.nu.d_y, s.nu.d_xy);
    worst = std::max({worst, std::abs(df - 1.0), std::abs(dn - 1.0)});
  }
  o.require(worst <= 1e-10, "analytic |det-1| " + sci(worst) + " <= 1e-10");

  double fd = 0.0;
  for (const auto& s : fd_samples(*b.f, *b.nu, 2, 4)) {
    const double df = det(s.f.value, s.f.d_x, s.f.d_y, s.f.d_xy);
    const double dn = det(s.nu.value, s.nu.d_x, s.nu.d_y, s.nu.d_xy);
    fd = std::max({fd, std::abs(df - dn), std::abs(dn - 1.0)});
  }
  o.require(fd <= 1e-6, "stencil-4 agreement " + sci(fd) + " <= 1e-6");

  // convergence on the gauged surface, where the stencil is not exact
  std::vector<double> hs{0.1, 0.05, 0.025}, err;
  for (double h : hs) {
    const auto g = gauged_hypar(h);
    double e = 0.0;
    for (const auto& s : fd_samples(*g.f, *g.nu, 2, 4)) {
      const double exact = std::exp(4.0 * (0.4 * s.x - 0.3 * s.y));
      e = std::max({e, std::abs(det(s.nu.value, s.nu.d_x, s.nu.d_y, s.nu.d_xy) - exact) / exact,
                    std::abs(det(s.f.value, s.f.d_x, s.f.d_y, s.f.d_xy) - exact) / exact});
    }
    err.push_back(e);
  }
  const double ord = order_fit(hs, err);
  o.require(ord >= 3.5, "order " + sci(ord) + " >= 3.5 (gauge exp(0.4x-0.3y))");
  const double t = seconds_since(t0);
  o.require(t < 5.0, "runtime " + sci(t) + " s < 5");
  return o;
}

// 2: reconstruction
Outcome reconstruction() {
  Outcome o;
  const auto b = make_scenario("hypar");
  double an = 0.0;
  for (const auto& s : b.jets)
    an = std::max(an, norm(normalized(reconstruct_point(s.nu, Chart::Asymptotic)) - Vec{s.x, s.y, s.x * s.y, -1}));
  o.require(an <= 1e-12, "analytic " + sci(an) + " <= 1e-12");
  double fd = 0.0;
  for (const auto& s : fd_samples(*b.nu, 2, 4))
    fd = std::max(fd, norm(normalized(reconstruct_point(s.nu, Chart::Asymptotic)) - Vec{s.x, s.y, s.x * s.y, -1}));
  o.require(fd <= 1e-6, "h=0.05 stencil-4 " + sci(fd) + " <= 1e-6");
  return o;
}

// 3: defining relation and duality
Outcome defining_relation() {
  Outcome o;
  const auto b = make_scenario("hypar");
  const auto rep = plm_residual(b.jets, Chart::Asymptotic, 1e-12);
  const double r = std::max(rep.at("plm.x").max_residual, rep.at("plm.y").max_residual);
  o.require(rep.all_pass() && r <= 1e-12, "bivector residual " + sci(r) + " <= 1e-12");
  double rt = 0.0;
  for (const auto& s : b.jets) {
    const Vec f = reconstruct_point(s.nu, Chart::Asymptotic);
    const Vec nu = inverse_reconstruct_point(s.f, Chart::Asymptotic);
    rt = std::max({rt, projective_distance(f, s.f.value), projective_distance(nu, s.nu.value)});
  }
  o.require(rt <= 1e-9, "round trip " + sci(rt) + " <= 1e-9");
  return o;
}

// 4: conjugate chart
Outcome conjugate_chart() {
  Outcome o;
  const auto b = make_scenario("sphere-conj");
  double vanish = 0.0;
  for (const auto& s : b.jets) vanish = std::max(vanish, std::abs(det(s.nu.value, s.nu.d_x, s.nu.d_y, s.nu.d_xy)));
  o.require(vanish <= 1e-8, "|det|nu,nu_x,nu_y,nu_xy|| " + sci(vanish) + " <= 1e-8");
  const auto rep = det_invariance_report(b.jets, Chart::Conjugate, 1e-8);
  const double flip = std::max(rep.at("det.xx_flip").max_residual, rep.at("det.yy_flip").max_residual);
  o.require(flip <= 1e-8, "sign-flipped agreement " + sci(flip) + " <= 1e-8");
  // property check on finite-difference data as well
  const auto fd = det_invariance_report(*b.f, *b.nu, Chart::Conjugate, 4, 1e-6);
  o.require(fd.all_pass(), "stencil-4 report " + std::string(fd.all_pass() ? "passes" : "fails") + " at 1e-6");
  return o;
}

// 5: hypersurface reduction
Outcome hypersurface() {
  Outcome o;
  const AMatrix A(2, {0, -2, -2, 0});
  const auto b = make_scenario("hypar");
  double red = 0.0, piv = 0.0;
  for (std::size_t k = 0; k < b.jets.size(); k += 3) {
    const auto& s = b.jets[k];
    const HyperJet nu = as_hyper(s.nu);
    const Vec h01 = hyper_reconstruct(nu, A, 0, 1), h10 = hyper_reconstruct(nu, A, 1, 0);
    red = std::max(red, projective_distance(h01, reconstruct_point(s.nu, Chart::Asymptotic)));
    piv = std::max(piv, projective_distance(h01, h10));
  }
  o.require(red <= 1e-10, "reduction " + sci(red) + " <= 1e-10");
  o.require(piv <= 1e-10, "pivot independence " + sci(piv) + " <= 1e-10");

  double diag = 0.0, off = 0.0, rt = 0.0;
  for (int n = 2; n <= 4; ++n) {
    ScenarioParams p;
    p.n = n;
    const auto e = make_scenario("ell-paraboloid", p);
    for (const auto& s : e.hyper_jets) {
      const AMatrix R = recover_A(s.f, s.nu);
      for (int a = 0; a < n; ++a)
        for (int g = 0; g < n; ++g) {
          if (a == g) diag = std::max(diag, std::abs(std::abs(R(a, g)) - 1.0));
          else off = std::max(off, std::abs(R(a, g)));
        }
      for (int a = 0; a < n; ++a) rt = std::max(rt, projective_distance(hyper_reconstruct(s.nu, R, a, a), s.f.value));
    }
  }
  o.require(diag <= 1e-10, "||A_aa|-1| " + sci(diag) + " <= 1e-10");
  o.require(off <= 1e-12, "off-diagonal " + sci(off) + " <= 1e-12");
  o.require(rt <= 1e-10, "round trip " + sci(rt) + " <= 1e-10");
  return o;
}

// 6: discrete volume invariance
Outcome discrete_volume() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioParams p;
  p.h = 0.1;
  const auto hl = *make_scenario("hypar-lattice", p).lattice;
  double vol = 0.0, prod = 0.0;
  for (int n2 = hl.f.lo2(); n2 + 1 < hl.f.hi2(); ++n2)
    for (int n1 = hl.f.lo1(); n1 + 1 < hl.f.hi1(); ++n1) {
      const Vec& f = hl.f.at(n1, n2);
      const Vec& v = hl.nu.at(n1, n2);
      const double l = det(hl.f.at(n1 + 1, n2) - f, hl.f.at(n1, n2 + 1) - f, hl.f.at(n1 + 1, n2 + 1) - f);
      const double r = det(v, hl.nu.at(n1 + 1, n2), hl.nu.at(n1 + 1, n2 + 1)) *
                       det(v, hl.nu.at(n1 + 1, n2), hl.nu.at(n1, n2 + 1));
      vol = std::max(vol, std::abs(l - 1e-4));
      prod = std::max(prod, std::abs(l - r) / std::abs(r));
    }
  o.require(vol <= 1e-16, "hypar-lattice volume error " + sci(vol) + " <= 1e-16");
  o.require(prod <= 1e-12, "factorization " + sci(prod) + " <= 1e-12");

  ScenarioParams q;
  q.seed = 42;
  q.size = 32;
  const auto mr = *make_scenario("moutard-random", q).lattice;
  const auto rep = discrete_det_invariance(mr, 1e-10);
  const double m =
      std::max(rep.at("det.discrete.affine").max_residual, rep.at("det.discrete.projective").max_residual);
  o.require(rep.all_pass(), "moutard-random(42, 32x32) relative " + sci(m) + " <= 1e-10");
  const double t = seconds_since(t0);
  o.require(t < 1.0, "runtime " + sci(t) + " s < 1");
  return o;
}

// 7: discrete closure
Outcome discrete_closure() {
  Outcome o;
  double worst = 0.0;
  std::size_t plaquettes = 0;
  for (std::uint64_t seed : {42u, 1u, 2u, 3u, 2024u}) {
    ScenarioParams p;
    p.seed = seed;
    const auto l = *make_scenario("moutard-random", p).lattice;
    const LatticeField f = discrete_affine_integrate(l.nu, Vec{0.1, -0.2, 0.3});
    const auto rep = plaquette_closure(l.nu, f, 1e-12);
    for (const auto& r : rep.records) worst = std::max(worst, r.max_residual);
    plaquettes += rep.at("closure.path").samples;
  }
  o.require(worst <= 1e-12, "max over " + std::to_string(plaquettes) + " plaquettes " + sci(worst) + " <= 1e-12");
  return o;
}

// 8: discrete forms
Outcome discrete_forms_check() {
  Outcome o;
  const double h = 0.1;
  ScenarioParams p;
  p.h = h;
  const auto forms = discrete_forms(*make_scenario("hypar-lattice", p).lattice);
  double om = 0.0, f2 = 0.0;
  for (const auto& pt : forms.points) {
    if (pt.Omega2) om = std::max(om, std::abs(*pt.Omega2 + h * h));
    if (pt.F2d) f2 = std::max(f2, std::abs(*pt.F2d - h * h));
  }
  o.require(om <= 1e-15, "Omega2 + h^2 " + sci(om) + " <= 1e-15");
  o.require(f2 <= 1e-12, "F2d - h^2 " + sci(f2) + " <= 1e-12");

  const auto mr = *make_scenario("moutard-random").lattice;
  double id = 0.0;
  for (const auto& pt : discrete_forms(mr).points)
    if (pt.Omega2) {
      const double d = det(mr.nu.at(pt.n1, pt.n2), mr.nu.at(pt.n1 + 1, pt.n2), mr.nu.at(pt.n1, pt.n2 + 1));
      id = std::max(id, std::abs(*pt.Omega2 - d));
    }
  o.require(id <= 1e-12, "moutard-random Omega2 - det " + sci(id) + " <= 1e-12");
  return o;
}

// 9: continuum limit of the discrete metric
Outcome continuum_limit() {
  Outcome o;
  // uniform sampling of the hyperbolic paraboloid carries no truncation error
  const auto hy = make_scenario("hypar");
  double exact = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto lat = sample_affine_lattice(hy, h, 5, 5, 0.1, 0.1);
    const auto pt = discrete_forms(lat).points.front();
    exact = std::max(exact, std::abs(*pt.Omega2 / (h * h) - (-1.0)));
  }
  o.require(exact <= 1e-12, "hypar |Omega2/h^2 - F| " + sci(exact) + " (exact at every h)");

  // the same surface along non-uniform asymptotic lines x = phi(s), y = psi(t), where F = phi' psi' F(phi, psi)
  auto phi = [](double s) { return s + 0.3 * s * s; };
  auto psi = [](double t) { return t + 0.2 * t * t * t; };
  const double s0 = 0.1, t0 = 0.1;
  const double F = (1 + 0.6 * s0) * (1 + 0.6 * t0 * t0) *
                   affine_forms({hy.affine_jet(phi(s0), psi(t0))}).points.front().F;
  std::vector<double> hs{0.1, 0.05, 0.025}, err;
  for (double h : hs) {
    DiscreteSurfacePair lat{LatticeField(3, 3, 3), LatticeField(3, 3, 3), DiscreteGauge::Affine};
    for (int n2 = 0; n2 < 3; ++n2)
      for (int n1 = 0; n1 < 3; ++n1) {
        const AffineSample a = hy.affine_jet(phi(s0 + n1 * h), psi(t0 + n2 * h));
        lat.f.at(n1, n2) = a.f.value;
        lat.nu.at(n1, n2) = a.nu.value;
      }
    for (const auto& pt : discrete_forms(lat).points)
      if (pt.n1 == 0 && pt.n2 == 0) err.push_back(std::abs(*pt.Omega2 / (h * h) - F));
  }
  const bool mono = err.size() == 3 && err[0] > err[1] && err[1] > err[2];
  o.require(mono, "reparametrized errors " + sci(err[0]) + " > " + sci(err[1]) + " > " + sci(err[2]));
  const double ord = order_fit(hs, err);
  o.require(ord >= 0.9, "order " + sci(ord) + " >= 0.9");
  return o;
}

// 10: affine reduction
Outcome affine_reduction() {
  Outcome o;
  const auto b = make_scenario("hypar");
  const auto forms = affine_forms(b.affine_jets, 1e-10);
  double F = 0.0, cub = 0.0;
  for (const auto& p : forms.points) {
    F = std::max(F, std::abs(p.F + 1.0));
    cub = std::max({cub, std::abs(p.A_cubic), std::abs(p.B_cubic)});
  }
  o.require(F <= 1e-10, "|F+1| " + sci(F) + " <= 1e-10");
  o.require(cub <= 1e-10, "cubic forms " + sci(cub) + " <= 1e-10");
  const double sq = std::max(forms.checks.at("affine.lift_det=F^2").max_residual,
                             forms.checks.at("affine.det|f_x,f_y,f_xy|=F^2").max_residual);
  o.require(sq <= 1e-10, "squared-determinant relation " + sci(sq) + " <= 1e-10");
  o.require(forms.checks.all_pass(), "affine report");

  for (double h : {0.1, 0.05, 0.025}) {
    const GridSpec g = GridSpec::box(2, -1.0, 1.0, h);
    FieldGrid nu(g, 3);
    for (int j = 0; j < nu.ny(); ++j)
      for (int i = 0; i < nu.nx(); ++i) nu.at(i, j) = Vec{-g.coord(1, j), -g.coord(0, i), 1.0};
    const auto r = classical_lelieuvre_integrate(nu, Vec{-1, -1, 1});
    double e = 0.0;
    for (int j = 0; j < nu.ny(); ++j)
      for (int i = 0; i < nu.nx(); ++i) {
        const double x = g.coord(0, i), y = g.coord(1, j);
        e = std::max(e, norm(r.f.at(i, j) - Vec{x, y, x * y}));
      }
    o.require(e <= 5 * h * h, "integration h=" + sci(h) + " error " + sci(e) + " <= 5h^2");
  }
  return o;
}

// 11: convention pinning in exact arithmetic
Outcome conventions() {
  using Q = boost::multiprecision::cpp_rational;
  using QV = BasicVec<Q>;
  Outcome o;
  const QV e1 = QV::unit(4, 0), e2 = QV::unit(4, 1), e3 = QV::unit(4, 2), e4 = QV::unit(4, 3);
  o.require(cross(e1, e2, e3) == -e4, "[e1,e2,e3] = -e4");
  o.require(hodge_star(wedge2(e1, e2)) == wedge2(e3, e4), "star(e1^e2) = e3^e4");
  bool pairing = true;
  std::uint64_t state = 7;
  auto q = [&] {
    const auto r = splitmix64(state);
    return Q(static_cast<long>(r % 19) - 9, static_cast<long>((r >> 20) % 7) + 1);
  };
  for (int t = 0; t < 200; ++t) {
    QV b(4), a1(4), a2(4), a3(4);
    for (QV* v : {&b, &a1, &a2, &a3})
      for (int i = 0; i < 4; ++i) (*v)[i] = q();
    pairing = pairing && pair(b, cross(a1, a2, a3)) == det(b, a1, a2, a3);
  }
  o.require(pairing, "<b,[a1,a2,a3]> = det|b,a1,a2,a3| on 200 rational samples");
  const Vec d = cross(Vec::unit(4, 0), Vec::unit(4, 1), Vec::unit(4, 2));
  o.require(d == -Vec::unit(4, 3), "double mode bit-identical");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "determinant invariance", determinants},
      {2, "reconstruction", reconstruction},
      {3, "defining relation and duality", defining_relation},
      {4, "conjugate chart", conjugate_chart},
      {5, "hypersurface reduction", hypersurface},
      {6, "discrete volume invariance", discrete_volume},
      {7, "discrete closure", discrete_closure},
      {8, "discrete forms", discrete_forms_check},
      {9, "continuum limit", continuum_limit},
      {10, "affine reduction", affine_reduction},
      {11, "convention pinning", conventions},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %-30s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}

#include "doctest.h"
#include "oracles.hpp"
#include "plm/affine_gauge.hpp"
#include "plm/scenarios.hpp"

using namespace plm;

namespace {

FieldGrid affine_nu(const GridSpec& g, Vec (*fn)(double, double)) {
  FieldGrid out(g, 3);
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i) out.at(i, j) = fn(g.coord(0, i), g.coord(1, j));
  return out;
}

Vec hypar_nu3(double x, double y) { return Vec{-y, -x, 1}; }

double integration_error(double h, PathOrder order) {
  const GridSpec g = GridSpec::box(2, -1.0, 1.0, h);
  const FieldGrid nu = affine_nu(g, hypar_nu3);
  const auto r = classical_lelieuvre_integrate(nu, Vec{-1, -1, 1}, order);
  double worst = 0.0;
  for (int j = 0; j < nu.ny(); ++j)
    for (int i = 0; i < nu.nx(); ++i) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      worst = std::max(worst, oracle::dist(r.f.at(i, j), Vec{x, y, x * y}));
    }
  return worst;
}

}  // namespace

TEST_SUITE("affine") {

TEST_CASE("classical integration of the hyperbolic paraboloid") {
  // hand check of the derivative: nu x nu_x = (1, 0, y)
  const Vec n = hypar_nu3(0.3, 0.7);
  CHECK(oracle::dist(oracle::cross<double>({n, Vec{0, -1, 0}}), Vec{1, 0, 0.7}) <= 1e-15);
  for (double h : {0.1, 0.05, 0.025}) {
    CHECK(integration_error(h, PathOrder::RowFirst) <= 5 * h * h);
    CHECK(integration_error(h, PathOrder::ColumnFirst) <= 5 * h * h);
  }
}

TEST_CASE("row-first and column-first paths agree") {
  // nu_xy = 0 for any conormal with constant last entry, so the sampled net closes exactly
  for (double h : {0.1, 0.05, 0.025}) {
    const GridSpec g = GridSpec::box(2, -1.0, 1.0, h);
    const FieldGrid nu = affine_nu(g, [](double x, double y) {
      return Vec{-y + 0.3 * std::sin(x), -x + 0.3 * std::sin(y), 1};
    });
    const auto a = classical_lelieuvre_integrate(nu, Vec{0, 0, 0}, PathOrder::RowFirst);
    const auto b = classical_lelieuvre_integrate(nu, Vec{0, 0, 0}, PathOrder::ColumnFirst);
    CHECK(a.closure.metadata["path"] == "row-first");
    double d = 0.0;
    for (std::size_t k = 0; k < a.f.values().size(); ++k)
      d = std::max(d, oracle::dist(a.f.values()[k], b.f.values()[k]));
    CHECK(d <= 1e-13);
  }
}

TEST_CASE("constant conormal and closure failures") {
  const GridSpec g = GridSpec::box(2, 0.0, 1.0, 0.1);
  const FieldGrid c = affine_nu(g, [](double, double) { return Vec{0.2, 0.3, 1.0}; });
  const auto r = classical_lelieuvre_integrate(c, Vec{1, 2, 3});
  for (const auto& v : r.f.values()) CHECK(oracle::dist(v, Vec{1, 2, 3}) <= 1e-15);

  const GridSpec big = GridSpec::box(2, -1.0, 1.0, 0.05);
  const FieldGrid bad = affine_nu(big, [](double x, double y) { return Vec{-y, -x, 1 + x * y}; });
  CHECK_THROWS_AS(classical_lelieuvre_integrate(bad, Vec{0, 0, 0}), ClosureError);
  CHECK_THROWS_AS(classical_lelieuvre_integrate(c, Vec{0, 0}), DomainError);
}

TEST_CASE("lift matches the projective fixture pair") {
  const auto b = make_scenario("hypar");
  const auto [f4, nu4] = lift_affine({*b.f_affine, *b.nu_affine});
  const GridSpec& g = f4.spec();
  for (int j = 0; j < f4.ny(); j += 4)
    for (int i = 0; i < f4.nx(); i += 4) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      CHECK(oracle::dist(f4.at(i, j), oracle::hypar_f(x, y).value) <= 1e-15);
      CHECK(oracle::dist(nu4.at(i, j), oracle::hypar_nu(x, y).value) <= 1e-15);
    }
}

TEST_CASE("lifted jets follow the product rule") {
  const auto b = make_scenario("cubic-graph");
  for (std::size_t k = 0; k < b.affine_jets.size(); k += 9) {
    const auto& a = b.affine_jets[k];
    const auto [F, N] = lift_jets(a.f, a.nu);
    const JetSample s = b.jet(a.x, a.y);
    // the scenario's projective jets are already in the f4 = -1 gauge
    CHECK(oracle::dist(F.d_xy, s.f.d_xy) <= 1e-14);
    CHECK(oracle::dist(N.d_xx, s.nu.d_xx) <= 1e-13);
    CHECK(oracle::dist(N.d_xy, s.nu.d_xy) <= 1e-13);
    CHECK(oracle::dist(*N.d_xxx, *s.nu.d_xxx) <= 1e-13);
  }
}

TEST_CASE("Blaschke metric and cubic forms on the hyperbolic paraboloid") {
  const auto b = make_scenario("hypar");
  const auto forms = affine_forms(b.affine_jets, 1e-10);
  CHECK(forms.checks.all_pass());
  for (const auto& p : forms.points) {
    CHECK(p.F == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(p.A_cubic) <= 1e-14);
    CHECK(std::abs(p.B_cubic) <= 1e-14);
  }
  // hand values
  const Vec n = hypar_nu3(0.3, 0.7);
  CHECK(oracle::det3(n, Vec{0, -1, 0}, Vec{-1, 0, 0}) == doctest::Approx(-1.0));
  CHECK(oracle::det3(Vec{1, 0, 0.7}, Vec{0, 1, 0.3}, Vec{0, 0, 1}) == doctest::Approx(1.0));
  CHECK(oracle::det4(Vec{-0.7, -0.3, 1, -0.21}, Vec{0, -1, 0, -0.7}, Vec{-1, 0, 0, -0.3}, Vec{0, 0, 0, -1}) ==
        doctest::Approx(1.0));
}

TEST_CASE("finite-difference affine forms") {
  const auto b = make_scenario("hypar");
  const auto forms = affine_forms({*b.f_affine, *b.nu_affine}, 4, 1e-10);
  CHECK(forms.checks.all_pass());
}

TEST_CASE("cubic forms of the cubic graph") {
  const auto b = make_scenario("cubic-graph");
  const auto forms = affine_forms(b.affine_jets, 1e-10);
  CHECK(forms.checks.all_pass());
  bool nonzero = false;
  for (std::size_t k = 0; k < forms.points.size(); ++k) {
    const auto& p = forms.points[k];
    const auto& f = b.affine_jets[k].f;
    CHECK(p.F == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.A_cubic * p.A_cubic == doctest::Approx(oracle::det3(f.d_x, f.d_xx, *f.d_xxx)).epsilon(1e-10));
    nonzero = nonzero || std::abs(p.A_cubic) > 0.1;
  }
  CHECK(nonzero);

  auto flipped = b.affine_jets;
  for (auto& s : flipped) *s.f.d_xxx = -*s.f.d_xxx;
  CHECK_THROWS_AS(affine_forms(flipped, 1e-10), ChartMismatchError);
}

}  // TEST_SUITE

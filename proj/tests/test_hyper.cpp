#include "doctest.h"
#include "oracles.hpp"
#include "plm/plm_hyper.hpp"
#include "plm/plm_smooth.hpp"
#include "plm/scenarios.hpp"

using namespace plm;

namespace {

HyperJet from_surface_jet(const JetRecord& j) {
  HyperJet h;
  h.n = 2;
  h.value = j.value;
  h.d = {j.d_x, j.d_y};
  h.dd = {j.d_xx, j.d_xy, j.d_xy, j.d_yy};
  return h;
}

const AMatrix kAnti2(2, {0, -2, -2, 0});
const AMatrix kAnti1(2, {0, -1, -1, 0});

std::vector<HyperSample> hypar_samples(const AMatrix& A) {
  std::vector<HyperSample> out;
  for (double x = -1.0; x <= 1.0; x += 0.125)
    for (double y = -1.0; y <= 1.0; y += 0.125) {
      HyperSample s;
      s.site = {static_cast<long>(std::lround(8 * (x + 1))), static_cast<long>(std::lround(8 * (y + 1)))};
      s.f = from_surface_jet(oracle::hypar_f(x, y));
      s.nu = from_surface_jet(oracle::hypar_nu(x, y));
      s.A = A;
      out.push_back(s);
    }
  return out;
}

}  // namespace

TEST_SUITE("hyper") {

TEST_CASE("two-parameter reduction matches the surface formula") {
  for (double x : {-0.9, -0.2, 0.3, 0.8})
    for (double y : {-0.6, 0.0, 0.7}) {
      const JetRecord nu = oracle::hypar_nu(x, y);
      const Vec h = hyper_reconstruct(from_surface_jet(nu), kAnti2, 0, 1);
      CHECK(projective_distance(h, reconstruct_point(nu, Chart::Asymptotic)) <= 1e-12);
      CHECK(projective_distance(h, Vec{x, y, x * y, -1}) <= 1e-12);
    }
}

TEST_CASE("pivot independence") {
  for (double x : {-0.5, 0.1, 0.9})
    for (double y : {-0.3, 0.6}) {
      const HyperJet nu = from_surface_jet(oracle::hypar_nu(x, y));
      CHECK(oracle::dist(hyper_reconstruct(nu, kAnti2, 0, 1), hyper_reconstruct(nu, kAnti2, 1, 0)) <= 1e-12);
    }
  const auto b = make_scenario("ell-paraboloid", [] {
    ScenarioParams p;
    p.n = 3;
    return p;
  }());
  for (std::size_t k = 0; k < b.hyper_jets.size(); k += 17) {
    const auto& s = b.hyper_jets[k];
    const Vec ref = hyper_reconstruct(s.nu, s.A, 0, 0);
    for (int a = 1; a < 3; ++a) CHECK(oracle::dist(hyper_reconstruct(s.nu, s.A, a, a), ref) <= 1e-10);
  }
}

TEST_CASE("invalid matrices and pivots") {
  CHECK_THROWS_AS(AMatrix(2, {1, 2, 2, 4}), DomainError);
  CHECK_THROWS_AS(AMatrix(5, std::vector<double>(25, 1.0)), DomainError);
  CHECK_THROWS_AS(AMatrix(2, {1, 0, 0}), DomainError);
  const HyperJet nu = from_surface_jet(oracle::hypar_nu(0.3, 0.7));
  // diagonal pivot hits a zero entry of the anti-diagonal matrix
  CHECK_THROWS_AS(hyper_reconstruct(nu, kAnti2, 0, 0), DegenerateError);
  CHECK_THROWS_AS(hyper_reconstruct(nu, AMatrix(2, {0, 2, 2, 0}), 0, 1), ChartMismatchError);
  CHECK_THROWS_AS(hyper_reconstruct(nu, kAnti2, 0, 2), DomainError);
}

TEST_CASE("reconstruction is homogeneous") {
  const auto b = make_scenario("ell-paraboloid");
  const auto& s = b.hyper_jets[40];
  HyperJet scaled = s.nu;
  const double lam = 3.5;
  scaled.value = lam * scaled.value;
  for (auto& v : scaled.d) v = lam * v;
  for (auto& v : scaled.dd) v = lam * v;
  const Vec a = hyper_reconstruct(s.nu, s.A, 0, 0), c = hyper_reconstruct(scaled, s.A, 0, 0);
  CHECK(oracle::dist(c, lam * a) <= 1e-12 * lam * norm(a));
}

TEST_CASE("weight matrix of the elliptic paraboloid") {
  for (int n = 2; n <= 4; ++n) {
    ScenarioParams p;
    p.n = n;
    const auto b = make_scenario("ell-paraboloid", p);
    for (std::size_t k = 0; k < b.hyper_jets.size(); k += 7) {
      const auto& s = b.hyper_jets[k];
      const AMatrix A = recover_A(s.f, s.nu);
      for (int a = 0; a < n; ++a)
        for (int g = 0; g < n; ++g) {
          if (a == g) CHECK(std::abs(std::abs(A(a, g)) - 1.0) <= 1e-10);
          else CHECK(std::abs(A(a, g)) <= 1e-12);
        }
      // round trip convention: recovered A reproduces f as a projective point
      for (int a = 0; a < n; ++a) CHECK(oracle::proj_dist(hyper_reconstruct(s.nu, A, a, a), s.f.value) <= 1e-10);
    }
  }
}

TEST_CASE("weight matrix by hand at one point") {
  // n = 2 at (0.2, -0.4): f = (x1, x2, r2/2, -1), nu = (-x1, -x2, 1, -r2/2)
  const double x1 = 0.2, x2 = -0.4, r2 = x1 * x1 + x2 * x2;
  HyperJet f, nu;
  f.n = nu.n = 2;
  f.value = Vec{x1, x2, r2 / 2, -1};
  nu.value = Vec{-x1, -x2, 1, -r2 / 2};
  f.d = {Vec{1, 0, x1, 0}, Vec{0, 1, x2, 0}};
  nu.d = {Vec{-1, 0, 0, -x1}, Vec{0, -1, 0, -x2}};
  nu.dd = {Vec{0, 0, 0, -1}, Vec{0, 0, 0, 0}, Vec{0, 0, 0, 0}, Vec{0, 0, 0, -1}};
  // oracle: A_ag = -<f_a,nu_g> <f,c> / <c,c> with c from the determinant oracle
  const Vec c = oracle::cross<double>({nu.value, nu.d[0], nu.d[1]});
  const AMatrix A = recover_A(f, nu);
  for (int a = 0; a < 2; ++a)
    for (int g = 0; g < 2; ++g) {
      const double want = -pair(f.d[a], nu.d[g]) * pair(f.value, c) / pair(c, c);
      CHECK(A(a, g) == doctest::Approx(want).epsilon(1e-14));
    }
  CHECK(A(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hyperbolic paraboloid gives an anti-diagonal weight matrix") {
  const HyperJet f = from_surface_jet(oracle::hypar_f(0.3, 0.7));
  const HyperJet nu = from_surface_jet(oracle::hypar_nu(0.3, 0.7));
  const AMatrix A = recover_A(f, nu);
  CHECK(std::abs(A(0, 0)) <= 1e-15);
  CHECK(std::abs(A(1, 1)) <= 1e-15);
  CHECK(A(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(A(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(oracle::dist(hyper_reconstruct(nu, A, 0, 1), f.value) <= 1e-14);
}

TEST_CASE("unrelated f fails the round trip") {
  oracle::Rng rng(41);
  const auto b = make_scenario("ell-paraboloid");
  auto samples = b.hyper_jets;
  for (auto& s : samples) {
    s.f.value = rng.vec(4);
    for (auto& v : s.f.d) v = rng.vec(4);
    s.A = recover_A(s.f, s.nu);
  }
  const auto rep = hyper_plm_residual(samples, 1e-6);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.at("hyper.<f,nu>").max_residual > 1e-3);
}

TEST_CASE("defining relation residual") {
  for (int n = 2; n <= 4; ++n) {
    ScenarioParams p;
    p.n = n;
    const auto b = make_scenario("ell-paraboloid", p);
    const auto rep = hyper_plm_residual(b.hyper_jets, 1e-10);
    CHECK(rep.all_pass());

    auto perturbed = b.hyper_jets;
    std::vector<double> a = perturbed[0].A.values();
    a[0] += 0.1;
    for (auto& s : perturbed) s.A = AMatrix(n, a);
    const double r = hyper_plm_residual(perturbed, 1e-10).at("hyper.plm.1").max_residual;
    CHECK(r > 0.01);
    CHECK(r < 0.5);
  }
}

TEST_CASE("reduction agrees with the surface residual") {
  const auto rep = hyper_plm_residual(hypar_samples(kAnti1), 1e-12);
  CHECK(rep.all_pass());
  std::vector<JetSample> js;
  for (double x = -1.0; x <= 1.0; x += 0.125)
    for (double y = -1.0; y <= 1.0; y += 0.125) {
      JetSample s;
      s.site = {0, 0};
      s.f = oracle::hypar_f(x, y);
      s.nu = oracle::hypar_nu(x, y);
      js.push_back(s);
    }
  const auto surf = plm_residual(js, Chart::Asymptotic, 1e-12);
  CHECK(std::abs(rep.at("hyper.plm.1").max_residual - surf.at("plm.x").max_residual) <= 1e-15);
  CHECK(std::abs(rep.at("hyper.plm.2").max_residual - surf.at("plm.y").max_residual) <= 1e-15);
  CHECK_FALSE(hyper_plm_residual(hypar_samples(kAnti2), 1e-6).all_pass());
}

TEST_CASE("compatibility residual") {
  for (int n = 2; n <= 4; ++n) {
    ScenarioParams p;
    p.n = n;
    const auto b = make_scenario("ell-paraboloid", p);
    const auto rep = hyper_compat_residual(b.hyper_jets, 1e-10);
    CHECK(rep.all_pass());
    CHECK(rep.at("hyper.compat.diagonal").max_residual == 0.0);
  }
  oracle::Rng rng(42);
  ScenarioParams p;
  p.n = 3;
  auto s = make_scenario("ell-paraboloid", p).hyper_jets;
  for (auto& h : s)
    for (auto& v : h.nu.dd) v = v + 1e-3 * rng.vec(5);
  // keep the second-derivative table symmetric
  for (auto& h : s)
    for (int a = 0; a < 3; ++a)
      for (int g = a + 1; g < 3; ++g) h.nu.dd[g * 3 + a] = h.nu.dd[a * 3 + g];
  const double r = hyper_compat_residual(s, 1e-10).at("hyper.compat").max_residual;
  CHECK(r > 1e-5);
  CHECK(r < 1e-2);
}

TEST_CASE("finite-difference hypersurface jets") {
  ScenarioParams p;
  p.n = 3;
  const auto b = make_scenario("ell-paraboloid", p);
  CHECK(hyper_plm_residual(*b.f, *b.nu, *b.A, 4, 1e-10).all_pass());
  CHECK(hyper_compat_residual(*b.nu, *b.A, 2, 1e-10).all_pass());
  const auto idx = interior_indices(b.nu->spec(), 2);
  CHECK(idx.size() == 7u * 7u * 7u);
  const HyperJet j = hyper_jet(*b.nu, idx[100], 4);
  const Vec direct = hyper_reconstruct(j, b.A->at(0), 1, 1);
  CHECK(oracle::dist(direct, b.f->at(idx[100])) <= 1e-10);
}

}  // TEST_SUITE

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "plm/multilinear.hpp"

using namespace plm;
using Q = boost::multiprecision::cpp_rational;
using QVec = BasicVec<Q>;

namespace {

QVec qrandom(oracle::Rng& rng, int d) {
  QVec v(d);
  for (int i = 0; i < d; ++i) v[i] = Q(rng.integer(-9, 9), rng.integer(1, 7));
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_SUITE("multilinear") {

TEST_CASE("levi-civita signs") {
  CHECK(levi_civita_sign({1, 2, 3, 4}) == 1);
  CHECK(levi_civita_sign({2, 1, 3, 4}) == -1);
  CHECK(levi_civita_sign({1, 1, 3, 4}) == 0);
  CHECK(levi_civita_sign({4, 1, 2, 3}) == -1);
  CHECK_THROWS_AS(levi_civita_sign({1, 5, 2, 3}), DomainError);

  oracle::Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const int d = rng.integer(2, 6);
    std::vector<int> p(d);
    for (auto& x : p) x = rng.integer(1, d);
    std::vector<int> z(d);
    for (int i = 0; i < d; ++i) z[i] = p[i] - 1;
    CHECK(levi_civita_sign(std::span<const int>(p)) == oracle::eps(z));
  }
}

TEST_CASE("wedge examples") {
  const Bivector b = wedge2(Vec::unit(4, 0), Vec::unit(4, 1));
  CHECK(b(0, 1) == 1.0);
  CHECK(b(1, 0) == -1.0);
  CHECK(oracle::max_abs(b - wedge2(Vec::unit(4, 0), Vec::unit(4, 1))) == 0.0);
  int nonzero = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) nonzero += b(i, j) != 0.0;
  CHECK(nonzero == 1);

  const Vec a{0.3, -1.2, 2.5, 0.7};
  CHECK(oracle::max_abs(wedge2(a, a)) == 0.0);

  const Bivector w = wedge2(Vec{1, 2, 0, 0}, Vec{0, 1, 1, 0});
  CHECK(w(0, 1) == 1.0);
  CHECK(w(0, 2) == 1.0);
  CHECK(w(1, 2) == 2.0);
  CHECK(w(0, 3) == 0.0);
  CHECK(w(1, 3) == 0.0);
  CHECK(w(2, 3) == 0.0);
}

TEST_CASE("wedge is antisymmetric") {
  oracle::Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const int d = rng.integer(2, 6);
    const Bivector w = wedge2(rng.vec(d), rng.vec(d));
    for (int i = 0; i < d; ++i) {
      CHECK(w(i, i) == 0.0);
      for (int j = 0; j < d; ++j) CHECK(w(i, j) == -w(j, i));
    }
  }
  Bivector b(4);
  CHECK_THROWS_AS(b.set(1, 1, 2.0), DomainError);
}

TEST_CASE("hodge star examples") {
  const Bivector s = hodge_star(wedge2(Vec::unit(4, 0), Vec::unit(4, 1)));
  CHECK(oracle::max_abs(s - wedge2(Vec::unit(4, 2), Vec::unit(4, 3))) == 0.0);
  CHECK(oracle::max_abs(hodge_star(Bivector(4))) == 0.0);
  CHECK_THROWS_AS(hodge_star(Bivector(5)), DomainError);
}

TEST_CASE("hodge star matches the basis table") {
  oracle::Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Bivector b = wedge2(rng.vec(4), rng.vec(4)) + wedge2(rng.vec(4), rng.vec(4));
    CHECK(oracle::max_abs(hodge_star(b) - oracle::hodge_table(b)) <= 1e-15);
    CHECK(oracle::max_abs(hodge_star(hodge_star(b)) - b) <= 1e-15);
  }
}

TEST_CASE("cross product examples") {
  CHECK(cross(Vec::unit(3, 0), Vec::unit(3, 1)) == Vec::unit(3, 2));
  CHECK(cross(Vec::unit(4, 0), Vec::unit(4, 1), Vec::unit(4, 2)) == -Vec::unit(4, 3));
  const Vec a{1.5, -2, 0.25, 3}, b{0.1, 0.2, -0.7, 1};
  CHECK(norm(cross(a, a, b)) <= 1e-15 * norm(a) * norm(a) * norm(b));
  CHECK_THROWS_AS(cross(Vec{1, 2, 3}, Vec{1, 2, 3}, Vec{0, 0, 1}), DomainError);
}

TEST_CASE("cross product against the determinant oracle in every dimension") {
  oracle::Rng rng(4);
  for (int d = 2; d <= 6; ++d)
    for (int t = 0; t < 20; ++t) {
      std::vector<Vec> vs;
      for (int k = 0; k < d - 1; ++k) vs.push_back(rng.vec(d));
      const Vec c = cross_n(vs);
      const Vec o = oracle::cross(vs);
      CHECK(norm(c - o) <= 1e-13 * std::max(1.0, norm(o)));
      if (d >= 3) {
        std::swap(vs[0], vs[1]);
        CHECK(norm(cross_n(vs) + c) <= 1e-13 * std::max(1.0, norm(c)));
      }
    }
}

TEST_CASE("determinant examples") {
  CHECK(det(Vec::unit(4, 0), Vec::unit(4, 1), Vec::unit(4, 2), Vec::unit(4, 3)) == 1.0);
  const Vec a{0.3, 1, -2, 4}, b{1, 1, 0, 2}, c{-1, 0.5, 0.5, 0};
  CHECK(det(a, b, a, c) == 0.0);
  for (double x : {-1.0, -0.3, 0.0, 0.45, 0.9})
    for (double y : {-0.8, 0.0, 0.7}) {
      const auto n = oracle::hypar_nu(x, y);
      CHECK(std::abs(det(n.value, n.d_x, n.d_y, n.d_xy) - 1.0) <= 1e-15);
    }
}

TEST_CASE("determinant agrees with the permutation sum up to dimension six") {
  oracle::Rng rng(5);
  for (int d = 1; d <= 6; ++d)
    for (int t = 0; t < 100; ++t) {
      std::vector<Vec> rows;
      for (int k = 0; k < d; ++k) rows.push_back(rng.vec(d));
      const double o = oracle::perm_det(rows);
      const double v = det_n(rows);
      // conditioning scale: product of row norms
      double s = 1.0;
      for (const auto& r : rows) s *= norm(r);
      CHECK(std::abs(v - o) <= 1e-12 * std::max(std::abs(o), 1e-3 * s));
    }
}

TEST_CASE("pairing examples") {
  CHECK(std::abs(pair(oracle::hypar_f(0.3, 0.7).value, oracle::hypar_nu(0.3, 0.7).value)) <= 1e-16);
  CHECK(std::abs(pair(Vec{0.3, 0.7, 0.21, -1}, Vec{-0.7, -0.3, 1, -0.21})) <= 1e-16);
  CHECK(pair(Vec::unit(4, 0), Vec::unit(4, 0)) == 1.0);
  CHECK_THROWS_AS(pair(Vec{1, 2}, Vec{1, 2, 3}), DomainError);
}

TEST_CASE("pairing with a cross product is a determinant") {
  oracle::Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const Vec b = rng.vec(4), a1 = rng.vec(4), a2 = rng.vec(4), a3 = rng.vec(4);
    const double lhs = pair(b, cross(a1, a2, a3));
    const double rhs = oracle::det4(b, a1, a2, a3);
    const double s = norm(b) * norm(a1) * norm(a2) * norm(a3);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(std::abs(rhs), 1e-2 * s));
    CHECK(rel(det(b, a1, a2, a3), rhs) <= 1e-12);
  }
}

TEST_CASE("star of a wedge") {
  oracle::Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Vec a = rng.vec(4), b = rng.vec(4);
    CHECK(oracle::max_abs(star_of_wedge(std::vector<Vec>{a, b}) - hodge_star(wedge2(a, b))) <= 1e-15);
  }
  // d = 5: (star)_{kl} = det(v1, v2, v3, e_k, e_l)
  for (int t = 0; t < 20; ++t) {
    const std::vector<Vec> vs{rng.vec(5), rng.vec(5), rng.vec(5)};
    const Bivector s = star_of_wedge(vs);
    for (int k = 0; k < 5; ++k)
      for (int l = k + 1; l < 5; ++l) {
        const double o = oracle::perm_det<double>({vs[0], vs[1], vs[2], Vec::unit(5, k), Vec::unit(5, l)});
        CHECK(std::abs(s(k, l) - o) <= 1e-14);
      }
  }
}

TEST_CASE("rational mode pins the conventions bit-exactly") {
  const QVec e1 = QVec::unit(4, 0), e2 = QVec::unit(4, 1), e3 = QVec::unit(4, 2), e4 = QVec::unit(4, 3);
  CHECK(cross(e1, e2, e3) == -e4);
  CHECK(hodge_star(wedge2(e1, e2)) == wedge2(e3, e4));
  CHECK(det(e1, e2, e3, e4) == Q(1));

  oracle::Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const QVec b = qrandom(rng, 4), a1 = qrandom(rng, 4), a2 = qrandom(rng, 4), a3 = qrandom(rng, 4);
    CHECK(pair(b, cross(a1, a2, a3)) == det(b, a1, a2, a3));
    CHECK(det(b, a1, a2, a3) == oracle::perm_det<Q>({b, a1, a2, a3}));
    const auto B = wedge2(a1, a2) + wedge2(a3, b);
    CHECK(hodge_star(hodge_star(B)) == B);
    CHECK(hodge_star(B) == oracle::hodge_table(B));
    CHECK(star_of_wedge(std::vector<QVec>{a1, a2}) == hodge_star(wedge2(a1, a2)));
    CHECK(cross(a1, a2, a3) == -cross(a2, a1, a3));
  }
  for (int d = 5; d <= 6; ++d) {
    std::vector<QVec> rows;
    for (int k = 0; k < d; ++k) rows.push_back(qrandom(rng, d));
    CHECK(det_n(rows) == oracle::perm_det(rows));
  }
}

TEST_CASE("vector dimension limits") {
  CHECK_THROWS_AS(Vec(0), DomainError);
  CHECK_THROWS_AS(Vec(7), DomainError);
  CHECK_THROWS_AS(Vec(3) + Vec(4), DomainError);
  CHECK_THROWS_AS(det(Vec{1, 2}, Vec{1, 2, 3}), DomainError);
}

TEST_CASE("span fit and dense solve") {
  oracle::Rng rng(9);
  const std::vector<Vec> basis{rng.vec(4), rng.vec(4), rng.vec(4)};
  const Vec target = 0.5 * basis[0] - 2.0 * basis[1] + 1.25 * basis[2];
  const SpanFit fit = span_fit(basis, target);
  REQUIRE(fit.coeffs.size() == 3);
  CHECK(fit.coeffs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.coeffs[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.coeffs[2] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(fit.residual <= 1e-13);
  CHECK_FALSE(fit.rank_deficient);

  const SpanFit off = span_fit(basis, target + cross(basis[0], basis[1], basis[2]));
  CHECK(off.residual > 1e-3);
  CHECK(span_fit(std::vector<Vec>{basis[0], 2.0 * basis[0]}, target).rank_deficient);

  const auto x = solve_dense({2, 1, 1, 3}, {3, 5}, 2);
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(1.4));
  CHECK_THROWS_AS(solve_dense({1, 2, 2, 4}, {1, 1}, 2), DegenerateError);
}

TEST_CASE("projective distance ignores scale and sign") {
  const Vec a{0.3, 0.7, 0.21, -1};
  CHECK(projective_distance(a, -3.5 * a) <= 1e-15);
  CHECK(projective_distance(a, Vec{0.3, 0.7, 0.22, -1}) == doctest::Approx(0.01));
  const Vec inf{1, 2, 0, 0};
  CHECK(projective_distance(inf, -2.0 * inf) <= 1e-15);
}

}  // TEST_SUITE

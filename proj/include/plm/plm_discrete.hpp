#pragma once

#include <optional>
#include <vector>

#include "plm/fields.hpp"
#include "plm/multilinear.hpp"
#include "plm/report.hpp"

namespace plm {

// H on plaquettes: nu(n+e1+e2) + nu(n) = H(n) (nu(n+e1) + nu(n+e2)).
struct MoutardCoeff {
  int m1 = 0, m2 = 0;
  std::vector<double> h;

  MoutardCoeff() = default;
  MoutardCoeff(int m1_, int m2_, double fill = 1.0)
      : m1(m1_), m2(m2_), h(static_cast<std::size_t>(m1_) * m2_, fill) {}
  double& at(int n1, int n2) { return h[static_cast<std::size_t>(n1) + static_cast<std::size_t>(m1) * n2]; }
  double at(int n1, int n2) const { return h[static_cast<std::size_t>(n1) + static_cast<std::size_t>(m1) * n2]; }
};

enum class DiscreteGauge { Affine, Projective };

// Affine: 3-vectors (f, nu) with f4 = -1 implied. Projective: 4-vectors.
struct DiscreteSurfacePair {
  LatticeField nu;
  LatticeField f;
  DiscreteGauge gauge = DiscreteGauge::Affine;
};

// Fills the rectangle spanned by the strip n2 = 0 (row) and n1 = 0 (col).
// Both strips start at the shared corner value.
LatticeField moutard_evolve(const std::vector<Vec>& row, const std::vector<Vec>& col, const MoutardCoeff& H);

// Largest |(nu + nu12) x (nu1 + nu2)| / (|nu + nu12| |nu1 + nu2|) over plaquettes.
InvariantReport moutard_report(const LatticeField& nu, double tol = 1e-10);

// f1 - f = nu x nu1, f2 - f = -nu x nu2, integrated row n2 = lo2 first, then
// up every column. Throws ClosureError when nu is not a Moutard net.
LatticeField discrete_affine_integrate(const LatticeField& nu, const Vec& f0, double tol = 1e-10);

// Both paths around every plaquette: the stored f against the two increment
// sums, and the increments against each other. Absolute residuals.
InvariantReport plaquette_closure(const LatticeField& nu, const LatticeField& f, double tol = 1e-12);

// f = (f, -1), nu = (nu, <f, nu>).
DiscreteSurfacePair lift_to_projective(const DiscreteSurfacePair& affine);

// [nu, nu1, nu2] at a site with both forward neighbours.
Vec discrete_direction(const LatticeField& nu, int n1, int n2);

// f = [nu, nu1, nu2] / s with s(n) s(n+e1) = det|nu2, nu1, nu11, nu12| along the
// first row and s(n) s(n+e2) = det|nu1, nu2, nu12, nu22| up the columns. The
// default s0 makes the corner f4 = -1. The row relation is rechecked on every
// row (GaugeObstructionError); the span test runs first (NotCompatibleError).
LatticeField discrete_scale_propagate(const LatticeField& nu, std::optional<double> s0 = std::nullopt,
                                      double span_tol = 1e-9, double consistency_tol = 1e-8);

InvariantReport discrete_residual(const DiscreteSurfacePair& pair, double tol = 1e-10);

// Projective 4x4 determinants (relative) and, in the affine gauge, the
// simplex-volume factorization (relative).
InvariantReport discrete_det_invariance(const DiscreteSurfacePair& pair, double tol = 1e-10);

struct DiscreteFormPoint {
  int n1 = 0, n2 = 0;
  std::optional<double> Omega2, Omega2_det;
  std::optional<double> Omega3, Omega3_det;
  std::optional<double> Omega3t, Omega3t_det;
  std::optional<double> F2d, F3d, F3dt;
  int F2d_sign = 0, F3d_sign = 0, F3dt_sign = 0;
};

struct DiscreteForms {
  std::vector<DiscreteFormPoint> points;
  InvariantReport checks;
};

// Omega forms need the affine gauge; F forms use the lift when given affine data.
DiscreteForms discrete_forms(const DiscreteSurfacePair& pair, double tol = 1e-12);

struct DiscreteCompatPoint {
  int n1 = 0, n2 = 0;
  double A1 = 0, B1 = 0, C1 = 0, A2 = 0, B2 = 0, C2 = 0;
  double span_residual = 0.0;
};

struct DiscreteCompat {
  std::vector<DiscreteCompatPoint> points;
  InvariantReport checks;
};

// nu11 = A1 nu12 + B1 nu1 + C1 nu, nu22 = A2 nu12 + B2 nu2 + C2 nu per site.
// With f given, the coefficients are cross-checked against pairings of f.
DiscreteCompat discrete_compat_coeffs(const LatticeField& nu, const LatticeField* f = nullptr,
                                      double span_tol = 1e-10, double tol = 1e-10);

InvariantReport affine_sphere_check(const DiscreteSurfacePair& pair, double tol = 1e-10);

}  // namespace plm

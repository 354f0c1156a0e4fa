#pragma once

#include <utility>
#include <vector>

#include "plm/fields.hpp"
#include "plm/multilinear.hpp"
#include "plm/plm_smooth.hpp"
#include "plm/report.hpp"

namespace plm {

// Position f and affine conormal nu in affine 3-space (gauge f4 = -1).
struct AffineSurfacePair {
  FieldGrid f;
  FieldGrid nu;
};

enum class PathOrder { RowFirst, ColumnFirst };

struct LelieuvreIntegration {
  FieldGrid f;
  InvariantReport closure;
};

// f_x = nu x nu_x, f_y = -nu x nu_y integrated from f0 at the grid origin with
// edge increments nu_i x nu_{i+1} (second order). Each cell is audited with
// |(nu + nu12) x (nu1 + nu2)| / (2 hx hy |nu_c|^2), which tends to
// |nu x nu_xy| / |nu|^2; a cell above closure_tol raises ClosureError.
LelieuvreIntegration classical_lelieuvre_integrate(const FieldGrid& nu, const Vec& f0,
                                                   PathOrder order = PathOrder::RowFirst,
                                                   double closure_tol = 1e-2);

// f = (f, -1), nu = (nu, <f, nu>) on every grid point.
std::pair<FieldGrid, FieldGrid> lift_affine(const AffineSurfacePair& pair);

// Jets of the lift; the fourth conormal component follows the product rule.
std::pair<JetRecord, JetRecord> lift_jets(const JetRecord& f, const JetRecord& nu);

struct AffineSample {
  std::vector<long> site;
  double x = 0.0, y = 0.0;
  JetRecord f;
  JetRecord nu;
};

std::vector<AffineSample> affine_fd_samples(const AffineSurfacePair& pair, int order, int stencil);

struct AffineFormPoint {
  std::vector<long> site;
  double x = 0.0, y = 0.0;
  double F = 0.0;
  double A_cubic = 0.0, B_cubic = 0.0;
  bool has_cubic = false;
};

struct AffineForms {
  std::vector<AffineFormPoint> points;
  InvariantReport checks;
};

// F = det|nu,nu_x,nu_y|, A = det|nu,nu_x,nu_xx|, B = det|nu,nu_y,nu_yy| with the
// cross-checks <f_x,nu_y> = F, lifted det = F^2, det|f_x,f_y,f_xy| = F^2,
// <f_xx,nu_x> = -A, <f_yy,nu_y> = B, A^2 = det|f_x,f_xx,f_xxx|,
// -B^2 = det|f_y,f_yy,f_yyy|. A wrong-sign third-order determinant of f is a
// chart mismatch.
AffineForms affine_forms(const std::vector<AffineSample>& s, double tol = 1e-10);
AffineForms affine_forms(const AffineSurfacePair& pair, int stencil, double tol);

}  // namespace plm

#pragma once

#include <string>
#include <vector>

#include "plm/fields.hpp"
#include "plm/multilinear.hpp"
#include "plm/report.hpp"

namespace plm {

// Asymptotic: f^f_x = star(nu^nu_x), f^f_y = -star(nu^nu_y).
// Conjugate:  f^f_x = -star(nu^nu_y), f^f_y = star(nu^nu_x).
enum class Chart { Asymptotic, Conjugate };
enum class Axis { X, Y };

const char* to_string(Chart c);
Chart parse_chart(const std::string& s);

// One parameter point carrying the jets of both surfaces. `has_f` is false when
// only the conormal is known (reconstruction input).
struct JetSample {
  std::vector<long> site;
  double x = 0.0, y = 0.0;
  JetRecord f;
  JetRecord nu;
  bool has_f = true;
};

// [a,a_x,a_y] / sqrt(sign * det|a,a_x,a_y,a_2|). Radicand at or below
// 1e-10 |a||a_x||a_y||a_2| is degenerate; a clearly negative one, or a
// non-vanishing `other` determinant when the radicand vanishes, is a chart mismatch.
Vec lelieuvre_point(const Vec& a, const Vec& a_x, const Vec& a_y, const Vec& a_2, double radicand_sign,
                    const Vec* other = nullptr);

Vec reconstruct_point(const JetRecord& nu, Chart chart);
Vec inverse_reconstruct_point(const JetRecord& f, Chart chart);
// f = -[nu,nu_x,nu_xx]/sqrt(det|nu,nu_x,nu_xx,nu_xxx|) (x), and the y analogue
// with radicand -det|nu,nu_y,nu_yy,nu_yyy|
Vec reconstruct_point_alt(const JetRecord& nu, Axis axis);

// Finite-difference samples over the interior of matching grids. order 3 adds
// third pure derivatives and widens the margin by one.
std::vector<JetSample> fd_samples(const FieldGrid& f, const FieldGrid& nu, int order, int stencil);
std::vector<JetSample> fd_samples(const FieldGrid& nu, int order, int stencil);
// Largest jet order the grid interior supports for the stencil (3 if possible).
int fd_order_for(const FieldGrid& g, int stencil);

InvariantReport plm_residual(const std::vector<JetSample>& s, Chart chart, double tol = 1e-10);
InvariantReport plm_residual(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil, double tol);

InvariantReport orthogonality_report(const std::vector<JetSample>& s, Chart chart, double tol = 1e-10);
InvariantReport orthogonality_report(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil, double tol);

InvariantReport det_invariance_report(const std::vector<JetSample>& s, Chart chart, double tol = 1e-10);
InvariantReport det_invariance_report(const FieldGrid& f, const FieldGrid& nu, Chart chart, int stencil,
                                      double tol);

struct FubiniPoint {
  std::vector<long> site;
  double x = 0.0, y = 0.0;
  double F2 = 0.0;
  double F3 = 0.0, F3tilde = 0.0;
  bool has_cubic = false;
};

struct FubiniForms {
  std::vector<FubiniPoint> points;
  InvariantReport checks;
};

FubiniForms fubini_forms(const std::vector<JetSample>& s, double tol = 1e-10);
FubiniForms fubini_forms(const FieldGrid& f, const FieldGrid& nu, int stencil, double tol);

struct CompatPoint {
  std::vector<long> site;
  double x = 0.0, y = 0.0;
  // asymptotic chart
  double U1 = 0, V1 = 0, W1 = 0, U2 = 0, V2 = 0, W2 = 0, Wt1 = 0, Wt2 = 0;
  // conjugate chart
  double U = 0, V = 0, W = 0, C = 0, Ut = 0, Vt = 0, Wt = 0, Ct = 0;
  double span_residual = 0.0;
};

struct CompatCoeffs {
  Chart chart = Chart::Asymptotic;
  std::vector<CompatPoint> points;
  InvariantReport checks;
};

// Per-point fit of the second derivatives in span{nu_x, nu_y, nu}. Throws
// DegenerateError on rank loss and NotCompatibleError when the relative span
// residual exceeds span_tol. f-side coefficients are cross-checked when the
// samples carry f.
CompatCoeffs compat_coeffs(const std::vector<JetSample>& s, Chart chart, double span_tol = 1e-10,
                           double tol = 1e-8);
CompatCoeffs compat_coeffs(const FieldGrid& nu, Chart chart, int stencil, double span_tol, double tol);

// Largest norm among the vectors of a jet.
double jet_scale(const JetRecord& j);

}  // namespace plm

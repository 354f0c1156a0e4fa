#pragma once

#include <string>
#include <vector>

#include "plm/fields.hpp"
#include "plm/multilinear.hpp"
#include "plm/report.hpp"

namespace plm {

// Nonsingular n x n weight matrix of the hypersurface map, n in 2..4.
class AMatrix {
 public:
  AMatrix() = default;
  AMatrix(int n, std::vector<double> rowmajor);
  static AMatrix identity(int n, double s = 1.0);

  int n() const { return n_; }
  double operator()(int a, int b) const { return a_[static_cast<std::size_t>(a) * n_ + b]; }
  const std::vector<double>& values() const { return a_; }
  double determinant() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

// nu (or f) with first partials d[a] and second partials dd[a*n+b].
struct HyperJet {
  int n = 0;
  Vec value;
  std::vector<Vec> d;
  std::vector<Vec> dd;

  const Vec& second(int a, int b) const { return dd[static_cast<std::size_t>(a) * n + b]; }
  void validate() const;
};

// Central-difference jet at an interior index of an nD grid carrying (n+2)-vectors.
HyperJet hyper_jet(const FieldGrid& grid, std::span<const int> idx, int stencil);

// Grid indices at least `margin` points from every face, in flat order.
std::vector<std::vector<int>> interior_indices(const GridSpec& spec, int margin);

// f = -sqrt(A_ag / det|nu_ag, nu, nu_1..nu_n|) [nu, nu_1..nu_n] with 0-based pivot (a, g).
// Negative radicand is a pivot mismatch, vanishing A_ag or determinant is degenerate.
Vec hyper_reconstruct(const HyperJet& nu, const AMatrix& A, int a, int g);

// A_ag = -<f_a, nu_g> <f, c> / <c, c>, c = [nu, nu_1..nu_n]. Only value and
// first partials of the jets are used.
AMatrix recover_A(const HyperJet& f, const HyperJet& nu);

// A sampled on a grid (one matrix per point, same layout as the conormal grid).
struct AField {
  GridSpec spec;
  std::vector<AMatrix> values;

  static AField constant(const GridSpec& spec, const AMatrix& A);
  const AMatrix& at(std::size_t flat) const { return values.size() == 1 ? values[0] : values[flat]; }
};

// CSV with header x1..xn,a11..ann (or x,y,a11..a22).
AField read_a_field_csv(const std::string& path);

struct HyperSample {
  std::vector<long> site;
  HyperJet f;
  HyperJet nu;
  AMatrix A;
};

// f ^ f_a - sum_b A_ab star(nu_1 ^ .. nu (slot b) .. ^ nu_n) for each a, plus
// the pairings <f,nu>, <f_a,nu>, <f,nu_a>.
InvariantReport hyper_plm_residual(const std::vector<HyperSample>& s, double tol = 1e-10);
InvariantReport hyper_plm_residual(const FieldGrid& f, const FieldGrid& nu, const AField& A, int stencil,
                                   double tol);

// Distance of A_ag nu_bd - A_bd nu_ag from span{nu, nu_1..nu_n} over all index
// quadruples, relative to the size of the two terms.
InvariantReport hyper_compat_residual(const std::vector<HyperSample>& s, double tol = 1e-10);
InvariantReport hyper_compat_residual(const FieldGrid& nu, const AField& A, int stencil, double tol);

}  // namespace plm

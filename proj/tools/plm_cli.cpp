// plm: verification, reconstruction and form extraction for projective
// Lelieuvre pairs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plm/affine_gauge.hpp"
#include "plm/csv_io.hpp"
#include "plm/plm_discrete.hpp"
#include "plm/plm_hyper.hpp"
#include "plm/plm_smooth.hpp"
#include "plm/scenarios.hpp"

namespace {

using namespace plm;
using nlohmann::json;

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kIo = 3, kDegenerate = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario;
  std::uint64_t seed = 42;
  int size = 32;
  std::optional<double> h;
  std::string grid;
  int stencil = 4;
  std::string chart;
  std::string suite;
  std::string report;
  std::string out;
  std::string obj;
  bool strict = false;
  bool no_meta = false;
  std::string nu_path, f_path, lattice_path, a_path;
  std::string gauge = "f4";
  std::string f0 = "0,0,0";
  std::string which;
  std::string jets = "auto";
  std::string axis = "x";
  int n = 2;
  double gauge_a = 0.0, gauge_b = 0.0;
  double tol = -1.0;
};

std::vector<double> parse_list(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + tok + "' as a number");
    }
  }
  return out;
}

// x0:x1:h[,y0:y1:h[,...]]
GridSpec parse_grid(const std::string& s) {
  std::stringstream ss(s);
  std::string axis;
  GridSpec g;
  while (std::getline(ss, axis, ',')) {
    const auto v = parse_list(axis, ':');
    if (v.size() != 3) throw UsageError("--grid axis '" + axis + "' must be lo:hi:h");
    if (!(v[2] > 0.0) || !(v[1] > v[0])) throw UsageError("--grid axis '" + axis + "' needs lo < hi and h > 0");
    const GridSpec one = GridSpec::box(1, v[0], v[1], v[2]);
    g.origin.push_back(one.origin[0]);
    g.spacing.push_back(one.spacing[0]);
    g.dims.push_back(one.dims[0]);
  }
  if (g.dims.empty()) throw UsageError("--grid is empty");
  if (g.dims.size() == 1) {
    g.origin.push_back(g.origin[0]);
    g.spacing.push_back(g.spacing[0]);
    g.dims.push_back(g.dims[0]);
  }
  return g;
}

ScenarioParams scenario_params(const Options& o) {
  ScenarioParams p;
  p.seed = o.seed;
  p.size = o.size;
  p.h = o.h;
  if (!o.grid.empty()) p.grid = parse_grid(o.grid);
  p.n = o.n;
  p.gauge_a = o.gauge_a;
  p.gauge_b = o.gauge_b;
  if (o.axis == "y") p.axis = Axis::Y;
  else if (o.axis != "x") throw UsageError("--axis must be x or y");
  if (o.scenario == "hypar-lattice" && o.size != 32) p.lattice_extent = o.size;
  return p;
}

Chart chart_or(const Options& o, Chart fallback) {
  if (o.chart.empty()) return fallback;
  try {
    return parse_chart(o.chart);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

bool use_analytic(const Options& o, bool available) {
  if (o.jets == "analytic") {
    if (!available) throw UsageError("analytic jets are only available for scenarios");
    return true;
  }
  if (o.jets == "fd") return false;
  if (o.jets != "auto") throw UsageError("--jets must be auto, analytic or fd");
  return available;
}

// jets over the interior margin so analytic and finite-difference runs cover the same points
std::vector<JetSample> interior_jets(const ScenarioBundle& b, int order, int stencil) {
  const int m = jet_margin(order, stencil);
  std::vector<JetSample> out;
  const auto& s = b.f->spec();
  for (const auto& j : b.jets)
    if (j.site[0] >= m && j.site[1] >= m && j.site[0] < s.dims[0] - m && j.site[1] < s.dims[1] - m) out.push_back(j);
  return out;
}

std::vector<AffineSample> interior_affine(const ScenarioBundle& b, int order, int stencil) {
  const int m = jet_margin(order, stencil);
  std::vector<AffineSample> out;
  const auto& s = b.f_affine->spec();
  for (const auto& j : b.affine_jets)
    if (j.site[0] >= m && j.site[1] >= m && j.site[0] < s.dims[0] - m && j.site[1] < s.dims[1] - m)
      out.push_back(j);
  return out;
}

double tol_or(const Options& o, double analytic, double fd, bool is_analytic) {
  if (o.tol > 0.0) return o.tol;
  return is_analytic ? analytic : fd;
}

std::string default_suite(const ScenarioBundle& b) {
  if (b.kind == ScenarioKind::Hyper) return "hyper";
  if (b.kind == ScenarioKind::Discrete) return "discrete";
  return b.chart == Chart::Conjugate ? "smooth-conjugate" : "smooth-asymptotic";
}

InvariantReport smooth_suite(const std::vector<JetSample>& s, Chart chart, double tol) {
  InvariantReport r = plm_residual(s, chart, tol);
  r.merge(orthogonality_report(s, chart, tol));
  r.merge(det_invariance_report(s, chart, tol));
  if (chart == Chart::Asymptotic) r.merge(fubini_forms(s, tol).checks);
  r.merge(compat_coeffs(s, chart, tol, std::max(tol, 1e-8)).checks);
  return r;
}

InvariantReport run_verify(const Options& o, json& meta) {
  std::string suite = o.suite;
  if (!o.scenario.empty()) {
    const ScenarioBundle b = make_scenario(o.scenario, scenario_params(o));
    meta["scenario"] = b.name;
    meta["params"] = b.params;
    if (suite.empty()) suite = default_suite(b);
    meta["suite"] = suite;
    if (suite == "smooth-asymptotic" || suite == "smooth-conjugate") {
      if (b.kind != ScenarioKind::Smooth) throw UsageError("suite " + suite + " needs a smooth scenario");
      const Chart chart = suite == "smooth-asymptotic" ? Chart::Asymptotic : Chart::Conjugate;
      const bool analytic = use_analytic(o, true);
      meta["jets"] = analytic ? "analytic" : "fd";
      meta["stencil"] = o.stencil;
      const int order = fd_order_for(*b.nu, o.stencil);
      const auto s = analytic ? interior_jets(b, order, o.stencil) : fd_samples(*b.f, *b.nu, order, o.stencil);
      return smooth_suite(s, chart, tol_or(o, 1e-10, 1e-4, analytic));
    }
    if (suite == "affine") {
      if (!b.f_affine) throw UsageError("scenario " + b.name + " has no affine pair");
      const bool analytic = use_analytic(o, true);
      meta["jets"] = analytic ? "analytic" : "fd";
      const double tol = tol_or(o, 1e-10, 1e-4, analytic);
      const AffineSurfacePair pair{*b.f_affine, *b.nu_affine};
      InvariantReport r = analytic ? affine_forms(interior_affine(b, 3, o.stencil), tol).checks
                                   : affine_forms(pair, o.stencil, tol).checks;
      const auto& s = b.nu_affine->spec();
      const Vec f0 = b.f_affine->at(0, 0);
      auto integ = classical_lelieuvre_integrate(*b.nu_affine, f0);
      r.merge(integ.closure);
      ResidualAccumulator acc("affine.integration_error", 5.0 * s.spacing[0] * s.spacing[1], false);
      for (int j = 0; j < s.dims[1]; ++j)
        for (int i = 0; i < s.dims[0]; ++i)
          acc.add(norm(integ.f.at(i, j) - b.f_affine->at(i, j)), {i, j});
      r.add(acc.finish("max |f_integrated - f| against 5 hx hy"));
      return r;
    }
    if (suite == "hyper") {
      if (b.kind != ScenarioKind::Hyper) throw UsageError("suite hyper needs a hypersurface scenario");
      const bool analytic = use_analytic(o, true);
      meta["jets"] = analytic ? "analytic" : "fd";
      const double tol = tol_or(o, 1e-10, 1e-4, analytic);
      if (analytic) {
        InvariantReport r = hyper_plm_residual(b.hyper_jets, tol);
        r.merge(hyper_compat_residual(b.hyper_jets, tol));
        return r;
      }
      InvariantReport r = hyper_plm_residual(*b.f, *b.nu, *b.A, o.stencil, tol);
      r.merge(hyper_compat_residual(*b.nu, *b.A, o.stencil, tol));
      return r;
    }
    if (suite == "discrete") {
      if (b.kind != ScenarioKind::Discrete) throw UsageError("suite discrete needs a lattice scenario");
      const double tol = o.tol > 0.0 ? o.tol : 1e-10;
      const auto& pr = *b.lattice;
      InvariantReport r = moutard_report(pr.nu, tol);
      r.merge(plaquette_closure(pr.nu, pr.f, 1e-12));
      r.merge(discrete_residual(pr, tol));
      r.merge(discrete_det_invariance(pr, tol));
      r.merge(discrete_forms(pr, tol).checks);
      const auto lifted = lift_to_projective(pr);
      r.merge(discrete_compat_coeffs(lifted.nu, &lifted.f, tol, 1e-8).checks);
      return r;
    }
    throw UsageError("unknown suite '" + suite + "'");
  }

  // file inputs
  if (!o.lattice_path.empty()) {
    meta["lattice"] = o.lattice_path;
    const LatticeField nu = read_lattice_csv(o.lattice_path);
    if (o.f_path.empty()) throw UsageError("--lattice verification needs --f with the surface lattice");
    const LatticeField f = read_lattice_csv(o.f_path);
    if (f.vdim() != nu.vdim()) throw UsageError("lattice dimensions differ");
    const DiscreteSurfacePair pr{nu, f, nu.vdim() == 3 ? DiscreteGauge::Affine : DiscreteGauge::Projective};
    const double tol = o.tol > 0.0 ? o.tol : 1e-10;
    InvariantReport r = discrete_residual(pr, tol);
    r.merge(discrete_det_invariance(pr, tol));
    if (pr.gauge == DiscreteGauge::Affine) r.merge(plaquette_closure(nu, f, 1e-12));
    return r;
  }
  if (o.nu_path.empty() || o.f_path.empty()) throw UsageError("verify needs --scenario or --nu and --f");
  meta["nu"] = o.nu_path;
  meta["f"] = o.f_path;
  const FieldGrid nu = read_grid_csv(o.nu_path);
  const FieldGrid f = read_grid_csv(o.f_path);
  if (suite.empty()) suite = nu.spec().ndim() > 2 || !o.a_path.empty() ? "hyper" : "smooth-asymptotic";
  meta["suite"] = suite;
  meta["stencil"] = o.stencil;
  const double tol = tol_or(o, 1e-10, 1e-4, false);
  if (suite == "hyper") {
    if (o.a_path.empty()) throw UsageError("suite hyper with files needs --A");
    const AField A = read_a_field_csv(o.a_path);
    InvariantReport r = hyper_plm_residual(f, nu, A, o.stencil, tol);
    r.merge(hyper_compat_residual(nu, A, o.stencil, tol));
    return r;
  }
  if (suite == "affine") {
    return affine_forms(AffineSurfacePair{f, nu}, o.stencil, tol).checks;
  }
  if (suite != "smooth-asymptotic" && suite != "smooth-conjugate") throw UsageError("unknown suite '" + suite + "'");
  const Chart chart = suite == "smooth-asymptotic" ? Chart::Asymptotic : Chart::Conjugate;
  const auto s = fd_samples(f, nu, fd_order_for(nu, o.stencil), o.stencil);
  InvariantReport r = plm_residual(s, chart, tol);
  r.merge(orthogonality_report(s, chart, tol));
  r.merge(det_invariance_report(s, chart, tol));
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

int cmd_verify(const Options& o) {
  json meta;
  meta["stencil"] = o.stencil;
  if (!o.scenario.empty()) meta["seed"] = o.seed;
  InvariantReport r = run_verify(o, meta);
  for (auto it = meta.begin(); it != meta.end(); ++it) r.metadata[it.key()] = it.value();
  write_text(o.report, r.to_json(!o.no_meta).dump(2) + "\n");
  if (r.all_pass()) return kPass;
  for (const auto& n : r.failures()) {
    const auto& rec = r.at(n);
    std::cerr << "FAIL " << n << ": max residual " << rec.max_residual << " > " << rec.tolerance << '\n';
  }
  return kFail;
}

struct PointFailure {
  std::string kind;
  std::string what;
  double x, y;
};

void write_obj(const std::string& path, const FieldGrid& pos, const std::vector<char>& ok) {
  std::ostringstream out;
  out << "# affine-gauge surface, cells split along the (+x,+y) diagonal\n";
  const int nx = pos.nx(), ny = pos.ny();
  std::vector<long> index(pos.values().size(), 0);
  long next = 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      if (!ok[k]) continue;
      const Vec& v = pos.at(i, j);
      out << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
      index[k] = next++;
    }
  auto id = [&](int i, int j) { return index[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j]; };
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const long a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (a && b && c) out << "f " << a << ' ' << b << ' ' << c << '\n';
      if (a && c && d) out << "f " << a << ' ' << c << ' ' << d << '\n';
    }
  write_text(path, out.str());
}

// affine position of a projective point normalized by component k (to -1 for the last one)
Vec affine_position(const Vec& f, int k) {
  const double s = f[k];
  if (std::abs(s) <= 1e-14 * norm(f)) throw DegenerateError("point at infinity for the chosen gauge");
  Vec out(3);
  int m = 0;
  for (int i = 0; i < f.size(); ++i)
    if (i != k) out[m++] = (k == f.size() - 1 ? -f[i] / s : f[i] / s);
  return out;
}

int gauge_component(const std::string& g) {
  if (g == "f4" || g == "affine") return 3;
  if (g.size() == 2 && g[0] == 'f' && g[1] >= '1' && g[1] <= '4') return g[1] - '1';
  throw UsageError("--gauge must be f1..f4 or affine");
}

int reconstruct_lattice(const Options& o) {
  const LatticeField nu = read_lattice_csv(o.lattice_path);
  if (nu.vdim() != 3 && nu.vdim() != 4) throw UsageError("lattice must carry 3- or 4-vectors");
  LatticeField f = nu.vdim() == 3 ? [&] {
    const auto v = parse_list(o.f0, ',');
    if (v.size() != 3) throw UsageError("--f0 needs three components");
    return discrete_affine_integrate(nu, Vec{v[0], v[1], v[2]});
  }()
                                  : discrete_scale_propagate(nu);
  if (o.out.empty()) write_lattice_csv(f, std::cout, "reconstructed surface lattice");
  else write_lattice_csv(f, o.out, "reconstructed surface lattice");
  return kPass;
}

int cmd_reconstruct(const Options& o) {
  if (!o.lattice_path.empty()) return reconstruct_lattice(o);
  std::optional<FieldGrid> nu;
  Chart chart = Chart::Asymptotic;
  if (!o.scenario.empty()) {
    const ScenarioBundle b = make_scenario(o.scenario, scenario_params(o));
    if (b.kind == ScenarioKind::Discrete) {
      const auto v = parse_list(o.f0, ',');
      if (v.size() != 3) throw UsageError("--f0 needs three components");
      const LatticeField f = discrete_affine_integrate(b.lattice->nu, Vec{v[0], v[1], v[2]});
      if (o.out.empty()) write_lattice_csv(f, std::cout);
      else write_lattice_csv(f, o.out);
      return kPass;
    }
    if (b.kind != ScenarioKind::Smooth) throw UsageError("reconstruct supports smooth and lattice scenarios");
    nu = *b.nu;
    chart = b.chart;
  } else if (!o.nu_path.empty()) {
    nu = read_grid_csv(o.nu_path);
  } else {
    throw UsageError("reconstruct needs --scenario, --nu or --lattice");
  }
  chart = chart_or(o, chart);
  const int gk = gauge_component(o.gauge);
  const auto samples = fd_samples(*nu, 2, o.stencil);
  const int m = jet_margin(2, o.stencil);
  GridSpec spec = nu->spec();
  for (int a = 0; a < 2; ++a) {
    spec.origin[a] = spec.coord(a, m);
    spec.dims[a] -= 2 * m;
  }
  FieldGrid out(spec, 4), pos(spec, 3);
  std::vector<char> ok(spec.count(), 0);
  std::vector<PointFailure> fails;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    try {
      out.values()[k] = reconstruct_point(s.nu, chart);
      pos.values()[k] = affine_position(out.values()[k], gk);
      ok[k] = 1;
    } catch (const DegenerateError& e) {
      fails.push_back({e.kind(), e.what(), s.x, s.y});
    } catch (const ChartMismatchError& e) {
      fails.push_back({e.kind(), e.what(), s.x, s.y});
    }
    if (!ok[k]) out.values()[k] = Vec{NAN, NAN, NAN, NAN};
  }
  for (const auto& fl : fails)
    std::cerr << fl.kind << " at (" << format_double(fl.x) << "," << format_double(fl.y) << "): " << fl.what << '\n';
  if (!fails.empty() && o.strict) return kDegenerate;
  std::string comment = std::string("f reconstructed from nu, chart ") + to_string(chart) + ", stencil " +
                        std::to_string(o.stencil);
  if (!fails.empty()) comment += "\n" + std::to_string(fails.size()) + " non-generic points written as nan";
  if (!o.out.empty()) write_grid_csv(out, o.out, comment);
  else if (o.obj.empty()) write_grid_csv(out, std::cout, comment);
  if (!o.obj.empty()) write_obj(o.obj, pos, ok);
  return fails.size() == samples.size() ? kFail : kPass;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

int cmd_forms(const Options& o) {
  std::string which = o.which;
  std::ostringstream out;
  std::optional<ScenarioBundle> b;
  if (!o.scenario.empty()) b = make_scenario(o.scenario, scenario_params(o));
  if (which.empty()) {
    if (b && b->kind == ScenarioKind::Discrete) which = "discrete";
    else which = "projective";
  }
  bool pass = true;
  if (which == "projective") {
    std::vector<JetSample> s;
    if (b) {
      if (b->kind != ScenarioKind::Smooth) throw UsageError("projective forms need a smooth scenario");
      const int order = fd_order_for(*b->nu, o.stencil);
      s = use_analytic(o, true) ? interior_jets(*b, order, o.stencil) : fd_samples(*b->f, *b->nu, order, o.stencil);
    } else {
      if (o.nu_path.empty() || o.f_path.empty()) throw UsageError("forms needs --scenario or --nu and --f");
      const FieldGrid nu = read_grid_csv(o.nu_path), f = read_grid_csv(o.f_path);
      s = fd_samples(f, nu, fd_order_for(nu, o.stencil), o.stencil);
    }
    const auto forms = fubini_forms(s, o.tol > 0 ? o.tol : 1e-8);
    pass = forms.checks.all_pass();
    out << "# F2 = 2<f_x,nu_y>; F3 = sign(<f_x,nu_xx>) sqrt(det|nu,nu_x,nu_xx,nu_xxx|);\n"
        << "# F3tilde = sign(<f_y,nu_yy>) sqrt(-det|nu,nu_y,nu_yy,nu_yyy|)\n"
        << "x,y,F2,F3,F3tilde\n";
    for (const auto& p : forms.points)
      out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.F2) << ','
          << (p.has_cubic ? format_double(p.F3) : "nan") << ',' << (p.has_cubic ? format_double(p.F3tilde) : "nan")
          << '\n';
  } else if (which == "affine") {
    AffineForms forms;
    const double tol = o.tol > 0 ? o.tol : 1e-8;
    if (b) {
      if (!b->f_affine) throw UsageError("scenario has no affine pair");
      forms = use_analytic(o, true) ? affine_forms(interior_affine(*b, 3, o.stencil), tol)
                                    : affine_forms(AffineSurfacePair{*b->f_affine, *b->nu_affine}, o.stencil, tol);
    } else {
      if (o.nu_path.empty() || o.f_path.empty()) throw UsageError("forms needs --scenario or --nu and --f");
      forms = affine_forms(AffineSurfacePair{read_grid_csv(o.f_path), read_grid_csv(o.nu_path)}, o.stencil, tol);
    }
    pass = forms.checks.all_pass();
    out << "# F = det|nu,nu_x,nu_y|; A = det|nu,nu_x,nu_xx|; B = det|nu,nu_y,nu_yy|; gauge f4 = -1\n"
        << "x,y,F,A,B\n";
    for (const auto& p : forms.points)
      out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.F) << ','
          << format_double(p.A_cubic) << ',' << format_double(p.B_cubic) << '\n';
  } else if (which == "discrete") {
    auto load = [&]() -> DiscreteSurfacePair {
      if (b) {
        if (b->kind != ScenarioKind::Discrete) throw UsageError("discrete forms need a lattice scenario");
        return *b->lattice;
      }
      if (o.lattice_path.empty() || o.f_path.empty()) throw UsageError("discrete forms need --lattice and --f");
      LatticeField nu = read_lattice_csv(o.lattice_path);
      const auto g = nu.vdim() == 3 ? DiscreteGauge::Affine : DiscreteGauge::Projective;
      return {std::move(nu), read_lattice_csv(o.f_path), g};
    };
    const DiscreteSurfacePair pr = load();
    const auto forms = discrete_forms(pr, o.tol > 0 ? o.tol : 1e-12);
    pass = forms.checks.all_pass();
    out << "# Omega2 = <f2-f,nu1-nu>; Omega3 = <f1-f_-1,nu-nu_-1>; Omega3tilde = <f2-f_-2,nu-nu_-2>\n"
        << "# F2d = sqrt|det|f,f1,f2,f12||, F3d = sqrt|det|f,f1,f11,f111||, F3dtilde = sqrt|det|f,f2,f22,f222||;"
           " signs of the determinants in the *_sign columns\n"
        << "n1,n2,Omega2,Omega3,Omega3tilde,F2d,F2d_sign,F3d,F3d_sign,F3dtilde,F3dtilde_sign\n";
    for (const auto& p : forms.points)
      out << p.n1 << ',' << p.n2 << ',' << opt_str(p.Omega2) << ',' << opt_str(p.Omega3) << ','
          << opt_str(p.Omega3t) << ',' << opt_str(p.F2d) << ',' << p.F2d_sign << ',' << opt_str(p.F3d) << ','
          << p.F3d_sign << ',' << opt_str(p.F3dt) << ',' << p.F3dt_sign << '\n';
  } else {
    throw UsageError("--which must be projective, affine or discrete");
  }
  write_text(o.out, out.str());
  return pass ? kPass : kFail;
}

int cmd_dump(const Options& o) {
  if (o.scenario.empty()) throw UsageError("scenario-dump needs --scenario");
  if (o.out.empty()) throw UsageError("scenario-dump needs --out DIR");
  const ScenarioBundle b = make_scenario(o.scenario, scenario_params(o));
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create directory '" + o.out + "'");
  const std::filesystem::path dir(o.out);
  const std::string tag = "scenario " + b.name + " " + b.params.dump();
  if (b.kind == ScenarioKind::Discrete) {
    write_lattice_csv(b.lattice->nu, (dir / "nu_lattice.csv").string(), tag);
    write_lattice_csv(b.lattice->f, (dir / "f_lattice.csv").string(), tag);
  } else {
    write_grid_csv(*b.nu, (dir / "nu.csv").string(), tag);
    write_grid_csv(*b.f, (dir / "f.csv").string(), tag);
    if (b.f_affine) {
      write_grid_csv(*b.nu_affine, (dir / "nu_affine.csv").string(), tag);
      write_grid_csv(*b.f_affine, (dir / "f_affine.csv").string(), tag);
    }
  }
  json gt = {{"scenario", b.name}, {"params", b.params}, {"ground_truth", b.ground_truth}};
  write_text((dir / "scenario.json").string(), gt.dump(2) + "\n");
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projective Lelieuvre map toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  Options o;
  auto common = [&](CLI::App* c) {
    c->set_help_flag("--help", "print help");
    c->add_option("--scenario", o.scenario, "built-in scenario");
    c->add_option("--seed", o.seed, "RNG seed (moutard-random)");
    c->add_option("--size", o.size, "lattice extent");
    c->add_option("--h", o.h, "grid or lattice spacing");
    c->add_option("--grid", o.grid, "x0:x1:h[,y0:y1:h]");
    c->add_option("--stencil", o.stencil, "finite-difference stencil")->check(CLI::IsMember({2, 4}));
    c->add_option("--chart", o.chart, "asymptotic | conjugate");
    c->add_option("--nu", o.nu_path, "conormal grid CSV");
    c->add_option("--f", o.f_path, "surface grid or lattice CSV");
    c->add_option("--lattice", o.lattice_path, "conormal lattice CSV");
    c->add_option("--jets", o.jets, "auto | analytic | fd");
    c->add_option("--axis", o.axis, "cubic-graph orientation x | y");
    c->add_option("--n", o.n, "hypersurface dimension (ell-paraboloid)");
    c->add_option("--gauge-a", o.gauge_a, "x coefficient of the extra gauge exp(a x + b y) on hypar");
    c->add_option("--gauge-b", o.gauge_b, "y coefficient of the extra gauge");
    c->add_option("--tol", o.tol, "override the identity tolerance");
    c->add_option("--out", o.out, "output path");
    c->add_flag("--strict", o.strict, "degenerate points are fatal (exit 4)");
    c->add_flag("--no-meta", o.no_meta, "omit metadata from the JSON report");
  };
  auto* verify = app.add_subcommand("verify", "run identity checks and write a JSON report");
  common(verify);
  verify->add_option("--suite", o.suite, "smooth-asymptotic | smooth-conjugate | affine | hyper | discrete");
  verify->add_option("--report", o.report, "JSON report path (default stdout)");
  verify->add_option("--A", o.a_path, "A-matrix field CSV for the hyper suite");
  auto* recon = app.add_subcommand("reconstruct", "reconstruct f from conormal data");
  common(recon);
  recon->add_option("--obj", o.obj, "triangulated OBJ of the affine-gauge surface");
  recon->add_option("--gauge", o.gauge, "normalizing component f1..f4 (affine = f4)");
  recon->add_option("--f0", o.f0, "initial point for lattice integration");
  auto* forms = app.add_subcommand("forms", "write form coefficients as CSV");
  common(forms);
  forms->add_option("--which", o.which, "projective | affine | discrete");
  auto* dump = app.add_subcommand("scenario-dump", "write scenario fields as CSV");
  common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(o);
    if (recon->parsed()) return cmd_reconstruct(o);
    if (forms->parsed()) return cmd_forms(o);
    return cmd_dump(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return o.strict ? kDegenerate : kFail;
  } catch (const ChartMismatchError& e) {
    std::cerr << "chart mismatch: " << e.what() << '\n';
    return o.strict ? kDegenerate : kFail;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PlmError& e) {
    std::cerr << e.kind() << " error: " << e.what() << '\n';
    return kFail;
  }
}

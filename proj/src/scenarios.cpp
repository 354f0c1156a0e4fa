#include "plm/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace plm {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  for (std::uint64_t key : {a, b, c}) {
    s = k ^ key;
    k = splitmix64(s);
  }
  return static_cast<double>(k >> 11) * 0x1.0p-53;
}

JetRecord exp_gauge(const JetRecord& v, double a, double b, double x, double y) {
  const double l = std::exp(a * x + b * y);
  JetRecord r;
  r.value = l * v.value;
  r.d_x = l * (a * v.value + v.d_x);
  r.d_y = l * (b * v.value + v.d_y);
  r.d_xx = l * (a * a * v.value + 2.0 * a * v.d_x + v.d_xx);
  r.d_xy = l * (a * b * v.value + a * v.d_y + b * v.d_x + v.d_xy);
  r.d_yy = l * (b * b * v.value + 2.0 * b * v.d_y + v.d_yy);
  if (v.d_xxx) r.d_xxx = l * (a * a * a * v.value + 3.0 * a * a * v.d_x + 3.0 * a * v.d_xx + *v.d_xxx);
  if (v.d_yyy) r.d_yyy = l * (b * b * b * v.value + 3.0 * b * b * v.d_y + 3.0 * b * v.d_yy + *v.d_yyy);
  return r;
}

JetRecord apply_linear(const std::vector<double>& m, const JetRecord& v) {
  const int d = v.value.size();
  if (m.size() != static_cast<std::size_t>(d) * d) throw DomainError("linear map size does not match the jet");
  auto map = [&](const Vec& a) {
    Vec out(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[i] += m[static_cast<std::size_t>(i) * d + j] * a[j];
    return out;
  };
  JetRecord r{map(v.value), map(v.d_x), map(v.d_y), map(v.d_xx), map(v.d_xy), map(v.d_yy), {}, {}};
  if (v.d_xxx) r.d_xxx = map(*v.d_xxx);
  if (v.d_yyy) r.d_yyy = map(*v.d_yyy);
  return r;
}

namespace {

JetRecord jet(Vec v, Vec x, Vec y, Vec xx, Vec xy, Vec yy, Vec xxx, Vec yyy) {
  return JetRecord{v, x, y, xx, xy, yy, xxx, yyy};
}

Vec drop_last(const Vec& v) { return Vec{v[0], v[1], v[2]}; }

JetRecord drop_last(const JetRecord& j) {
  JetRecord r{drop_last(j.value), drop_last(j.d_x), drop_last(j.d_y), drop_last(j.d_xx),
              drop_last(j.d_xy),  drop_last(j.d_yy), {},               {}};
  if (j.d_xxx) r.d_xxx = drop_last(*j.d_xxx);
  if (j.d_yyy) r.d_yyy = drop_last(*j.d_yyy);
  return r;
}

// swaps the parameters x <-> y of a jet
JetRecord swap_params(const JetRecord& j) {
  JetRecord r{j.value, j.d_y, j.d_x, j.d_yy, j.d_xy, j.d_xx, j.d_yyy, j.d_xxx};
  return r;
}

void fill_grids(ScenarioBundle& b, const GridSpec& spec, bool affine) {
  b.f.emplace(spec, 4);
  b.nu.emplace(spec, 4);
  b.jets.resize(spec.count());
  if (affine) {
    b.f_affine.emplace(spec, 3);
    b.nu_affine.emplace(spec, 3);
    b.affine_jets.resize(spec.count());
  }
  for (int j = 0; j < spec.dims[1]; ++j)
    for (int i = 0; i < spec.dims[0]; ++i) {
      const double x = spec.coord(0, i), y = spec.coord(1, j);
      const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(spec.dims[0]) * j;
      JetSample s = b.jet(x, y);
      s.site = {i, j};
      b.f->at(i, j) = s.f.value;
      b.nu->at(i, j) = s.nu.value;
      b.jets[k] = std::move(s);
      if (affine) {
        AffineSample a = b.affine_jet(x, y);
        a.site = {i, j};
        b.f_affine->at(i, j) = a.f.value;
        b.nu_affine->at(i, j) = a.nu.value;
        b.affine_jets[k] = std::move(a);
      }
    }
}

GridSpec grid_for(const ScenarioParams& p, double lo, double hi, double h_default) {
  if (p.grid) {
    if (p.grid->ndim() != 2) throw DomainError("this scenario needs a 2D grid");
    p.grid->validate();
    return *p.grid;
  }
  return GridSpec::box(2, lo, hi, p.h.value_or(h_default));
}

nlohmann::json grid_json(const GridSpec& g) {
  return {{"origin", g.origin}, {"spacing", g.spacing}, {"dims", g.dims}};
}

// hyperbolic paraboloid: f = (x, y, xy, -1), nu = (-y, -x, 1, -xy)
JetRecord hypar_f(double x, double y) {
  const Vec z{0, 0, 0, 0};
  return jet({x, y, x * y, -1}, {1, 0, y, 0}, {0, 1, x, 0}, z, {0, 0, 1, 0}, z, z, z);
}
JetRecord hypar_nu(double x, double y) {
  const Vec z{0, 0, 0, 0};
  return jet({-y, -x, 1, -x * y}, {0, -1, 0, -y}, {-1, 0, 0, -x}, z, {0, 0, 0, -1}, z, z, z);
}

ScenarioBundle hypar(const ScenarioParams& p) {
  ScenarioBundle b;
  b.name = "hypar";
  const double ga = p.gauge_a, gb = p.gauge_b;
  b.jet = [ga, gb](double x, double y) {
    JetSample s;
    s.x = x;
    s.y = y;
    s.f = hypar_f(x, y);
    s.nu = hypar_nu(x, y);
    if (ga != 0.0 || gb != 0.0) {
      s.f = exp_gauge(s.f, ga, gb, x, y);
      s.nu = exp_gauge(s.nu, ga, gb, x, y);
    }
    return s;
  };
  b.affine_jet = [](double x, double y) {
    AffineSample a;
    a.x = x;
    a.y = y;
    a.f = drop_last(hypar_f(x, y));
    a.nu = drop_last(hypar_nu(x, y));
    return a;
  };
  const GridSpec g = grid_for(p, -1.0, 1.0, 0.05);
  const bool gauged = ga != 0.0 || gb != 0.0;
  fill_grids(b, g, !gauged);
  b.params = {{"grid", grid_json(g)}, {"gauge", {ga, gb}}};
  b.ground_truth = {{"det|nu,nu_x,nu_y,nu_xy|", gauged ? "exp(4(ax+by))" : "1"},
                    {"F", -1},
                    {"A_cubic", 0},
                    {"B_cubic", 0},
                    {"F2", 2}};
  return b;
}

// asymptotic coordinates (u, v) of z = xy + x^3/6
JetRecord cubic_f(double u, double v) {
  const Vec z{0, 0, 0, 0};
  return jet({u, v - u * u / 4, u * v - u * u * u / 12, -1}, {1, -u / 2, v - u * u / 4, 0}, {0, 1, u, 0},
             {0, -0.5, -u / 2, 0}, {0, 0, 1, 0}, z, {0, 0, -0.5, 0}, z);
}
JetRecord cubic_nu(double u, double v) {
  const Vec z{0, 0, 0, 0};
  return jet({u * u / 4 + v, u, -1, u * u * u / 12 + u * v}, {u / 2, 1, 0, u * u / 4 + v}, {1, 0, 0, u},
             {0.5, 0, 0, u / 2}, {0, 0, 0, 1}, z, {0, 0, 0, 0.5}, z);
}

JetRecord swap12(const JetRecord& j) {
  static const std::vector<double> P{0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  return apply_linear(P, j);
}

ScenarioBundle cubic_graph(const ScenarioParams& p) {
  ScenarioBundle b;
  b.name = "cubic-graph";
  const bool ax = p.axis == Axis::X;
  auto proj = [ax](double x, double y) {
    JetSample s;
    s.x = x;
    s.y = y;
    if (ax) {
      s.f = cubic_f(x, y);
      s.nu = cubic_nu(x, y);
    } else {
      s.f = swap12(swap_params(cubic_f(y, x)));
      s.nu = swap12(swap_params(cubic_nu(y, x)));
    }
    return s;
  };
  b.jet = proj;
  b.affine_jet = [proj](double x, double y) {
    const JetSample s = proj(x, y);
    AffineSample a;
    a.x = x;
    a.y = y;
    a.f = drop_last(s.f);
    a.nu = drop_last(s.nu);
    return a;
  };
  const GridSpec g = grid_for(p, -0.5, 0.5, 0.05);
  fill_grids(b, g, true);
  b.params = {{"grid", grid_json(g)}, {"axis", ax ? "x" : "y"}};
  b.ground_truth = {{"det|nu,nu_x,nu_y,nu_xy|", 1}, {"F", 1}, {"surface", "z = xy + x^3/6"}};
  return b;
}

// conjugate paraboloid pair carried to the unit sphere by a unimodular map, in gauge exp(0.3x - 0.2y)
ScenarioBundle sphere_conj(const ScenarioParams& p) {
  ScenarioBundle b;
  b.name = "sphere-conj";
  b.chart = Chart::Conjugate;
  static const std::vector<double> M{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, -0.5, 0, 0, 1, -0.5};
  static const std::vector<double> MinvT = [] {
    std::vector<double> out(16);
    for (int c = 0; c < 4; ++c) {
      std::vector<double> e(4, 0.0);
      e[c] = 1.0;
      const auto col = solve_dense(M, e, 4);  // column c of M^-1
      for (int r = 0; r < 4; ++r) out[static_cast<std::size_t>(c) * 4 + r] = col[r];
    }
    return out;
  }();
  b.jet = [](double x, double y) {
    const Vec z{0, 0, 0, 0};
    const double r2 = (x * x + y * y) / 2;
    const JetRecord fe = jet({y, x, r2, -1}, {0, 1, x, 0}, {1, 0, y, 0}, {0, 0, 1, 0}, z, {0, 0, 1, 0}, z, z);
    const JetRecord ne = jet({-y, -x, 1, -r2}, {0, -1, 0, -x}, {-1, 0, 0, -y}, {0, 0, 0, -1}, z, {0, 0, 0, -1}, z, z);
    JetSample s;
    s.x = x;
    s.y = y;
    s.f = exp_gauge(apply_linear(M, fe), 0.3, -0.2, x, y);
    s.nu = exp_gauge(apply_linear(MinvT, ne), 0.3, -0.2, x, y);
    return s;
  };
  const GridSpec g = grid_for(p, -0.5, 0.5, 0.05);
  fill_grids(b, g, false);
  b.params = {{"grid", grid_json(g)}, {"gauge", {0.3, -0.2}}};
  b.ground_truth = {{"det|nu,nu_x,nu_y,nu_xy|", 0}, {"surface", "X^2+Y^2+Z^2 = W^2"}};
  return b;
}

ScenarioBundle ell_paraboloid(const ScenarioParams& p) {
  const int n = p.n;
  if (n < 2 || n > 4) throw DomainError("ell-paraboloid dimension must be 2..4");
  ScenarioBundle b;
  b.name = "ell-paraboloid";
  b.kind = ScenarioKind::Hyper;
  GridSpec g;
  if (p.grid) {
    if (p.grid->ndim() != n) throw DomainError("grid dimension does not match n");
    p.grid->validate();
    g = *p.grid;
  } else {
    g = GridSpec::box(n, -0.5, 0.5, p.h.value_or(0.1));
  }
  const int d = n + 2;
  b.f.emplace(g, d);
  b.nu.emplace(g, d);
  const AMatrix A = AMatrix::identity(n, n % 2 ? -1.0 : 1.0);
  b.A = AField::constant(g, A);
  b.hyper_jets.resize(g.count());
  for (std::size_t k = 0; k < g.count(); ++k) {
    const auto idx = g.unflat(k);
    std::vector<double> x(n);
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      x[a] = g.coord(a, idx[a]);
      r2 += x[a] * x[a];
    }
    HyperSample s;
    s.site.assign(idx.begin(), idx.end());
    s.A = A;
    HyperJet& F = s.f;
    HyperJet& N = s.nu;
    F.n = N.n = n;
    F.value = Vec(d);
    N.value = Vec(d);
    for (int a = 0; a < n; ++a) {
      F.value[a] = x[a];
      N.value[a] = -x[a];
    }
    F.value[n] = r2 / 2;
    F.value[n + 1] = -1;
    N.value[n] = 1;
    N.value[n + 1] = -r2 / 2;
    for (int a = 0; a < n; ++a) {
      Vec fa(d), na(d);
      fa[a] = 1;
      fa[n] = x[a];
      na[a] = -1;
      na[n + 1] = -x[a];
      F.d.push_back(fa);
      N.d.push_back(na);
    }
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        Vec fac(d), nac(d);
        if (a == c) {
          fac[n] = 1;
          nac[n + 1] = -1;
        }
        F.dd.push_back(fac);
        N.dd.push_back(nac);
      }
    b.f->values()[k] = F.value;
    b.nu->values()[k] = N.value;
    b.hyper_jets[k] = std::move(s);
  }
  b.params = {{"n", n}, {"grid", grid_json(g)}};
  b.ground_truth = {{"A", n % 2 ? "-I" : "I"}};
  return b;
}

ScenarioBundle hypar_lattice(const ScenarioParams& p) {
  const double h = p.h.value_or(0.1);
  const int m = p.lattice_extent;
  if (!(h > 0.0) || m < 2) throw DomainError("hypar-lattice needs h > 0 and extent >= 2");
  ScenarioBundle b;
  b.name = "hypar-lattice";
  b.kind = ScenarioKind::Discrete;
  DiscreteSurfacePair pr{LatticeField(m, m, 3), LatticeField(m, m, 3), DiscreteGauge::Affine};
  for (int n2 = 0; n2 < m; ++n2)
    for (int n1 = 0; n1 < m; ++n1) {
      pr.nu.at(n1, n2) = Vec{-n2 * h, -n1 * h, 1.0};
      pr.f.at(n1, n2) = Vec{n1 * h, n2 * h, (n1 * h) * (n2 * h)};
    }
  b.lattice = std::move(pr);
  b.H = MoutardCoeff(m, m, 1.0);
  b.params = {{"h", h}, {"extent", m}};
  b.ground_truth = {{"Omega2", -h * h}, {"F2d", h * h}, {"volume", h * h * h * h}};
  return b;
}

ScenarioBundle moutard_random(const ScenarioParams& p) {
  const int m = p.size;
  if (m < 2) throw DomainError("moutard-random needs size >= 2");
  if (!(p.hmin <= p.hmax)) throw DomainError("moutard-random needs Hmin <= Hmax");
  ScenarioBundle b;
  b.name = "moutard-random";
  b.kind = ScenarioKind::Discrete;
  const double h = 1.0 / m, eps = 0.05;
  const std::uint64_t seed = p.seed;
  // amplitude of sin(2 pi k t) in component c of strip s
  auto pert = [&](int strip, double t) {
    Vec out(3);
    for (int c = 0; c < 3; ++c)
      for (int k = 1; k <= 3; ++k) {
        const double amp = 2.0 * hash_uniform(seed, 1, static_cast<std::uint64_t>(strip * 3 + c), k) - 1.0;
        out[c] += eps * amp * std::sin(2.0 * std::numbers::pi * k * t);
      }
    return out;
  };
  std::vector<Vec> row(m), col(m);
  for (int i = 0; i < m; ++i) row[i] = Vec{0.0, -i * h, 1.0} + pert(0, static_cast<double>(i) / m);
  for (int j = 0; j < m; ++j) col[j] = Vec{-j * h, 0.0, 1.0} + pert(1, static_cast<double>(j) / m);
  MoutardCoeff H(m, m);
  for (int n2 = 0; n2 < m; ++n2)
    for (int n1 = 0; n1 < m; ++n1)
      H.at(n1, n2) = p.hmin + (p.hmax - p.hmin) * hash_uniform(seed, 2, static_cast<std::uint64_t>(n1),
                                                                   static_cast<std::uint64_t>(n2));
  LatticeField nu = moutard_evolve(row, col, H);
  LatticeField f = discrete_affine_integrate(nu, Vec{0.0, 0.0, 0.0});
  b.lattice = DiscreteSurfacePair{std::move(nu), std::move(f), DiscreteGauge::Affine};
  b.H = std::move(H);
  b.params = {{"seed", seed}, {"size", m}, {"Hmin", p.hmin}, {"Hmax", p.hmax}};
  b.ground_truth = {{"closure", 0}, {"volume_invariance", "property"}};
  return b;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"cubic-graph", "ell-paraboloid", "hypar", "hypar-lattice", "moutard-random", "sphere-conj"};
}

ScenarioBundle make_scenario(const std::string& name, const ScenarioParams& p) {
  if (name == "hypar") return hypar(p);
  if (name == "cubic-graph") return cubic_graph(p);
  if (name == "sphere-conj") return sphere_conj(p);
  if (name == "ell-paraboloid") return ell_paraboloid(p);
  if (name == "hypar-lattice") return hypar_lattice(p);
  if (name == "moutard-random") return moutard_random(p);
  std::string list;
  for (const auto& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
  throw DomainError("unknown scenario '" + name + "'; available: " + list);
}

DiscreteSurfacePair sample_affine_lattice(const ScenarioBundle& b, double h, int m1, int m2, double x0, double y0) {
  if (!b.affine_jet) throw DomainError("scenario '" + b.name + "' has no affine surface");
  DiscreteSurfacePair out{LatticeField(m1, m2, 3), LatticeField(m1, m2, 3), DiscreteGauge::Affine};
  for (int n2 = 0; n2 < m2; ++n2)
    for (int n1 = 0; n1 < m1; ++n1) {
      const AffineSample a = b.affine_jet(x0 + n1 * h, y0 + n2 * h);
      out.f.at(n1, n2) = a.f.value;
      out.nu.at(n1, n2) = a.nu.value;
    }
  return out;
}

}  // namespace plm

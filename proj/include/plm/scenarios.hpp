#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plm/affine_gauge.hpp"
#include "plm/fields.hpp"
#include "plm/plm_discrete.hpp"
#include "plm/plm_hyper.hpp"
#include "plm/plm_smooth.hpp"

namespace plm {

std::uint64_t splitmix64(std::uint64_t& state);
// Uniform in [0,1) from a seed and up to three integer keys; independent of call order.
double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct ScenarioParams {
  std::optional<GridSpec> grid;  // parameter box override
  std::optional<double> h;       // spacing (grid or lattice)
  std::uint64_t seed = 42;
  int size = 32;                 // lattice extent for moutard-random
  int lattice_extent = 11;       // lattice extent for hypar-lattice
  double hmin = 0.9, hmax = 1.1;
  int n = 2;                     // ell-paraboloid dimension
  double gauge_a = 0.0, gauge_b = 0.0;  // extra factor exp(a x + b y) on hypar
  Axis axis = Axis::X;           // cubic-graph orientation
};

enum class ScenarioKind { Smooth, Hyper, Discrete };

struct ScenarioBundle {
  std::string name;
  ScenarioKind kind = ScenarioKind::Smooth;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json ground_truth = nlohmann::json::object();

  // smooth surfaces in P^3
  Chart chart = Chart::Asymptotic;
  std::optional<FieldGrid> f, nu;
  std::function<JetSample(double, double)> jet;  // analytic jets (order 3)
  std::vector<JetSample> jets;                   // jet at every grid point
  // affine part (gauge f4 = -1) when available
  std::optional<FieldGrid> f_affine, nu_affine;
  std::function<AffineSample(double, double)> affine_jet;
  std::vector<AffineSample> affine_jets;

  // hypersurfaces
  std::optional<AField> A;
  std::vector<HyperSample> hyper_jets;

  // lattices
  std::optional<DiscreteSurfacePair> lattice;
  std::optional<MoutardCoeff> H;
};

std::vector<std::string> scenario_names();
// Unknown names raise DomainError listing the available scenarios.
ScenarioBundle make_scenario(const std::string& name, const ScenarioParams& p = {});

// Leibniz rule for lambda v with lambda = exp(a x + b y) evaluated at (x, y).
JetRecord exp_gauge(const JetRecord& v, double a, double b, double x, double y);
// Component-wise linear map of a jet.
JetRecord apply_linear(const std::vector<double>& rowmajor, const JetRecord& v);

// Samples the affine jet function of a smooth bundle on the lattice
// (x0 + n1 h, y0 + n2 h), n in [0,m1) x [0,m2).
DiscreteSurfacePair sample_affine_lattice(const ScenarioBundle& b, double h, int m1, int m2, double x0, double y0);

}  // namespace plm

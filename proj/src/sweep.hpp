#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plm/parallel.hpp"
#include "plm/report.hpp"

namespace plm::detail {

// marks "identity not evaluated at this sample"
inline constexpr double kSkip = -std::numeric_limits<double>::max();

struct Check {
  std::string name;
  double tol;
  bool informational = false;
  std::string note = {};
};

// Evaluates fn(i, out) for every sample in parallel, then reduces in sample
// order so the statistics do not depend on the worker count.
inline InvariantReport sweep(const std::vector<Check>& checks, std::size_t n,
                             const std::function<std::vector<long>(std::size_t)>& site_of,
                             const std::function<void(std::size_t, double*)>& fn) {
  const std::size_t k = checks.size();
  std::vector<double> buf(n * k, kSkip);
  parallel_for(n, [&](std::size_t i) { fn(i, buf.data() + i * k); });
  InvariantReport rep;
  for (std::size_t c = 0; c < k; ++c) {
    ResidualAccumulator acc(checks[c].name, checks[c].tol, checks[c].informational);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = buf[i * k + c];
      if (v == kSkip) continue;
      any = true;
      acc.add(v, site_of(i));
    }
    if (any) rep.add(acc.finish(checks[c].note));
  }
  return rep;
}

inline double rel_diff(double a, double b, double floor = 1.0) {
  const double s = std::max({floor, std::abs(a), std::abs(b)});
  return std::abs(a - b) / s;
}

}  // namespace plm::detail

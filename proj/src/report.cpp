#include "plm/report.hpp"

#include <cmath>
#include <limits>

#include "plm/errors.hpp"

namespace plm {

ResidualAccumulator::ResidualAccumulator(std::string name, double tolerance, bool informational) {
  rec_.name = std::move(name);
  rec_.tolerance = tolerance;
  rec_.informational = informational;
}

void ResidualAccumulator::add(double residual, std::vector<long> site) {
  ++rec_.samples;
  if (!std::isfinite(residual)) {
    if (!nonfinite_) rec_.argmax_site = std::move(site);
    nonfinite_ = true;
    return;
  }
  sum_ += residual;
  if (rec_.samples == 1 || residual > rec_.max_residual) {
    if (!nonfinite_) rec_.argmax_site = std::move(site);
    rec_.max_residual = std::max(rec_.max_residual, residual);
  }
}

IdentityRecord ResidualAccumulator::finish(std::string note) const {
  IdentityRecord r = rec_;
  r.note = std::move(note);
  if (nonfinite_) {
    r.max_residual = std::numeric_limits<double>::infinity();
    r.mean_residual = std::numeric_limits<double>::infinity();
    r.pass = false;
    return r;
  }
  r.mean_residual = r.samples ? sum_ / static_cast<double>(r.samples) : 0.0;
  r.pass = r.max_residual <= r.tolerance;
  return r;
}

void InvariantReport::merge(const InvariantReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  for (auto it = other.metadata.begin(); it != other.metadata.end(); ++it)
    if (!metadata.contains(it.key())) metadata[it.key()] = it.value();
}

bool InvariantReport::all_pass() const {
  for (const auto& r : records)
    if (!r.informational && !r.pass) return false;
  return true;
}

std::vector<std::string> InvariantReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : records)
    if (!r.informational && !r.pass) out.push_back(r.name);
  return out;
}

const IdentityRecord* InvariantReport::find(const std::string& name) const {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

const IdentityRecord& InvariantReport::at(const std::string& name) const {
  if (const auto* r = find(name)) return *r;
  throw DomainError("no identity named '" + name + "' in report");
}

static nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json InvariantReport::to_json(bool include_meta) const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["conventions"] = convention_block();
  if (include_meta) {
    nlohmann::json meta = metadata;
    meta["tool_version"] = kToolVersion;
    j["metadata"] = meta;
  }
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json e;
    e["name"] = r.name;
    e["max_residual"] = number_or_null(r.max_residual);
    e["mean_residual"] = number_or_null(r.mean_residual);
    e["argmax_site"] = r.argmax_site;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["samples"] = r.samples;
    if (r.informational) e["informational"] = true;
    if (!r.note.empty()) e["note"] = r.note;
    ids.push_back(std::move(e));
  }
  j["identities"] = std::move(ids);
  j["all_pass"] = all_pass();
  return j;
}

nlohmann::json convention_block() {
  return {
      {"levi_civita", "eps_{12...d} = +1"},
      {"cross_anchor", "[e1,e2,e3] = -e4 in d = 4"},
      {"hodge_anchor", "star(e1^e2) = e3^e4"},
      {"sqrt_branch", "positive root; the global sign of f is projectively irrelevant"},
      {"asymptotic_chart", "f^f_x = star(nu^nu_x), f^f_y = -star(nu^nu_y)"},
      {"conjugate_chart", "f^f_x = -star(nu^nu_y), f^f_y = star(nu^nu_x)"},
      {"conjugate_inverse_radicand", "-det|f,f_x,f_y,f_xx|"},
      {"fubini_F3_sign", "sign(<f_x,nu_xx>) * sqrt(det|nu,nu_x,nu_xx,nu_xxx|)"},
      {"fubini_F3tilde_sign", "sign(<f_y,nu_yy>) * sqrt(-det|nu,nu_y,nu_yy,nu_yyy|)"},
      {"hyper_A", "A_ag = -<f_a,nu_g> <f,c> / <c,c>, c = [nu,nu_1,...,nu_n]"},
      {"discrete_forms", "sqrt(|det|) with the determinant sign reported separately"},
      {"affine_gauge", "f = (bf, -1), nu = (bnu, <bf,bnu>)"},
      {"obj_diagonal", "each grid cell split along its (+x,+y) diagonal"},
  };
}

}  // namespace plm

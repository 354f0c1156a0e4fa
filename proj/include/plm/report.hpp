#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace plm {

inline constexpr const char* kReportSchema = "plm-report/1";
inline constexpr const char* kToolVersion = "0.3.0";

struct IdentityRecord {
  std::string name;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<long> argmax_site;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t samples = 0;
  // informational records are reported but never decide pass/fail
  bool informational = false;
  std::string note;
};

// Sequential max/mean accumulation. Feed residuals in a fixed site order to
// get bitwise-reproducible statistics.
class ResidualAccumulator {
 public:
  ResidualAccumulator(std::string name, double tolerance, bool informational = false);

  void add(double residual, std::vector<long> site);
  IdentityRecord finish(std::string note = {}) const;

 private:
  IdentityRecord rec_;
  double sum_ = 0.0;
  bool nonfinite_ = false;
};

class InvariantReport {
 public:
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<IdentityRecord> records;

  void add(IdentityRecord rec) { records.push_back(std::move(rec)); }
  void merge(const InvariantReport& other);

  bool all_pass() const;
  std::vector<std::string> failures() const;
  const IdentityRecord* find(const std::string& name) const;
  const IdentityRecord& at(const std::string& name) const;

  nlohmann::json to_json(bool include_meta = true) const;
};

// Sign and normalization conventions, written verbatim into every JSON report.
nlohmann::json convention_block();

}  // namespace plm

#pragma once

#include <stdexcept>
#include <string>

namespace plm {

class PlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define PLM_DEFINE_ERROR(Name, tag)                              \
  class Name : public PlmError {                                 \
   public:                                                       \
    using PlmError::PlmError;                                    \
    const char* kind() const noexcept override { return tag; }   \
  };

PLM_DEFINE_ERROR(DomainError, "domain")
PLM_DEFINE_ERROR(BoundaryError, "boundary")
PLM_DEFINE_ERROR(DegenerateError, "degenerate")
PLM_DEFINE_ERROR(ChartMismatchError, "chart-mismatch")
PLM_DEFINE_ERROR(ClosureError, "closure")
PLM_DEFINE_ERROR(NotCompatibleError, "not-compatible")
PLM_DEFINE_ERROR(GaugeObstructionError, "gauge-obstruction")
PLM_DEFINE_ERROR(OverflowError, "overflow")
PLM_DEFINE_ERROR(IoError, "io")

#undef PLM_DEFINE_ERROR

class ParseError : public PlmError {
 public:
  ParseError(long line, const std::string& what)
      : PlmError("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  long line_;
};

}  // namespace plm

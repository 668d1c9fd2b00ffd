#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "flost/estimator.hpp"
#include "flost/metrics.hpp"
#include "flost/observation.hpp"
#include "flost/tensor.hpp"
#include "flost/tuning.hpp"

namespace flost {

/// File could not be opened, read or written.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File opened fine but its contents violate the format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadMagic : public FormatError {
 public:
  using FormatError::FormatError;
};
class BadVersion : public FormatError {
 public:
  using FormatError::FormatError;
};
class TruncatedFile : public FormatError {
 public:
  using FormatError::FormatError;
};
class DimOverflow : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Text parse failure; line() is the 1-based offending line.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& what, index_t line)
      : FormatError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  index_t line() const { return line_; }

 private:
  index_t line_;
};

/// Tensor container format: magic "FLT3", u32 version 1, u64 M, N, T, then
/// M*N*T IEEE-754 doubles with t fastest. All integers and doubles are
/// little-endian; read(write(x)) is the identity bit for bit.
void write_tensor(const std::string& path, const DenseTensor3& x);
DenseTensor3 read_tensor(const std::string& path);

/// Observation CSV: "# key=value" metadata lines (m, n, t, p, p_source),
/// a "i,j,t,value" header, then 0-based indices with values printed to 17
/// significant digits so they parse back to the same double.
void write_observations(const std::string& path, const ObservationSet& obs);
ObservationSet read_observations(const std::string& path);

/// Model as JSON, including the fitted lambdas and optional fit wall-clock
/// metadata (fit_seconds < 0 omits the field).
void write_model(const std::string& path, const FlostModel& model, double fit_seconds = -1.0);
FlostModel read_model(const std::string& path, double* fit_seconds = nullptr);

/// Tuning table CSV with header "scale1,scale2,validation_rmse".
void write_tuning_table(const std::string& path, const TuningResult& result);

/// {"label":..., "count":..., "value":...}; absent reports get null value.
std::string report_record_json(const RmseReport& report);

}  // namespace flost

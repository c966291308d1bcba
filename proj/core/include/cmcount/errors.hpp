#pragma once

#include <stdexcept>
#include <string>

namespace cmcount {

enum class errc {
  unknown_label,
  invalid_spec,
  not_prime,
  bad_reduction_prime,
  oracle_range_exceeded,
  non_residue,
  calibration_failed,
  not_calibrated,
  overflow,
  table_too_small,
  memory_budget_exceeded,
  y1_too_large,
  brute_force_range_exceeded,
  non_fundamental_discriminant,
  unsupported_prime,
  invalid_config,
  io_error,
};

inline const char* errc_name(errc kind) noexcept {
  switch (kind) {
    case errc::unknown_label: return "UnknownLabel";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::not_prime: return "NotPrime";
    case errc::bad_reduction_prime: return "BadReductionPrime";
    case errc::oracle_range_exceeded: return "OracleRangeExceeded";
    case errc::non_residue: return "NonResidue";
    case errc::calibration_failed: return "CalibrationFailed";
    case errc::not_calibrated: return "NotCalibrated";
    case errc::overflow: return "Overflow";
    case errc::table_too_small: return "TableTooSmall";
    case errc::memory_budget_exceeded: return "MemoryBudgetExceeded";
    case errc::y1_too_large: return "Y1TooLarge";
    case errc::brute_force_range_exceeded: return "BruteForceRangeExceeded";
    case errc::non_fundamental_discriminant: return "NonFundamentalDiscriminant";
    case errc::unsupported_prime: return "UnsupportedPrime";
    case errc::invalid_config: return "InvalidConfig";
    case errc::io_error: return "IoError";
  }
  return "Error";
}

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

}  // namespace cmcount

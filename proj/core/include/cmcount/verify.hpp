#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmcount/sieve_counts.hpp"

namespace cmcount {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::string suite = "fast";  // "fast" (<1 min) or "full" (<30 min)
  std::uint64_t seed = 20259013;
  int threads = 2;
  // test hook: overwrite a(p) for one table prime before the table checks run,
  // proving the invariant scans catch corruption
  std::optional<std::pair<std::int64_t, std::int32_t>> inject_table_fault;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string to_json() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace cmcount

#pragma once

#include <cstdint>
#include <vector>

#include "cmcount/coefficients.hpp"

namespace cmcount {

/// Dense a(q) for all primes q <= x_max. Read-only during sweeps.
struct CoefficientTable {
  std::int64_t x_max = 0;
  std::vector<std::uint32_t> primes;
  std::vector<std::int32_t> a_p;        // a(q) per prime index, 0 for inert/ramified/bad
  std::vector<std::uint8_t> split_flags;  // 1 iff q splits in K

  std::int64_t index_of(std::int64_t p) const;  // -1 if p not in table
  std::int64_t a_of_prime(std::int64_t p) const;
  std::size_t prime_count() const { return primes.size(); }
};

struct TableBudget {
  std::int64_t max_x = 100'000'000;  // default memory budget
};

/// Bulk ap_fast over a prime sieve; deterministic for any thread count.
CoefficientTable build_table(const CMFormSpec& form, std::int64_t x, int threads = 1,
                             const TableBudget& budget = {});

/// All counting statistics at a checkpoint x.
struct CountSnapshot {
  std::int64_t x = 0;
  std::int64_t m_f1 = 0;     // #{n <= x : a(n) != 0}
  std::int64_t coprime = 0;  // #{n <= x : gcd(n, a(n)) = 1}, gcd(n,0) = n
  std::int64_t n_y1 = 0;     // #{n <= x : q|n => q >= y1, a(n) != 0}
  std::vector<std::int64_t> primes_of_interest;
  std::vector<std::int64_t> pi_star;  // per prime of interest
  std::vector<std::int64_t> g_p;
  std::vector<std::int64_t> nu_sum;

  std::int64_t pi_star_at(std::int64_t p) const;
  std::int64_t g_p_at(std::int64_t p) const;
  std::int64_t nu_sum_at(std::int64_t p) const;
};

struct SweepConfig {
  std::int64_t y1 = 20;
  bool y1_strict = false;  // count q|n => q > y1 instead of q >= y1
  std::vector<std::int64_t> primes_of_interest = {5, 13};
  std::int64_t divisor = 1;  // restrict every count to multiples of d
  int threads = 1;
  std::int64_t segment_size = std::int64_t(1) << 20;
  // half-open spf ranges [lo, hi) for partition checks over G_p
  std::vector<std::pair<std::int64_t, std::int64_t>> spf_ranges;
};

struct SweepResult {
  std::vector<CountSnapshot> snapshots;
  // extras at the final checkpoint
  std::vector<std::int64_t> pi_star_sweep;    // pi* computed n-side, per prime of interest
  std::int64_t g_p_total = 0;                 // sum of G_p over all p (= coprime count minus n=1)
  std::vector<std::int64_t> spf_range_counts; // per spf_ranges entry
};

/// One pass over n <= max(checkpoints) emitting every snapshot.
/// Checkpoints must be sorted ascending and <= table.x_max.
SweepResult sweep_counts(const CMFormSpec& form, const CoefficientTable& table,
                         const std::vector<std::int64_t>& checkpoints, const SweepConfig& cfg);

// Single-statistic fronts over sweep_counts. All are exact counts.
std::int64_t count_nonvanishing(const CMFormSpec& form, const CoefficientTable& table,
                                std::int64_t x, std::int64_t d);
std::int64_t count_coprime(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x);
std::int64_t n_y1_count(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                        std::int64_t y1, bool strict = false);
std::int64_t nu_sum(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                    std::int64_t p);
std::int64_t g_p_count(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                       std::int64_t p);

/// #{q <= x prime : a(q) = 0 mod p, a(q) != 0}, direct scan of the table.
std::int64_t pi_star(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                     std::int64_t p);

/// Inclusion-exclusion route: sum over d | prod(primes < y1) of mu(d) M_{f,d}(x).
/// y1 <= 30 so the divisor enumeration stays at most 2^10.
std::int64_t n_y1_inclusion_exclusion(const CMFormSpec& form, const CoefficientTable& table,
                                      std::int64_t x, std::int64_t y1);

}  // namespace cmcount

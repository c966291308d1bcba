#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cmcount/form_catalog.hpp"

namespace cmcount {

/// Per-prime data consumed by the sieve.
struct PrimeRecord {
  std::int64_t p = 0;
  SplitType split = SplitType::Inert;
  std::int64_t a_p = 0;
  int vanishing_index = 0;  // least i >= 1 with a(p^i) = 0, or 0 if none
};

/// Exact a(p) by direct point enumeration over F_p, a(p) = p + 1 - #E(F_p).
/// O(p); the oracle anchoring every fast path. p must be a good prime <= 1e6.
std::int64_t ap_pointcount(const CMFormSpec& form, std::int64_t p);

/// All (u, v) with u^2 + |d_K| v^2 = 4p, u, v >= 0, one per unit orbit of the
/// ring of integers. Empty when p does not split.
std::vector<std::pair<std::int64_t, std::int64_t>> trace_candidates(std::int64_t disc_dK,
                                                                    std::int64_t p);

/// Learns the congruence sign rule that makes the Cornacchia path agree with
/// the point-count oracle on every good prime below bound (bound >= 1000).
/// Throws errc::calibration_failed when no rule in the candidate family fits,
/// which signals a wrong curve model or discriminant.
NormalizationRule calibrate_normalization(const CMFormSpec& form, std::int64_t bound);

CMFormSpec load_calibrated(const std::string& label, std::int64_t bound = 10000);

/// a(p) in O(log^2 p): Tonelli-Shanks + Cornacchia + calibrated sign rule.
/// Returns 0 for inert/ramified good primes; throws for bad primes.
std::int64_t ap_fast(const CMFormSpec& form, std::int64_t p);

/// a(p^m) via a(p^{m+1}) = a(p) a(p^m) - p a(p^{m-1}) for good p and
/// a(p^m) = a(p)^m for p | N. Exact 64-bit; throws errc::overflow.
std::int64_t apm(const CMFormSpec& form, std::int64_t p, int m);

/// Same recursion reduced mod modulus; never overflows.
std::uint64_t apm_mod(const CMFormSpec& form, std::int64_t p, int m, std::uint64_t modulus);

/// Fully multiplicative assembly of a(n) by trial-division factorization.
/// n <= 1e12 so that the 64-bit bound |a(n)| <= d(n) sqrt(n) holds.
std::int64_t a_n(const CMFormSpec& form, std::int64_t n);

/// Least i >= 1 with a(p^i) = 0, or 0 when no power vanishes.
/// For good p this is decided by a(p)^2 against {p, 2p, 3p}.
int vanishing_index(const CMFormSpec& form, std::int64_t p);
int vanishing_index_from_ap(const CMFormSpec& form, std::int64_t p, std::int64_t a_p);

PrimeRecord prime_record(const CMFormSpec& form, std::int64_t p);

/// a(p^m) given a(p), for good p. Shared by apm and the sieve hot path.
std::int64_t apm_from_ap(std::int64_t p, std::int64_t a_p, int m);

/// ap_fast without revalidation; p must be a split good prime of a calibrated
/// form. The bulk table builder calls this once per split prime.
std::int64_t ap_fast_unchecked(const CMFormSpec& form, std::int64_t p);

}  // namespace cmcount

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmcount {

enum class SplitType { Split, Inert, Ramified };

const char* split_name(SplitType t) noexcept;

/// Weierstrass coefficients of a representative CM elliptic curve over Q.
struct CurveModel {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
};

/// Congruence rule selecting the Hecke-normalized trace among the unit
/// multiples of a Cornacchia solution of u^2 + |d_K| v^2 = 4p.
/// sign[(u % modulus) * modulus + (v % modulus)] is +1/-1 when that residue
/// class carries the trace (with that sign), 0 when it must be rejected.
struct NormalizationRule {
  int modulus = 0;
  std::vector<std::int8_t> sign;
  std::int64_t calibrated_below = 0;

  bool empty() const { return modulus == 0; }
  int sign_of(std::int64_t u, std::int64_t v) const {
    return sign[static_cast<std::size_t>(u % modulus) * modulus + (v % modulus)];
  }
};

/// One catalogued weight-2 CM newform with rational integer coefficients.
/// Immutable after construction; safe to share across threads.
struct CMFormSpec {
  std::string label;
  std::int64_t level_N = 0;
  std::int64_t disc_dK = 0;  // fundamental discriminant of K, class number 1
  int class_number_h = 1;
  int unit_count_w = 2;
  std::vector<std::int64_t> bad_primes;  // primes dividing level_N, ascending
  CurveModel curve;
  NormalizationRule normalization;  // empty until calibrated

  bool is_bad_prime(std::int64_t p) const;
  bool calibrated() const { return !normalization.empty(); }
  CMFormSpec with_normalization(NormalizationRule rule) const;
};

/// The class-number-1 fundamental discriminants; exactly these admit weight-2
/// CM newforms with rational integer coefficients.
bool is_class_number_one_disc(std::int64_t d);

std::vector<std::string> catalog_labels();

/// Built-in label ("27a", "32a", "36a", "49a") or path to a spec file.
/// Throws errc::unknown_label / errc::invalid_spec.
CMFormSpec load_form(const std::string& label);

/// key=value spec file (grammar documented in the README).
CMFormSpec parse_spec_file(const std::string& path);
CMFormSpec parse_spec_text(const std::string& text, const std::string& origin = "<text>");

SplitType splitting_type(std::int64_t disc_dK, std::int64_t p);
SplitType splitting_type(const CMFormSpec& form, std::int64_t p);

}  // namespace cmcount

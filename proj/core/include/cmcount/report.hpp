#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmcount/constants.hpp"

namespace cmcount {

double L2_x(double x);  // log log x
double L3_x(double x);  // log log log x

/// x above which the L3 ratio columns are emitted (L3(x) > 1 there).
extern const double kL3ReportThreshold;

struct ExperimentConfig {
  std::string form_label = "32a";
  std::int64_t x_max = 1'000'000;
  std::vector<std::int64_t> checkpoints;  // default: powers of 10 up to x_max
  std::int64_t y1 = 20;
  std::vector<std::int64_t> primes_of_interest = {5, 13};
  int threads = 1;
  std::string output_dir = ".";
  std::uint64_t seed = 20259013;
  std::int64_t segment_size = std::int64_t(1) << 20;
  std::int64_t prime_bound = 0;  // constants truncation; 0 = derived from x_max
  std::int64_t calibration_bound = 10000;

  void validate() const;              // throws errc::invalid_config / y1_too_large
  std::vector<std::int64_t> effective_checkpoints() const;
  std::int64_t effective_prime_bound() const;
};

/// Raw counts plus the normalized ratios of one checkpoint row.
struct ReportRow {
  std::int64_t x = 0;
  CountSnapshot counts;
  double mertens = 0;
  double ratio_m_f1 = 0;       // m_f1 sqrt(pi log x) / (u_f x)
  double ratio_coprime = 0;    // coprime sqrt(pi L3 log x) / (U_f_alt x); 0 when suppressed
  double ratio_coprime_alt = 0;  // same against U_f (internal 1/sqrt(pi) kept)
  bool has_L3 = false;
  double ratio_mertens = 0;  // mertens sqrt(log x) / mu_f
  std::vector<double> ratio_pi_star;  // pi*/(delta Li x) per prime of interest
};

std::vector<ReportRow> make_report(const CMFormSpec& form, const CoefficientTable& table,
                                   const ConstantsBundle& bundle,
                                   const std::vector<CountSnapshot>& snapshots);

/// Number formatting used by every CSV: shortest round-trip decimal,
/// '.' separator, no locale.
std::string format_double(double v);
std::string format_int(std::int64_t v);

void write_snapshot_csv(std::ostream& os, const std::vector<CountSnapshot>& snapshots);

/// cmd_count: snapshot CSV plus one CSV per statistic under config.output_dir.
/// Returns the written file names.
std::vector<std::string> run_count(const ExperimentConfig& config);

std::string run_constants_json(const std::string& form_label, std::int64_t prime_bound,
                               std::int64_t y1);

struct PiStarRow {
  std::int64_t p = 0;
  CartanKind kind = CartanKind::SplitCartan;
  std::int64_t pi_star = 0;
  double li = 0;
  double delta = 0;
  double ratio = 0;
  bool bruteforce_checked = false;
  bool bruteforce_match = false;
};

std::vector<PiStarRow> pistar_table(const CMFormSpec& form, const CoefficientTable& table,
                                    std::int64_t x, const std::vector<std::int64_t>& ps);
void print_pistar_table(std::ostream& os, const std::vector<PiStarRow>& rows, std::int64_t x);

struct DeltaRow {
  std::int64_t p = 0;
  CartanKind kind = CartanKind::SplitCartan;
  Rational exact;
  Rational brute;
  bool checked = false;
  bool match = false;
};

std::vector<DeltaRow> delta_table(const std::vector<std::int64_t>& ps);
void print_delta_table(std::ostream& os, const std::vector<DeltaRow>& rows);

}  // namespace cmcount

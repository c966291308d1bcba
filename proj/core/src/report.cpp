#include "cmcount/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"

namespace cmcount {

double L2_x(double x) { return std::log(std::log(x)); }
double L3_x(double x) { return std::log(L2_x(x)); }

// e^{e^e}: L3(x) = 1 there; smaller x gets no L3 column
const double kL3ReportThreshold = std::exp(std::exp(std::exp(1.0)));

void ExperimentConfig::validate() const {
  if (x_max < 1) fail(errc::invalid_config, "x_max must be >= 1");
  if (threads < 1) fail(errc::invalid_config, "threads must be >= 1");
  if (y1 < 2) fail(errc::invalid_config, "y1 must be >= 2");
  if (y1 > 30) fail(errc::y1_too_large, "y1=" + std::to_string(y1) + " > 30");
  if (segment_size < (1 << 12)) fail(errc::invalid_config, "segment size below 4096");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > x_max)
      fail(errc::invalid_config, "checkpoints must lie in [1, x_max]");
    if (i && checkpoints[i] <= checkpoints[i - 1])
      fail(errc::invalid_config, "checkpoints must be strictly increasing");
  }
  for (std::int64_t p : primes_of_interest)
    if (!is_prime(static_cast<std::uint64_t>(p)))
      fail(errc::invalid_config, "primes_of_interest entry " + std::to_string(p) + " is not prime");
}

std::vector<std::int64_t> ExperimentConfig::effective_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::int64_t> cps;
  for (std::int64_t c = 10; c <= x_max; c *= 10) cps.push_back(c);
  if (cps.empty() || cps.back() != x_max) cps.push_back(x_max);
  return cps;
}

std::int64_t ExperimentConfig::effective_prime_bound() const {
  if (prime_bound > 0) return prime_bound;
  return std::clamp<std::int64_t>(x_max, 100'000, 10'000'000);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

std::vector<ReportRow> make_report(const CMFormSpec& form, const CoefficientTable& table,
                                   const ConstantsBundle& bundle,
                                   const std::vector<CountSnapshot>& snapshots) {
  std::vector<ReportRow> rows;
  rows.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    ReportRow row;
    row.x = snap.x;
    row.counts = snap;
    const auto x = static_cast<double>(snap.x);
    row.mertens = mertens_empirical(form, table, snap.x);
    if (snap.x > 1) {
      row.ratio_m_f1 = snap.m_f1 * std::sqrt(std::numbers::pi * std::log(x)) / (bundle.u_f * x);
      row.ratio_mertens = row.mertens * std::sqrt(std::log(x)) / bundle.mu_f;
    }
    if (x > kL3ReportThreshold) {
      row.has_L3 = true;
      const double r = snap.coprime * std::sqrt(L3_x(x) * std::log(x)) / x;
      row.ratio_coprime = r * std::sqrt(std::numbers::pi) / bundle.U_f;
      row.ratio_coprime_alt = r / bundle.U_f;
    }
    const double li = li_x(x);
    for (std::size_t j = 0; j < snap.primes_of_interest.size(); ++j) {
      double ratio = 0;
      if (li > 0) {
        const Rational d = delta_exact(snap.primes_of_interest[j],
                                       cartan_kind(form, snap.primes_of_interest[j]));
        ratio = static_cast<double>(snap.pi_star[j]) / (d.to_double() * li);
      }
      row.ratio_pi_star.push_back(ratio);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_snapshot_csv(std::ostream& os, const std::vector<CountSnapshot>& snapshots) {
  // column order: x, m_f1, coprime, n_y1, pi_star per prime, g_p per prime, nu_sum per prime
  os << "x,m_f1,coprime,n_y1";
  const std::vector<std::int64_t> poi =
      snapshots.empty() ? std::vector<std::int64_t>{} : snapshots.front().primes_of_interest;
  for (std::int64_t p : poi) os << ",pi_star:p=" << p;
  for (std::int64_t p : poi) os << ",g_p:p=" << p;
  for (std::int64_t p : poi) os << ",nu_sum:p=" << p;
  os << "\n";
  for (const auto& s : snapshots) {
    os << s.x << "," << s.m_f1 << "," << s.coprime << "," << s.n_y1;
    for (auto v : s.pi_star) os << "," << v;
    for (auto v : s.g_p) os << "," << v;
    for (auto v : s.nu_sum) os << "," << v;
    os << "\n";
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot write " + p.string());
  return f;
}

}  // namespace

std::vector<std::string> run_count(const ExperimentConfig& config) {
  config.validate();
  const CMFormSpec form = load_calibrated(config.form_label, config.calibration_bound);
  const CoefficientTable table = build_table(form, config.x_max, config.threads);
  const auto checkpoints = config.effective_checkpoints();

  SweepConfig scfg;
  scfg.y1 = config.y1;
  scfg.primes_of_interest = config.primes_of_interest;
  scfg.threads = config.threads;
  scfg.segment_size = config.segment_size;
  const SweepResult sweep = sweep_counts(form, table, checkpoints, scfg);

  const ConstantsBundle bundle = compute_constants(form, config.effective_prime_bound(), config.y1,
                                                   config.primes_of_interest);
  const auto rows = make_report(form, table, bundle, sweep.snapshots);

  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto add = [&](const fs::path& p) { written.push_back(p.string()); };

  {
    auto f = open_out(dir / "snapshots.csv");
    write_snapshot_csv(f, sweep.snapshots);
    add(dir / "snapshots.csv");
  }
  {
    auto f = open_out(dir / "m_f1.csv");
    f << "x,m_f1,ratio_m_f1\n";
    for (const auto& r : rows)
      f << r.x << "," << r.counts.m_f1 << "," << format_double(r.ratio_m_f1) << "\n";
    add(dir / "m_f1.csv");
  }
  {
    auto f = open_out(dir / "coprime.csv");
    f << "x,coprime,ratio_thm12,ratio_lemma61\n";
    for (const auto& r : rows) {
      f << r.x << "," << r.counts.coprime << ",";
      // the L3 ratios are suppressed, not NaN-filled, below the threshold
      if (r.has_L3)
        f << format_double(r.ratio_coprime) << "," << format_double(r.ratio_coprime_alt);
      else
        f << ",";
      f << "\n";
    }
    add(dir / "coprime.csv");
  }
  {
    auto f = open_out(dir / "n_y1.csv");
    f << "x,y1,n_y1\n";
    for (const auto& r : rows) f << r.x << "," << config.y1 << "," << r.counts.n_y1 << "\n";
    add(dir / "n_y1.csv");
  }
  {
    auto f = open_out(dir / "mertens.csv");
    f << "x,mertens,ratio_mertens\n";
    for (const auto& r : rows)
      f << r.x << "," << format_double(r.mertens) << "," << format_double(r.ratio_mertens) << "\n";
    add(dir / "mertens.csv");
  }
  {
    auto f = open_out(dir / "pi_star.csv");
    f << "x,p,pi_star,li_x,delta,ratio\n";
    for (const auto& r : rows)
      for (std::size_t j = 0; j < config.primes_of_interest.size(); ++j) {
        const std::int64_t p = config.primes_of_interest[j];
        const Rational d = delta_exact(p, cartan_kind(form, p));
        f << r.x << "," << p << "," << r.counts.pi_star[j] << ","
          << format_double(li_x(static_cast<double>(r.x))) << "," << format_double(d.to_double())
          << "," << format_double(r.ratio_pi_star[j]) << "\n";
      }
    add(dir / "pi_star.csv");
  }
  {
    auto f = open_out(dir / "g_p.csv");
    f << "x,p,g_p\n";
    for (const auto& r : rows)
      for (std::size_t j = 0; j < config.primes_of_interest.size(); ++j)
        f << r.x << "," << config.primes_of_interest[j] << "," << r.counts.g_p[j] << "\n";
    add(dir / "g_p.csv");
  }
  {
    auto f = open_out(dir / "nu_sum.csv");
    f << "x,p,nu_sum\n";
    for (const auto& r : rows)
      for (std::size_t j = 0; j < config.primes_of_interest.size(); ++j)
        f << r.x << "," << config.primes_of_interest[j] << "," << r.counts.nu_sum[j] << "\n";
    add(dir / "nu_sum.csv");
  }
  {
    auto f = open_out(dir / "constants.json");
    f << bundle_to_json(bundle) << "\n";
    add(dir / "constants.json");
  }
  return written;
}

std::string run_constants_json(const std::string& form_label, std::int64_t prime_bound,
                               std::int64_t y1) {
  if (prime_bound < 100'000)
    fail(errc::invalid_config, "prime bound must be >= 1e5 for the constants bundle");
  const CMFormSpec form = load_calibrated(form_label);
  return bundle_to_json(compute_constants(form, prime_bound, y1));
}

std::vector<PiStarRow> pistar_table(const CMFormSpec& form, const CoefficientTable& table,
                                    std::int64_t x, const std::vector<std::int64_t>& ps) {
  std::vector<PiStarRow> rows;
  for (std::int64_t p : ps) {
    PiStarRow row;
    row.p = p;
    row.kind = cartan_kind(form, p);
    row.pi_star = pi_star(form, table, x, p);
    row.li = li_x(static_cast<double>(x));
    row.delta = delta_exact(p, row.kind).to_double();
    row.ratio = row.pi_star / (row.delta * row.li);
    if (p <= 13) {
      row.bruteforce_checked = true;
      row.bruteforce_match = delta_bruteforce(p, row.kind) == delta_exact(p, row.kind);
    }
    rows.push_back(row);
  }
  return rows;
}

void print_pistar_table(std::ostream& os, const std::vector<PiStarRow>& rows, std::int64_t x) {
  os << "x = " << x << "\n";
  os << std::left << std::setw(6) << "p" << std::setw(10) << "cartan" << std::setw(12) << "pi_star"
     << std::setw(16) << "Li(x)" << std::setw(14) << "delta" << std::setw(12) << "ratio"
     << "delta_bruteforce\n";
  for (const auto& r : rows) {
    std::ostringstream li, de, ra;
    li << std::fixed << std::setprecision(1) << r.li;
    de << std::fixed << std::setprecision(8) << r.delta;
    ra << std::fixed << std::setprecision(4) << r.ratio;
    os << std::left << std::setw(6) << r.p << std::setw(10) << cartan_name(r.kind) << std::setw(12)
       << r.pi_star << std::setw(16) << li.str() << std::setw(14) << de.str() << std::setw(12)
       << ra.str() << (r.bruteforce_checked ? (r.bruteforce_match ? "ok" : "MISMATCH") : "-")
       << "\n";
  }
}

std::vector<DeltaRow> delta_table(const std::vector<std::int64_t>& ps) {
  std::vector<DeltaRow> rows;
  for (std::int64_t p : ps)
    for (CartanKind kind : {CartanKind::SplitCartan, CartanKind::InertCartan}) {
      DeltaRow row;
      row.p = p;
      row.kind = kind;
      row.exact = delta_exact(p, kind);
      if (p <= 13) {
        row.brute = delta_bruteforce(p, kind);
        row.checked = true;
        row.match = row.brute == row.exact;
      }
      rows.push_back(row);
    }
  return rows;
}

void print_delta_table(std::ostream& os, const std::vector<DeltaRow>& rows) {
  os << std::left << std::setw(6) << "p" << std::setw(10) << "cartan" << std::setw(14)
     << "delta_exact" << std::setw(18) << "delta_bruteforce"
     << "check\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(6) << r.p << std::setw(10) << cartan_name(r.kind) << std::setw(14)
       << r.exact.str() << std::setw(18) << (r.checked ? r.brute.str() : std::string("-"))
       << (r.checked ? (r.match ? "ok" : "MISMATCH") : "closed form only") << "\n";
  }
}

}  // namespace cmcount

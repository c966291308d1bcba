// cmcount: Fourier coefficients of weight-2 CM forms and their divisibility
// statistics. Subcommands: count, constants, verify, pistar, delta.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"
#include "cmcount/report.hpp"
#include "cmcount/verify.hpp"

namespace {

// exit codes: 0 success, 1 verification failure, 2 usage error
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

int cmd_count(const cmcount::ExperimentConfig& config) {
  const auto files = cmcount::run_count(config);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return kOk;
}

int cmd_constants(const std::string& form, std::int64_t prime_bound, std::int64_t y1,
                  const std::string& out) {
  const std::string json = cmcount::run_constants_json(form, prime_bound, y1);
  if (out.empty() || out == "-") {
    std::cout << json << "\n";
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) cmcount::fail(cmcount::errc::io_error, "cannot write " + out);
    f << json << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return kOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int threads,
               const std::string& json_path) {
  cmcount::VerifyOptions opts;
  opts.suite = suite;
  opts.seed = seed;
  opts.threads = threads;
  const auto report = cmcount::run_verify(opts);
  for (const auto& c : report.checks)
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  std::cout << (report.all_passed() ? "verify: all checks passed\n" : "verify: FAILURES\n");
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::binary);
    if (!f) cmcount::fail(cmcount::errc::io_error, "cannot write " + json_path);
    f << report.to_json() << "\n";
  }
  return report.all_passed() ? kOk : kVerifyFailed;
}

int cmd_pistar(const std::string& form_label, std::int64_t x, std::vector<std::int64_t> ps,
               int threads) {
  if (ps.empty()) ps = {5, 13};
  const auto form = cmcount::load_calibrated(form_label);
  const auto table = cmcount::build_table(form, x, threads);
  const auto rows = cmcount::pistar_table(form, table, x, ps);
  cmcount::print_pistar_table(std::cout, rows, x);
  return kOk;
}

int cmd_delta(std::vector<std::int64_t> ps) {
  if (ps.empty()) ps = {3, 5, 7, 11, 13};
  const auto rows = cmcount::delta_table(ps);
  cmcount::print_delta_table(std::cout, rows);
  for (const auto& r : rows)
    if (r.checked && !r.match) return kVerifyFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coefficient and coprimality statistics of weight-2 CM newforms"};
  app.require_subcommand(1);

  cmcount::ExperimentConfig config;
  std::string checkpoint_list;

  auto* count = app.add_subcommand("count", "sieve the counting statistics and write CSV reports");
  count->add_option("--form", config.form_label, "catalog label or spec file")
      ->capture_default_str();
  count->add_option("--x", config.x_max, "sweep bound")->capture_default_str();
  count->add_option("--checkpoints", checkpoint_list,
                    "comma-separated checkpoint list (default: powers of 10)");
  count->add_option("--y1", config.y1, "smooth-part cutoff for N_y1")->capture_default_str();
  count->add_option("--p", config.primes_of_interest, "primes for pi*, G_p, nu columns")
      ->capture_default_str();
  count->add_option("--threads", config.threads, "worker threads")->capture_default_str();
  count->add_option("--out", config.output_dir, "output directory")->capture_default_str();
  count->add_option("--seed", config.seed, "seed recorded in the config")->capture_default_str();
  count->add_option("--segment", config.segment_size, "sieve segment size")
      ->capture_default_str();
  count->add_option("--prime-bound", config.prime_bound,
                    "Euler product truncation for the constants (default from x)");

  std::string c_form = "32a", c_out;
  std::int64_t c_bound = 1'000'000, c_y1 = 20;
  auto* constants = app.add_subcommand("constants", "evaluate the constants bundle as JSON");
  constants->add_option("--form", c_form, "catalog label or spec file")->capture_default_str();
  constants->add_option("--prime-bound", c_bound, "Euler product truncation")
      ->capture_default_str();
  constants->add_option("--y1", c_y1, "cutoff entering c_f and U_f")->capture_default_str();
  constants->add_option("--out", c_out, "output file (default: stdout)");

  std::string v_suite = "fast", v_json;
  std::uint64_t v_seed = 20259013;
  int v_threads = 2;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("suite", v_suite, "fast (<1 min) or full (<30 min)")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  verify->add_option("--seed", v_seed, "seed for randomized property checks")
      ->capture_default_str();
  verify->add_option("--threads", v_threads, "worker threads")->capture_default_str();
  verify->add_option("--json", v_json, "write the machine-readable verdict here");

  std::string p_form = "32a";
  std::int64_t p_x = 1'000'000;
  std::vector<std::int64_t> p_ps;
  int p_threads = 2;
  auto* pistar = app.add_subcommand("pistar", "pi*(x,p) against delta(p) Li(x)");
  pistar->add_option("--form", p_form, "catalog label or spec file")->capture_default_str();
  pistar->add_option("--x", p_x, "prime bound")->capture_default_str();
  pistar->add_option("--p", p_ps, "primes p (default 5 13)");
  pistar->add_option("--threads", p_threads, "worker threads")->capture_default_str();

  std::vector<std::int64_t> d_ps;
  auto* delta = app.add_subcommand("delta", "Cartan densities, closed form vs GL2 enumeration");
  delta->add_option("--p", d_ps, "odd primes (default 3 5 7 11 13)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (count->parsed()) {
      if (!checkpoint_list.empty()) {
        config.checkpoints.clear();
        std::size_t pos = 0;
        while (pos < checkpoint_list.size()) {
          auto comma = checkpoint_list.find(',', pos);
          if (comma == std::string::npos) comma = checkpoint_list.size();
          config.checkpoints.push_back(std::stoll(checkpoint_list.substr(pos, comma - pos)));
          pos = comma + 1;
        }
      }
      return cmd_count(config);
    }
    if (constants->parsed()) return cmd_constants(c_form, c_bound, c_y1, c_out);
    if (verify->parsed()) return cmd_verify(v_suite, v_seed, v_threads, v_json);
    if (pistar->parsed()) return cmd_pistar(p_form, p_x, p_ps, p_threads);
    if (delta->parsed()) return cmd_delta(d_ps);
  } catch (const cmcount::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

#include "cmcount/form_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"

namespace cmcount {

const char* split_name(SplitType t) noexcept {
  switch (t) {
    case SplitType::Split: return "split";
    case SplitType::Inert: return "inert";
    case SplitType::Ramified: return "ramified";
  }
  return "?";
}

bool is_class_number_one_disc(std::int64_t d) {
  switch (d) {
    case -3: case -4: case -7: case -8: case -11: case -19: case -43: case -67: case -163:
      return true;
    default:
      return false;
  }
}

bool CMFormSpec::is_bad_prime(std::int64_t p) const {
  return std::binary_search(bad_primes.begin(), bad_primes.end(), p);
}

CMFormSpec CMFormSpec::with_normalization(NormalizationRule rule) const {
  CMFormSpec copy = *this;
  copy.normalization = std::move(rule);
  return copy;
}

namespace {

int units_for_disc(std::int64_t d) { return d == -4 ? 4 : (d == -3 ? 6 : 2); }

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

CMFormSpec make_form(std::string label, std::int64_t N, std::int64_t dK, CurveModel curve) {
  CMFormSpec f;
  f.label = std::move(label);
  f.level_N = N;
  f.disc_dK = dK;
  f.class_number_h = 1;
  f.unit_count_w = units_for_disc(dK);
  f.bad_primes = prime_divisors(N);
  f.curve = curve;
  return f;
}

void validate_form(const CMFormSpec& f, const std::string& origin) {
  auto bad = [&](const std::string& msg) { fail(errc::invalid_spec, origin + ": " + msg); };
  if (f.level_N <= 0) bad("level N must be positive");
  if (!is_class_number_one_disc(f.disc_dK))
    bad("dK=" + std::to_string(f.disc_dK) +
        " is not a class-number-1 fundamental discriminant; integer coefficients require one of "
        "{-3,-4,-7,-8,-11,-19,-43,-67,-163}");
  if (f.class_number_h != 1) bad("class number must be 1");
  if (f.unit_count_w != units_for_disc(f.disc_dK)) bad("unit count inconsistent with dK");
  // CM curves have additive reduction at every bad prime, so p^2 | N
  for (std::int64_t p : f.bad_primes)
    if ((f.level_N / p) % p != 0) bad("level not divisible by p^2 at bad prime " + std::to_string(p));
  // ramified primes of K are always bad
  for (std::int64_t p : prime_divisors(-f.disc_dK))
    if (!f.is_bad_prime(p)) bad("prime " + std::to_string(p) + " ramifies in K but does not divide N");
}

}  // namespace

std::vector<std::string> catalog_labels() { return {"27a", "32a", "36a", "49a"}; }

CMFormSpec load_form(const std::string& label) {
  // y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
  if (label == "27a") return make_form("27a", 27, -3, {0, 0, 1, 0, 0});     // y^2 + y = x^3
  if (label == "32a") return make_form("32a", 32, -4, {0, 0, 0, -1, 0});    // y^2 = x^3 - x
  if (label == "36a") return make_form("36a", 36, -3, {0, 0, 0, 0, 1});     // y^2 = x^3 + 1
  if (label == "49a") return make_form("49a", 49, -7, {1, -1, 0, -2, -1});  // y^2 + xy = x^3 - x^2 - 2x - 1
  if (label.find('/') != std::string::npos || label.find('.') != std::string::npos)
    return parse_spec_file(label);
  fail(errc::unknown_label, "no catalog form \"" + label + "\" (have 27a, 32a, 36a, 49a)");
}

CMFormSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::unknown_label, "cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str(), path);
}

CMFormSpec parse_spec_text(const std::string& text, const std::string& origin) {
  auto bad = [&](const std::string& msg) { fail(errc::invalid_spec, origin + ": " + msg); };
  std::string label;
  std::int64_t N = 0, dK = 0;
  CurveModel curve;
  bool seen[8] = {};

  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) bad("line " + std::to_string(lineno) + ": empty key or value");

    auto as_int = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        std::int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
      } catch (const std::exception&) {
        bad("line " + std::to_string(lineno) + ": \"" + v + "\" is not an integer");
      }
      return std::int64_t(0);
    };

    if (key == "label") { label = value; seen[0] = true; }
    else if (key == "N") { N = as_int(value); seen[1] = true; }
    else if (key == "dK") { dK = as_int(value); seen[2] = true; }
    else if (key == "a1") { curve.a1 = as_int(value); seen[3] = true; }
    else if (key == "a2") { curve.a2 = as_int(value); seen[4] = true; }
    else if (key == "a3") { curve.a3 = as_int(value); seen[5] = true; }
    else if (key == "a4") { curve.a4 = as_int(value); seen[6] = true; }
    else if (key == "a6") { curve.a6 = as_int(value); seen[7] = true; }
    else bad("line " + std::to_string(lineno) + ": unknown key \"" + key + "\"");
  }
  static const char* names[8] = {"label", "N", "dK", "a1", "a2", "a3", "a4", "a6"};
  for (int i = 0; i < 8; ++i)
    if (!seen[i]) bad(std::string("missing key \"") + names[i] + "\"");

  CMFormSpec f = make_form(label, N, dK, curve);
  validate_form(f, origin);
  return f;
}

SplitType splitting_type(std::int64_t disc_dK, std::int64_t p) {
  if (!is_prime(static_cast<std::uint64_t>(p))) fail(errc::not_prime, std::to_string(p));
  if ((-disc_dK) % p == 0) return SplitType::Ramified;
  return kronecker(disc_dK, p) == 1 ? SplitType::Split : SplitType::Inert;
}

SplitType splitting_type(const CMFormSpec& form, std::int64_t p) {
  return splitting_type(form.disc_dK, p);
}

}  // namespace cmcount

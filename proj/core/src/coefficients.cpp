#include "cmcount/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"

namespace cmcount {

namespace {

constexpr std::int64_t kOracleMax = 1'000'000;

void require_prime(std::int64_t p) {
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
    fail(errc::not_prime, std::to_string(p) + " is not prime");
}

std::int64_t ap_fast_split(const CMFormSpec& form, std::int64_t p);

}  // namespace

std::int64_t ap_pointcount(const CMFormSpec& form, std::int64_t p) {
  require_prime(p);
  if (form.is_bad_prime(p))
    fail(errc::bad_reduction_prime, form.label + " has bad reduction at " + std::to_string(p));
  if (p > kOracleMax)
    fail(errc::oracle_range_exceeded,
         "point counting is O(p); refusing p=" + std::to_string(p) + " > 1e6");

  const CurveModel& c = form.curve;
  auto md = [p](std::int64_t v) {
    return static_cast<std::uint64_t>(((v % p) + p) % p);
  };

  if (p == 2) {
    int count = 1;  // point at infinity
    for (std::int64_t x = 0; x < 2; ++x)
      for (std::int64_t y = 0; y < 2; ++y) {
        std::int64_t lhs = y * y + c.a1 * x * y + c.a3 * y;
        std::int64_t rhs = x * x * x + c.a2 * x * x + c.a4 * x + c.a6;
        if (((lhs - rhs) % 2 + 2) % 2 == 0) ++count;
      }
    return 2 + 1 - count;
  }

  const auto up = static_cast<std::uint64_t>(p);
  // nsol[t] = #{y : y^2 = t mod p}
  std::vector<std::uint8_t> nsol(up, 0);
  for (std::uint64_t y = 0; y < up; ++y) nsol[mul_mod(y, y, up)]++;

  // complete the square: #E = 1 + sum_x nsol[(a1 x + a3)^2 + 4 f(x)]
  const std::uint64_t a1 = md(c.a1), a2 = md(c.a2), a3 = md(c.a3), a4 = md(c.a4), a6 = md(c.a6);
  std::int64_t total = 1;
  for (std::uint64_t x = 0; x < up; ++x) {
    std::uint64_t x2 = mul_mod(x, x, up);
    std::uint64_t fx = (mul_mod(x2, x, up) + mul_mod(a2, x2, up)) % up;
    fx = (fx + mul_mod(a4, x, up) + a6) % up;
    std::uint64_t h = (mul_mod(a1, x, up) + a3) % up;
    std::uint64_t d = (mul_mod(h, h, up) + 4 * fx) % up;
    total += nsol[d];
  }
  std::int64_t a = p + 1 - total;
  if (a * a > 4 * p)
    fail(errc::invalid_spec, form.label + ": trace violates the Hasse bound at p=" +
                                 std::to_string(p) + " (singular curve model?)");
  return a;
}

std::vector<std::pair<std::int64_t, std::int64_t>> trace_candidates(std::int64_t disc_dK,
                                                                    std::int64_t p) {
  const auto D = static_cast<std::uint64_t>(-disc_dK);
  if ((-disc_dK) % p == 0) return {};
  auto sol = cornacchia_4p(static_cast<std::uint64_t>(p), D);
  if (!sol) return {};
  std::int64_t u = sol->first, v = sol->second;

  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  auto push = [&](std::int64_t uu, std::int64_t vv) {
    out.emplace_back(std::abs(uu), std::abs(vv));
  };
  push(u, v);
  if (disc_dK == -4) {
    push(2 * v, u / 2);  // multiplication by i
  } else if (disc_dK == -3) {
    push((u - 3 * v) / 2, (u + v) / 2);  // multiplication by the sixth roots of unity
    push((u + 3 * v) / 2, (u - v) / 2);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NormalizationRule calibrate_normalization(const CMFormSpec& form, std::int64_t bound) {
  if (bound < 1000)
    fail(errc::calibration_failed,
         "bound " + std::to_string(bound) + " < 1000: too few primes to determine the rule");
  if (bound > kOracleMax) fail(errc::oracle_range_exceeded, "calibration bound beyond oracle range");

  struct Observation {
    std::int64_t p;
    std::size_t correct;  // index into candidates
    int sign;
    std::vector<std::pair<std::int64_t, std::int64_t>> candidates;
  };
  std::vector<Observation> obs;

  for_primes_up_to(static_cast<std::uint64_t>(bound - 1), [&](std::uint64_t up) {
    auto p = static_cast<std::int64_t>(up);
    if (form.is_bad_prime(p)) return;
    std::int64_t a = ap_pointcount(form, p);
    bool split = splitting_type(form, p) == SplitType::Split;
    // a(p) != 0 iff p splits, at every good prime of a CM form
    if ((a != 0) != split)
      fail(errc::calibration_failed,
           form.label + ": oracle contradicts the splitting of p=" + std::to_string(p) +
               " in K (wrong curve model or dK)");
    if (!split) return;
    auto cands = trace_candidates(form.disc_dK, p);
    std::size_t correct = cands.size();
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].first == std::abs(a)) {
        if (correct != cands.size())
          fail(errc::calibration_failed, "ambiguous trace representation at p=" + std::to_string(p));
        correct = i;
      }
    if (correct == cands.size())
      fail(errc::calibration_failed,
           form.label + ": oracle trace at p=" + std::to_string(p) +
               " is not represented by the form class of dK (wrong dK?)");
    obs.push_back({p, correct, a > 0 ? 1 : -1, std::move(cands)});
  });

  if (obs.size() < 20)
    fail(errc::calibration_failed, "only " + std::to_string(obs.size()) +
                                       " split primes below bound; rule underdetermined");

  for (int c : {3, 4, 6, 7, 8, 11, 12, 16, 19, 21, 24}) {
    std::vector<std::int8_t> tab(static_cast<std::size_t>(c) * c, 0);
    std::vector<std::uint8_t> pinned(static_cast<std::size_t>(c) * c, 0);
    auto key = [c](std::int64_t u, std::int64_t v) {
      return static_cast<std::size_t>(u % c) * c + static_cast<std::size_t>(v % c);
    };
    bool ok = true;
    for (const auto& o : obs) {
      for (std::size_t i = 0; i < o.candidates.size() && ok; ++i) {
        auto [u, v] = o.candidates[i];
        std::int8_t want = (i == o.correct) ? static_cast<std::int8_t>(o.sign) : std::int8_t(0);
        std::size_t k = key(u, v);
        if (pinned[k] && tab[k] != want) ok = false;
        pinned[k] = 1;
        tab[k] = want;
      }
      if (!ok) break;
    }
    if (!ok) continue;
    // validation sweep: the rule must select exactly the observed trace everywhere
    NormalizationRule rule{c, tab, bound};
    for (const auto& o : obs) {
      int selected = 0;
      std::int64_t value = 0;
      for (const auto& [u, v] : o.candidates) {
        int s = rule.sign_of(u, v);
        if (s) {
          ++selected;
          value = s * u;
        }
      }
      std::int64_t expect = o.sign * o.candidates[o.correct].first;
      if (selected != 1 || value != expect) {
        ok = false;
        break;
      }
    }
    if (ok) return rule;
  }
  fail(errc::calibration_failed,
       form.label + ": no congruence rule with modulus <= 24 matches the point-count oracle");
}

CMFormSpec load_calibrated(const std::string& label, std::int64_t bound) {
  CMFormSpec form = load_form(label);
  return form.with_normalization(calibrate_normalization(form, bound));
}

namespace {

std::int64_t ap_fast_split(const CMFormSpec& form, std::int64_t p) {
  auto cands = trace_candidates(form.disc_dK, p);
  if (cands.empty())
    fail(errc::calibration_failed,
         "split prime " + std::to_string(p) + " has no quadratic representation");
  int selected = 0;
  std::int64_t value = 0;
  for (const auto& [u, v] : cands) {
    int s = form.normalization.sign_of(u, v);
    if (s) {
      ++selected;
      value = s * u;
    }
  }
  if (selected != 1)
    fail(errc::calibration_failed, "sign rule selected " + std::to_string(selected) +
                                       " representations at p=" + std::to_string(p));
  return value;
}

}  // namespace

std::int64_t ap_fast(const CMFormSpec& form, std::int64_t p) {
  require_prime(p);
  if (form.is_bad_prime(p))
    fail(errc::bad_reduction_prime, form.label + " has bad reduction at " + std::to_string(p));
  if (!form.calibrated()) fail(errc::not_calibrated, form.label + " has no normalization rule yet");
  if (splitting_type(form, p) != SplitType::Split) return 0;
  return ap_fast_split(form, p);
}

std::int64_t ap_fast_unchecked(const CMFormSpec& form, std::int64_t p) {
  return ap_fast_split(form, p);
}

std::int64_t apm_from_ap(std::int64_t p, std::int64_t a_p, int m) {
  if (m == 0) return 1;
  if (m == 1) return a_p;
  // overflow guard on the bound (m+1) p^{m/2}, independent of the actual value
  double bits = std::log2(static_cast<double>(m) + 1) + 0.5 * m * std::log2(static_cast<double>(p));
  if (bits > 62.5) fail(errc::overflow, "a(p^m) bound exceeds 64 bits; use the modular path");
  __int128 prev = 1, cur = a_p;
  for (int i = 2; i <= m; ++i) {
    __int128 next = static_cast<__int128>(a_p) * cur - static_cast<__int128>(p) * prev;
    prev = cur;
    cur = next;
  }
  return static_cast<std::int64_t>(cur);
}

std::int64_t apm(const CMFormSpec& form, std::int64_t p, int m) {
  require_prime(p);
  if (m < 0) fail(errc::invalid_config, "negative exponent");
  if (m == 0) return 1;
  if (form.is_bad_prime(p)) return 0;  // additive reduction: a(p) = 0, a(p^m) = a(p)^m
  return apm_from_ap(p, ap_fast(form, p), m);
}

std::uint64_t apm_mod(const CMFormSpec& form, std::int64_t p, int m, std::uint64_t modulus) {
  require_prime(p);
  if (modulus < 2) fail(errc::invalid_config, "modulus must be >= 2");
  if (m < 0) fail(errc::invalid_config, "negative exponent");
  if (m == 0) return 1 % modulus;
  if (form.is_bad_prime(p)) return 0;
  std::int64_t a = ap_fast(form, p);
  std::uint64_t am = static_cast<std::uint64_t>(((a % static_cast<std::int64_t>(modulus)) +
                                                 static_cast<std::int64_t>(modulus))) %
                     modulus;
  std::uint64_t pm = static_cast<std::uint64_t>(p) % modulus;
  std::uint64_t prev = 1 % modulus, cur = am;
  for (int i = 2; i <= m; ++i) {
    std::uint64_t next = (mul_mod(am, cur, modulus) + modulus - mul_mod(pm, prev, modulus)) % modulus;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::int64_t a_n(const CMFormSpec& form, std::int64_t n) {
  if (n < 1) fail(errc::invalid_config, "n must be positive");
  if (n > 1'000'000'000'000LL)
    fail(errc::overflow, "n beyond 1e12; |a(n)| <= d(n) sqrt(n) no longer fits 64 bits safely");
  std::int64_t result = 1;
  auto take = [&](std::int64_t p, int m) {
    std::int64_t f = apm(form, p, m);
    if (__builtin_mul_overflow(result, f, &result)) fail(errc::overflow, "a(n) product overflow");
  };
  std::int64_t rem = n;
  for (std::int64_t p : {std::int64_t(2), std::int64_t(3)}) {
    if (rem % p == 0) {
      int m = 0;
      while (rem % p == 0) {
        rem /= p;
        ++m;
      }
      take(p, m);
    }
  }
  for (std::int64_t q = 5; q * q <= rem; q += 6) {
    for (std::int64_t p : {q, q + 2}) {
      if (rem % p == 0) {
        int m = 0;
        while (rem % p == 0) {
          rem /= p;
          ++m;
        }
        take(p, m);
      }
    }
  }
  if (rem > 1) take(rem, 1);
  return result;
}

int vanishing_index_from_ap(const CMFormSpec& form, std::int64_t p, std::int64_t a_p) {
  if (form.is_bad_prime(p)) return 1;
  if (a_p == 0) return 1;
  // a(p^i) = 0 for some i iff the Frobenius root ratio is a root of unity,
  // which forces a(p)^2 in {p, 2p, 3p}
  std::int64_t sq = a_p * a_p;
  if (sq == 2 * p) return 3;
  if (sq == 3 * p) return 5;
  if (sq == p) return 2;
  return 0;
}

int vanishing_index(const CMFormSpec& form, std::int64_t p) {
  require_prime(p);
  if (form.is_bad_prime(p)) return 1;
  std::int64_t a = form.calibrated() ? ap_fast(form, p) : ap_pointcount(form, p);
  return vanishing_index_from_ap(form, p, a);
}

PrimeRecord prime_record(const CMFormSpec& form, std::int64_t p) {
  require_prime(p);
  PrimeRecord r;
  r.p = p;
  r.split = splitting_type(form, p);
  r.a_p = form.is_bad_prime(p) ? 0 : ap_fast(form, p);
  r.vanishing_index = vanishing_index_from_ap(form, p, r.a_p);
  return r;
}

}  // namespace cmcount

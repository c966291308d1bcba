#include "cmcount/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "cmcount/arith.hpp"
#include "cmcount/constants.hpp"
#include "cmcount/errors.hpp"
#include "cmcount/report.hpp"

#include "json.hpp"

namespace cmcount {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["seed"] = seed;
  auto arr = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    if (!c.pass) ++failed;
  }
  j["checks"] = arr;
  j["failed"] = failed;
  j["passed"] = failed == 0;
  return j.dump(2);
}

namespace {

struct Brute {
  std::int64_t m_f1 = 0, coprime = 0, n_y1 = 0;
  std::map<std::int64_t, std::int64_t> pi_star, nu_sum, g_p;
};

// direct enumeration through a_n; the reference for every sieve statistic
Brute brute_counts(const CMFormSpec& form, std::int64_t x, std::int64_t y1,
                   const std::vector<std::int64_t>& poi) {
  Brute b;
  for (std::int64_t p : poi) {
    b.pi_star[p] = 0;
    b.nu_sum[p] = 0;
    b.g_p[p] = 0;
  }
  for (std::int64_t n = 1; n <= x; ++n) {
    const std::int64_t a = a_n(form, n);
    // factor n
    std::vector<std::pair<std::int64_t, int>> fac;
    std::int64_t rem = n;
    for (std::int64_t q = 2; q * q <= rem; q += (q == 2 ? 1 : 2)) {
      if (rem % q) continue;
      int m = 0;
      while (rem % q == 0) {
        rem /= q;
        ++m;
      }
      fac.emplace_back(q, m);
    }
    if (rem > 1) fac.emplace_back(rem, 1);

    const bool nonzero = a != 0;
    const bool coprime =
        std::gcd(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(a < 0 ? -a : a)) == 1;
    const std::int64_t spf = fac.empty() ? std::numeric_limits<std::int64_t>::max() : fac[0].first;

    if (nonzero) b.m_f1++;
    if (coprime) b.coprime++;
    if (nonzero && spf >= y1) b.n_y1++;
    for (std::int64_t p : poi) {
      if (nonzero) {
        std::int64_t nu = 0;
        for (auto [q, m] : fac)
          if (apm(form, q, m) % p == 0) ++nu;
        b.nu_sum[p] += nu;
      }
      if (fac.size() == 1 && fac[0].second == 1 && nonzero && a % p == 0) b.pi_star[p]++;
      if (coprime && spf == p) b.g_p[p]++;
    }
  }
  return b;
}

struct Runner {
  VerifyOptions opts;
  bool full = false;
  std::vector<CheckResult> results;
  std::map<std::string, CMFormSpec> forms;
  std::map<std::string, CoefficientTable> tables;  // per label, at suite scale

  void add(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }

  template <typename Fn>
  void check(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void run_checks(Runner& r) {
  const bool full = r.full;
  auto& forms = r.forms;
  for (const auto& label : catalog_labels()) forms.emplace(label, load_calibrated(label, 10000));
  const CMFormSpec& f32 = forms.at("32a");
  const CMFormSpec& f49 = forms.at("49a");

  r.check("catalog.invariants", [&] {
    bool ok = true;
    std::string detail;
    for (const auto& [label, f] : forms) {
      const int w_want = f.disc_dK == -4 ? 4 : (f.disc_dK == -3 ? 6 : 2);
      if (f.unit_count_w != w_want || f.class_number_h != 1 ||
          !is_class_number_one_disc(f.disc_dK))
        ok = false;
      std::int64_t n = f.level_N;
      for (std::int64_t p : f.bad_primes) {
        if (n % p != 0) ok = false;
        while (n % p == 0) n /= p;
      }
      if (n != 1) ok = false;  // every prime divisor of N is listed
    }
    r.add("catalog.invariants", ok, detail.empty() ? "4 catalog forms" : detail);
  });

  r.check("catalog.errors", [&] {
    bool ok = false;
    try {
      load_form("zz9");
    } catch (const error& e) {
      ok = e.kind() == errc::unknown_label;
    }
    try {
      parse_spec_text("label=x\nN=15\ndK=-4\na1=0\na2=0\na3=0\na4=-1\na6=0\n");
      ok = false;  // 15 is squarefree at 3,5: not a CM conductor shape
    } catch (const error& e) {
      ok = ok && e.kind() == errc::invalid_spec;
    }
    r.add("catalog.errors", ok, "UnknownLabel and InvalidSpec raised");
  });

  r.check("splitting.periodicity", [&] {
    bool ok = true;
    for (const auto& [label, f] : forms) {
      const std::int64_t q = -f.disc_dK;
      std::map<std::int64_t, SplitType> cls;
      for_primes_up_to(full ? 100000 : 20000, [&](std::uint64_t up) {
        auto p = static_cast<std::int64_t>(up);
        if (q % p == 0) {
          if (splitting_type(f, p) != SplitType::Ramified) ok = false;
          return;
        }
        const SplitType st = splitting_type(f, p);
        auto [it, fresh] = cls.emplace(p % q, st);
        if (!fresh && it->second != st) ok = false;
      });
    }
    r.add("splitting.periodicity", ok, "splitting depends only on p mod |dK|");
  });

  r.check("splitting.density", [&] {
    bool ok = true;
    std::string detail;
    for (const auto& [label, f] : forms) {
      std::int64_t split = 0, total = 0;
      for_primes_up_to(1000000, [&](std::uint64_t up) {
        auto p = static_cast<std::int64_t>(up);
        ++total;
        if (splitting_type(f, p) == SplitType::Split) ++split;
      });
      const double ratio = 2.0 * split / total;
      if (std::abs(ratio - 1.0) > 0.01) ok = false;
      detail += label + "=" + fmt(ratio / 2) + " ";
    }
    r.add("splitting.density", ok, "split fraction at 1e6: " + detail);
  });

  r.check("oracle.ap_fast_eq_pointcount", [&] {
    const std::int64_t bound = full ? 10000 : 2000;
    bool ok = true;
    std::int64_t checked = 0;
    for (const auto& [label, f] : forms) {
      for_primes_up_to(static_cast<std::uint64_t>(bound), [&](std::uint64_t up) {
        auto p = static_cast<std::int64_t>(up);
        if (f.is_bad_prime(p)) return;
        ++checked;
        if (ap_fast(f, p) != ap_pointcount(f, p)) ok = false;
      });
    }
    r.add("oracle.ap_fast_eq_pointcount", ok,
          std::to_string(checked) + " good primes below " + std::to_string(bound) +
              " on 4 forms");
  });

  // per-form tables at suite scale
  const std::int64_t table_x = full ? 1000000 : 100000;
  for (const auto& [label, f] : forms)
    r.tables.emplace(label, build_table(f, table_x, r.opts.threads));
  // optional fault injection, to prove the scans below catch corruption
  if (r.opts.inject_table_fault) {
    auto [p, val] = *r.opts.inject_table_fault;
    auto& t = r.tables.at("32a");
    const std::int64_t i = t.index_of(p);
    if (i >= 0) t.a_p[static_cast<std::size_t>(i)] = val;
  }
  const CoefficientTable& t32 = r.tables.at("32a");

  r.check("deuring.table", [&] {
    bool ok = true;
    std::int64_t witness = 0;
    for (const auto& [label, f] : forms) {
      const auto& t = r.tables.at(label);
      for (std::size_t i = 0; i < t.primes.size(); ++i) {
        auto p = static_cast<std::int64_t>(t.primes[i]);
        const bool zero = t.a_p[i] == 0;
        const bool nonsplit = f.is_bad_prime(p) || splitting_type(f, p) != SplitType::Split;
        if (zero != nonsplit) {
          ok = false;
          witness = p;
        }
      }
    }
    r.add("deuring.table", ok,
          ok ? "a(p)=0 iff p bad or non-split, all table primes on 4 forms"
             : "violated at p=" + std::to_string(witness));
  });

  r.check("hasse.bound", [&] {
    bool ok = true;
    for (const auto& [label, f] : forms) {
      const auto& t = r.tables.at(label);
      for (std::size_t i = 0; i < t.primes.size(); ++i) {
        const auto a = static_cast<std::int64_t>(t.a_p[i]);
        if (a * a > 4 * static_cast<std::int64_t>(t.primes[i])) ok = false;
      }
    }
    r.add("hasse.bound", ok, "a(p)^2 <= 4p over all table primes");
  });

  r.check("vanishing.pattern", [&] {
    // a(p^m) = 0 iff (m+1) = 0 mod (i_f+1): verified through three fixed
    // 62-bit prime moduli, whose product exceeds the |a(p^m)| bound
    std::uint64_t mods[3];
    std::uint64_t m0 = (std::uint64_t(1) << 62) - 1;
    int found = 0;
    while (found < 3) {
      if (is_prime(m0)) mods[found++] = m0;
      --m0;
    }
    bool ok = true;
    const std::int64_t pbound = full ? 1000 : 120;
    for (const auto& [label, f] : forms) {
      for_primes_up_to(static_cast<std::uint64_t>(pbound), [&](std::uint64_t up) {
        auto p = static_cast<std::int64_t>(up);
        if (f.is_bad_prime(p)) return;  // a(p^m) = 0 for every m >= 1 there
        const int i_f = vanishing_index(f, p);
        for (int m = 0; m <= 30; ++m) {
          bool zero = true;
          for (std::uint64_t md : mods)
            if (apm_mod(f, p, m, md) != 0) zero = false;
          const bool expect = i_f > 0 && (m + 1) % (i_f + 1) == 0;
          if (zero != expect) ok = false;
        }
      });
    }
    r.add("vanishing.pattern", ok, "a(p^m)=0 exactly at (m+1)=0 mod (i_f+1), m<=30");
  });

  std::mt19937_64 rng(r.opts.seed);

  r.check("multiplicativity.a_n", [&] {
    const int trials = full ? 10000 : 1000;
    bool ok = true;
    std::uniform_int_distribution<std::int64_t> dist(1, 10000);
    int done = 0;
    while (done < trials) {
      const std::int64_t m = dist(rng), n = dist(rng);
      if (std::gcd(m, n) != 1) continue;
      if (m * n > 100000000) continue;
      ++done;
      if (a_n(f32, m * n) != a_n(f32, m) * a_n(f32, n)) ok = false;
      if (a_n(f49, m * n) != a_n(f49, m) * a_n(f49, n)) ok = false;
    }
    r.add("multiplicativity.a_n", ok, std::to_string(trials) + " random coprime pairs");
  });

  r.check("apm_mod.matches_apm", [&] {
    const int trials = full ? 10000 : 1000;
    bool ok = true;
    std::uniform_int_distribution<std::int64_t> pd(0, 150), md(0, 12), qd(2, 1 << 30);
    for (int t = 0; t < trials; ++t) {
      std::int64_t p = pd(rng);
      while (!is_prime(static_cast<std::uint64_t>(p))) ++p;
      const int m = static_cast<int>(md(rng));
      const std::uint64_t q = static_cast<std::uint64_t>(qd(rng));
      std::int64_t exact;
      try {
        exact = apm(f32, p, m);
      } catch (const error&) {
        continue;  // out of 64-bit range; the modular path is the only route
      }
      const auto want = static_cast<std::uint64_t>(
          ((exact % static_cast<std::int64_t>(q)) + static_cast<std::int64_t>(q)) %
          static_cast<std::int64_t>(q));
      if (apm_mod(f32, p, m, q) != want) ok = false;
    }
    r.add("apm_mod.matches_apm", ok, std::to_string(trials) + " random (p, m, modulus) triples");
  });

  r.check("counts.bruteforce", [&] {
    const std::int64_t x = full ? 10000 : 2000;
    const std::vector<std::int64_t> poi = {5, 13};
    bool ok = true;
    std::string detail;
    for (const std::string label : {"32a", "49a"}) {
      const auto& f = forms.at(label);
      const auto& t = r.tables.at(label);
      const Brute b = brute_counts(f, x, 10, poi);
      SweepConfig cfg;
      cfg.y1 = 10;
      cfg.primes_of_interest = poi;
      cfg.threads = r.opts.threads;
      const auto snap = sweep_counts(f, t, {x}, cfg).snapshots[0];
      if (snap.m_f1 != b.m_f1 || snap.coprime != b.coprime || snap.n_y1 != b.n_y1) ok = false;
      for (std::size_t j = 0; j < poi.size(); ++j) {
        if (snap.pi_star[j] != b.pi_star.at(poi[j])) ok = false;
        if (snap.nu_sum[j] != b.nu_sum.at(poi[j])) ok = false;
        if (snap.g_p[j] != b.g_p.at(poi[j])) ok = false;
      }
      detail += label + " ";
    }
    r.add("counts.bruteforce", ok,
          "all six statistics vs direct a_n enumeration at x=" + std::to_string(x) + " on " +
              detail);
  });

  r.check("inclusion_exclusion.n_y1", [&] {
    const std::int64_t x = full ? 1000000 : 100000;
    bool ok = true;
    for (std::int64_t y1 : std::vector<std::int64_t>{5, 10}) {
      const std::int64_t direct = n_y1_count(f32, t32, x, y1);
      const std::int64_t ie = n_y1_inclusion_exclusion(f32, t32, x, y1);
      if (direct != ie) ok = false;
    }
    r.add("inclusion_exclusion.n_y1", ok,
          "direct N_y1 equals the Moebius sum over divisors of P_y1 at x=" + std::to_string(x));
  });

  r.check("nu.exchange_identity", [&] {
    const std::int64_t x = full ? 10000 : 1000;
    bool ok = true;
    for (std::int64_t p : {5, 13}) {
      const std::int64_t lhs = nu_sum(f32, t32, x, p);
      // opposite summation order: prime powers q^m with a(q^m) = 0 mod p,
      // counting n <= x with q^m || n and a(n) != 0
      std::int64_t rhs = 0;
      for (std::int64_t q = 2; q <= x; ++q) {
        if (!is_prime(static_cast<std::uint64_t>(q))) continue;
        std::int64_t qm = q;
        for (int m = 1; qm <= x; ++m, qm *= q) {
          if (apm(f32, q, m) % p == 0) {
            for (std::int64_t j = 1; j * qm <= x; ++j) {
              if (j % q == 0) continue;
              if (a_n(f32, j * qm) != 0) ++rhs;
            }
          }
          if (qm > x / q) break;
        }
      }
      if (lhs != rhs) ok = false;
    }
    r.add("nu.exchange_identity", ok,
          "both evaluation orders agree at x=" + std::to_string(x) + ", p in {5,13}");
  });

  r.check("segments.independence", [&] {
    const std::int64_t x = full ? 1000000 : 100000;
    std::vector<CountSnapshot> variants;
    for (std::int64_t seg : {std::int64_t(1) << 16, std::int64_t(1) << 20}) {
      for (int th : {1, 4}) {
        SweepConfig cfg;
        cfg.segment_size = seg;
        cfg.threads = th;
        variants.push_back(sweep_counts(f32, t32, {x}, cfg).snapshots[0]);
      }
    }
    bool ok = true;
    for (const auto& v : variants) {
      if (v.m_f1 != variants[0].m_f1 || v.coprime != variants[0].coprime ||
          v.n_y1 != variants[0].n_y1 || v.pi_star != variants[0].pi_star ||
          v.g_p != variants[0].g_p || v.nu_sum != variants[0].nu_sum)
        ok = false;
    }
    r.add("segments.independence", ok, "segment {2^16,2^20} x threads {1,4} all identical");
  });

  r.check("counts.monotone", [&] {
    std::vector<std::int64_t> cps;
    for (std::int64_t c = 10; c <= table_x; c *= 10) cps.push_back(c);
    SweepConfig cfg;
    cfg.threads = r.opts.threads;
    const auto snaps = sweep_counts(f32, t32, cps, cfg).snapshots;
    bool ok = true;
    for (std::size_t i = 1; i < snaps.size(); ++i) {
      if (snaps[i].m_f1 < snaps[i - 1].m_f1 || snaps[i].coprime < snaps[i - 1].coprime ||
          snaps[i].n_y1 < snaps[i - 1].n_y1)
        ok = false;
      for (std::size_t j = 0; j < snaps[i].pi_star.size(); ++j)
        if (snaps[i].pi_star[j] < snaps[i - 1].pi_star[j] ||
            snaps[i].g_p[j] < snaps[i - 1].g_p[j] || snaps[i].nu_sum[j] < snaps[i - 1].nu_sum[j])
          ok = false;
    }
    r.add("counts.monotone", ok, "every statistic nondecreasing across checkpoints");
  });

  r.check("pi_star.two_routes", [&] {
    SweepConfig cfg;
    cfg.threads = r.opts.threads;
    const auto res = sweep_counts(f32, t32, {table_x}, cfg);
    bool ok = true;
    for (std::size_t j = 0; j < cfg.primes_of_interest.size(); ++j)
      if (res.pi_star_sweep[j] != pi_star(f32, t32, table_x, cfg.primes_of_interest[j]))
        ok = false;
    r.add("pi_star.two_routes", ok, "n-side sweep equals direct table scan");
  });

  r.check("partition.g_p", [&] {
    const std::int64_t x = full ? 100000 : 20000;
    const double l2 = L2_x(static_cast<double>(x));
    const double eps = 0.1;
    const auto b1 = static_cast<std::int64_t>(std::pow(l2, 0.5 - eps));
    const auto b2 = static_cast<std::int64_t>(std::pow(l2, 1.0 + eps));
    SweepConfig cfg;
    cfg.threads = r.opts.threads;
    cfg.spf_ranges = {{2, b1 + 1}, {b1 + 1, b2}, {b2, x + 1}};
    const auto res = sweep_counts(f32, t32, {x}, cfg);
    const std::int64_t a123 =
        res.spf_range_counts[0] + res.spf_range_counts[1] + res.spf_range_counts[2];
    const bool ok = a123 == res.g_p_total && a123 == res.snapshots[0].coprime - 1;
    r.add("partition.g_p", ok,
          "A1+A2+A3 = sum of G_p = coprime-count minus n=1, at x=" + std::to_string(x));
  });

  r.check("L1.two_routes", [&] {
    bool ok = true;
    std::string detail;
    for (std::int64_t d : {-3, -4, -7, -8, -11, -19, -43, -67, -163}) {
      const double a = dirichlet_L1(d);
      const double b = dirichlet_L1_charsum(d);
      if (std::abs(a - b) / a > 1e-6) {
        ok = false;
        detail += std::to_string(d) + " off ";
      }
    }
    r.add("L1.two_routes", ok,
          detail.empty() ? "class number formula vs character sum <= 1e-6, all 9 discriminants"
                         : detail);
  });

  r.check("xi.closed_form_vs_series", [&] {
    bool ok = true;
    for_primes_up_to(97, [&](std::uint64_t up) {
      auto p = static_cast<std::int64_t>(up);
      for (int i : {0, 1, 2, 3, 5}) {
        for (int v = 1; v <= 6; ++v) {
          auto a0 = [&](int j) {  // 1 iff a(p^j) != 0 given vanishing index i
            return (i > 0 && (j + 1) % (i + 1) == 0) ? 0.0L : 1.0L;
          };
          long double num = 0, den = 0, pk = 1;
          for (int m = 0; m <= 200; ++m) {
            num += a0(m + v) / pk;
            den += a0(m) / pk;
            pk *= p;
          }
          const double series = static_cast<double>(num / den);
          const double closed = xi_pd1(p, v, i).to_double();
          if (std::abs(series - closed) > 1e-11) ok = false;
          // basic shape of the xi estimate: xi = a0(p^v) + O(1/p)
          if (std::abs(closed - static_cast<double>(a0(v))) > 2.0 / static_cast<double>(p))
            ok = false;
        }
        if (xi_pd1(p, 1, 0).to_double() != 1.0) ok = false;
        if (i == 1 && !(xi_pd1(p, 1, 1) == Rational(1, p))) ok = false;
      }
    });
    r.add("xi.closed_form_vs_series", ok,
          "closed form vs truncated Dirichlet ratio, p<=97, v<=6, all indices");
  });

  r.check("delta.exact_vs_bruteforce", [&] {
    bool ok = true;
    for (std::int64_t p : {3, 5, 7, 11, 13})
      for (CartanKind k : {CartanKind::SplitCartan, CartanKind::InertCartan}) {
        const Rational e = delta_exact(p, k), b = delta_bruteforce(p, k);
        if (!(e == b)) ok = false;
        // 1/(4p) <= delta <= 1/p
        if (!(Rational(1, 4 * p).to_double() <= b.to_double() &&
              b.to_double() <= Rational(1, p).to_double()))
          ok = false;
      }
    r.add("delta.exact_vs_bruteforce", ok, "GL2 enumeration confirms 1/(2(p-1)), 1/(2(p+1))");
  });

  r.check("bundle.identities", [&] {
    bool ok = true;
    for (const auto& [label, f] : forms) {
      const auto b = compute_constants(f, 100000, 20);
      if (b.omega_f != b.mu_f * b.mu2.to_double() * b.mu3.to_double()) ok = false;
      for (double v : {b.L1_chi, b.beta_K, b.mu_f, b.omega_f, b.u_f, b.c_f, b.U_f, b.U_f_alt})
        if (!(v > 0)) ok = false;
      // factor-wise telescoping: the inert half-product times the inverse
      // a(p)=0 product equals prod_{inert, p not | 6N} (1-1/p^2)^(-1/2) times
      // prod_{inert, p | 6N} (1-1/p^2)^(1/2)
      UfBreakdown bd;
      u_f(f, 100000, &bd);
      double telescoped = 0;
      for_primes_up_to(100000, [&](std::uint64_t up) {
        auto p = static_cast<std::int64_t>(up);
        if ((-f.disc_dK) % p == 0 || kronecker(f.disc_dK, p) != -1) return;
        const double lg = std::log1p(-1.0 / (double(p) * double(p)));
        telescoped += ((6 * f.level_N) % p == 0) ? 0.5 * lg : -0.5 * lg;
      });
      if (std::abs(telescoped - (bd.inert_half + bd.azero_inv)) > 1e-9) ok = false;
    }
    r.add("bundle.identities", ok, "omega = mu mu2 mu3, positivity, telescoped inert product");
  });

  r.check("bundle.determinism", [&] {
    const auto a = bundle_to_json(compute_constants(f32, 100000, 20));
    const auto b = bundle_to_json(compute_constants(f32, 100000, 20));
    r.add("bundle.determinism", a == b, "bit-identical bundle JSON across runs");
  });

  r.check("bundle.convergence", [&] {
    const std::int64_t b1 = full ? 1000000 : 100000;
    const std::int64_t b2 = full ? 10000000 : 200000;
    bool ok = true;
    const auto c1 = compute_constants(f32, b1, 20);
    const auto c2 = compute_constants(f32, b2, 20);
    const double tol = full ? 1e-5 : 1e-4;
    for (auto [x, y] : {std::pair{c1.beta_K, c2.beta_K},
                        {c1.mu_f, c2.mu_f},
                        {c1.u_f, c2.u_f},
                        {c1.U_f, c2.U_f}})
      if (std::abs(x - y) / std::abs(y) > tol) ok = false;
    r.add("bundle.convergence", ok,
          "constants at prime bound " + std::to_string(b1) + " vs " + std::to_string(b2) +
              " within " + fmt(tol));
  });

  r.check("mertens.trend", [&] {
    bool ok = true;
    std::string detail;
    if (full) {
      const auto& f = f32;
      const CoefficientTable big = build_table(f, 10000000, r.opts.threads);
      const double mu = mu_f(f, 10000000);
      double prev = 0;
      for (std::int64_t z : {100000, 1000000, 10000000}) {
        const double v =
            mertens_empirical(f, big, z) * std::sqrt(std::log(static_cast<double>(z)));
        if (std::abs(v - mu) / mu > 0.05) ok = false;
        if (prev > 0 && std::abs(v - prev) / prev > 0.02) ok = false;
        detail += fmt(v) + " ";
        prev = v;
      }
      detail += "vs mu_f=" + fmt(mu);
    } else {
      const double mu = mu_f(f32, 100000);
      const double v = mertens_empirical(f32, t32, 100000) * std::sqrt(std::log(100000.0));
      ok = std::abs(v - mu) / mu < 0.10;
      detail = fmt(v) + " vs mu_f=" + fmt(mu);
    }
    r.add("mertens.trend", ok, "sqrt(log z)-normalized Mertens product: " + detail);
  });

  r.check("prop22.bound_shape", [&] {
    bool ok = true;
    const double cap = 1.0;
    std::vector<std::int64_t> xs = full ? std::vector<std::int64_t>{100000, 1000000}
                                        : std::vector<std::int64_t>{100000};
    for (std::int64_t x : xs)
      for (std::int64_t p : {5, 13, 29}) {
        const double shape = static_cast<double>(pi_star(f32, t32, std::min(x, t32.x_max), p)) *
                             static_cast<double>(p) *
                             std::log(static_cast<double>(x) / (double(p) * double(p))) /
                             static_cast<double>(x);
        if (shape > cap) ok = false;
      }
    r.add("prop22.bound_shape", ok, "pi*(x,p) p log(x/p^2)/x stays below 1.0");
  });

  r.check("csv.determinism", [&] {
    namespace fs = std::filesystem;
    const std::int64_t x = full ? 1000000 : 100000;
    std::vector<std::string> dirs;
    for (int th : {1, 4}) {
      ExperimentConfig cfg;
      cfg.form_label = "32a";
      cfg.x_max = x;
      cfg.threads = th;
      cfg.output_dir =
          (fs::temp_directory_path() / ("cmcount_verify_t" + std::to_string(th))).string();
      run_count(cfg);
      dirs.push_back(cfg.output_dir);
    }
    bool ok = true;
    for (const char* name : {"snapshots.csv", "m_f1.csv", "coprime.csv", "n_y1.csv", "mertens.csv",
                             "pi_star.csv", "g_p.csv", "nu_sum.csv", "constants.json"}) {
      std::ifstream a(fs::path(dirs[0]) / name, std::ios::binary);
      std::ifstream b(fs::path(dirs[1]) / name, std::ios::binary);
      std::stringstream sa, sb;
      sa << a.rdbuf();
      sb << b.rdbuf();
      if (sa.str().empty() || sa.str() != sb.str()) ok = false;
    }
    for (const auto& d : dirs) fs::remove_all(d);
    r.add("csv.determinism", ok,
          "whole pipeline at x=" + std::to_string(x) + ": byte-identical output, 1 vs 4 threads");
  });

  r.check("csv.roundtrip", [&] {
    SweepConfig cfg;
    cfg.threads = r.opts.threads;
    const auto snaps = sweep_counts(f32, t32, {1000, 10000}, cfg).snapshots;
    std::ostringstream first;
    write_snapshot_csv(first, snaps);
    // parse back
    std::istringstream in(first.str());
    std::string line;
    std::getline(in, line);  // header
    std::vector<CountSnapshot> parsed;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string cell;
      std::vector<std::int64_t> vals;
      while (std::getline(ls, cell, ',')) vals.push_back(std::stoll(cell));
      CountSnapshot s;
      s.x = vals[0];
      s.m_f1 = vals[1];
      s.coprime = vals[2];
      s.n_y1 = vals[3];
      s.primes_of_interest = cfg.primes_of_interest;
      const std::size_t k = cfg.primes_of_interest.size();
      for (std::size_t j = 0; j < k; ++j) s.pi_star.push_back(vals[4 + j]);
      for (std::size_t j = 0; j < k; ++j) s.g_p.push_back(vals[4 + k + j]);
      for (std::size_t j = 0; j < k; ++j) s.nu_sum.push_back(vals[4 + 2 * k + j]);
      parsed.push_back(s);
    }
    std::ostringstream second;
    write_snapshot_csv(second, parsed);
    r.add("csv.roundtrip", first.str() == second.str(), "snapshot CSV parses and re-serializes");
  });

  if (full) {
    r.check("mf1.normalized_trend", [&] {
      const CoefficientTable big = build_table(f32, 10000000, r.opts.threads);
      SweepConfig cfg;
      cfg.threads = r.opts.threads;
      const auto snaps = sweep_counts(f32, big, {100000, 1000000, 10000000}, cfg).snapshots;
      bool ok = true;
      double prev = 0;
      std::string detail;
      for (const auto& s : snaps) {
        const double v = s.m_f1 *
                         std::sqrt(std::numbers::pi * std::log(static_cast<double>(s.x))) /
                         static_cast<double>(s.x);
        if (prev > 0 && std::abs(v - prev) / prev > 0.10) ok = false;
        detail += fmt(v) + " ";
        prev = v;
      }
      r.add("mf1.normalized_trend", ok, "M_f1(x) sqrt(pi log x)/x: " + detail);
    });

    r.check("delta.empirical", [&] {
      const CoefficientTable big = build_table(f32, 10000000, r.opts.threads);
      bool ok = true;
      std::string detail;
      for (std::int64_t p : {5, 13}) {
        const double d = delta_exact(p, cartan_kind(f32, p)).to_double();
        const double ratio = pi_star(f32, big, 10000000, p) / li_x(1e7);
        if (std::abs(ratio - d) > 0.25 * d) ok = false;
        detail += "p=" + std::to_string(p) + ":" + fmt(ratio / d) + " ";
      }
      r.add("delta.empirical", ok, "pi*(1e7,p)/Li vs delta(p), ratios: " + detail);
    });
  }

  r.check("error.contracts", [&] {
    bool ok = true;
    auto expect = [&](errc kind, auto&& fn) {
      try {
        fn();
        ok = false;
      } catch (const error& e) {
        if (e.kind() != kind) ok = false;
      }
    };
    expect(errc::bad_reduction_prime, [&] { ap_pointcount(f32, 2); });
    expect(errc::oracle_range_exceeded, [&] { ap_pointcount(f32, 1000003); });
    expect(errc::not_prime, [&] { ap_fast(f32, 10); });
    expect(errc::non_residue, [&] { tonelli_shanks(3, 7); });
    expect(errc::calibration_failed, [&] { calibrate_normalization(f32, 10); });
    expect(errc::overflow, [&] { apm(f32, 999983, 12); });
    expect(errc::overflow, [&] { a_n(f32, 2'000'000'000'000LL); });
    expect(errc::memory_budget_exceeded, [&] { build_table(f32, 1'000'000'000, 1); });
    expect(errc::y1_too_large, [&] { n_y1_inclusion_exclusion(f32, t32, 100, 100); });
    expect(errc::table_too_small, [&] { pi_star(f32, t32, t32.x_max + 1000, 5); });
    expect(errc::unsupported_prime, [&] { delta_exact(2, CartanKind::SplitCartan); });
    expect(errc::brute_force_range_exceeded,
           [&] { delta_bruteforce(17, CartanKind::SplitCartan); });
    expect(errc::not_calibrated, [&] { build_table(load_form("27a"), 100, 1); });
    r.add("error.contracts", ok, "every documented error raised with its kind");
  });
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opts) {
  if (opts.suite != "fast" && opts.suite != "full")
    fail(errc::invalid_config, "suite must be fast or full");
  Runner r;
  r.opts = opts;
  r.full = opts.suite == "full";
  run_checks(r);
  VerifyReport report;
  report.suite = opts.suite;
  report.seed = opts.seed;
  report.checks = std::move(r.results);
  return report;
}

}  // namespace cmcount

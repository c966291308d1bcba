#include "cmcount/sieve_counts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"

namespace cmcount {

std::int64_t CoefficientTable::index_of(std::int64_t p) const {
  if (p < 2) return -1;
  auto it = std::lower_bound(primes.begin(), primes.end(), static_cast<std::uint32_t>(p));
  if (it == primes.end() || *it != static_cast<std::uint32_t>(p)) return -1;
  return it - primes.begin();
}

std::int64_t CoefficientTable::a_of_prime(std::int64_t p) const {
  std::int64_t i = index_of(p);
  if (i < 0) fail(errc::table_too_small, "prime " + std::to_string(p) + " not in table");
  return a_p[static_cast<std::size_t>(i)];
}

CoefficientTable build_table(const CMFormSpec& form, std::int64_t x, int threads,
                             const TableBudget& budget) {
  if (x < 0) fail(errc::invalid_config, "negative table bound");
  if (x > budget.max_x)
    fail(errc::memory_budget_exceeded, "x=" + std::to_string(x) + " exceeds the budget of " +
                                           std::to_string(budget.max_x));
  if (!form.calibrated()) fail(errc::not_calibrated, form.label + " must be calibrated first");

  CoefficientTable t;
  t.x_max = x;
  t.primes = primes_up_to(static_cast<std::uint64_t>(x));
  const std::size_t n = t.primes.size();
  t.a_p.assign(n, 0);
  t.split_flags.assign(n, 0);

  threads = std::max(1, threads);
  const std::size_t chunk = 4096;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        auto p = static_cast<std::int64_t>(t.primes[i]);
        if (form.is_bad_prime(p)) continue;
        if ((-form.disc_dK) % p == 0) continue;
        if (kronecker(form.disc_dK, p) != 1) continue;
        t.split_flags[i] = 1;
        t.a_p[i] = static_cast<std::int32_t>(ap_fast_unchecked(form, p));
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return t;
}

std::int64_t CountSnapshot::pi_star_at(std::int64_t p) const {
  for (std::size_t i = 0; i < primes_of_interest.size(); ++i)
    if (primes_of_interest[i] == p) return pi_star[i];
  fail(errc::invalid_config, "p=" + std::to_string(p) + " not tracked in this snapshot");
}

std::int64_t CountSnapshot::g_p_at(std::int64_t p) const {
  for (std::size_t i = 0; i < primes_of_interest.size(); ++i)
    if (primes_of_interest[i] == p) return g_p[i];
  fail(errc::invalid_config, "p=" + std::to_string(p) + " not tracked in this snapshot");
}

std::int64_t CountSnapshot::nu_sum_at(std::int64_t p) const {
  for (std::size_t i = 0; i < primes_of_interest.size(); ++i)
    if (primes_of_interest[i] == p) return nu_sum[i];
  fail(errc::invalid_config, "p=" + std::to_string(p) + " not tracked in this snapshot");
}

namespace {

struct SievePrime {
  std::uint32_t p;
  std::int32_t a_p;
  std::uint8_t bad;
};

// per-bucket additive statistics; merged across segments and threads
struct Delta {
  std::int64_t m_f1 = 0, coprime = 0, n_y1 = 0, g_total = 0;
  std::vector<std::int64_t> g_p, nu_sum, pi_star_sweep, spf_range;

  explicit Delta(std::size_t k = 0, std::size_t r = 0)
      : g_p(k, 0), nu_sum(k, 0), pi_star_sweep(k, 0), spf_range(r, 0) {}

  void add(const Delta& o) {
    m_f1 += o.m_f1;
    coprime += o.coprime;
    n_y1 += o.n_y1;
    g_total += o.g_total;
    for (std::size_t i = 0; i < g_p.size(); ++i) {
      g_p[i] += o.g_p[i];
      nu_sum[i] += o.nu_sum[i];
      pi_star_sweep[i] += o.pi_star_sweep[i];
    }
    for (std::size_t i = 0; i < spf_range.size(); ++i) spf_range[i] += o.spf_range[i];
  }
};

}  // namespace

SweepResult sweep_counts(const CMFormSpec& form, const CoefficientTable& table,
                         const std::vector<std::int64_t>& checkpoints, const SweepConfig& cfg) {
  SweepResult result;
  if (checkpoints.empty()) return result;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1) fail(errc::invalid_config, "checkpoints must be >= 1");
    if (i && checkpoints[i] <= checkpoints[i - 1])
      fail(errc::invalid_config, "checkpoints must be strictly increasing");
  }
  const std::int64_t x_last = checkpoints.back();
  if (x_last > table.x_max)
    fail(errc::table_too_small, "sweep to " + std::to_string(x_last) + " needs a table beyond " +
                                    std::to_string(table.x_max));
  if (cfg.divisor < 1) fail(errc::invalid_config, "divisor must be >= 1");

  const auto& poi = cfg.primes_of_interest;
  const std::size_t k = poi.size();
  const std::size_t nranges = cfg.spf_ranges.size();
  const std::size_t nbuckets = checkpoints.size();

  // sieving primes <= sqrt(x_last), with their coefficients
  const auto root = static_cast<std::int64_t>(isqrt64(static_cast<std::uint64_t>(x_last)));
  std::vector<SievePrime> sieve;
  for (std::size_t i = 0; i < table.primes.size() && table.primes[i] <= root; ++i) {
    auto p = static_cast<std::int64_t>(table.primes[i]);
    sieve.push_back({table.primes[i], table.a_p[i], static_cast<std::uint8_t>(form.is_bad_prime(p))});
  }

  const std::int64_t seg = std::max<std::int64_t>(cfg.segment_size, 1 << 12);
  const std::int64_t nsegs = (x_last + seg - 1) / seg;  // segment s covers [1 + s*seg, ...)
  const int threads = std::max(1, cfg.threads);

  std::atomic<std::int64_t> next_seg{0};
  std::vector<std::vector<Delta>> local(static_cast<std::size_t>(threads));

  auto worker = [&](int tid) {
    auto& buckets = local[static_cast<std::size_t>(tid)];
    buckets.assign(nbuckets, Delta(k, nranges));
    std::vector<std::uint64_t> resid;
    std::vector<std::int64_t> acc;
    std::vector<std::uint32_t> spf;
    std::vector<std::uint8_t> nu;

    for (;;) {
      const std::int64_t s = next_seg.fetch_add(1);
      if (s >= nsegs) return;
      const std::int64_t L = 1 + s * seg;
      const std::int64_t R = std::min(x_last + 1, L + seg);
      const auto len = static_cast<std::size_t>(R - L);

      resid.assign(len, 0);
      acc.assign(len, 1);
      spf.assign(len, 0);
      if (k) nu.assign(len * k, 0);
      for (std::size_t i = 0; i < len; ++i) resid[i] = static_cast<std::uint64_t>(L) + i;

      const auto seg_root = isqrt64(static_cast<std::uint64_t>(R - 1));
      for (const auto& sp : sieve) {
        const std::uint64_t p = sp.p;
        if (p > seg_root) break;
        std::int64_t m0 = ((L + static_cast<std::int64_t>(p) - 1) / static_cast<std::int64_t>(p)) *
                          static_cast<std::int64_t>(p);
        for (std::int64_t m = m0; m < R; m += static_cast<std::int64_t>(p)) {
          const auto i = static_cast<std::size_t>(m - L);
          std::uint64_t r = resid[i];
          int e = 0;
          do {
            r /= p;
            ++e;
          } while (r % p == 0);
          resid[i] = r;
          if (!spf[i]) spf[i] = sp.p;
          std::int64_t apk;
          if (sp.bad) {
            apk = 0;  // additive reduction: a(p^e) = a(p)^e = 0
          } else if (e == 1) {
            apk = sp.a_p;
          } else {
            apk = apm_from_ap(static_cast<std::int64_t>(p), sp.a_p, e);
          }
          acc[i] *= apk;  // |prod a(q^e)| <= d(n) sqrt(n), far below 2^63 at sieve scale
          for (std::size_t j = 0; j < k; ++j)
            if (apk % poi[j] == 0) nu[i * k + j]++;
        }
      }

      // checkpoint bucket pointer for this segment
      std::size_t b = static_cast<std::size_t>(
          std::lower_bound(checkpoints.begin(), checkpoints.end(), L) - checkpoints.begin());

      for (std::size_t i = 0; i < len; ++i) {
        const std::int64_t n = L + static_cast<std::int64_t>(i);
        while (b < nbuckets && checkpoints[b] < n) ++b;
        if (b >= nbuckets) break;

        std::int64_t a = acc[i];
        const std::uint64_t r = resid[i];
        if (r > 1) {
          if (!spf[i]) spf[i] = static_cast<std::uint32_t>(r);  // n itself is prime
          const std::int64_t ar = table.a_p[static_cast<std::size_t>(
              std::lower_bound(table.primes.begin(), table.primes.end(),
                               static_cast<std::uint32_t>(r)) -
              table.primes.begin())];
          a *= ar;
          for (std::size_t j = 0; j < k; ++j)
            if (ar % poi[j] == 0) nu[i * k + j]++;
        }
        if (cfg.divisor > 1 && n % cfg.divisor != 0) continue;

        Delta& d = buckets[b];
        const bool nonzero = a != 0;
        const bool coprime =
            std::gcd(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(a < 0 ? -a : a)) == 1;
        const std::uint64_t spfv = spf[i] ? spf[i] : ~std::uint64_t(0);  // n=1 -> no prime factor

        if (nonzero) d.m_f1++;
        if (coprime) d.coprime++;
        const bool y1ok = cfg.y1_strict ? spfv > static_cast<std::uint64_t>(cfg.y1)
                                        : spfv >= static_cast<std::uint64_t>(cfg.y1);
        if (nonzero && y1ok) d.n_y1++;
        if (nonzero)
          for (std::size_t j = 0; j < k; ++j) d.nu_sum[j] += nu[i * k + j];
        if (coprime && n > 1) {
          d.g_total++;
          for (std::size_t j = 0; j < k; ++j)
            if (spf[i] == static_cast<std::uint64_t>(poi[j])) d.g_p[j]++;
          for (std::size_t j = 0; j < nranges; ++j)
            if (static_cast<std::int64_t>(spfv) >= cfg.spf_ranges[j].first &&
                static_cast<std::int64_t>(spfv) < cfg.spf_ranges[j].second)
              d.spf_range[j]++;
        }
        if (spf[i] == static_cast<std::uint64_t>(n) && nonzero)  // n prime
          for (std::size_t j = 0; j < k; ++j)
            if (a % poi[j] == 0) d.pi_star_sweep[j]++;
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // merge thread-locals, then prefix over buckets
  std::vector<Delta> merged(nbuckets, Delta(k, nranges));
  for (const auto& loc : local)
    for (std::size_t b = 0; b < loc.size(); ++b) merged[b].add(loc[b]);
  for (std::size_t b = 1; b < nbuckets; ++b) merged[b].add(merged[b - 1]);

  // per-checkpoint pi* by direct table scan (the n-side sweep value is kept
  // separately so the two routes can be compared)
  std::vector<std::vector<std::int64_t>> pistar_cp(nbuckets, std::vector<std::int64_t>(k, 0));
  {
    std::vector<std::int64_t> counts(k, 0);
    std::size_t b_scan = 0;
    for (std::size_t i = 0; i < table.primes.size() && b_scan < nbuckets; ++i) {
      const std::int64_t q = table.primes[i];
      while (b_scan < nbuckets && q > checkpoints[b_scan]) {
        pistar_cp[b_scan] = counts;
        ++b_scan;
      }
      if (b_scan >= nbuckets) break;
      const std::int64_t aq = table.a_p[i];
      if (aq != 0)
        for (std::size_t j = 0; j < k; ++j)
          if (aq % poi[j] == 0) counts[j]++;
    }
    while (b_scan < nbuckets) {
      pistar_cp[b_scan] = counts;
      ++b_scan;
    }
  }

  result.snapshots.resize(nbuckets);
  for (std::size_t b = 0; b < nbuckets; ++b) {
    CountSnapshot& snap = result.snapshots[b];
    snap.x = checkpoints[b];
    snap.m_f1 = merged[b].m_f1;
    snap.coprime = merged[b].coprime;
    snap.n_y1 = merged[b].n_y1;
    snap.primes_of_interest = poi;
    snap.pi_star = pistar_cp[b];
    snap.g_p = merged[b].g_p;
    snap.nu_sum = merged[b].nu_sum;
  }
  result.pi_star_sweep = merged.back().pi_star_sweep;
  result.g_p_total = merged.back().g_total;
  result.spf_range_counts = merged.back().spf_range;
  return result;
}

namespace {

CountSnapshot single_sweep(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                           SweepConfig cfg) {
  auto res = sweep_counts(form, table, {x}, cfg);
  return res.snapshots.at(0);
}

}  // namespace

std::int64_t count_nonvanishing(const CMFormSpec& form, const CoefficientTable& table,
                                std::int64_t x, std::int64_t d) {
  if (d < 1) fail(errc::invalid_config, "d must be >= 1");
  if (x < 1) return 0;
  SweepConfig cfg;
  cfg.divisor = d;
  cfg.primes_of_interest.clear();
  return single_sweep(form, table, x, cfg).m_f1;
}

std::int64_t count_coprime(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x) {
  if (x < 1) return 0;
  SweepConfig cfg;
  cfg.primes_of_interest.clear();
  return single_sweep(form, table, x, cfg).coprime;
}

std::int64_t n_y1_count(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                        std::int64_t y1, bool strict) {
  if (y1 < 2) fail(errc::invalid_config, "y1 must be >= 2");
  if (x < 1) return 0;
  SweepConfig cfg;
  cfg.y1 = y1;
  cfg.y1_strict = strict;
  cfg.primes_of_interest.clear();
  return single_sweep(form, table, x, cfg).n_y1;
}

std::int64_t nu_sum(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                    std::int64_t p) {
  if (!is_prime(static_cast<std::uint64_t>(p))) fail(errc::not_prime, std::to_string(p));
  if (x < 1) return 0;
  SweepConfig cfg;
  cfg.primes_of_interest = {p};
  return single_sweep(form, table, x, cfg).nu_sum[0];
}

std::int64_t g_p_count(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                       std::int64_t p) {
  if (!is_prime(static_cast<std::uint64_t>(p))) fail(errc::not_prime, std::to_string(p));
  if (x < 1) return 0;
  SweepConfig cfg;
  cfg.primes_of_interest = {p};
  return single_sweep(form, table, x, cfg).g_p[0];
}

std::int64_t pi_star(const CMFormSpec& form, const CoefficientTable& table, std::int64_t x,
                     std::int64_t p) {
  (void)form;
  if (!is_prime(static_cast<std::uint64_t>(p))) fail(errc::not_prime, std::to_string(p));
  if (x > table.x_max) fail(errc::table_too_small, "x beyond table");
  std::int64_t count = 0;
  for (std::size_t i = 0; i < table.primes.size(); ++i) {
    if (table.primes[i] > static_cast<std::uint64_t>(x)) break;
    const std::int64_t a = table.a_p[i];
    if (a != 0 && a % p == 0) ++count;
  }
  return count;
}

std::int64_t n_y1_inclusion_exclusion(const CMFormSpec& form, const CoefficientTable& table,
                                      std::int64_t x, std::int64_t y1) {
  if (y1 < 2) fail(errc::invalid_config, "y1 must be >= 2");
  if (y1 > 30)
    fail(errc::y1_too_large, "y1=" + std::to_string(y1) + " > 30: divisor enumeration capped");
  std::vector<std::int64_t> ps;
  for (std::int64_t p = 2; p < y1; ++p)
    if (is_prime(static_cast<std::uint64_t>(p))) ps.push_back(p);
  std::int64_t total = 0;
  const std::size_t subsets = std::size_t(1) << ps.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::int64_t d = 1;
    int bits = 0;
    for (std::size_t j = 0; j < ps.size(); ++j)
      if (mask & (std::size_t(1) << j)) {
        d *= ps[j];
        ++bits;
      }
    const std::int64_t term = count_nonvanishing(form, table, x, d);
    total += (bits % 2 == 0) ? term : -term;
  }
  return total;
}

}  // namespace cmcount

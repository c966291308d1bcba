#include "cmcount/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cmcount/arith.hpp"
#include "cmcount/errors.hpp"

#include "json.hpp"

namespace cmcount {

namespace {

// compensated accumulation of log terms, deterministic in ascending prime order
struct KahanSum {
  double sum = 0, c = 0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make_reduced(__int128 n, __int128 d) {
  if (d == 0) fail(errc::invalid_config, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min() ||
      d > std::numeric_limits<std::int64_t>::max())
    fail(errc::overflow, "rational out of 64-bit range");
  Rational r;
  r.num = static_cast<std::int64_t>(n);
  r.den = static_cast<std::int64_t>(d);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make_reduced(n, d); }

Rational Rational::operator+(const Rational& o) const {
  return make_reduced(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                      static_cast<__int128>(den) * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return make_reduced(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                      static_cast<__int128>(den) * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  return make_reduced(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num == 0) fail(errc::invalid_config, "division by zero rational");
  return make_reduced(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num);
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

int units_for_disc(std::int64_t d) { return d == -4 ? 4 : (d == -3 ? 6 : 2); }

void require_catalog_disc(std::int64_t d) {
  if (!is_class_number_one_disc(d))
    fail(errc::non_fundamental_discriminant,
         std::to_string(d) + " is not a class-number-1 fundamental discriminant");
}

std::vector<std::int64_t> prime_divisors_of(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

double dirichlet_L1(std::int64_t disc) {
  require_catalog_disc(disc);
  const double w = units_for_disc(disc);
  const double h = 1.0;
  return 2.0 * std::numbers::pi * h / (w * std::sqrt(static_cast<double>(-disc)));
}

double dirichlet_L1_charsum(std::int64_t disc, std::int64_t blocks) {
  require_catalog_disc(disc);
  if (blocks < 10) fail(errc::invalid_config, "need at least 10 blocks");
  const std::int64_t q = -disc;
  std::vector<double> chi(static_cast<std::size_t>(q));
  for (std::int64_t a = 0; a < q; ++a) chi[static_cast<std::size_t>(a)] = kronecker(disc, a);

  KahanSum sum;
  for (std::int64_t m = 0; m < blocks; ++m) {
    const double base = static_cast<double>(m) * q;
    for (std::int64_t a = 1; a <= q; ++a) {
      const double c = chi[static_cast<std::size_t>(a % q)];
      if (c != 0) sum.add(c / (base + a));
    }
  }
  // analytic tail: sum_{m >= M} sum_a chi(a)/(mq+a) expanded in powers of 1/(mq);
  // S_j = sum_a chi(a) a^j, H_s = sum_{m >= M} m^{-s} via Euler-Maclaurin
  double S1 = 0, S2 = 0, S3 = 0;
  for (std::int64_t a = 1; a < q; ++a) {
    const double c = chi[static_cast<std::size_t>(a)];
    S1 += c * a;
    S2 += c * a * a;
    S3 += c * a * a * a;
  }
  const double M = static_cast<double>(blocks);
  const double H2 = 1.0 / M + 1.0 / (2 * M * M) + 1.0 / (6 * M * M * M);
  const double H3 = 1.0 / (2 * M * M) + 1.0 / (2 * M * M * M) + 1.0 / (4 * M * M * M * M);
  const double H4 = 1.0 / (3 * M * M * M) + 1.0 / (2 * M * M * M * M);
  const double qd = static_cast<double>(q);
  const double tail =
      -S1 / (qd * qd) * H2 + S2 / (qd * qd * qd) * H3 - S3 / (qd * qd * qd * qd) * H4;
  return sum.sum + tail;
}

double inert_product(std::int64_t disc, std::int64_t prime_bound, double* tail) {
  require_catalog_disc(disc);
  KahanSum logs;
  for_primes_up_to(static_cast<std::uint64_t>(prime_bound), [&](std::uint64_t up) {
    auto p = static_cast<std::int64_t>(up);
    if ((-disc) % p == 0) return;
    if (kronecker(disc, p) != -1) return;
    logs.add(std::log1p(-1.0 / (static_cast<double>(p) * static_cast<double>(p))));
  });
  if (tail) *tail = prime_bound >= 2 ? 1.1 / static_cast<double>(prime_bound) : 1.0;
  return std::exp(logs.sum);
}

double beta_K(std::int64_t disc, std::int64_t prime_bound) {
  const double L1 = dirichlet_L1(disc);
  const double inert = inert_product(disc, prime_bound);
  double ram = 1.0;
  for (std::int64_t p : prime_divisors_of(-disc)) ram *= 1.0 - 1.0 / static_cast<double>(p);
  return std::exp(-std::numbers::egamma / 2) / std::sqrt(L1) / std::sqrt(inert) / std::sqrt(ram);
}

double mu_f(const CMFormSpec& form, std::int64_t prime_bound) {
  double adjust = 1.0;
  for (std::int64_t p : prime_divisors_of(6 * form.level_N))
    if (splitting_type(form, p) == SplitType::Split) adjust /= 1.0 - 1.0 / static_cast<double>(p);
  return beta_K(form.disc_dK, prime_bound) * adjust;
}

namespace {

std::int64_t a_small(const CMFormSpec& form, std::int64_t p) {
  return form.is_bad_prime(p) ? 0 : ap_fast(form, p);
}

}  // namespace

Rational mu2_factor(const CMFormSpec& form) {
  return a_small(form, 2) != 0 ? Rational(1, 2) : Rational(1, 1);
}

Rational mu3_factor(const CMFormSpec& form) {
  return a_small(form, 3) != 0 ? Rational(2, 3) : Rational(1, 1);
}

double omega_f(const CMFormSpec& form, std::int64_t prime_bound) {
  return mu_f(form, prime_bound) * mu2_factor(form).to_double() * mu3_factor(form).to_double();
}

double mertens_empirical(const CMFormSpec& form, const CoefficientTable& table, std::int64_t z) {
  (void)form;  // the product reads the table; the form fixes its provenance
  if (z > table.x_max + 1) fail(errc::table_too_small, "z beyond table");
  KahanSum logs;
  for (std::size_t i = 0; i < table.primes.size(); ++i) {
    const std::int64_t p = table.primes[i];
    if (p >= z) break;
    if (p >= 5 && table.a_p[i] != 0) logs.add(std::log1p(-1.0 / static_cast<double>(p)));
  }
  return std::exp(logs.sum);
}

Rational xi_pd1(std::int64_t p, int v, int vanishing_idx) {
  if (v < 1) fail(errc::invalid_config, "v = ord_p d must be >= 1");
  const int i = vanishing_idx;
  if (i == 0) return Rational(1, 1);
  const int k0 = (v + i + 1) / (i + 1);  // smallest integer >= (v+1)/(i+1)
  if (i == 1) {
    const int e = v - 2 * k0 + 1;  // 0 when v odd, -1 when v even
    return e == 0 ? Rational(1, p) : Rational(1, 1);
  }
  // (1 + p + ... + p^i - p^e) / (p + ... + p^i)
  const int e = v - (k0 - 1) * (i + 1);
  __int128 geom = 0, pk = 1;
  for (int j = 0; j <= i; ++j) {
    geom += pk;
    pk *= p;
  }
  __int128 pe = 1;
  for (int j = 0; j < e; ++j) pe *= p;
  return make_reduced(geom - pe, geom - 1);
}

Rational xi_pd1(const CMFormSpec& form, std::int64_t p, int v) {
  return xi_pd1(p, v, vanishing_index(form, p));
}

double phi_p1(const CMFormSpec& form, std::int64_t p) {
  if (form.is_bad_prime(p)) return 1.0;
  const int i = vanishing_index(form, p);
  const double pd = static_cast<double>(p);
  if (i == 0) return 1.0 / (1.0 - 1.0 / pd);
  const double pi1 = std::pow(pd, i + 1);
  return pd * (1.0 / (pd - 1.0) - 1.0 / (pi1 - 1.0));
}

double u_f(const CMFormSpec& form, std::int64_t prime_bound, UfBreakdown* breakdown) {
  if (!form.calibrated()) fail(errc::not_calibrated, form.label);
  if (prime_bound < 10) fail(errc::invalid_config, "prime bound too small");

  KahanSum inert_half, azero_inv;
  const std::int64_t sixN = 6 * form.level_N;
  for_primes_up_to(static_cast<std::uint64_t>(prime_bound), [&](std::uint64_t up) {
    auto p = static_cast<std::int64_t>(up);
    if ((-form.disc_dK) % p == 0) return;
    if (kronecker(form.disc_dK, p) != -1) return;  // inert primes only
    const double lg = std::log1p(-1.0 / (static_cast<double>(p) * static_cast<double>(p)));
    inert_half.add(0.5 * lg);
    // a(p) = 0 and p good, p not dividing 6N: by Deuring exactly the inert p here
    if (sixN % p != 0) azero_inv.add(-lg);
  });

  double ramified_half = 0, split_6N = 0, phi_6N = 0;
  for (std::int64_t p : prime_divisors_of(-form.disc_dK))
    ramified_half += 0.5 * std::log1p(-1.0 / static_cast<double>(p));
  for (std::int64_t p : prime_divisors_of(sixN)) {
    if (splitting_type(form, p) == SplitType::Split)
      split_6N += std::log1p(-1.0 / static_cast<double>(p));
    phi_6N += std::log(phi_p1(form, p));
  }
  // primes with vanishing index > 1 would contribute (1 - 1/p) phi_p(1) factors
  // away from 6N, but an integer trace forces a(p)^2 in {2p, 3p} to have p in
  // {2, 3}, and 2, 3 always divide 6N: the product is empty.

  const double L1 = dirichlet_L1(form.disc_dK);
  const double log_u = 0.5 * std::log(L1) + inert_half.sum + azero_inv.sum + ramified_half +
                       split_6N + phi_6N;
  if (breakdown) {
    breakdown->L1_half = 0.5 * std::log(L1);
    breakdown->inert_half = inert_half.sum;
    breakdown->azero_inv = azero_inv.sum;
    breakdown->ramified_half = ramified_half;
    breakdown->split_6N = split_6N;
    breakdown->phi_6N = phi_6N;
    breakdown->tail = 1.0 / static_cast<double>(prime_bound);
  }
  return std::exp(log_u);
}

UfCf U_f_and_cf(const CMFormSpec& form, std::int64_t y1, std::int64_t prime_bound) {
  if (y1 > 30) fail(errc::y1_too_large, "y1=" + std::to_string(y1) + " > 30");
  if (y1 < 2) fail(errc::invalid_config, "y1 must be >= 2");

  double c_f = 1.0;
  double extra = 1.0;
  for (std::int64_t p = 2; p < y1; ++p) {
    if (!is_prime(static_cast<std::uint64_t>(p))) continue;
    const int i = vanishing_index(form, p);
    const double pd = static_cast<double>(p);
    if (p >= 5 && i >= 2) c_f /= 1.0 - 1.0 / pd;
    if (i == 1) c_f *= 1.0 - 1.0 / (pd * pd);
    if (i > 1) extra *= 1.0 - xi_pd1(p, 1, i).to_double() / pd;
    if (p <= 3 && i == 0) extra *= 1.0 - 1.0 / pd;
  }
  UfCf out;
  out.c_f = c_f;
  const double base = u_f(form, prime_bound) * mu_f(form, prime_bound) * c_f * extra;
  out.U_f = base / std::sqrt(std::numbers::pi);
  out.U_f_alt = base;
  return out;
}

const char* cartan_name(CartanKind k) noexcept {
  return k == CartanKind::SplitCartan ? "split" : "nonsplit";
}

namespace {

void require_cartan_prime(std::int64_t p) {
  if (p == 2) fail(errc::unsupported_prime, "even prime Cartan is not supported");
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) fail(errc::not_prime, std::to_string(p));
}

}  // namespace

Rational delta_exact(std::int64_t p, CartanKind kind) {
  require_cartan_prime(p);
  // confirmed against delta_bruteforce for p in [3, 13] before freezing
  return kind == CartanKind::SplitCartan ? Rational(1, 2 * (p - 1)) : Rational(1, 2 * (p + 1));
}

Rational delta_bruteforce(std::int64_t p, CartanKind kind) {
  require_cartan_prime(p);
  if (p > 13) fail(errc::brute_force_range_exceeded, "GL2 enumeration capped at p = 13");

  const auto up = static_cast<std::uint64_t>(p);
  auto idx = [up](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return ((a * up + b) * up + c) * up + d;
  };

  // the Cartan subgroup: split torus, or F_{p^2}^* embedded via a non-residue
  std::vector<std::uint8_t> in_cartan(up * up * up * up, 0);
  std::vector<std::array<std::uint64_t, 4>> cartan;
  std::int64_t trace_zero = 0;
  if (kind == CartanKind::SplitCartan) {
    for (std::uint64_t a = 1; a < up; ++a)
      for (std::uint64_t d = 1; d < up; ++d) {
        in_cartan[idx(a, 0, 0, d)] = 1;
        cartan.push_back({a, 0, 0, d});
        if ((a + d) % up == 0) ++trace_zero;
      }
  } else {
    std::uint64_t eps = 2;
    while (pow_mod(eps, (up - 1) / 2, up) != up - 1) ++eps;
    for (std::uint64_t a = 0; a < up; ++a)
      for (std::uint64_t b = 0; b < up; ++b) {
        if (a == 0 && b == 0) continue;
        in_cartan[idx(a, eps * b % up, b, a)] = 1;
        cartan.push_back({a, eps * b % up, b, a});
        if ((2 * a) % up == 0) ++trace_zero;
      }
  }

  // normalizer: all g in GL_2 with g C g^-1 = C
  std::int64_t normalizer = 0;
  for (std::uint64_t a = 0; a < up; ++a)
    for (std::uint64_t b = 0; b < up; ++b)
      for (std::uint64_t c = 0; c < up; ++c)
        for (std::uint64_t d = 0; d < up; ++d) {
          const std::uint64_t det = (a * d % up + up - b * c % up) % up;
          if (det == 0) continue;
          const std::uint64_t inv_det = pow_mod(det, up - 2, up);
          bool ok = true;
          for (const auto& m : cartan) {
            // g m g^{-1} via the adjugate: g m adj(g) * det^{-1}
            const std::uint64_t e = m[0], f = m[1], g2 = m[2], h = m[3];
            const std::uint64_t t00 = (a * e + b * g2) % up, t01 = (a * f + b * h) % up;
            const std::uint64_t t10 = (c * e + d * g2) % up, t11 = (c * f + d * h) % up;
            // adj(g) = [[d, -b], [-c, a]]
            const std::uint64_t r00 = (t00 * d % up + t01 * (up - c) % up) % up;
            const std::uint64_t r01 = (t00 * (up - b) % up + t01 * a % up) % up;
            const std::uint64_t r10 = (t10 * d % up + t11 * (up - c) % up) % up;
            const std::uint64_t r11 = (t10 * (up - b) % up + t11 * a % up) % up;
            if (!in_cartan[idx(r00 * inv_det % up, r01 * inv_det % up, r10 * inv_det % up,
                               r11 * inv_det % up)]) {
              ok = false;
              break;
            }
          }
          if (ok) ++normalizer;
        }
  return Rational(trace_zero, normalizer);
}

CartanKind cartan_kind(const CMFormSpec& form, std::int64_t p) {
  const SplitType st = splitting_type(form, p);
  if (st == SplitType::Ramified)
    fail(errc::unsupported_prime, std::to_string(p) + " ramifies in K");
  return st == SplitType::Split ? CartanKind::SplitCartan : CartanKind::InertCartan;
}

ConstantsBundle compute_constants(const CMFormSpec& form, std::int64_t prime_bound,
                                  std::int64_t y1, const std::vector<std::int64_t>& delta_primes) {
  ConstantsBundle b;
  b.label = form.label;
  b.prime_bound = prime_bound;
  b.y1 = y1;
  b.charsum_blocks = 20000;
  b.L1_chi = dirichlet_L1(form.disc_dK);
  b.L1_chi_charsum = dirichlet_L1_charsum(form.disc_dK, b.charsum_blocks);
  double tail = 0;
  inert_product(form.disc_dK, prime_bound, &tail);
  b.inert_tail = tail;
  b.beta_K = beta_K(form.disc_dK, prime_bound);
  b.mu_f = mu_f(form, prime_bound);
  b.mu2 = mu2_factor(form);
  b.mu3 = mu3_factor(form);
  b.omega_f = b.mu_f * b.mu2.to_double() * b.mu3.to_double();
  UfBreakdown bd;
  b.u_f = u_f(form, prime_bound, &bd);
  b.u_f_tail = bd.tail;
  const UfCf ucf = U_f_and_cf(form, y1, prime_bound);
  b.c_f = ucf.c_f;
  b.U_f = ucf.U_f;
  b.U_f_alt = ucf.U_f_alt;
  for (std::int64_t p : delta_primes) {
    DeltaEntry e;
    e.p = p;
    e.kind = cartan_kind(form, p);
    e.delta = delta_exact(p, e.kind);
    b.deltas.push_back(e);
  }
  return b;
}

std::string bundle_to_json(const ConstantsBundle& b) {
  nlohmann::ordered_json j;
  j["label"] = b.label;
  j["truncation"] = {{"prime_bound", b.prime_bound},
                     {"charsum_blocks", b.charsum_blocks},
                     {"inert_tail", b.inert_tail},
                     {"u_f_tail", b.u_f_tail},
                     {"y1", b.y1}};
  j["L1_chi"] = b.L1_chi;
  j["L1_chi_charsum"] = b.L1_chi_charsum;
  j["beta_K"] = b.beta_K;
  j["mu_f"] = b.mu_f;
  j["mu2"] = {{"num", b.mu2.num}, {"den", b.mu2.den}};
  j["mu3"] = {{"num", b.mu3.num}, {"den", b.mu3.den}};
  j["omega_f"] = b.omega_f;
  j["u_f"] = b.u_f;
  j["c_f"] = b.c_f;
  j["U_f"] = b.U_f;
  j["U_f_alt"] = b.U_f_alt;
  auto deltas = nlohmann::ordered_json::array();
  for (const auto& e : b.deltas)
    deltas.push_back({{"p", e.p},
                      {"cartan", cartan_name(e.kind)},
                      {"num", e.delta.num},
                      {"den", e.delta.den}});
  j["delta"] = deltas;
  return j.dump(2);
}

}  // namespace cmcount

#pragma once

#include <cstdint>
#include <string>

#include "cmcount/sieve_counts.hpp"

namespace cmcount {

/// Exact rational on int64, normalized with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);
  static Rational integer(std::int64_t n) { return Rational(n, 1); }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  double to_double() const { return double(num) / double(den); }
  std::string str() const;
};

/// L(1, chi_K) by the class number formula 2 pi h / (w sqrt(|d|)).
/// d must be one of the nine class-number-1 fundamental discriminants.
double dirichlet_L1(std::int64_t disc);

/// Independent route: truncated character sum with an analytic tail
/// correction; `blocks` full periods are summed directly.
double dirichlet_L1_charsum(std::int64_t disc, std::int64_t blocks = 20000);

/// prod over inert p <= bound of (1 - 1/p^2); tail bound on the neglected
/// log-mass written to *tail when given.
double inert_product(std::int64_t disc, std::int64_t prime_bound, double* tail = nullptr);

double beta_K(std::int64_t disc, std::int64_t prime_bound);
double mu_f(const CMFormSpec& form, std::int64_t prime_bound);
Rational mu2_factor(const CMFormSpec& form);  // 1/2 when a(2) != 0, else 1
Rational mu3_factor(const CMFormSpec& form);  // 2/3 when a(3) != 0, else 1
double omega_f(const CMFormSpec& form, std::int64_t prime_bound);

/// Exact finite product over split good p in [5, z) of (1 - 1/p).
double mertens_empirical(const CMFormSpec& form, const CoefficientTable& table, std::int64_t z);

/// xi_{p,d}(1) as an exact rational; depends on d only through v = ord_p d.
Rational xi_pd1(std::int64_t p, int v, int vanishing_idx);
Rational xi_pd1(const CMFormSpec& form, std::int64_t p, int v);

/// phi_p(1) for a good prime (1/(1-1/p) when the index is 0, else the
/// closed form p (1/(p-1) - 1/(p^{i+1}-1))). Equals 1 for p | N.
double phi_p1(const CMFormSpec& form, std::int64_t p);

struct UfBreakdown {
  double L1_half = 0;          // log L^(1/2)
  double inert_half = 0;       // log prod_I (1-1/p^2)^(1/2), truncated
  double azero_inv = 0;        // log prod_{a(p)=0, p not | 6N} (1-1/p^2)^(-1), truncated
  double ramified_half = 0;    // log prod_R (1-1/p)^(1/2)
  double split_6N = 0;         // log prod_{split, p|6N} (1-1/p)
  double phi_6N = 0;           // log prod_{p|6N} phi_p(1)
  double tail = 0;             // bound on the neglected log-mass
};

/// u_f = L(1,chi)^(1/2) prod_I (1-1/p^2)^(1/2) C(1).
double u_f(const CMFormSpec& form, std::int64_t prime_bound, UfBreakdown* breakdown = nullptr);

struct UfCf {
  double c_f = 0;
  double U_f = 0;      // with the 1/sqrt(pi) folded in
  double U_f_alt = 0;  // without it; both normalizations are reported
};

UfCf U_f_and_cf(const CMFormSpec& form, std::int64_t y1, std::int64_t prime_bound);

enum class CartanKind { SplitCartan, InertCartan };
const char* cartan_name(CartanKind k) noexcept;

/// Closed form density: 1/(2(p-1)) split, 1/(2(p+1)) inert. Odd prime p >= 3.
Rational delta_exact(std::int64_t p, CartanKind kind);

/// Exhaustive GL_2(F_p) enumeration: trace-zero elements of the Cartan over
/// the order of its normalizer. p in [3, 13].
Rational delta_bruteforce(std::int64_t p, CartanKind kind);

CartanKind cartan_kind(const CMFormSpec& form, std::int64_t p);

struct DeltaEntry {
  std::int64_t p = 0;
  CartanKind kind = CartanKind::SplitCartan;
  Rational delta;
};

/// Every explicit constant with its truncation metadata.
struct ConstantsBundle {
  std::string label;
  std::int64_t prime_bound = 0;
  std::int64_t y1 = 0;
  std::int64_t charsum_blocks = 0;
  double L1_chi = 0;
  double L1_chi_charsum = 0;
  double beta_K = 0;
  double mu_f = 0;
  Rational mu2, mu3;
  double omega_f = 0;
  double u_f = 0;
  double c_f = 0;
  double U_f = 0;
  double U_f_alt = 0;
  double inert_tail = 0;  // tail bound for the inert Euler products
  double u_f_tail = 0;
  std::vector<DeltaEntry> deltas;
};

ConstantsBundle compute_constants(const CMFormSpec& form, std::int64_t prime_bound,
                                  std::int64_t y1,
                                  const std::vector<std::int64_t>& delta_primes = {5, 13});

std::string bundle_to_json(const ConstantsBundle& b);

}  // namespace cmcount

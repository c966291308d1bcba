#include "cmcount/arith.hpp"

#include <cmath>
#include <numbers>

#include "cmcount/errors.hpp"

namespace cmcount {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t r = 1;
  base %= m;
  while (exp) {
    if (exp & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return r;
}

namespace {

bool miller_rabin_once(std::uint64_t n, std::uint64_t a, std::uint64_t d, int s) {
  std::uint64_t x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p :
       {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic base set for 64-bit inputs
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (!miller_rabin_once(n, a, d, s)) return false;
  }
  return true;
}

std::uint64_t isqrt64(std::uint64_t n) {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

int kronecker(std::int64_t a, std::int64_t n) {
  // (2/n) for odd n, indexed by n mod 8
  static const int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
  auto mod8 = [](std::int64_t x) { return static_cast<int>(((x % 8) + 8) % 8); };

  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if (a % 2 == 0 && n % 2 == 0) return 0;

  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  int k = (v % 2 == 0) ? 1 : tab2[mod8(a)];
  if (n < 0) {
    n = -n;
    if (a < 0) k = -k;
  }
  if (n == 1) return k;
  // n odd, n > 1: Jacobi symbol, periodic in a with period n
  a = ((a % n) + n) % n;
  while (a != 0) {
    v = 0;
    while (a % 2 == 0) {
      a /= 2;
      ++v;
    }
    if (v % 2 == 1) k *= tab2[mod8(n)];
    if ((a % 4 == 3) && (n % 4 == 3)) k = -k;  // reciprocity, a and n odd positive
    std::int64_t r = n % a;
    n = a;
    a = r;
  }
  return (n == 1) ? k : 0;
}

std::uint64_t tonelli_shanks(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (pow_mod(a, (p - 1) / 2, p) != 1)
    fail(errc::non_residue, std::to_string(a) + " is not a square mod " + std::to_string(p));
  if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);

  std::uint64_t q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  std::uint64_t z = 2;
  while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;

  std::uint64_t m = s;
  std::uint64_t c = pow_mod(z, q, p);
  std::uint64_t t = pow_mod(a, q, p);
  std::uint64_t r = pow_mod(a, (q + 1) / 2, p);
  while (t != 1) {
    std::uint64_t i = 0;
    std::uint64_t t2 = t;
    while (t2 != 1) {
      t2 = mul_mod(t2, t2, p);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mul_mod(b, b, p);
    m = i;
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    r = mul_mod(r, b, p);
  }
  return r;
}

std::optional<std::pair<std::int64_t, std::int64_t>> cornacchia(std::uint64_t p, std::uint64_t D) {
  if (D == 0 || p % 2 == 0 || D % p == 0) fail(errc::invalid_config, "cornacchia: p odd, p must not divide D");
  std::uint64_t neg_d = (p - D % p) % p;
  std::uint64_t r;
  try {
    r = tonelli_shanks(neg_d, p);
  } catch (const error&) {
    return std::nullopt;  // -D is a non-residue: p not represented
  }
  if (r < p - r) r = p - r;
  std::uint64_t a = p, b = r;
  std::uint64_t limit = isqrt64(p);
  while (b > limit) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  std::uint64_t c = p - b * b;
  if (c % D != 0) return std::nullopt;
  std::uint64_t e = c / D;
  std::uint64_t s = isqrt64(e);
  if (s * s != e) return std::nullopt;
  return std::make_pair(static_cast<std::int64_t>(b), static_cast<std::int64_t>(s));
}

std::optional<std::pair<std::int64_t, std::int64_t>> cornacchia_4p(std::uint64_t p,
                                                                   std::uint64_t D) {
  if (p == 2) {  // tiny: enumerate u^2 + D v^2 = 8
    for (std::uint64_t u = 0; u * u <= 8; ++u) {
      std::uint64_t rem = 8 - u * u;
      if (rem % D) continue;
      std::uint64_t s = isqrt64(rem / D);
      if (s * s == rem / D)
        return std::make_pair(static_cast<std::int64_t>(u), static_cast<std::int64_t>(s));
    }
    return std::nullopt;
  }
  if (p % 2 == 0 || D % p == 0) fail(errc::invalid_config, "cornacchia_4p: p odd, p must not divide D");
  std::uint64_t neg_d = (p - D % p) % p;
  std::uint64_t x0;
  try {
    x0 = tonelli_shanks(neg_d, p);
  } catch (const error&) {
    return std::nullopt;
  }
  if ((x0 & 1) != (D & 1)) x0 = p - x0;  // match parity of d so x0^2 = d mod 4p
  std::uint64_t a = 2 * p, b = x0;
  std::uint64_t limit = isqrt64(4 * p);
  while (b > limit) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  std::uint64_t c = 4 * p - b * b;
  if (c % D != 0) return std::nullopt;
  std::uint64_t e = c / D;
  std::uint64_t s = isqrt64(e);
  if (s * s != e) return std::nullopt;
  return std::make_pair(static_cast<std::int64_t>(b), static_cast<std::int64_t>(s));
}

void for_primes_up_to(std::uint64_t bound, const std::function<void(std::uint64_t)>& fn) {
  if (bound < 2) return;
  fn(2);
  if (bound < 3) return;
  // odd-only bitmap
  std::uint64_t half = (bound - 1) / 2;  // index i <-> 2i+3
  std::vector<std::uint8_t> composite(half, 0);
  std::uint64_t root = isqrt64(bound);
  for (std::uint64_t i = 0; 2 * i + 3 <= root; ++i) {
    if (composite[i]) continue;
    std::uint64_t q = 2 * i + 3;
    for (std::uint64_t j = (q * q - 3) / 2; j < half; j += q) composite[j] = 1;
  }
  for (std::uint64_t i = 0; i < half; ++i)
    if (!composite[i]) fn(2 * i + 3);
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint32_t> out;
  if (bound >= 2) out.reserve(static_cast<std::size_t>(bound / (std::log(double(bound)) + 1e-9) * 1.2) + 16);
  for_primes_up_to(bound, [&](std::uint64_t p) { out.push_back(static_cast<std::uint32_t>(p)); });
  return out;
}

double li_x(double x) {
  // li via the rapidly converging series gamma + ln ln x + sum (ln x)^k / (k k!)
  auto li = [](double t) {
    double lt = std::log(t);
    double sum = std::numbers::egamma + std::log(lt);
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= lt / k;
      double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  if (x <= 2) return 0;
  return li(x) - li(2.0);
}

}  // namespace cmcount

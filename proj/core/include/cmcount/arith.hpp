#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cmcount {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(std::uint64_t n);

std::uint64_t isqrt64(std::uint64_t n);

/// Kronecker symbol (a/n), binary algorithm, any integer arguments.
int kronecker(std::int64_t a, std::int64_t n);

/// Square root of a mod odd prime p. Throws errc::non_residue if none exists.
std::uint64_t tonelli_shanks(std::uint64_t a, std::uint64_t p);

/// One solution of a^2 + D b^2 = p with a > 0, b >= 0, or nullopt if p is not
/// represented by the principal form. p an odd prime, 0 < D, p does not divide D.
std::optional<std::pair<std::int64_t, std::int64_t>> cornacchia(std::uint64_t p, std::uint64_t D);

/// One solution of u^2 + D v^2 = 4p with u, v >= 0 (modified Cornacchia,
/// D = |d_K| for an imaginary quadratic discriminant). nullopt if unsolvable.
std::optional<std::pair<std::int64_t, std::int64_t>> cornacchia_4p(std::uint64_t p,
                                                                   std::uint64_t D);

/// Calls fn(p) for every prime p <= bound, in increasing order.
void for_primes_up_to(std::uint64_t bound, const std::function<void(std::uint64_t)>& fn);

std::vector<std::uint32_t> primes_up_to(std::uint64_t bound);

/// Logarithmic integral Li(x) = integral from 2 to x of dt/log t.
double li_x(double x);

}  // namespace cmcount

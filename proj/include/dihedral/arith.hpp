#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace dihedral {

using Integer = mpz_class;
using Rational = mpq_class;

struct PrimePower {
    Integer prime;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Sorted ascending by prime.
using Factorization = std::vector<PrimePower>;

Factorization factorize(const Integer& n);
Integer product(const Factorization& f);

// Kronecker symbol (d/q) for q >= 1.
int kronecker(const Integer& d, const Integer& q);

bool is_fundamental(const Integer& d);
bool is_discriminant(const Integer& d);   // d = 0, 1 mod 4 and not a square
bool is_prime(const Integer& n);
bool is_squarefree(const Integer& n);

// Exponent of the prime q in n, n != 0.
unsigned valuation(const Integer& n, const Integer& q);

Integer isqrt(const Integer& n);
bool is_square(const Integer& n);
Integer ipow(const Integer& base, unsigned long exponent);
Integer pos_mod(const Integer& a, const Integer& m);
// Some s with s^2 = a mod q for an odd prime q and a square a (Tonelli-Shanks).
Integer sqrt_mod_prime(const Integer& a, const Integer& q);
Integer binomial(unsigned long n, unsigned long k);

std::string to_string(const Integer& n);
std::string to_string(const Rational& q);
bool fits_int64(const Integer& n);
std::int64_t to_int64(const Integer& n);   // throws InvalidInput when out of range

// Primes <= bound by a plain sieve.
std::vector<std::uint32_t> primes_up_to(std::uint32_t bound);

} // namespace dihedral

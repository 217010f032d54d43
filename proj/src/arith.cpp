#include "dihedral/arith.hpp"

#include <algorithm>
#include <map>

#include "dihedral/errors.hpp"

namespace dihedral {

namespace {

constexpr unsigned long kTrialBound = 1000000;

// Brent's variant of Pollard rho; n odd composite. Seeded deterministically.
Integer rho_factor(const Integer& n)
{
    for (unsigned long c = 1;; ++c) {
        Integer y = 2, x, g = 1, q = 1, ys;
        unsigned long r = 1;
        const unsigned long m = 128;
        auto f = [&](const Integer& v) {
            Integer t = v * v + c;
            mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
            return t;
        };
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = f(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    Integer diff = abs(x - y);
                    q = (q * diff) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                Integer diff = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split_into(const Integer& n, std::map<Integer, unsigned>& out)
{
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Integer g = rho_factor(n);
    split_into(g, out);
    split_into(n / g, out);
}

} // namespace

Factorization factorize(const Integer& n)
{
    if (n < 1) throw InvalidInput("factorize: n must be positive");
    std::map<Integer, unsigned> found;
    Integer rest = n;
    for (unsigned long q = 2; q <= kTrialBound; q += (q == 2 ? 1 : 2)) {
        if (Integer(q) * q > rest) break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), q)) {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), q);
            ++e;
        }
        if (e) found[Integer(q)] += e;
    }
    split_into(rest, found);
    Factorization f;
    f.reserve(found.size());
    for (auto& [q, e] : found) f.push_back({q, e});
    return f;
}

Integer product(const Factorization& f)
{
    Integer n = 1;
    for (const auto& pp : f) n *= ipow(pp.prime, pp.exponent);
    return n;
}

int kronecker(const Integer& d, const Integer& q)
{
    if (q < 1) throw InvalidInput("kronecker: q must be positive");
    return mpz_kronecker(d.get_mpz_t(), q.get_mpz_t());
}

bool is_prime(const Integer& n)
{
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

bool is_squarefree(const Integer& n)
{
    if (n == 0) return false;
    Integer a = abs(n);
    for (const auto& pp : factorize(a))
        if (pp.exponent > 1) return false;
    return true;
}

bool is_discriminant(const Integer& d)
{
    Integer r = pos_mod(d, 4);
    if (r != 0 && r != 1) return false;
    return !(d >= 0 && is_square(d));
}

bool is_fundamental(const Integer& d)
{
    if (d == 0 || d == 1) return false;
    Integer r = pos_mod(d, 4);
    if (r == 1) return is_squarefree(d);
    if (r != 0) return false;
    Integer m = d / 4;
    Integer s = pos_mod(m, 4);
    return (s == 2 || s == 3) && is_squarefree(m);
}

unsigned valuation(const Integer& n, const Integer& q)
{
    if (n == 0) throw InvalidInput("valuation of zero");
    if (q < 2) throw InvalidInput("valuation base must be >= 2");
    Integer t = n;
    return static_cast<unsigned>(mpz_remove(t.get_mpz_t(), n.get_mpz_t(), q.get_mpz_t()));
}

Integer isqrt(const Integer& n)
{
    if (n < 0) throw InvalidInput("isqrt of negative");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const Integer& n)
{
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

Integer ipow(const Integer& base, unsigned long exponent)
{
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

Integer pos_mod(const Integer& a, const Integer& m)
{
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer sqrt_mod_prime(const Integer& a_in, const Integer& q)
{
    const Integer a = pos_mod(a_in, q);
    if (a == 0) return 0;
    if (mpz_legendre(a.get_mpz_t(), q.get_mpz_t()) != 1) throw InvalidInput("not a square modulo " + q.get_str());
    Integer odd = q - 1;
    unsigned long twos = mpz_scan1(odd.get_mpz_t(), 0);
    odd >>= twos;
    Integer z = 2;
    while (mpz_legendre(z.get_mpz_t(), q.get_mpz_t()) != -1) ++z;
    Integer c, x, t;
    const Integer half = (odd + 1) / 2;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), odd.get_mpz_t(), q.get_mpz_t());
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), half.get_mpz_t(), q.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), odd.get_mpz_t(), q.get_mpz_t());
    unsigned long m = twos;
    while (t != 1) {
        unsigned long i = 0;
        for (Integer tt = t; tt != 1; tt = tt * tt % q) ++i;
        Integer b = c;
        for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % q;
        x = x * b % q;
        c = b * b % q;
        t = t * c % q;
        m = i;
    }
    return x;
}

Integer binomial(unsigned long n, unsigned long k)
{
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

std::string to_string(const Integer& n) { return n.get_str(); }

std::string to_string(const Rational& q)
{
    Rational c = q;
    c.canonicalize();
    return c.get_den() == 1 ? c.get_num().get_str() : c.get_str();
}

bool fits_int64(const Integer& n)
{
    static_assert(sizeof(long) == sizeof(std::int64_t), "LP64 platform expected");
    return mpz_fits_slong_p(n.get_mpz_t()) != 0;
}

std::int64_t to_int64(const Integer& n)
{
    if (!fits_int64(n)) throw InvalidInput("integer does not fit in 64 bits: " + n.get_str());
    return mpz_get_si(n.get_mpz_t());
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t bound)
{
    std::vector<std::uint32_t> out;
    if (bound < 2) return out;
    std::vector<bool> composite(bound + 1, false);
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
    }
    return out;
}

} // namespace dihedral

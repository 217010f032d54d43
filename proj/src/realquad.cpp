#include "dihedral/realquad.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "dihedral/errors.hpp"
#include "dihedral/residues.hpp"

namespace dihedral {

namespace {

void check_real(const Integer& d)
{
    if (d <= 0 || !is_fundamental(d)) throw InvalidInput("expected a positive fundamental discriminant, got " + d.get_str());
}

double log_of(const QuadInt& eta)
{
    // eta = (x + y sqrt d)/2 and |eta'| = 1/eta, so eta = x - eta' is within 1/x of x.
    if (mpz_sizeinbase(eta.x.get_mpz_t(), 2) < 50) {
        long double x = eta.x.get_d(), y = eta.y.get_d(), d = eta.d.get_d();
        return static_cast<double>(std::log((x + y * std::sqrt(d)) / 2));
    }
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, eta.x.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

Residue mul_mod(const Residue& x, const Residue& y, const Integer& d, const Integer& n0, const Integer& m)
{
    Integer bb = x.b * y.b;
    return {pos_mod(x.a * y.a - n0 * bb, m), pos_mod(x.a * y.b + x.b * y.a + d * bb, m)};
}

Residue pow_mod(Residue x, Integer e, const Integer& d, const Integer& n0, const Integer& m)
{
    Residue r{1, 0};
    x = {pos_mod(x.a, m), pos_mod(x.b, m)};
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mul_mod(r, x, d, n0, m);
        e >>= 1;
        if (e > 0) x = mul_mod(x, x, d, n0, m);
    }
    return r;
}

} // namespace

UnitData fundamental_unit(const Integer& d)
{
    check_real(d);
    const Integer root = isqrt(d);
    // Largest b < sqrt(d) with b = d mod 2; (b + sqrt d)/2 is reduced and generates O.
    Integer b = root;
    if (pos_mod(b - d, 2) != 0) b -= 1;
    const Integer p0 = b, q0 = 2;
    Integer P = p0, Q = q0;
    Integer B_prev = 0, B_cur = 1;   // convergent denominators B_{k-1}, B_k, starting at k = 0
    unsigned period = 0;
    for (;;) {
        Integer a = (P + root) / Q;
        Integer P_next = a * Q - P;
        Integer Q_next = (d - P_next * P_next) / Q;
        P = P_next;
        Q = Q_next;
        ++period;
        if (P == p0 && Q == q0) break;
        Integer a_next = (P + root) / Q;
        Integer B_next = a_next * B_cur + B_prev;
        B_prev = B_cur;
        B_cur = B_next;
    }
    UnitData u;
    u.d = d;
    u.period = period;
    u.eta = QuadInt{B_cur * b + 2 * B_prev, B_cur, d};
    Integer n = u.eta.norm();
    require(n == 1 || n == -1, "continued fraction produced a non-unit");
    u.norm = n == 1 ? 1 : -1;
    u.regulator = log_of(u.eta);
    return u;
}

Integer unit_index(const Integer& d, const Integer& c)
{
    check_real(d);
    if (c < 1) throw InvalidInput("unit_index: conductor must be positive");
    if (c == 1) return 1;
    const QuadInt eta = fundamental_unit(d).eta;
    const Residue base = to_residue(eta);
    const Integer n0 = (d * d - d) / 4;
    // The order of eta in U(O/cO)/U(Z/cZ) divides the order of that group.
    Integer order = 1;
    for (const PrimePower& pe : factorize(c)) {
        const Integer& q = pe.prime;
        Integer part = ipow(q, pe.exponent - 1);
        switch (splitting(d, q)) {
        case Splitting::Split: part *= q - 1; break;
        case Splitting::Inert: part *= q + 1; break;
        case Splitting::Ramified: part *= q; break;
        }
        order *= part;
    }
    auto in_order = [&](const Integer& k) { return pow_mod(base, k, d, n0, c).b == 0; };
    require(in_order(order), "unit power does not land in the suborder");
    for (const PrimePower& pe : factorize(order)) {
        for (unsigned i = 0; i < pe.exponent; ++i) {
            Integer smaller = order / pe.prime;
            if (!in_order(smaller)) break;
            order = smaller;
        }
    }
    return order;
}

unsigned euler_quotient_valuation(const Integer& d, const Integer& q, int p)
{
    const Integer pp = p;
    const int k = kronecker(d, pp);
    if (q == pp * pp) {
        if (p == 3 && pos_mod(d, 9) == 6) return 2;
        if (k != 0) return 1;
        throw InvalidInput("p^2 is not an admissible conductor here");
    }
    if (q == pp) {
        if (k == 0) return 1;
        throw InvalidInput("p is an admissible conductor only when p divides d");
    }
    if (!is_prime(q)) throw InvalidInput("euler_quotient_valuation: q must be a prime, p or p^2");
    const int kq = kronecker(d, q);
    const Integer r = pos_mod(q, pp);
    if (kq == 1 && r == 1) return valuation(q - 1, pp);
    if (kq == -1 && r == pp - 1) return valuation(q + 1, pp);
    throw InvalidInput("q = " + q.get_str() + " is not " + std::to_string(p) + "-admissible over " + d.get_str());
}

int rqc_defect(const Integer& d, const Integer& q, int p)
{
    check_real(d);
    if (real_p_rank(d, p) != 0)
        throw Unsupported("the regulator quotient criterion needs p-class rank 0");
    const unsigned ve = euler_quotient_valuation(d, q, p);
    const unsigned vi = valuation(unit_index(d, q), p);
    if (p == 3 && q == 9 && pos_mod(d, 9) == 6) {
        require(vi <= 1, "irregular unit index has 3-valuation above 1");
        return static_cast<int>(vi);
    }
    return vi < ve ? 0 : 1;
}

Integer narrow_class_number(const Integer& d)
{
    check_real(d);
    if (!fits_int64(d) || d > Integer(1) << 40) throw Unsupported("discriminant too large for cycle enumeration");
    using i64 = std::int64_t;
    const i64 disc = to_int64(d);
    const i64 root = to_int64(isqrt(d));
    // Reduced forms: 0 < b < sqrt d, sqrt d - b < 2|a| < sqrt d + b.
    auto reduced = [&](i64 a, i64 b) {
        if (b <= 0 || b > root) return false;
        i64 two_a = 2 * (a < 0 ? -a : a);
        // Strict inequalities against the irrational sqrt d.
        return (root - b < two_a) && (two_a <= root + b);
    };
    std::set<std::tuple<i64, i64, i64>> forms;
    for (i64 b = (disc & 1); b <= root; b += 2) {
        if (b == 0) continue;
        i64 n = (disc - b * b) / 4;   // -a c
        for (i64 a = 1; a * a <= n; ++a) {
            if (n % a) continue;
            for (i64 x : {a, n / a}) {
                for (i64 s : {1, -1}) {
                    i64 aa = s * x, cc = -n / aa;
                    if (std::gcd(std::gcd(aa, b), cc) != 1) continue;
                    if (reduced(aa, b)) forms.emplace(aa, b, cc);
                }
            }
        }
    }
    // Cycles under (a, b, c) -> (c, b', a'), b' = -b mod 2c, sqrt d - 2|c| < b' < sqrt d.
    std::set<std::tuple<i64, i64, i64>> seen;
    i64 cycles = 0;
    for (const auto& f : forms) {
        if (seen.count(f)) continue;
        ++cycles;
        auto cur = f;
        while (!seen.count(cur)) {
            seen.insert(cur);
            auto [a, b, c] = cur;
            i64 two_c = 2 * (c < 0 ? -c : c);
            i64 bn = root - (((root + b) % two_c) + two_c) % two_c;
            i64 an = (bn * bn - disc) / (4 * c);
            cur = {c, bn, an};
            require(forms.count(cur) == 1, "reduction cycle left the reduced set");
        }
    }
    return cycles;
}

Integer real_class_number(const Integer& d)
{
    Integer hplus = narrow_class_number(d);
    return fundamental_unit(d).norm == -1 ? hplus : hplus / 2;
}

int real_p_rank(const Integer& d, int p)
{
    unsigned v = valuation(real_class_number(d), p);
    if (v == 0) return 0;
    if (v == 1) return 1;
    throw Unsupported("p-class rank of real field " + d.get_str() + " needs the class group structure");
}

} // namespace dihedral

#include "dihedral/quadforms.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "dihedral/errors.hpp"
#include "form_core.hpp"

namespace dihedral {

using detail::FormW;
using detail::i128;

namespace {

// Class groups are enumerated on machine words; beyond this bound the
// enumeration itself is far out of reach anyway.
const Integer kMaxEnumerableDisc = Integer(1) << 50;

FormW<Integer> widen(const Form& f) { return {f.a, f.b, f.c}; }
Form narrow(const FormW<Integer>& f) { return {f.a, f.b, f.c}; }

void check_negative_disc(const Integer& disc)
{
    if (disc >= 0) throw InvalidInput("positive definite forms need a negative discriminant");
    Integer r = pos_mod(disc, 4);
    if (r != 0 && r != 1) throw InvalidInput("discriminant must be 0 or 1 mod 4: " + disc.get_str());
}

struct F64 {
    std::int64_t a, b, c;
};

bool form_less(std::int64_t a1, std::int64_t b1, std::int64_t a2, std::int64_t b2)
{
    auto key = [](std::int64_t a, std::int64_t b) { return std::tuple(a, b < 0 ? -b : b, b < 0); };
    return key(a1, b1) < key(a2, b2);
}

std::vector<F64> enumerate_reduced(std::int64_t disc)
{
    std::vector<F64> out;
    const std::int64_t nd = -disc;
    const std::int64_t parity = nd & 1;
    for (std::int64_t a = 1; 3 * a * a <= nd; ++a) {
        const std::int64_t four_a = 4 * a;
        for (std::int64_t b = parity; b <= a; b += 2) {
            const std::int64_t num = b * b + nd;
            if (num % four_a != 0) continue;
            const std::int64_t c = num / four_a;
            if (c < a) continue;
            if (std::gcd(std::gcd(a, b), c) != 1) continue;
            out.push_back({a, b, c});
            if (b > 0 && b < a && c > a) out.push_back({a, -b, c});
        }
    }
    std::sort(out.begin(), out.end(), [](const F64& x, const F64& y) { return form_less(x.a, x.b, y.a, y.b); });
    return out;
}

// Reduced forms with an index for table lookups; the group law is evaluated on demand.
class FormTable {
public:
    explicit FormTable(std::int64_t disc) : disc_(disc), forms_(enumerate_reduced(disc))
    {
        index_.reserve(forms_.size() * 2);
        for (std::uint32_t i = 0; i < forms_.size(); ++i) index_.emplace(key(forms_[i].a, forms_[i].b), i);
        identity_ = lookup(1, disc & 1);
    }

    std::uint32_t size() const { return static_cast<std::uint32_t>(forms_.size()); }
    std::uint32_t identity() const { return identity_; }
    const F64& form(std::uint32_t i) const { return forms_[i]; }

    std::uint32_t op(std::uint32_t i, std::uint32_t j) const
    {
        const F64& x = forms_[i];
        const F64& y = forms_[j];
        FormW<i128> r = detail::compose_raw<i128>({x.a, x.b, x.c}, {y.a, y.b, y.c});
        detail::reduce(r);
        return lookup(static_cast<std::int64_t>(r.a), static_cast<std::int64_t>(r.b));
    }

    std::uint32_t pow(std::uint32_t i, std::uint64_t n) const
    {
        std::uint32_t result = identity_, base = i;
        while (n) {
            if (n & 1) result = op(result, base);
            n >>= 1;
            if (n) base = op(base, base);
        }
        return result;
    }

private:
    static std::uint64_t key(std::int64_t a, std::int64_t b)
    {
        return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint32_t>(static_cast<std::int32_t>(b));
    }
    std::uint32_t lookup(std::int64_t a, std::int64_t b) const
    {
        auto it = index_.find(key(a, b));
        if (it == index_.end())
            throw InvariantViolation("composite form missing from the reduced table, disc " + std::to_string(disc_));
        return it->second;
    }

    std::int64_t disc_;
    std::vector<F64> forms_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::uint32_t identity_ = 0;
};

struct SylowPart {
    std::uint64_t ell = 0;
    std::vector<std::uint64_t> orders;   // non-increasing
    std::vector<std::uint32_t> gens;
};

std::vector<std::pair<std::uint64_t, unsigned>> small_factor(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    for (std::uint64_t q = 2; q * q <= n; ++q) {
        unsigned e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        if (e) f.emplace_back(q, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

SylowPart sylow_structure(const FormTable& t, std::uint64_t h, std::uint64_t ell, unsigned a)
{
    std::uint64_t size = 1;
    for (unsigned i = 0; i < a; ++i) size *= ell;
    const std::uint64_t cofactor = h / size;
    const std::uint32_t id = t.identity();

    // The Sylow subgroup as an explicit set.
    std::vector<char> in(t.size(), 0);
    std::vector<std::uint32_t> sylow{id};
    in[id] = 1;
    for (std::uint32_t g = 0; g < t.size() && sylow.size() < size; ++g) {
        std::uint32_t x = t.pow(g, cofactor);
        if (in[x]) continue;
        const std::vector<std::uint32_t> base = sylow;
        for (std::uint32_t cur = x; !in[cur]; cur = t.op(cur, x)) {
            for (std::uint32_t y : base) {
                std::uint32_t z = t.op(cur, y);
                if (!in[z]) {
                    in[z] = 1;
                    sylow.push_back(z);
                }
            }
        }
    }
    require(sylow.size() == size, "Sylow subgroup has the wrong order");

    // Greedy basis: an element of maximal order modulo the span so far, corrected
    // by the span so that its order equals its order in the quotient.
    SylowPart part;
    part.ell = ell;
    std::vector<std::int32_t> pos(t.size(), -1);
    std::vector<std::uint32_t> span{id};
    std::vector<std::vector<std::uint64_t>> coord{{}};
    pos[id] = 0;
    while (span.size() < size) {
        std::uint32_t best_x = id, best_y = id;
        unsigned best_k = 0;
        for (std::uint32_t x : sylow) {
            if (pos[x] >= 0) continue;
            std::uint32_t y = x;
            unsigned k = 0;
            while (pos[y] < 0) {
                y = t.pow(y, ell);
                ++k;
            }
            if (k > best_k) {
                best_k = k;
                best_x = x;
                best_y = y;
            }
        }
        std::uint64_t ord = 1;
        for (unsigned i = 0; i < best_k; ++i) ord *= ell;
        const std::vector<std::uint64_t> cs = coord[pos[best_y]];
        std::uint32_t gen = best_x;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            require(cs[j] % ord == 0, "basis correction is not divisible");
            std::uint64_t e = (cs[j] / ord) % part.orders[j];
            if (e) gen = t.op(gen, t.pow(part.gens[j], part.orders[j] - e));
        }
        require(t.pow(gen, ord) == id, "corrected generator has the wrong order");

        const std::size_t old = span.size();
        std::uint32_t cur = gen;
        for (std::uint64_t i = 1; i < ord; ++i) {
            for (std::size_t s = 0; s < old; ++s) {
                std::uint32_t z = t.op(cur, span[s]);
                require(pos[z] < 0, "span enumeration revisited an element");
                pos[z] = static_cast<std::int32_t>(span.size());
                span.push_back(z);
                std::vector<std::uint64_t> c = coord[s];
                c.push_back(i);
                coord.push_back(std::move(c));
            }
            cur = t.op(cur, gen);
        }
        for (std::size_t s = 0; s < old; ++s) coord[s].push_back(0);
        part.gens.push_back(gen);
        part.orders.push_back(ord);
    }
    return part;
}

Form to_form(const F64& f) { return {Integer(static_cast<long>(f.a)), Integer(static_cast<long>(f.b)), Integer(static_cast<long>(f.c))}; }

ClassGroup structure_of(const FormTable& t, const Integer& disc)
{
    ClassGroup g;
    g.discriminant = disc;
    g.h = t.size();
    std::vector<SylowPart> parts;
    for (auto [ell, a] : small_factor(g.h)) parts.push_back(sylow_structure(t, g.h, ell, a));

    std::size_t rank = 0;
    for (const auto& part : parts) rank = std::max(rank, part.orders.size());
    // Invariant factor i (largest first) collects the i-th largest cyclic factor of every Sylow part.
    std::vector<std::uint64_t> divs(rank, 1);
    std::vector<std::uint32_t> gens(rank, t.identity());
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < part.orders.size(); ++i) {
            divs[i] *= part.orders[i];
            gens[i] = t.op(gens[i], part.gens[i]);
        }
    }
    for (std::size_t i = rank; i-- > 0;) {
        g.divisors.push_back(divs[i]);
        g.generators.push_back(to_form(t.form(gens[i])));
    }
    return g;
}

std::int64_t enumerable(const Integer& disc)
{
    check_negative_disc(disc);
    if (-disc > kMaxEnumerableDisc) throw Unsupported("discriminant too large for form enumeration: " + disc.get_str());
    return to_int64(disc);
}

} // namespace

bool Form::is_reduced() const
{
    Integer ab = abs(b);
    if (!(ab <= a && a <= c)) return false;
    if ((ab == a || a == c) && b < 0) return false;
    return true;
}

std::string Form::to_string() const
{
    return "(" + a.get_str() + "," + b.get_str() + "," + c.get_str() + ")";
}

Form principal_form(const Integer& disc)
{
    check_negative_disc(disc);
    Integer b = pos_mod(disc, 2);
    return {1, b, (b * b - disc) / 4};
}

Form reduce(Form f)
{
    if (f.a <= 0) throw InvalidInput("reduce: form is not positive definite");
    FormW<Integer> w = widen(f);
    detail::reduce(w);
    return narrow(w);
}

Form inverse(const Form& f) { return reduce({f.a, -f.b, f.c}); }

Form compose(const Form& f, const Form& g)
{
    if (f.discriminant() != g.discriminant()) throw InvalidInput("compose: discriminant mismatch");
    FormW<Integer> r = detail::compose_raw(widen(f), widen(g));
    detail::reduce(r);
    return narrow(r);
}

Form power(const Form& f, const Integer& n)
{
    if (n < 0) return power(inverse(f), -n);
    Form result = principal_form(f.discriminant());
    Form base = reduce(f);
    Integer e = n;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = compose(result, base);
        e >>= 1;
        if (e > 0) base = compose(base, base);
    }
    return result;
}

bool is_principal(const Form& f) { return reduce(f).a == 1; }

std::vector<Form> reduced_forms(const Integer& disc)
{
    std::vector<Form> out;
    for (const F64& f : enumerate_reduced(enumerable(disc))) out.push_back(to_form(f));
    return out;
}

int ClassGroup::p_rank(int p) const
{
    if (!is_prime(p)) throw InvalidInput("p_rank: " + std::to_string(p) + " is not prime");
    int r = 0;
    for (std::uint64_t d : divisors)
        if (d % static_cast<std::uint64_t>(p) == 0) ++r;
    return r;
}

ClassGroup class_group_of_discriminant(const Integer& disc)
{
    FormTable t(enumerable(disc));
    return structure_of(t, disc);
}

ClassGroup class_group(const Integer& d)
{
    if (d >= 0) throw InvalidInput("class_group: real discriminants are handled by the real quadratic module");
    if (!is_fundamental(d)) throw InvalidInput("class_group: not a fundamental discriminant: " + d.get_str());
    return class_group_of_discriminant(d);
}

int p_rank(const Integer& d, int p) { return class_group(d).p_rank(p); }

int ring_class_rank(const Integer& d, const Integer& c, int p)
{
    if (d >= 0) throw InvalidInput("ring_class_rank: d must be negative");
    if (!is_fundamental(d)) throw InvalidInput("ring_class_rank: d must be fundamental");
    if (c < 1) throw InvalidInput("ring_class_rank: conductor must be positive");
    return class_group_of_discriminant(c * c * d).p_rank(p);
}

PTorsion p_torsion(const ClassGroup& g, int p)
{
    PTorsion out;
    out.p = p;
    std::vector<Form> tors;
    for (std::size_t i = 0; i < g.divisors.size(); ++i)
        if (g.divisors[i] % static_cast<std::uint64_t>(p) == 0)
            tors.push_back(power(g.generators[i], Integer(static_cast<unsigned long>(g.divisors[i] / p))));
    const std::size_t rank = tors.size();

    // Every element with its exponent vector over tors.
    struct Entry {
        Form form;
        std::vector<int> exps;
    };
    std::vector<Entry> entries{{principal_form(g.discriminant), std::vector<int>(rank, 0)}};
    for (std::size_t i = 0; i < rank; ++i) {
        const std::size_t old = entries.size();
        Form step = tors[i];
        Form cur = step;
        for (int k = 1; k < p; ++k) {
            for (std::size_t s = 0; s < old; ++s) {
                Entry e{compose(entries[s].form, cur), entries[s].exps};
                e.exps[i] = k;
                entries.push_back(std::move(e));
            }
            cur = compose(cur, step);
        }
    }
    std::stable_sort(entries.begin() + 1, entries.end(), [](const Entry& x, const Entry& y) {
        auto key = [](const Form& f) { return std::tuple(f.a, abs(f.b), f.b < 0); };
        return key(x.form) < key(y.form);
    });

    // Greedy basis in canonical order, independence tested by Gaussian elimination mod p.
    std::vector<std::vector<int>> echelon;   // rows with distinct pivots
    auto reduce_row = [&](std::vector<int> v) {
        for (const auto& row : echelon) {
            std::size_t piv = 0;
            while (row[piv] == 0) ++piv;
            if (v[piv] == 0) continue;
            int inv = 1;
            while ((inv * row[piv]) % p != 1) ++inv;
            int f = (v[piv] * inv) % p;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] = ((v[j] - f * row[j]) % p + p) % p;
        }
        return v;
    };
    for (std::size_t i = 1; i < entries.size() && out.basis.size() < rank; ++i) {
        std::vector<int> v = reduce_row(entries[i].exps);
        if (std::all_of(v.begin(), v.end(), [](int x) { return x == 0; })) continue;
        echelon.push_back(v);
        out.basis.push_back(entries[i].form);
    }
    for (auto& e : entries) out.elements.push_back(std::move(e.form));
    return out;
}

// ---------------------------------------------------------------------------
// Quadratic integers

bool QuadInt::is_integral() const
{
    if (pos_mod(x - y * d, 2) != 0) return false;
    return detail::divides(Integer(4), Integer(x * x - y * y * d));
}

std::string QuadInt::to_string() const { return "(" + x.get_str() + "," + y.get_str() + ")"; }

QuadInt operator*(const QuadInt& s, const QuadInt& t)
{
    if (s.d != t.d) throw InvalidInput("QuadInt product across different fields");
    Integer x = (s.x * t.x + s.y * t.y * s.d) / 2;
    Integer y = (s.x * t.y + t.x * s.y) / 2;
    return {x, y, s.d};
}

QuadInt qpow(QuadInt base, unsigned long e)
{
    QuadInt result{2, 0, base.d};
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

QuadInt rational(const Integer& n, const Integer& d) { return {2 * n, 0, d}; }

// ---------------------------------------------------------------------------
// Represented primes and Selmer generators

namespace {

bool admissible_r(const Integer& r, const Integer& forbidden, const std::vector<Integer>& exclude)
{
    if (detail::divides(r, forbidden)) return false;
    for (const Integer& e : exclude)
        if (e != 0 && detail::divides(r, e)) return false;
    return is_prime(r);
}

template <class Visit>
void scan_values(unsigned bound, Visit&& visit)
{
    for (long n = 1; n <= static_cast<long>(bound); ++n) {
        for (long u = -n; u <= n; ++u) {
            long rem = n - (u < 0 ? -u : u);
            long vs[2] = {-rem, rem};
            int count = rem == 0 ? 1 : 2;
            for (int k = 0; k < count; ++k) {
                long v = vs[k];
                if (std::gcd(u, v) != 1) continue;
                if (!visit(Integer(u), Integer(v))) return;
            }
        }
    }
}

// b with b^2 = disc mod 4r and b = disc mod 2, r an odd prime not dividing disc.
Integer sqrt_disc_mod(const Integer& disc, const Integer& r)
{
    Integer a = pos_mod(disc, r);
    Integer s = sqrt_mod_prime(a, r);
    require(pos_mod(s * s - a, r) == 0, "square root mod r failed");
    if (pos_mod(s - disc, 2) != 0) s += r;
    return s;
}

} // namespace

std::vector<Representation> represented_primes(const Form& f, int p, const std::vector<Integer>& exclude,
                                               unsigned bound, std::size_t limit)
{
    if (f.a <= 0) throw InvalidInput("represent_prime: form must be positive definite");
    const Integer forbidden = 2 * Integer(p) * f.discriminant();
    std::vector<Representation> out;
    if (limit == 0) return out;
    scan_values(bound, [&](const Integer& u, const Integer& v) {
        Integer r = f.eval(u, v);
        // (u, v) and (-u, -v) represent the same value; report the one with a positive leading entry.
        if (admissible_r(r, forbidden, exclude)) {
            if (u < 0 || (u == 0 && v < 0)) out.push_back({r, -u, -v});
            else out.push_back({r, u, v});
        }
        return out.size() < limit;
    });
    return out;
}

Representation represent_prime(const Form& f, int p, const std::vector<Integer>& exclude, unsigned bound)
{
    auto found = represented_primes(f, p, exclude, bound, 1);
    if (found.empty())
        throw SearchExhausted("no admissible prime represented by " + f.to_string() + " within |u|+|v| <= " +
                              std::to_string(bound));
    return found.front();
}

QuadInt selmer_generator(const Integer& d, int p, const Form& f, const Integer& r)
{
    if (f.discriminant() != d) throw InvalidInput("selmer_generator: form discriminant differs from d");
    if (!is_prime(r) || detail::divides(r, Integer(2 * Integer(p) * d)))
        throw InvalidInput("selmer_generator: r must be a prime coprime to 2pd");
    const Form fr = reduce(f);
    if (fr.a == 1 || power(fr, p).a != 1)
        throw InvalidInput("selmer_generator: form does not have order p");

    // Prime form above r in the class of f.
    Integer b = sqrt_disc_mod(d, r);
    Form pf = reduce({r, b, (b * b - d) / (4 * r)});
    if (pf == inverse(fr)) b = -b;
    else if (!(pf == fr)) throw InvalidInput("selmer_generator: r is not represented by " + f.to_string());
    const FormW<Integer> prime_form{r, b, (b * b - d) / (4 * r)};

    // The p-th power of the prime ideal as an unreduced form (r^p, B, C).
    FormW<Integer> acc = prime_form;
    for (int i = 1; i < p; ++i) acc = detail::compose_raw(acc, prime_form);
    const Integer rp = ipow(r, static_cast<unsigned long>(p));
    require(acc.a == rp, "iterated composition lost the leading coefficient");

    // The ideal is principal: reduction to (1, *, *) exposes a norm-one vector (u, v).
    FormW<Integer> red = acc;
    detail::Transform<Integer> tr;
    detail::reduce(red, tr);
    require(red.a == 1, "p-th power of an order-p class is not principal");
    const Integer& u = tr.m00;
    const Integer& v = tr.m10;

    // (r^p, B, C) is the ideal [r^p, (-B + sqrt d)/2]; its element at (u, -v) has norm r^p f(u, v).
    QuadInt alpha{2 * u * rp + v * acc.b, -v, d};
    require(alpha.x * alpha.x - alpha.y * alpha.y * d == 4 * rp, "norm equation check failed");
    if (alpha.x < 0 || (alpha.x == 0 && alpha.y < 0)) {
        alpha.x = -alpha.x;
        alpha.y = -alpha.y;
    }
    return alpha;
}

} // namespace dihedral

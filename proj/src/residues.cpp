#include "dihedral/residues.hpp"

#include <algorithm>
#include <map>

#include "dihedral/errors.hpp"

namespace dihedral {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 reduce_mod(const Integer& x, u64 m) { return mpz_fdiv_ui(x.get_mpz_t(), m); }

u64 to_u64(const Integer& x)
{
    if (x < 0 || x >= (Integer(1) << 62)) throw Unsupported("modulus too large for residue arithmetic: " + x.get_str());
    return mpz_get_ui(x.get_mpz_t());
}

// O / m O with O = Z[omega], omega^2 = d omega - n0.
struct ResidueRing {
    u64 m, d, n0;

    ResidueRing(const Integer& disc, u64 modulus)
        : m(modulus), d(reduce_mod(disc, modulus)), n0(reduce_mod((disc * disc - disc) / 4, modulus))
    {
    }

    struct Elt {
        u64 a, b;
        friend bool operator==(const Elt&, const Elt&) = default;
    };

    Elt one() const { return {1 % m, 0}; }
    Elt mul(const Elt& x, const Elt& y) const
    {
        u64 bb = mulmod(x.b, y.b, m);
        u64 a = (mulmod(x.a, y.a, m) + m - mulmod(n0, bb, m)) % m;
        u64 b = (mulmod(x.a, y.b, m) + mulmod(x.b, y.a, m) + mulmod(d, bb, m)) % m;
        return {a, b};
    }
    Elt pow(Elt x, u64 e) const
    {
        Elt r = one();
        while (e) {
            if (e & 1) r = mul(r, x);
            e >>= 1;
            if (e) x = mul(x, x);
        }
        return r;
    }
    u64 norm(const Elt& x) const
    {
        return (mulmod(x.a, x.a, m) + mulmod(mulmod(x.a, x.b, m), d, m) + mulmod(mulmod(x.b, x.b, m), n0, m)) % m;
    }
    Elt of(const Residue& r) const { return {reduce_mod(r.a, m), reduce_mod(r.b, m)}; }
};

u64 powmod(u64 base, u64 e, u64 m)
{
    u64 r = 1 % m;
    base %= m;
    while (e) {
        if (e & 1) r = mulmod(r, base, m);
        e >>= 1;
        if (e) base = mulmod(base, base, m);
    }
    return r;
}

u64 ipow64(u64 b, unsigned e)
{
    u64 r = 1;
    while (e--) r *= b;
    return r;
}

// Roots of X^2 - d X + n0 modulo the prime q, i.e. the images of omega.
std::vector<u64> omega_roots(const Integer& disc, u64 q)
{
    ResidueRing ring(disc, q);
    std::vector<u64> roots;
    if (q < 64) {
        for (u64 x = 0; x < q; ++x)
            if ((mulmod(x, x, q) + q - mulmod(ring.d, x, q) + ring.n0) % q == 0) roots.push_back(x);
        return roots;
    }
    // q odd: roots (d +- s)/2 with s^2 = d.
    const Integer dq = Integer(static_cast<unsigned long>(ring.d)), qq = Integer(static_cast<unsigned long>(q));
    if (ring.d != 0 && mpz_legendre(dq.get_mpz_t(), qq.get_mpz_t()) != 1) return roots;
    const Integer s = ring.d == 0 ? Integer(0) : sqrt_mod_prime(dq, qq);
    u64 sv = mpz_get_ui(s.get_mpz_t());
    u64 inv2 = (q + 1) / 2;
    u64 r1 = mulmod((ring.d + sv) % q, inv2, q);
    u64 r2 = mulmod((ring.d + q - sv) % q, inv2, q);
    roots.push_back(std::min(r1, r2));
    if (r1 != r2) roots.push_back(std::max(r1, r2));
    return roots;
}

} // namespace

Splitting splitting(const Integer& d, const Integer& q)
{
    int k = kronecker(d, q);
    return k > 0 ? Splitting::Split : (k < 0 ? Splitting::Inert : Splitting::Ramified);
}

RankCounters rank_counters(const Integer& d, const Integer& c, int p)
{
    if (c < 1) throw InvalidInput("rank_counters: conductor must be positive");
    RankCounters rc;
    const Integer pp = p;
    for (const PrimePower& pe : factorize(c)) {
        const Integer& q = pe.prime;
        if (q == pp) continue;
        Integer r = pos_mod(q, pp);
        int k = kronecker(d, q);
        if ((k == 1 && r == 1) || (k == -1 && r == pp - 1)) ++rc.t;
        if (r == 1) ++rc.t_tilde;
    }
    unsigned v = valuation(c, pp);
    rc.w_tilde = v >= 2 ? 1 : 0;
    if (v == 0) {
        rc.w = 0;
    } else if (pos_mod(d, pp) != 0) {
        rc.w = v >= 2 ? 1 : 0;
    } else if (p >= 5 || pos_mod(d, 9) != 6) {
        rc.w = 1;
    } else {
        rc.w = v >= 2 ? 2 : 1;
    }
    return rc;
}

// ---------------------------------------------------------------------------
// Exhaustive tables

ResidueTable::ResidueTable(const Integer& d, u64 q, unsigned n, int p, QuotientKind kind)
    : modulus_(ipow64(q, n)), p_(p)
{
    const u64 m = modulus_;
    if (m > 8192) throw Unsupported("residue table modulus too large: " + std::to_string(m));
    ResidueRing ring(d, m);
    const u64 size = m * m;
    labels_.assign(size, -1);

    std::vector<char> in_h(size, 0);
    std::vector<u64> units;
    for (u64 a = 0; a < m; ++a)
        for (u64 b = 0; b < m; ++b)
            if (ring.norm({a, b}) % q != 0) units.push_back(a * m + b);
    units_ = units.size();

    std::vector<u64> h;
    for (u64 x : units) {
        auto y = ring.pow({x / m, x % m}, static_cast<u64>(p));
        u64 key = y.a * m + y.b;
        if (!in_h[key]) {
            in_h[key] = 1;
            h.push_back(key);
        }
    }
    if (kind == QuotientKind::ModRationals) {
        const std::vector<u64> base = h;
        for (u64 r = 1; r < m; ++r) {
            if (r % q == 0) continue;
            for (u64 x : base) {
                auto y = ring.mul({x / m, x % m}, {r, 0});
                u64 key = y.a * m + y.b;
                if (!in_h[key]) {
                    in_h[key] = 1;
                    h.push_back(key);
                }
            }
        }
    }
    for (u64 x : h) labels_[x] = 0;

    std::vector<u64> span = h;
    std::int64_t weight = 1;
    for (u64 g : units) {
        if (labels_[g] >= 0) continue;
        const std::vector<u64> base = span;
        ResidueRing::Elt gen{g / m, g % m};
        ResidueRing::Elt cur = gen;
        for (int i = 1; i < p; ++i) {
            for (u64 s : base) {
                auto y = ring.mul(cur, {s / m, s % m});
                u64 key = y.a * m + y.b;
                require(labels_[key] < 0, "residue table: coset revisited");
                labels_[key] = labels_[s] + i * weight;
                span.push_back(key);
            }
            cur = ring.mul(cur, gen);
        }
        weight *= p;
        ++dimension_;
    }
    require(span.size() == units.size(), "residue table: labels do not cover the unit group");
}

bool ResidueTable::is_unit(u64 a, u64 b) const { return labels_[(a % modulus_) * modulus_ + b % modulus_] >= 0; }

std::vector<int> ResidueTable::project(const Residue& r) const
{
    std::int64_t label = labels_[reduce_mod(r.a, modulus_) * modulus_ + reduce_mod(r.b, modulus_)];
    if (label < 0) throw InvalidInput("residue is not coprime to the modulus");
    std::vector<int> out(dimension_);
    for (int i = 0; i < dimension_; ++i) {
        out[i] = static_cast<int>(label % p_);
        label /= p_;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local quotients

class LocalQuotient {
public:
    LocalQuotient(Integer prime, unsigned exponent) : prime_(std::move(prime)), exponent_(exponent) {}
    virtual ~LocalQuotient() = default;

    const Integer& prime() const { return prime_; }
    unsigned exponent() const { return exponent_; }
    virtual int dimension() const = 0;
    virtual bool is_unit(const Residue& r) const = 0;
    virtual void project(const Residue& r, std::vector<int>& out) const = 0;

private:
    Integer prime_;
    unsigned exponent_;
};

namespace {

class TableQuotient final : public LocalQuotient {
public:
    TableQuotient(const Integer& d, const Integer& q, unsigned e, int p, QuotientKind kind)
        : LocalQuotient(q, e), table_(d, to_u64(q), std::min(e, 2u), p, kind)
    {
    }
    int dimension() const override { return table_.dimension(); }
    bool is_unit(const Residue& r) const override
    {
        return table_.is_unit(reduce_mod(r.a, table_.modulus()), reduce_mod(r.b, table_.modulus()));
    }
    void project(const Residue& r, std::vector<int>& out) const override
    {
        auto v = table_.project(r);
        out.insert(out.end(), v.begin(), v.end());
    }

private:
    ResidueTable table_;
};

// q != p: the p-part of each local factor is cyclic, read off with a power character.
class CharacterQuotient final : public LocalQuotient {
public:
    CharacterQuotient(const Integer& d, const Integer& q, unsigned e, int p, QuotientKind kind)
        : LocalQuotient(q, e), ring_(d, to_u64(q)), q_(to_u64(q)), p_(static_cast<u64>(p))
    {
        const bool reduced = kind == QuotientKind::ModRationals;
        split_ = splitting(d, q);
        if (split_ == Splitting::Inert) {
            if (reduced ? (q_ + 1) % p_ == 0 : (q_ * q_ - 1) % p_ == 0) {
                exponent_ = (q_ * q_ - 1) / p_;
                coords_ = 1;
            }
        } else if ((q_ - 1) % p_ == 0) {
            exponent_ = (q_ - 1) / p_;
            roots_ = omega_roots(d, q_);
            if (split_ == Splitting::Split) coords_ = reduced ? 1 : 2;
            else coords_ = reduced ? 0 : 1;
            ratio_ = reduced && split_ == Splitting::Split;
        }
        if (coords_ == 0) return;
        // Canonical primitive p-th root of unity: the first element (in the order
        // a + b*omega, b-major) whose character value is nontrivial.
        if (split_ == Splitting::Inert) {
            for (u64 b = 0; b < q_ && zeta_ == ResidueRing::Elt{0, 0}; ++b)
                for (u64 a = 0; a < q_; ++a) {
                    ResidueRing::Elt x{a, b};
                    if (ring_.norm(x) == 0) continue;
                    auto y = ring_.pow(x, exponent_);
                    if (!(y == ring_.one())) {
                        zeta_ = y;
                        break;
                    }
                }
        } else {
            for (u64 g = 2; g < q_; ++g) {
                u64 y = powmod(g, exponent_, q_);
                if (y != 1) {
                    zeta_ = {y, 0};
                    break;
                }
            }
        }
        require(!(zeta_ == ResidueRing::Elt{0, 0}), "no primitive p-th root of unity found");
    }

    int dimension() const override { return coords_; }
    bool is_unit(const Residue& r) const override { return ring_.norm(ring_.of(r)) != 0; }

    void project(const Residue& r, std::vector<int>& out) const override
    {
        if (coords_ == 0) return;
        ResidueRing::Elt x = ring_.of(r);
        if (split_ == Splitting::Inert) {
            out.push_back(dlog(ring_.pow(x, exponent_)));
            return;
        }
        std::vector<int> logs;
        for (u64 root : roots_) {
            u64 image = (x.a + mulmod(x.b, root, q_)) % q_;
            logs.push_back(dlog({powmod(image, exponent_, q_), 0}));
        }
        if (ratio_) out.push_back(static_cast<int>((logs[0] - logs[1] + p_) % p_));
        else out.insert(out.end(), logs.begin(), logs.end());
    }

private:
    int dlog(const ResidueRing::Elt& y) const
    {
        ResidueRing::Elt cur = ring_.one();
        for (u64 i = 0; i < p_; ++i) {
            if (cur == y) return static_cast<int>(i);
            cur = ring_.mul(cur, zeta_);
        }
        throw InvariantViolation("character value is not a p-th root of unity");
    }

    ResidueRing ring_;
    u64 q_, p_;
    Splitting split_ = Splitting::Split;
    u64 exponent_ = 0;
    int coords_ = 0;
    bool ratio_ = false;
    std::vector<u64> roots_;
    ResidueRing::Elt zeta_{0, 0};
};

} // namespace

ReducedQuotient::ReducedQuotient(const Integer& d, const Integer& c, int p, QuotientKind kind)
    : d_(d), modulus_(c), p_(p), kind_(kind)
{
    if (c < 1) throw InvalidInput("reduced_quotient: modulus must be positive");
    if (p < 3 || !is_prime(p)) throw InvalidInput("reduced_quotient: p must be an odd prime");
    if (!is_discriminant(d)) throw InvalidInput("reduced_quotient: invalid discriminant " + d.get_str());
    for (const PrimePower& pe : factorize(c)) {
        std::shared_ptr<const LocalQuotient> local;
        if (pe.prime == p) local = std::make_shared<TableQuotient>(d, pe.prime, pe.exponent, p, kind);
        else local = std::make_shared<CharacterQuotient>(d, pe.prime, pe.exponent, p, kind);
        dimension_ += local->dimension();
        locals_.push_back(std::move(local));
    }
}

std::vector<ReducedQuotient::Component> ReducedQuotient::components() const
{
    std::vector<Component> out;
    for (const auto& l : locals_) out.push_back({l->prime(), l->exponent(), l->dimension()});
    return out;
}

bool ReducedQuotient::is_coprime(const Residue& r) const
{
    return std::all_of(locals_.begin(), locals_.end(), [&](const auto& l) { return l->is_unit(r); });
}

std::vector<int> ReducedQuotient::project(const Residue& r) const
{
    std::vector<int> out;
    out.reserve(dimension_);
    for (const auto& l : locals_) {
        if (!l->is_unit(r)) throw InvalidInput("element is not coprime to the modulus " + modulus_.get_str());
        l->project(r, out);
    }
    return out;
}

ReducedQuotient reduced_quotient(const Integer& d, const Integer& c, int p) { return ReducedQuotient(d, c, p); }

std::vector<int> project_selmer(const QuadInt& alpha, const ReducedQuotient& rq)
{
    if (alpha.d != rq.discriminant()) throw InvalidInput("project_selmer: field mismatch");
    return rq.project(alpha);
}

// ---------------------------------------------------------------------------
// Residue coordinates and unit group structure

Residue to_residue(const QuadInt& alpha)
{
    if (!alpha.is_integral()) throw InvalidInput("element is not integral: " + alpha.to_string());
    return {(alpha.x - alpha.y * alpha.d) / 2, alpha.y};
}

QuadInt from_residue(const Residue& r, const Integer& d) { return {2 * r.a + r.b * d, r.b, d}; }

Integer unit_group_order(const Integer& d, const Integer& q, unsigned n)
{
    if (n == 0) return 1;
    Integer norm = splitting(d, q) == Splitting::Inert ? q * q : q;
    Integer per = splitting(d, q) == Splitting::Ramified ? (q - 1) * ipow(q, 2 * n - 1)
                                                         : (norm - 1) * ipow(norm, n - 1);
    if (splitting(d, q) == Splitting::Split) per = per * per;
    return per;
}

namespace {

// Cyclic decomposition of a finite abelian 2-group given as the unit group of O/2^n O.
std::vector<Integer> two_group_structure(const Integer& d, unsigned n)
{
    const u64 m = ipow64(2, n);
    ResidueRing ring(d, m);
    std::vector<ResidueRing::Elt> units;
    for (u64 a = 0; a < m; ++a)
        for (u64 b = 0; b < m; ++b)
            if (ring.norm({a, b}) % 2 != 0) units.push_back({a, b});
    // at_least[k] = number of cyclic factors of order >= 2^k.
    std::vector<int> at_least{0};
    std::size_t prev = 1;
    for (unsigned k = 1;; ++k) {
        std::size_t count = 0;
        for (const auto& x : units)
            if (ring.pow(x, ipow64(2, k)) == ring.one()) ++count;
        std::size_t ratio = count / prev;
        int f = 0;
        while (ratio > 1) {
            ratio /= 2;
            ++f;
        }
        if (f == 0) break;
        at_least.push_back(f);
        prev = count;
    }
    std::vector<Integer> out;
    for (std::size_t k = 1; k < at_least.size(); ++k) {
        int exact = at_least[k] - (k + 1 < at_least.size() ? at_least[k + 1] : 0);
        for (int i = 0; i < exact; ++i) out.push_back(ipow(2, k));
    }
    return out;
}

} // namespace

std::vector<Integer> unit_group_structure(const Integer& d, const Integer& q, unsigned n)
{
    if (!is_prime(q)) throw InvalidInput("unit_group_structure: q must be prime");
    if (n == 0) return {};
    std::vector<Integer> f;
    const Integer qn1 = ipow(q, n - 1);
    switch (splitting(d, q)) {
    case Splitting::Split:
        if (q == 2) {
            if (n >= 2) f = {2, ipow(2, n - 2), 2, ipow(2, n - 2)};
        } else {
            f = {q - 1, qn1, q - 1, qn1};
        }
        break;
    case Splitting::Inert:
        if (q == 2) {
            f = n == 1 ? std::vector<Integer>{3} : std::vector<Integer>{3, 2, ipow(2, n - 2), ipow(2, n - 1)};
        } else {
            f = {q * q - 1, qn1, qn1};
        }
        break;
    case Splitting::Ramified:
        if (q == 2) return two_group_structure(d, n);
        if (q == 3 && pos_mod(d, 9) == 6) f = {2, 3, qn1, qn1};
        else f = {q - 1, qn1, ipow(q, n)};
        break;
    }
    std::vector<Integer> out;
    for (const Integer& x : f)
        if (x > 1) out.push_back(x);
    return out;
}

} // namespace dihedral

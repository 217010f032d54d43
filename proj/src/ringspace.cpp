#include "dihedral/ringspace.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "dihedral/errors.hpp"
#include "dihedral/realquad.hpp"
#include "dihedral/residues.hpp"

namespace dihedral {

namespace {

int inv_mod(int a, int p)
{
    int r = 1, e = p - 2;
    long long b = a;
    while (e > 0) {
        if (e & 1) r = static_cast<int>(r * b % p);
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// Reduced row echelon form over F_p with zero rows dropped.
Matrix rref(Matrix m, int p, int cols)
{
    for (auto& row : m) {
        require(static_cast<int>(row.size()) == cols, "row length does not match the ambient dimension");
        for (int& x : row) x = ((x % p) + p) % p;
    }
    std::size_t rank = 0;
    for (int col = 0; col < cols && rank < m.size(); ++col) {
        auto pivot = std::find_if(m.begin() + rank, m.end(), [&](const Vector& r) { return r[col] != 0; });
        if (pivot == m.end()) continue;
        std::iter_swap(m.begin() + rank, pivot);
        Vector& pr = m[rank];
        int inv = inv_mod(pr[col], p);
        for (int& x : pr) x = static_cast<int>(1LL * x * inv % p);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == rank || m[i][col] == 0) continue;
            int f = m[i][col];
            for (int j = 0; j < cols; ++j) m[i][j] = static_cast<int>(((m[i][j] - 1LL * f * pr[j]) % p + p) % p);
        }
        ++rank;
    }
    m.resize(rank);
    return m;
}

std::vector<Integer> prime_divisors(const Integer& c)
{
    std::vector<Integer> out;
    for (const PrimePower& pe : factorize(c)) out.push_back(pe.prime);
    return out;
}

SelmerGenerator class_generator(const Integer& d, int p, const Form& f, const std::vector<Integer>& exclude)
{
    Representation rep = represent_prime(f, p, exclude);
    return {selmer_generator(d, p, f, rep.r), f, rep.r};
}

// Projection matrix with one column per generator; rows are coordinates of the quotient mod c.
Matrix projection_matrix(const SelmerBasis& basis, const ReducedQuotient& rq, std::vector<SelmerGenerator>& gens)
{
    Matrix m(rq.dimension(), Vector(basis.sigma, 0));
    for (int j = 0; j < basis.sigma; ++j) {
        SelmerGenerator& g = gens[j];
        if (!rq.is_coprime(to_residue(g.alpha))) {
            if (!g.form) throw InvariantViolation("unit generator is not coprime to " + rq.modulus().get_str());
            g = class_generator(basis.d, basis.p, *g.form, prime_divisors(rq.modulus()));
            require(rq.is_coprime(to_residue(g.alpha)), "regenerated Selmer element still meets the conductor");
        }
        Vector v = rq.project(g.alpha);
        for (int i = 0; i < rq.dimension(); ++i) m[i][j] = v[i];
    }
    return m;
}

void verify_independent(const SelmerBasis& basis)
{
    if (basis.sigma == 0) return;
    const int p = basis.p;
    Matrix rows;
    auto absorb = [&](const Integer& c) {
        ReducedQuotient rq(basis.d, c, p);
        std::vector<SelmerGenerator> gens = basis.generators;
        for (const auto& g : gens)
            if (!rq.is_coprime(to_residue(g.alpha))) return;
        Matrix m = projection_matrix(basis, rq, gens);
        rows.insert(rows.end(), m.begin(), m.end());
        rows = rref(rows, p, basis.sigma);
    };
    if (p <= 7) {
        try {
            absorb(Integer(p) * p);
        } catch (const Unsupported&) {
        }
    }
    for (std::uint32_t q : primes_up_to(200000)) {
        if (static_cast<int>(rows.size()) == basis.sigma) return;
        if (q == 2 || static_cast<int>(q) == p) continue;
        if (q % p != 1 && q % p != static_cast<std::uint32_t>(p - 1)) continue;
        absorb(q);
    }
    if (static_cast<int>(rows.size()) != basis.sigma)
        throw InvariantViolation("Selmer generators look dependent modulo p-th powers");
}

} // namespace

RingSpace::RingSpace(int p, int sigma, Matrix rows) : p_(p), sigma_(sigma)
{
    if (p < 2 || sigma < 0) throw InvalidInput("RingSpace: bad parameters");
    rows_ = rref(std::move(rows), p, sigma);
}

RingSpace RingSpace::full(int p, int sigma)
{
    Matrix id(sigma, Vector(sigma, 0));
    for (int i = 0; i < sigma; ++i) id[i][i] = 1;
    return RingSpace(p, sigma, id);
}

bool RingSpace::contains(const Vector& v) const
{
    Matrix m = rows_;
    m.push_back(v);
    return static_cast<int>(rref(std::move(m), p_, sigma_).size()) == dimension();
}

std::string RingSpace::to_string() const
{
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        out << (i ? ",[" : "[");
        for (int j = 0; j < sigma_; ++j) out << (j ? "," : "") << rows_[i][j];
        out << ']';
    }
    out << ']';
    return out.str();
}

RingSpace null_space(int p, int sigma, const Matrix& m)
{
    Matrix r = rref(m, p, sigma);
    std::vector<int> pivot_of_col(sigma, -1);
    for (std::size_t i = 0; i < r.size(); ++i) {
        int col = static_cast<int>(std::find_if(r[i].begin(), r[i].end(), [](int x) { return x != 0; }) - r[i].begin());
        pivot_of_col[col] = static_cast<int>(i);
    }
    Matrix out;
    for (int free = 0; free < sigma; ++free) {
        if (pivot_of_col[free] >= 0) continue;
        Vector v(sigma, 0);
        v[free] = 1;
        for (int col = 0; col < sigma; ++col)
            if (pivot_of_col[col] >= 0) v[col] = (p - r[pivot_of_col[col]][free]) % p;
        out.push_back(std::move(v));
    }
    return RingSpace(p, sigma, std::move(out));
}

static void check_compatible(const RingSpace& a, const RingSpace& b)
{
    if (a.p() != b.p() || a.sigma() != b.sigma()) throw InvalidInput("ring spaces live in different ambient spaces");
}

RingSpace intersect(const RingSpace& a, const RingSpace& b)
{
    check_compatible(a, b);
    Matrix functionals = null_space(a.p(), a.sigma(), a.basis()).basis();
    const Matrix more = null_space(b.p(), b.sigma(), b.basis()).basis();
    functionals.insert(functionals.end(), more.begin(), more.end());
    return null_space(a.p(), a.sigma(), functionals);
}

bool contains(const RingSpace& a, const RingSpace& b)
{
    check_compatible(a, b);
    return std::all_of(b.basis().begin(), b.basis().end(), [&](const Vector& v) { return a.contains(v); });
}

std::vector<RingSpace> hyperplanes_over(const RingSpace& t)
{
    if (t.codimension() != 2) throw InvalidInput("hyperplanes_over needs a space of codimension 2");
    const int p = t.p(), sigma = t.sigma();
    Matrix ann = null_space(p, sigma, t.basis()).basis();
    std::vector<RingSpace> out;
    out.push_back(null_space(p, sigma, {ann[1]}));
    for (int k = 0; k < p; ++k) {
        Vector f(sigma);
        for (int j = 0; j < sigma; ++j) f[j] = (ann[0][j] + k * ann[1][j]) % p;
        out.push_back(null_space(p, sigma, {f}));
    }
    std::sort(out.begin(), out.end());
    return out;
}

SelmerBasis selmer_basis(const Integer& d, int p)
{
    if (p < 3 || !is_prime(p)) throw InvalidInput("selmer_basis: p must be an odd prime");
    if (!is_fundamental(d)) throw InvalidInput("selmer_basis: " + d.get_str() + " is not a fundamental discriminant");
    SelmerBasis b;
    b.d = d;
    b.p = p;
    if (d < 0) {
        PTorsion tors = p_torsion(class_group(d), p);
        b.class_rank = static_cast<int>(tors.basis.size());
        for (const Form& f : tors.basis) b.generators.push_back(class_generator(d, p, f, {}));
        if (d == -3 && p == 3) b.generators.push_back({QuadInt{-1, 1, -3}, std::nullopt, 1});
    } else {
        b.class_rank = real_p_rank(d, p);
        if (b.class_rank != 0) throw Unsupported("real fields with nontrivial p-class rank are not covered");
        b.generators.push_back({fundamental_unit(d).eta, std::nullopt, 1});
    }
    b.sigma = static_cast<int>(b.generators.size());
    if (b.class_rank == 2 && b.sigma == 2) {
        QuadInt acc = b.generators[0].alpha;
        for (int k = 1; k < p; ++k) {
            acc = acc * b.generators[1].alpha;
            b.derived.push_back(acc);
        }
    }
    verify_independent(b);
    return b;
}

RingSpace ring_space(const SelmerBasis& basis, const Integer& c)
{
    if (c < 1) throw InvalidInput("ring_space: conductor must be positive");
    if (c == 1 || basis.sigma == 0) return RingSpace::full(basis.p, basis.sigma);
    ReducedQuotient rq(basis.d, c, basis.p);
    std::vector<SelmerGenerator> gens = basis.generators;
    return null_space(basis.p, basis.sigma, projection_matrix(basis, rq, gens));
}

int defect(const SelmerBasis& basis, const Integer& c) { return ring_space(basis, c).codimension(); }

std::vector<RingSpace> hyperplane_labels(const SelmerBasis& basis)
{
    if (basis.sigma != 2) throw InvalidInput("hyperplane labels are defined for sigma = 2");
    const int p = basis.p;
    std::vector<RingSpace> out;
    out.emplace_back(p, 2, Matrix{{1, 0}});
    out.emplace_back(p, 2, Matrix{{0, 1}});
    for (int k = 1; k < p; ++k) out.emplace_back(p, 2, Matrix{{1, k}});
    return out;
}

std::vector<Integer> conductor_parts(const Integer& c)
{
    std::vector<Integer> out;
    for (const PrimePower& pe : factorize(c)) out.push_back(ipow(pe.prime, pe.exponent));
    return out;
}

std::uint64_t occupation(const SelmerBasis& basis, const Integer& c, int s, const RingSpace& t)
{
    std::vector<Integer> parts = conductor_parts(c);
    const int tau = static_cast<int>(parts.size());
    if (s < 0 || s > tau) throw InvalidInput("occupation: s out of range");
    if (tau > 24) throw Unsupported("occupation: too many prime divisors for subset enumeration");
    std::vector<RingSpace> spaces;
    for (const Integer& q : parts) spaces.push_back(ring_space(basis, q));
    std::uint64_t count = 0;
    for (std::uint32_t mask = 0; mask < (1u << tau); ++mask) {
        if (std::popcount(mask) != s) continue;
        RingSpace acc = RingSpace::full(basis.p, basis.sigma);
        for (int k = 0; k < tau; ++k)
            if (mask >> k & 1) acc = intersect(acc, spaces[k]);
        if (acc == t) ++count;
    }
    return count;
}

std::vector<int> occupation_numbers(const SelmerBasis& basis, const Integer& c, const RingSpace& t)
{
    std::vector<int> out;
    std::vector<Integer> parts = conductor_parts(c);
    std::vector<RingSpace> spaces;
    for (const Integer& q : parts) spaces.push_back(ring_space(basis, q));
    for (const RingSpace& h : hyperplanes_over(t))
        out.push_back(static_cast<int>(std::count(spaces.begin(), spaces.end(), h)));
    std::sort(out.rbegin(), out.rend());
    return out;
}

} // namespace dihedral

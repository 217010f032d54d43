#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dihedral/errors.hpp"
#include "dihedral/residues.hpp"
#include "dihedral/ringspace.hpp"

using namespace dihedral;

namespace {

std::uint64_t choose(std::uint64_t n, std::uint64_t k) { return k > n ? 0 : binomial(n, k).get_ui(); }

// Admissible conductors built from the first few admissible primes of a field.
std::vector<Integer> admissible_primes(const Integer& d, int p, std::size_t count)
{
    std::vector<Integer> out;
    for (std::uint32_t q : primes_up_to(5000)) {
        if (out.size() == count) break;
        if (static_cast<int>(q) == p) continue;
        RankCounters rc = rank_counters(d, q, p);
        if (rc.t > 0) out.push_back(q);
    }
    return out;
}

std::vector<Integer> divisors_of(const std::vector<Integer>& parts)
{
    std::vector<Integer> out;
    for (std::uint32_t mask = 0; mask < (1u << parts.size()); ++mask) {
        Integer c = 1;
        for (std::size_t k = 0; k < parts.size(); ++k)
            if (mask >> k & 1) c *= parts[k];
        out.push_back(c);
    }
    return out;
}

} // namespace

TEST_CASE("echelon algebra")
{
    RingSpace v = RingSpace::full(3, 2), z = RingSpace::zero(3, 2);
    RingSpace h1(3, 2, {{1, 0}}), h2(3, 2, {{2, 2}});
    CHECK(h2.basis() == Matrix{{1, 1}});
    CHECK(intersect(v, v) == v);
    CHECK(intersect(h1, h2) == z);
    CHECK(intersect(h1, v) == h1);
    CHECK(contains(v, h1));
    CHECK_FALSE(contains(h1, h2));
    CHECK(contains(h1, z));
    CHECK(RingSpace(5, 3, {{1, 2, 3}, {2, 4, 6}}).dimension() == 1);
    CHECK_THROWS_AS(intersect(h1, RingSpace::full(5, 2)), InvalidInput);

    auto hs = hyperplanes_over(z);
    REQUIRE(hs.size() == 4);
    CHECK(std::is_sorted(hs.begin(), hs.end()));
    for (const auto& h : hs) CHECK(h.dimension() == 1);
    CHECK(hyperplanes_over(RingSpace::zero(5, 2)).size() == 6);
    CHECK(hyperplanes_over(RingSpace(3, 3, {{1, 1, 0}})).size() == 4);
    CHECK_THROWS_AS(hyperplanes_over(h1), InvalidInput);
}

TEST_CASE("null space over F_p")
{
    std::mt19937 gen(7);
    for (int p : {3, 5, 7}) {
        std::uniform_int_distribution<int> coef(0, p - 1);
        for (int trial = 0; trial < 200; ++trial) {
            int sigma = 1 + trial % 4;
            Matrix m(1 + trial % 3, Vector(sigma));
            for (auto& r : m)
                for (int& x : r) x = coef(gen);
            RingSpace k = null_space(p, sigma, m);
            RingSpace row(p, sigma, m);
            CHECK(k.dimension() + row.dimension() == sigma);
            for (const auto& v : k.basis())
                for (const auto& r : m) {
                    long dot = 0;
                    for (int j = 0; j < sigma; ++j) dot += 1L * v[j] * r[j];
                    CHECK(dot % p == 0);
                }
        }
    }
}

TEST_CASE("selmer bases")
{
    SelmerBasis eis = selmer_basis(-3, 3);
    CHECK(eis.sigma == 1);
    CHECK(eis.generators[0].alpha == QuadInt{-1, 1, -3});

    SelmerBasis b307 = selmer_basis(-307, 3);
    CHECK(b307.sigma == 1);
    CHECK(b307.generators[0].alpha == QuadInt{12, 2, -307});

    SelmerBasis b5 = selmer_basis(5, 5);
    CHECK(b5.sigma == 1);
    CHECK(b5.generators[0].alpha == QuadInt{1, 1, 5});

    SelmerBasis b = selmer_basis(-4027, 3);
    CHECK(b.sigma == 2);
    CHECK(b.generators[0].alpha == QuadInt{69, 1, -4027});
    CHECK(b.derived.size() == 2);

    CHECK(selmer_basis(-23, 5).sigma == 0);
    CHECK_THROWS_AS(selmer_basis(229, 3), Unsupported);
    CHECK_THROWS_AS(selmer_basis(-12, 3), InvalidInput);
}

TEST_CASE("Eisenstein field")
{
    SelmerBasis b = selmer_basis(-3, 3);
    CHECK(ring_space(b, 1) == RingSpace::full(3, 1));
    CHECK(ring_space(b, 3) == RingSpace::zero(3, 1));
    CHECK(ring_space(b, 17) == RingSpace::full(3, 1));
    for (std::uint32_t q : primes_up_to(400)) {
        if (q == 3) continue;
        CAPTURE(q);
        bool full = q % 9 == 1 || q % 9 == 8;
        CHECK((defect(b, q) == 0) == full);
    }
}

TEST_CASE("defects over -4027")
{
    SelmerBasis b = selmer_basis(-4027, 3);
    CHECK(defect(b, 90) == 2);
    CHECK(ring_space(b, 90) == intersect(intersect(ring_space(b, 2), ring_space(b, 9)), ring_space(b, 5)));

    // Figure: H2 = V(5), H3 = V(9) = V(11), H4 = V(2), H1 unoccupied
    auto labels = hyperplane_labels(b);
    CHECK(ring_space(b, 5) == labels[1]);
    CHECK(ring_space(b, 9) == labels[2]);
    CHECK(ring_space(b, 11) == labels[2]);
    CHECK(ring_space(b, 2) == labels[3]);
    // alpha_1 alpha_2 dies modulo 9, alpha_1 alpha_2^2 modulo 2
    auto is_zero = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; }); };
    CHECK(is_zero(project_selmer(b.derived[0], reduced_quotient(-4027, 9, 3))));
    CHECK(is_zero(project_selmer(b.derived[1], reduced_quotient(-4027, 2, 3))));
    CHECK_FALSE(is_zero(project_selmer(b.derived[1], reduced_quotient(-4027, 5, 3))));

    struct Row {
        long c;
        int delta;
        std::vector<int> occ;
    };
    // conductors dividing 990 with their defect and sorted occupation numbers
    const std::vector<Row> rows = {
        {2, 1, {1, 0, 0, 0}},       {5, 1, {1, 0, 0, 0}},       {9, 1, {1, 0, 0, 0}},
        {11, 1, {1, 0, 0, 0}},      {10, 2, {1, 1, 0, 0}},      {18, 2, {1, 1, 0, 0}},
        {22, 2, {1, 1, 0, 0}},      {45, 2, {1, 1, 0, 0}},      {55, 2, {1, 1, 0, 0}},
        {99, 1, {2, 0, 0, 0}},      {198, 2, {2, 1, 0, 0}},     {495, 2, {2, 1, 0, 0}},
        {90, 2, {1, 1, 1, 0}},      {110, 2, {1, 1, 1, 0}},     {990, 2, {2, 1, 1, 0}},
    };
    for (const Row& r : rows) {
        CAPTURE(r.c);
        CHECK(defect(b, r.c) == r.delta);
        if (r.delta == 2) CHECK(occupation_numbers(b, r.c, RingSpace::zero(3, 2)) == r.occ);
    }
    CHECK(occupation(b, 990, 1, labels[2]) == 2);
    CHECK(occupation(b, 990, 0, RingSpace::full(3, 2)) == 1);
}

TEST_CASE("irregular conductors")
{
    SelmerBasis b687 = selmer_basis(-687, 3);
    CHECK(defect(b687, 3) == 0);
    CHECK(defect(b687, 9) == 1);
    SelmerBasis b8751 = selmer_basis(-8751, 3);
    CHECK(defect(b8751, 3) == 1);
    CHECK(defect(b8751, 9) == 2);
}

TEST_CASE("lattice properties over a corpus")
{
    struct Field {
        long d;
        int p;
    };
    const std::vector<Field> fields = {{-4027, 3}, {-3299, 3}, {-307, 3}, {-687, 3}, {-23, 3},
                                       {-47, 5},   {-71, 7},   {-3, 3},   {37, 3},   {5, 5}};
    std::mt19937 gen(11);
    for (const Field& f : fields) {
        CAPTURE(f.d);
        SelmerBasis b = selmer_basis(f.d, f.p);
        std::vector<Integer> parts = admissible_primes(f.d, f.p, 4);
        Integer pe = Integer(f.p) * f.p;
        if (f.d % f.p == 0) pe = f.p;
        parts.push_back(pe);
        std::vector<Integer> divs = divisors_of(parts);
        for (const Integer& c : divs) {
            CAPTURE(c);
            int delta = defect(b, c);
            RankCounters rc = rank_counters(f.d, c, f.p);
            CHECK(delta <= rc.t + rc.w);
            CHECK(delta <= b.sigma);
            for (const Integer& c2 : divs)
                if (c2 % c == 0) CHECK(contains(ring_space(b, c), ring_space(b, c2)));
            if (f.d < -4 && abs(c * c * f.d) < Integer(1) << 32)
                CHECK(delta == b.class_rank + rc.t + rc.w - ring_class_rank(f.d, c, f.p));
        }
        // inadmissible primes are invisible
        int seen = 0;
        for (std::uint32_t q : primes_up_to(3000)) {
            if (seen == 50) break;
            if (static_cast<int>(q) == f.p || rank_counters(f.d, q, f.p).t > 0) continue;
            ++seen;
            CHECK(defect(b, q) == 0);
        }
    }
}

TEST_CASE("occupation closed forms")
{
    std::mt19937 gen(5);
    for (long d : {-4027L, -3299L, -9748L}) {
        SelmerBasis b = selmer_basis(d, 3);
        REQUIRE(b.sigma == 2);
        std::vector<Integer> pool = admissible_primes(d, 3, 10);
        const RingSpace v = RingSpace::full(3, 2), z = RingSpace::zero(3, 2);
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<Integer> chosen = pool;
            std::shuffle(chosen.begin(), chosen.end(), gen);
            chosen.resize(3 + trial % 4);
            Integer c = 1;
            for (const auto& q : chosen) c *= q;
            CAPTURE(c);
            std::uint64_t u = 0, m = 0;
            std::vector<RingSpace> spaces;
            for (const auto& q : chosen) spaces.push_back(ring_space(b, q));
            for (const auto& s : spaces) {
                if (s == v) ++u;
                if (s == z) ++m;
            }
            auto hs = hyperplanes_over(z);
            std::uint64_t bundle = 0;
            std::vector<std::uint64_t> n1;
            for (const auto& h : hs) {
                n1.push_back(std::count(spaces.begin(), spaces.end(), h));
                bundle += n1.back();
            }
            const std::uint64_t tau = chosen.size();
            for (std::uint64_t s = 0; s <= tau; ++s) {
                CHECK(occupation(b, c, s, v) == choose(u, s));
                std::uint64_t codim1_total = 0;
                for (std::size_t i = 0; i < hs.size(); ++i) {
                    std::uint64_t expect = choose(u + n1[i], s) - choose(u, s);
                    CHECK(occupation(b, c, s, hs[i]) == expect);
                    codim1_total += expect;
                }
                std::uint64_t expect_t = choose(u + bundle + m, s) - choose(u, s) - codim1_total;
                CHECK(occupation(b, c, s, z) == expect_t);
            }
        }
    }
}

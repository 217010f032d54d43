#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dihedral/errors.hpp"
#include "dihedral/residues.hpp"

using namespace dihedral;

namespace {

std::vector<int> add(std::vector<int> a, const std::vector<int>& b, int p)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % p;
    return a;
}

bool is_zero(const std::vector<int>& v)
{
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

Residue random_residue(std::mt19937_64& gen, long bound)
{
    std::uniform_int_distribution<long> dist(-bound, bound);
    return {dist(gen), dist(gen)};
}

Residue mul(const Residue& x, const Residue& y, const Integer& d)
{
    QuadInt a = from_residue(x, d), b = from_residue(y, d);
    return to_residue(a * b);
}

// Admissible conductors assembled from small primes, used as a corpus below.
std::vector<Integer> admissible_corpus(const Integer& d, int p)
{
    std::vector<Integer> primes;
    for (std::uint32_t q : primes_up_to(120)) {
        if (q == static_cast<std::uint32_t>(p)) continue;
        int k = kronecker(d, q);
        long r = q % p;
        if ((k == 1 && r == 1) || (k == -1 && r == p - 1)) primes.push_back(q);
    }
    std::vector<Integer> ppart{1};
    if (kronecker(d, p) != 0) ppart.push_back(p * p);
    else {
        ppart.push_back(p);
        if (p == 3 && pos_mod(d, 9) == 6) ppart.push_back(9);
    }
    std::vector<Integer> out;
    for (const Integer& e : ppart) {
        out.push_back(e);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            out.push_back(e * primes[i]);
            if (i + 1 < primes.size()) out.push_back(e * primes[i] * primes[i + 1]);
        }
    }
    return out;
}

} // namespace

TEST_CASE("rank counters")
{
    CHECK(rank_counters(-3, 2, 3) == RankCounters{1, 0, 0, 0});
    CHECK(rank_counters(-687, 9, 3).t == 0);
    CHECK(rank_counters(-687, 9, 3).w == 2);
    CHECK(rank_counters(-59, 7, 3).t == 1);
    CHECK(rank_counters(-59, 7, 3).w == 0);
    RankCounters rc = rank_counters(-4027, 90, 3);
    CHECK(rc.t == 2);
    CHECK(rc.w == 1);
    CHECK(rc.w_tilde == 1);
}

TEST_CASE("unit group structure by decomposition type")
{
    CHECK(unit_group_structure(-4027, 5, 1) == std::vector<Integer>{24});
    CHECK(unit_group_structure(-59, 7, 1) == std::vector<Integer>{6, 6});
    CHECK(unit_group_structure(-687, 3, 2) == std::vector<Integer>{2, 3, 3, 3});
    CHECK(unit_group_structure(-3, 2, 1) == std::vector<Integer>{3});
}

TEST_CASE("unit group structure agrees with exhaustive counts")
{
    for (long d : {-3L, -4L, -8L, -23L, -687L, -4027L, 5L, 12L, 24L, 717L}) {
        for (std::uint32_t q : {2u, 3u, 5u, 7u, 11u}) {
            for (unsigned n = 1; n <= 3; ++n) {
                Integer m = ipow(q, n);
                if (m > 400) continue;
                auto f = unit_group_structure(d, q, n);
                Integer prod = 1;
                for (const auto& x : f) prod *= x;
                // p-ranks of the full unit group from the table builder with no rationals removed.
                for (int p : {3, 5}) {
                    if (static_cast<std::uint32_t>(p) == q && n > 2) continue;
                    ResidueTable t(d, q, n, p, QuotientKind::PowersOnly);
                    CHECK(prod == static_cast<unsigned long>(t.group_order()));
                    CHECK(prod == unit_group_order(d, q, n));
                    int rank = 0;
                    for (const auto& x : f)
                        if (x % p == 0) ++rank;
                    CHECK_MESSAGE(rank == t.dimension(), "d=" << d << " q=" << q << " n=" << n << " p=" << p);
                }
            }
        }
    }
}

TEST_CASE("reduced quotient dimensions")
{
    CHECK(reduced_quotient(-3, 2, 3).dimension() == 1);
    CHECK(reduced_quotient(-4027, 90, 3).dimension() == 3);
    for (long d : {-3L, -23L, -307L, -687L, -771L, -4027L, -8751L, 5L, 24L, 229L, 717L}) {
        for (int p : {3, 5}) {
            for (const Integer& c : admissible_corpus(d, p)) {
                RankCounters rc = rank_counters(d, c, p);
                CHECK_MESSAGE(ReducedQuotient(d, c, p).dimension() == rc.t + rc.w, "d=" << d << " c=" << c);
                CHECK(ReducedQuotient(d, c, p, QuotientKind::PowersOnly).dimension() ==
                      rc.t + rc.t_tilde + rc.w + rc.w_tilde);
            }
        }
    }
}

TEST_CASE("projection laws on random residues")
{
    std::mt19937_64 gen(7);
    for (long d : {-3L, -307L, -687L, -4027L, 5L, 24L}) {
        for (int p : {3, 5}) {
            auto corpus = admissible_corpus(d, p);
            for (std::size_t ci = 0; ci < corpus.size(); ci += 3) {
                const Integer& c = corpus[ci];
                for (QuotientKind kind : {QuotientKind::ModRationals, QuotientKind::PowersOnly}) {
                    ReducedQuotient rq(d, c, p, kind);
                    int checked = 0;
                    while (checked < 500 / 4) {
                        Residue x = random_residue(gen, 100000), y = random_residue(gen, 100000);
                        if (!rq.is_coprime(x) || !rq.is_coprime(y)) continue;
                        ++checked;
                        CHECK(rq.project(mul(x, y, d)) == add(rq.project(x), rq.project(y), p));
                        QuadInt beta = from_residue(x, d);
                        CHECK(is_zero(rq.project(qpow(beta, p))));
                        if (kind == QuotientKind::ModRationals) {
                            Integer n = y.a;
                            if (rq.is_coprime({n, 0})) CHECK(is_zero(rq.project(Residue{n, 0})));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("power characters agree with exhaustive tables")
{
    std::mt19937_64 gen(11);
    for (long d : {-3L, -23L, -307L, -4027L, 5L, 229L}) {
        for (int p : {3, 5, 7}) {
            for (std::uint32_t q : primes_up_to(60)) {
                if (q == static_cast<std::uint32_t>(p)) continue;
                for (QuotientKind kind : {QuotientKind::ModRationals, QuotientKind::PowersOnly}) {
                    ReducedQuotient rq(d, q, p, kind);
                    ResidueTable table(d, q, 1, p, kind);
                    REQUIRE(rq.dimension() == table.dimension());
                    for (int i = 0; i < 60; ++i) {
                        Residue x = random_residue(gen, 1000), y = random_residue(gen, 1000);
                        if (!rq.is_coprime(x) || !rq.is_coprime(y)) continue;
                        // Same kernel: x and y agree under one projection iff under the other.
                        bool same_char = rq.project(x) == rq.project(y);
                        bool same_table = table.project(x) == table.project(y);
                        CHECK(same_char == same_table);
                    }
                }
            }
        }
    }
}

TEST_CASE("sufficient condition c | y gives zero projection")
{
    QuadInt alpha4{416, 6, -4027};
    CHECK(alpha4.norm() == 43 * 43 * 43);
    CHECK(is_zero(project_selmer(alpha4, reduced_quotient(-4027, 2, 3))));
    CHECK(is_zero(project_selmer(QuadInt{12, 2, -307}, reduced_quotient(-307, 2, 3))));
    CHECK(is_zero(project_selmer(rational(13, -4027), reduced_quotient(-4027, 90, 3))));
    CHECK_THROWS_AS(project_selmer(rational(5, -4027), reduced_quotient(-4027, 90, 3)), InvalidInput);
}

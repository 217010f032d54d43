#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dihedral/arith.hpp"
#include "dihedral/quadforms.hpp"

namespace dihedral {

enum class Splitting { Split, Inert, Ramified };
Splitting splitting(const Integer& d, const Integer& q);

// Counters of the p-ranks of U(O/cO)/U(Z/cZ) (t + w) and U(O/cO) (t + t~ + w + w~).
struct RankCounters {
    int t = 0;
    int t_tilde = 0;
    int w = 0;
    int w_tilde = 0;

    friend bool operator==(const RankCounters&, const RankCounters&) = default;
};
RankCounters rank_counters(const Integer& d, const Integer& c, int p);

// Cyclic factors of U(O/q^n O) in the shape of the decomposition-type table
// (trivial factors dropped). Ramified q = 2 is computed exhaustively.
std::vector<Integer> unit_group_structure(const Integer& d, const Integer& q, unsigned n);
// Order of U(O/q^n O) and its p-rank counted directly on the group.
Integer unit_group_order(const Integer& d, const Integer& q, unsigned n);

// Residue a + b*omega on the basis {1, omega}, omega = (d + sqrt d)/2.
struct Residue {
    Integer a, b;
};
Residue to_residue(const QuadInt& alpha);
QuadInt from_residue(const Residue& r, const Integer& d);

enum class QuotientKind {
    ModRationals,   // U(O/cO) / U(Z/cZ) U(O/cO)^p
    PowersOnly,     // U(O/cO) / U(O/cO)^p
};

class LocalQuotient;

// p-elementary quotient of the residue class group modulo c with an explicit
// linear projection onto F_p^dimension. Built per prime power of c.
class ReducedQuotient {
public:
    ReducedQuotient(const Integer& d, const Integer& c, int p, QuotientKind kind = QuotientKind::ModRationals);

    struct Component {
        Integer prime;
        unsigned exponent = 0;
        int dimension = 0;
    };

    int dimension() const { return dimension_; }
    int p() const { return p_; }
    const Integer& modulus() const { return modulus_; }
    const Integer& discriminant() const { return d_; }
    QuotientKind kind() const { return kind_; }
    std::vector<Component> components() const;

    bool is_coprime(const Residue& r) const;
    std::vector<int> project(const Residue& r) const;   // InvalidInput unless coprime to c
    std::vector<int> project(const QuadInt& alpha) const { return project(to_residue(alpha)); }

private:
    Integer d_, modulus_;
    int p_ = 0;
    QuotientKind kind_ = QuotientKind::ModRationals;
    int dimension_ = 0;
    std::vector<std::shared_ptr<const LocalQuotient>> locals_;
};

ReducedQuotient reduced_quotient(const Integer& d, const Integer& c, int p);
std::vector<int> project_selmer(const QuadInt& alpha, const ReducedQuotient& rq);

// The same quotient modulo a single prime power, built by enumerating every
// residue of O/q^n O. Independent of the character-based projection.
class ResidueTable {
public:
    ResidueTable(const Integer& d, std::uint64_t q, unsigned n, int p, QuotientKind kind);

    int dimension() const { return dimension_; }
    std::uint64_t modulus() const { return modulus_; }
    bool is_unit(std::uint64_t a, std::uint64_t b) const;
    std::vector<int> project(const Residue& r) const;
    std::size_t group_order() const { return units_; }

private:
    std::uint64_t modulus_ = 0;
    int p_ = 0;
    int dimension_ = 0;
    std::size_t units_ = 0;
    std::vector<std::int64_t> labels_;   // packed base-p coordinates, -1 for non-units
};

} // namespace dihedral

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dihedral/arith.hpp"
#include "dihedral/quadforms.hpp"

namespace dihedral {

using Vector = std::vector<int>;
using Matrix = std::vector<Vector>;

// Subspace of F_p^sigma held as a reduced row echelon basis, so equal
// subspaces compare equal.
class RingSpace {
public:
    RingSpace(int p, int sigma, Matrix rows = {});

    static RingSpace full(int p, int sigma);
    static RingSpace zero(int p, int sigma) { return RingSpace(p, sigma); }

    int p() const { return p_; }
    int sigma() const { return sigma_; }
    int dimension() const { return static_cast<int>(rows_.size()); }
    int codimension() const { return sigma_ - dimension(); }
    const Matrix& basis() const { return rows_; }
    bool contains(const Vector& v) const;
    std::string to_string() const;   // "[[1,0],[0,1]]"

    friend bool operator==(const RingSpace&, const RingSpace&) = default;
    friend auto operator<=>(const RingSpace& a, const RingSpace& b) { return a.rows_ <=> b.rows_; }

private:
    int p_ = 0;
    int sigma_ = 0;
    Matrix rows_;
};

// Null space {x : m x = 0} of a matrix with sigma columns.
RingSpace null_space(int p, int sigma, const Matrix& m);
RingSpace intersect(const RingSpace& a, const RingSpace& b);
bool contains(const RingSpace& a, const RingSpace& b);   // b inside a
std::vector<RingSpace> hyperplanes_over(const RingSpace& t);

struct SelmerGenerator {
    QuadInt alpha;
    std::optional<Form> form;   // class part only
    Integer r;                  // Norm(alpha) = r^p for the class part
};

struct SelmerBasis {
    Integer d;
    int p = 0;
    int class_rank = 0;
    int sigma = 0;
    std::vector<SelmerGenerator> generators;
    // alpha_1 alpha_2^k for k = 1..p-1 when sigma = 2 and both generators are class parts
    std::vector<QuadInt> derived;
};

SelmerBasis selmer_basis(const Integer& d, int p);

// Exponent vectors in F_p^sigma killed by the projection modulo c.
RingSpace ring_space(const SelmerBasis& basis, const Integer& c);
int defect(const SelmerBasis& basis, const Integer& c);

// For sigma = 2: the p+1 lines spanned by alpha_1, alpha_2, alpha_1 alpha_2^k,
// in the labelling H_1, ..., H_{p+1}.
std::vector<RingSpace> hyperplane_labels(const SelmerBasis& basis);

// Conductor parts: p^e is one part, every other prime q_k another.
std::vector<Integer> conductor_parts(const Integer& c);

// Number of products of s distinct parts of c whose ring space equals t.
std::uint64_t occupation(const SelmerBasis& basis, const Integer& c, int s, const RingSpace& t);

// n_1 of each hyperplane over a codimension-2 space t, sorted descending.
std::vector<int> occupation_numbers(const SelmerBasis& basis, const Integer& c, const RingSpace& t);

} // namespace dihedral

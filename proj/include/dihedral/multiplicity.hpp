#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dihedral/arith.hpp"
#include "dihedral/ringspace.hpp"

namespace dihedral {

struct ConductorProfile {
    Integer c;
    std::vector<PrimePower> factors;
    unsigned e = 0;        // exponent of p in c
    int t = 0;             // prime divisors other than p
    int tau = 0;           // t, plus one for the part p^e
    bool admissible = false;
    bool irregular = false;
    std::string reason;    // why c is not admissible, empty otherwise
};

ConductorProfile admissibility(const Integer& d, int p, const Integer& c);

// Ring space data of an admissible conductor, independent of how it was obtained.
// parts[k] = V(q_k); for an irregular conductor the last part is V(9) and v3 = V(3).
struct Configuration {
    int p = 0;
    int sigma = 0;
    int rho = 0;
    bool irregular = false;
    std::vector<RingSpace> parts;
    std::optional<RingSpace> v3;
};

struct MultiplicityBreakdown {
    Integer m;
    Integer U = 1, F = 1;
    Rational R = 1;
    int rho = 0, omega = 0, u = 0, v = 0, delta = 0, tau = 0;
    std::vector<int> occupations;   // n_1 >= ... >= n_{p+1} when delta = 2
    std::optional<int> n;           // occupation of V(3) in the degenerate cases
    std::optional<int> delta3_3, delta3_9;
    bool admissible = true;
    bool irregular = false;
    std::string formula;            // unramified, free, codim1, codim1-degenerate, codim2, codim2-degenerate, general-sum
};

// Closed form selected by (delta, regularity, delta_3(3)); delta >= 3 falls back to the divisor sum.
MultiplicityBreakdown multiplicity(const Configuration& cfg);
// Alternating divisor sum over the parts, valid for every defect.
Integer general_multiplicity(const Configuration& cfg);

Configuration configuration(const SelmerBasis& basis, const Integer& c);

MultiplicityBreakdown multiplicity(const Integer& d, int p, const Integer& c);
Integer general_multiplicity(const Integer& d, int p, const Integer& c);

// Bracketed factor over p^2 of the codimension-2 formula; occupations padded to p+1.
Rational restrictive_factor(int p, int v, std::vector<int> occupations);

struct DihedralDiscriminant {
    Integer d_N;   // c^(2(p-1)) d^p
    Integer d_L;   // (c^2 d)^((p-1)/2), the degree p subfield
};
DihedralDiscriminant dihedral_discriminant(const Integer& d, int p, const Integer& c);

} // namespace dihedral

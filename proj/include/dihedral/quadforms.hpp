#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dihedral/arith.hpp"

namespace dihedral {

// Positive definite binary quadratic form a x^2 + b x y + c y^2.
struct Form {
    Integer a, b, c;

    Integer discriminant() const { return b * b - 4 * a * c; }
    bool is_reduced() const;
    std::string to_string() const;   // "(a,b,c)"
    Integer eval(const Integer& x, const Integer& y) const { return a * x * x + b * x * y + c * y * y; }

    friend bool operator==(const Form&, const Form&) = default;
};

Form principal_form(const Integer& disc);
Form reduce(Form f);
Form inverse(const Form& f);                      // reduced (a,-b,c)
Form compose(const Form& f, const Form& g);       // reduced composite
Form power(const Form& f, const Integer& n);      // n >= 0
bool is_principal(const Form& f);

// One reduced primitive form per class, sorted by (a, |b|, b < 0).
std::vector<Form> reduced_forms(const Integer& disc);

struct ClassGroup {
    Integer discriminant;
    std::uint64_t h = 0;
    std::vector<std::uint64_t> divisors;   // d_1 | d_2 | ... ascending, trivial factors dropped
    std::vector<Form> generators;          // generators[i] has order divisors[i]

    int p_rank(int p) const;
};

// Structure of the form class group of a negative discriminant (fundamental or not).
ClassGroup class_group_of_discriminant(const Integer& disc);
// Same, but restricted to fundamental d < 0.
ClassGroup class_group(const Integer& d);

int p_rank(const Integer& d, int p);
int ring_class_rank(const Integer& d, const Integer& c, int p);

// The p-torsion C_p with a canonical basis: basis[0] is the smallest order-p form
// (by a, then b >= 0), each further entry the smallest one outside the span so far.
struct PTorsion {
    int p = 0;
    std::vector<Form> basis;
    std::vector<Form> elements;   // all p^rank elements, identity first
};
PTorsion p_torsion(const ClassGroup& g, int p);

// Element (x + y sqrt(d)) / 2 of the quadratic field of discriminant d.
struct QuadInt {
    Integer x, y, d;

    Integer norm() const { return (x * x - y * y * d) / 4; }
    bool is_integral() const;
    QuadInt conjugate() const { return {x, -y, d}; }
    std::string to_string() const;   // "(x,y)"

    friend QuadInt operator*(const QuadInt& s, const QuadInt& t);
    friend bool operator==(const QuadInt&, const QuadInt&) = default;
};
QuadInt qpow(QuadInt base, unsigned long e);
QuadInt rational(const Integer& n, const Integer& d);

struct Representation {
    Integer r, u, v;
};

constexpr unsigned kDefaultRepresentBound = 4000;

// Smallest prime represented in scan order (|u|+|v| ascending, ties lexicographic),
// coprime to 2 p d and to every entry of exclude.
Representation represent_prime(const Form& f, int p, const std::vector<Integer>& exclude,
                               unsigned bound = kDefaultRepresentBound);

// All represented primes up to the bound in the same scan order.
std::vector<Representation> represented_primes(const Form& f, int p,
                                               const std::vector<Integer>& exclude,
                                               unsigned bound, std::size_t limit);

// alpha with x^2 - y^2 d = 4 r^p generating the p-th power of the prime ideal above r
// that lies in the class of f. Sign normalised to x > 0 (or x = 0, y > 0).
QuadInt selmer_generator(const Integer& d, int p, const Form& f, const Integer& r);

} // namespace dihedral

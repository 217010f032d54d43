#pragma once

#include "dihedral/arith.hpp"
#include "dihedral/quadforms.hpp"

namespace dihedral {

struct UnitData {
    Integer d;
    QuadInt eta;             // fundamental unit > 1, half coordinates
    int norm = 1;            // Norm(eta) = +-1
    unsigned period = 0;     // period length of the continued fraction
    double regulator = 0;    // log(eta), for display only
};

UnitData fundamental_unit(const Integer& d);

// Least k >= 1 with eta^k in the order of conductor c.
Integer unit_index(const Integer& d, const Integer& c);

// v_p of E(q) = |U(O/qO)| / phi(q) for a p-admissible prime q, q = p or q = p^2.
unsigned euler_quotient_valuation(const Integer& d, const Integer& q, int p);

// p-defect of a prime conductor (or p^2) over a real field with trivial p-class rank,
// decided by the unit index alone.
int rqc_defect(const Integer& d, const Integer& q, int p);

// Narrow and wide class numbers from cycles of reduced indefinite forms.
Integer narrow_class_number(const Integer& d);
Integer real_class_number(const Integer& d);

// p-class rank of a real quadratic field. Only ranks 0 and 1 are decided
// (from v_p(h)); anything larger is reported as Unsupported.
int real_p_rank(const Integer& d, int p);

} // namespace dihedral

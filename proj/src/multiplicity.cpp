#include "dihedral/multiplicity.hpp"

#include <algorithm>
#include <bit>

#include "dihedral/errors.hpp"

namespace dihedral {

namespace {

Rational rpow(const Rational& base, int e)
{
    Rational r = 1;
    for (int i = 0; i < std::abs(e); ++i) r *= base;
    return e < 0 ? Rational(1) / r : r;
}

Integer ipow_int(int base, int e) { return ipow(Integer(base), static_cast<unsigned long>(e)); }

int sign(int e) { return (e % 2 == 0) ? 1 : -1; }

Integer to_integer(const Rational& r, const char* what)
{
    Rational c = r;
    c.canonicalize();
    if (c.get_den() != 1) throw InvariantViolation(std::string(what) + " is not an integer: " + c.get_str());
    return c.get_num();
}

RingSpace meet(const Configuration& cfg, std::uint32_t mask, std::optional<RingSpace> start = std::nullopt)
{
    RingSpace acc = start ? *start : RingSpace::full(cfg.p, cfg.sigma);
    for (std::size_t k = 0; k < cfg.parts.size(); ++k)
        if (mask >> k & 1) acc = intersect(acc, cfg.parts[k]);
    return acc;
}

void check_configuration(const Configuration& cfg)
{
    if (cfg.p < 3 || !is_prime(cfg.p)) throw InvalidInput("p must be an odd prime");
    if (cfg.parts.size() > 24) throw Unsupported("too many conductor parts for subset enumeration");
    for (const auto& s : cfg.parts)
        if (s.p() != cfg.p || s.sigma() != cfg.sigma) throw InvalidInput("ring space does not match the configuration");
    if (cfg.irregular && (cfg.p != 3 || !cfg.v3 || cfg.parts.empty()))
        throw InvalidInput("irregular configuration needs p = 3, V(3) and the part V(9)");
}

} // namespace

ConductorProfile admissibility(const Integer& d, int p, const Integer& c)
{
    if (c < 1) throw InvalidInput("conductor must be positive");
    if (p < 3 || !is_prime(p)) throw InvalidInput("p must be an odd prime");
    if (!is_fundamental(d)) throw InvalidInput(d.get_str() + " is not a fundamental discriminant");
    ConductorProfile prof;
    prof.c = c;
    prof.factors = factorize(c);
    prof.admissible = true;
    const Integer pp = p;
    auto reject = [&](std::string why) {
        if (prof.admissible) prof.reason = std::move(why);
        prof.admissible = false;
    };
    for (const PrimePower& pe : prof.factors) {
        if (pe.prime == pp) {
            prof.e = pe.exponent;
            continue;
        }
        ++prof.t;
        if (pe.exponent != 1) reject(pe.prime.get_str() + " divides c more than once");
        int k = kronecker(d, pe.prime);
        if (k == 0 || pos_mod(pe.prime - k, pp) != 0)
            reject(pe.prime.get_str() + " is not congruent to (d/q) modulo " + std::to_string(p));
    }
    prof.tau = prof.t + (prof.e > 0 ? 1 : 0);
    const int kp = kronecker(d, pp);
    const bool minus3 = p == 3 && pos_mod(d, 9) == 6;
    unsigned max_e = kp != 0 ? 2 : (minus3 ? 2 : 1);
    if (prof.e > max_e || (kp != 0 && prof.e == 1)) reject("exponent of p in c is not allowed");
    prof.irregular = minus3 && prof.e == 2;
    return prof;
}

Configuration configuration(const SelmerBasis& basis, const Integer& c)
{
    Configuration cfg;
    cfg.p = basis.p;
    cfg.sigma = basis.sigma;
    cfg.rho = basis.class_rank;
    ConductorProfile prof = admissibility(basis.d, basis.p, c);
    cfg.irregular = prof.irregular;
    std::optional<Integer> ppart;
    for (const PrimePower& pe : prof.factors) {
        Integer q = ipow(pe.prime, pe.exponent);
        if (pe.prime == basis.p) ppart = q;
        else cfg.parts.push_back(ring_space(basis, q));
    }
    if (ppart) cfg.parts.push_back(ring_space(basis, *ppart));
    if (cfg.irregular) cfg.v3 = ring_space(basis, 3);
    return cfg;
}

Rational restrictive_factor(int p, int v, std::vector<int> occupations)
{
    if (static_cast<int>(occupations.size()) > p + 1) throw InvalidInput("more than p+1 occupation numbers");
    occupations.resize(p + 1, 0);
    Rational sum = rpow(p - 1, v - 1);
    for (int n : occupations) sum += sign(v - n) * rpow(p - 1, n);
    return sum / (p * p);
}

Integer general_multiplicity(const Configuration& cfg)
{
    check_configuration(cfg);
    const int p = cfg.p;
    const int tau = static_cast<int>(cfg.parts.size());
    if (tau == 0) return (ipow_int(p, cfg.rho) - 1) / (p - 1);
    Rational total = 0;
    if (!cfg.irregular) {
        const int dc = meet(cfg, (1u << tau) - 1).codimension();
        total = rpow(p - 1, tau - 1);
        for (std::uint32_t mask = 0; mask < (1u << tau); ++mask) {
            int s = std::popcount(mask);
            int dk = meet(cfg, mask).codimension();
            total += sign(tau - s) * rpow(p, s) * Rational(ipow_int(p, dc - dk) - 1, p - 1);
        }
        total *= rpow(p, cfg.rho - dc);
    } else {
        const int t = tau - 1;
        const std::uint32_t nine = 1u << t;
        for (std::uint32_t mask = 0; mask < nine; ++mask) {
            int s = std::popcount(mask);
            int d9 = meet(cfg, mask | nine).codimension();
            int d3 = meet(cfg, mask, *cfg.v3).codimension();
            total += sign(t - s) * rpow(3, s) * (rpow(3, 2 - d9) - rpow(3, 1 - d3)) / 2;
        }
        total *= rpow(3, cfg.rho);
    }
    return to_integer(total, "divisor sum");
}

MultiplicityBreakdown multiplicity(const Configuration& cfg)
{
    check_configuration(cfg);
    const int p = cfg.p;
    MultiplicityBreakdown b;
    b.rho = cfg.rho;
    b.irregular = cfg.irregular;
    b.omega = cfg.irregular ? 1 : 0;
    b.tau = static_cast<int>(cfg.parts.size());
    if (b.tau == 0) {
        b.m = (ipow_int(p, cfg.rho) - 1) / (p - 1);
        b.U = b.m;
        b.formula = "unramified";
        return b;
    }
    const RingSpace full = RingSpace::full(p, cfg.sigma);
    const RingSpace vc = meet(cfg, (1u << b.tau) - 1);
    b.delta = vc.codimension();
    b.u = static_cast<int>(std::count(cfg.parts.begin(), cfg.parts.end(), full));
    b.v = b.tau - b.u;
    int d3 = 0;
    if (cfg.irregular) {
        d3 = cfg.v3->codimension();
        b.delta3_3 = d3;
        b.delta3_9 = cfg.parts.back().codimension();
    }
    const bool degenerate = cfg.irregular && d3 == 1;
    const Integer pr = ipow_int(p, cfg.rho);
    b.U = pr;

    if (b.delta == 0) {
        b.formula = "free";
        b.F = ipow_int(p, b.omega) * ipow_int(p - 1, b.u);
        b.R = Rational(1, p - 1);
    } else if (b.delta == 1 && !degenerate) {
        b.formula = "codim1";
        b.F = ipow_int(p, b.omega) * ipow_int(p - 1, b.u);
        b.R = Rational(ipow_int(p - 1, b.v - 1) - sign(b.v - 1), p);
    } else if (b.delta == 1) {
        b.formula = "codim1-degenerate";
        int n = static_cast<int>(std::count(cfg.parts.begin(), cfg.parts.end(), *cfg.v3));
        b.n = n;
        b.F = ipow_int(2, b.u + n);
        b.R = Rational(1, 2);
    } else if (b.delta == 2 && !degenerate) {
        b.formula = "codim2";
        for (const RingSpace& h : hyperplanes_over(vc))
            b.occupations.push_back(static_cast<int>(std::count(cfg.parts.begin(), cfg.parts.end(), h)));
        std::sort(b.occupations.rbegin(), b.occupations.rend());
        b.F = ipow_int(p, b.omega) * ipow_int(p - 1, b.u);
        b.R = restrictive_factor(p, b.v, b.occupations);
    } else if (b.delta == 2) {
        b.formula = "codim2-degenerate";
        int n = static_cast<int>(std::count(cfg.parts.begin(), cfg.parts.end(), *cfg.v3));
        b.n = n;
        require(b.v - n >= 1, "degenerate codimension-2 configuration without a further restrictive part");
        b.F = ipow_int(2, b.u + n);
        b.R = Rational(ipow_int(2, b.v - n - 1) - sign(b.v - n - 1), 3);
    } else {
        b.formula = "general-sum";
        b.m = general_multiplicity(cfg);
        b.R = Rational(b.m, pr);
        b.R.canonicalize();
        return b;
    }
    b.R.canonicalize();
    b.m = to_integer(Rational(b.U * b.F) * b.R, "multiplicity");
    require(b.m >= 0, "negative multiplicity");
    return b;
}

MultiplicityBreakdown multiplicity(const Integer& d, int p, const Integer& c)
{
    ConductorProfile prof = admissibility(d, p, c);
    if (!prof.admissible) {
        MultiplicityBreakdown b;
        b.m = 0;
        b.U = 0;
        b.R = 0;
        b.admissible = false;
        b.irregular = prof.irregular;
        b.tau = prof.tau;
        b.formula = "inadmissible";
        return b;
    }
    SelmerBasis basis = selmer_basis(d, p);
    return multiplicity(configuration(basis, c));
}

Integer general_multiplicity(const Integer& d, int p, const Integer& c)
{
    if (!admissibility(d, p, c).admissible) return 0;
    return general_multiplicity(configuration(selmer_basis(d, p), c));
}

DihedralDiscriminant dihedral_discriminant(const Integer& d, int p, const Integer& c)
{
    if (c < 1) throw InvalidInput("conductor must be positive");
    if (p < 3 || !is_prime(p)) throw InvalidInput("p must be an odd prime");
    const unsigned long pu = static_cast<unsigned long>(p);
    DihedralDiscriminant out;
    out.d_N = ipow(c, 2 * (pu - 1)) * ipow(d, pu);
    out.d_L = ipow(c * c * d, (pu - 1) / 2);
    return out;
}

} // namespace dihedral

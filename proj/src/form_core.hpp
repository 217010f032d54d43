#pragma once

// Reduction and composition written once over a "wide" integer type W:
// __int128 for the class-group fast path, mpz_class for unbounded work.

#include <utility>

#include <gmpxx.h>

namespace dihedral::detail {

using i128 = __int128;

inline i128 floor_div(i128 a, i128 b)
{
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline i128 pos_mod(i128 a, i128 m)
{
    i128 r = a % m;
    return r < 0 ? r + m : r;
}
inline bool divides(i128 d, i128 x) { return x % d == 0; }
inline i128 xgcd(i128 a, i128 b, i128& u, i128& v)
{
    i128 r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        i128 q = r0 / r1;
        std::swap(r0 -= q * r1, r1);
        std::swap(s0 -= q * s1, s1);
        std::swap(t0 -= q * t1, t1);
    }
    if (r0 < 0) { r0 = -r0; s0 = -s0; t0 = -t0; }
    u = s0;
    v = t0;
    return r0;
}

inline mpz_class floor_div(const mpz_class& a, const mpz_class& b)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
inline mpz_class pos_mod(const mpz_class& a, const mpz_class& m)
{
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}
inline bool divides(const mpz_class& d, const mpz_class& x)
{
    return mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t()) != 0;
}
inline mpz_class xgcd(const mpz_class& a, const mpz_class& b, mpz_class& u, mpz_class& v)
{
    mpz_class g;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

template <class W>
struct FormW {
    W a, b, c;
};

// Change of variables recorded as a 2x2 matrix acting on column vectors (x, y).
template <class W>
struct Transform {
    W m00 = 1, m01 = 0, m10 = 0, m11 = 1;

    void translate(const W& k)   // (x, y) -> (x + k y, y)
    {
        m01 += k * m00;
        m11 += k * m10;
    }
    void rotate()                // (x, y) -> (-y, x)
    {
        W t0 = m00, t1 = m10;
        m00 = m01;
        m10 = m11;
        m01 = -t0;
        m11 = -t1;
    }
};

template <class W>
struct NoTransform {
    void translate(const W&) {}
    void rotate() {}
};

template <class W, class T>
void normalize(FormW<W>& f, T& tr)
{
    W two_a = 2 * f.a;
    W q = floor_div(f.b, two_a);
    W r = f.b - q * two_a;
    if (r > f.a) {
        r -= two_a;
        q += 1;
    }
    f.c = f.c - q * (f.b + r) / 2;
    f.b = r;
    tr.translate(W(-q));
}

template <class W, class T>
void reduce(FormW<W>& f, T& tr)
{
    for (;;) {
        if (!(-f.a < f.b && f.b <= f.a)) normalize(f, tr);
        if (f.a > f.c) {
            f.b = -f.b;
            std::swap(f.a, f.c);
            tr.rotate();
            continue;
        }
        if (f.a == f.c && f.b < 0) {
            f.b = -f.b;
            tr.rotate();
        }
        return;
    }
}

template <class W>
void reduce(FormW<W>& f)
{
    NoTransform<W> none;
    reduce(f, none);
}

// Composition of primitive forms of equal discriminant, result unreduced.
template <class W>
FormW<W> compose_raw(FormW<W> f1, FormW<W> f2)
{
    if (f1.a > f2.a) std::swap(f1, f2);
    W s = (f1.b + f2.b) / 2;
    W n = f2.b - s;
    W y1, d;
    if (divides(f1.a, f2.a)) {
        y1 = 0;
        d = f1.a;
    } else {
        W u, v;
        d = xgcd(f2.a, f1.a, u, v);
        y1 = u;
    }
    W x2, y2, d1;
    if (divides(d, s)) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        W yy;
        d1 = xgcd(s, d, x2, yy);
        y2 = -yy;
    }
    W v1 = f1.a / d1;
    W v2 = f2.a / d1;
    W r = pos_mod(W(y1 * y2 * n - x2 * f2.c), v1);
    W b3 = f2.b + 2 * v2 * r;
    W a3 = v1 * v2;
    W c3 = (f2.c * d1 + r * (f2.b + v2 * r)) / v1;
    return {a3, b3, c3};
}

} // namespace dihedral::detail

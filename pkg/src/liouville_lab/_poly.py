"""Exact univariate polynomial arithmetic over the rationals.

Polynomials are lists of Fractions in ascending order, trimmed so the last
entry is nonzero (the zero polynomial is the empty list).  This module backs
every Sturm-style positivity certificate in the package; nothing here is
allowed to touch floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

Q = Fraction


def poly(coeffs) -> list[Fraction]:
    p = [Q(c) for c in coeffs]
    return trim(p)


def trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p) -> int:
    return len(p) - 1


def is_zero(p) -> bool:
    return not p


def add(p, q):
    n = max(len(p), len(q))
    out = [Q(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return trim(out)


def neg(p):
    return [-c for c in p]


def sub(p, q):
    return add(p, neg(q))


def scale(p, c):
    c = Q(c)
    if c == 0:
        return []
    return [c * a for a in p]


def mul(p, q):
    if not p or not q:
        return []
    out = [Q(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def pow_(p, k: int):
    out = [Q(1)]
    for _ in range(k):
        out = mul(out, p)
    return out


def evaluate(p, x) -> Fraction:
    x = Q(x)
    acc = Q(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p):
    return trim([Q(i) * c for i, c in enumerate(p)][1:])


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    quot = [Q(0)] * max(len(p) - len(q) + 1, 0)
    dq = degree(q)
    lc = q[-1]
    while len(r) - 1 >= dq and r:
        k = len(r) - 1 - dq
        c = r[-1] / lc
        quot[k] = c
        for i, b in enumerate(q):
            r[k + i] -= c * b
        trim(r)
    return trim(quot), r


def gcd_poly(p, q):
    a, b = list(p), list(q)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if a:
        a = [c / a[-1] for c in a]
    return a


def squarefree_part(p):
    if degree(p) <= 1:
        return list(p)
    g = gcd_poly(p, derivative(p))
    if degree(g) < 1:
        return list(p)
    return divmod_poly(p, g)[0]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_chain(p):
    """Sturm sequence of the squarefree part of p."""
    p = squarefree_part(p)
    chain = [p, derivative(p)]
    while chain[-1]:
        rem = divmod_poly(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append(neg(rem))
    return [c for c in chain if c]


def sign_variations(signs) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def variations_at(chain, x) -> int:
    return sign_variations([_sign(evaluate(c, x)) for c in chain])


def variations_at_pos_inf(chain) -> int:
    return sign_variations([_sign(c[-1]) for c in chain])


def variations_at_neg_inf(chain) -> int:
    return sign_variations(
        [_sign(c[-1]) * (-1 if degree(c) % 2 else 1) for c in chain]
    )


def count_roots(p, a, b, chain=None) -> int:
    """Number of distinct real roots of p in (a, b]."""
    if chain is None:
        chain = sturm_chain(p)
    return variations_at(chain, a) - variations_at(chain, b)


def count_roots_above(p, a, chain=None) -> int:
    """Number of distinct real roots of p in (a, +inf)."""
    if chain is None:
        chain = sturm_chain(p)
    return variations_at(chain, a) - variations_at_pos_inf(chain)


def isolate_root(p, a, b, width=Q(1, 2**40)):
    """Shrink (a, b], known to contain at least one root, below `width`."""
    chain = sturm_chain(p)
    a, b = Q(a), Q(b)
    while b - a > width:
        m = (a + b) / 2
        if count_roots(p, a, m, chain) >= 1:
            b = m
        else:
            a = m
    return a, b


def positive_on_01(p):
    """Exact test for p > 0 on [0, 1].

    Returns (True, None) or (False, witness) where the witness is either a
    rational x in [0, 1] with p(x) <= 0 or an isolating interval of a root.
    """
    v0 = evaluate(p, 0)
    if v0 <= 0:
        return False, ("point", Q(0), v0)
    v1 = evaluate(p, 1)
    if v1 <= 0:
        return False, ("point", Q(1), v1)
    n = count_roots(p, 0, 1)
    if n == 0:
        return True, None
    a, b = isolate_root(p, Q(0), Q(1))
    m = (a + b) / 2
    vm = evaluate(p, m)
    if vm <= 0:
        return False, ("point", m, vm)
    return False, ("root-interval", a, b)


def positive_on_open_ray(p):
    """Exact test for p > 0 on (0, +inf); same witness shape as above."""
    if not p:
        return False, ("point", Q(1), Q(0))
    if _sign(p[-1]) <= 0:
        return False, ("leading", _sign(p[-1]))
    n = count_roots_above(p, 0)
    if n == 0:
        # sign on (0, inf) is the leading sign once no roots lie there and
        # p(x) != 0 just right of 0; x=0 roots are excluded from the ray.
        probe = Q(1)
        while evaluate(p, probe) <= 0:
            probe /= 2
            if probe < Q(1, 2**60):
                return False, ("point", probe, evaluate(p, probe))
        return True, None
    bound = root_bound(p)
    a, b = isolate_root(p, Q(0), bound)
    m = (a + b) / 2
    vm = evaluate(p, m)
    if vm <= 0:
        return False, ("point", m, vm)
    return False, ("root-interval", a, b)


def root_bound(p) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    if degree(p) < 1:
        return Q(1)
    lc = abs(p[-1])
    b = Q(1) + max(abs(c) for c in p[:-1]) / lc
    return b


def int_det(rows) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("square matrix required")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def frac_det(rows) -> Fraction:
    """Exact determinant of a rational matrix (Gaussian elimination)."""
    m = [[Q(x) for x in r] for r in rows]
    n = len(m)
    det = Q(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if m[i][k] != 0:
                piv = i
                break
        if piv is None:
            return Q(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f == 0:
                continue
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return det


def content_cleared(p) -> list[int]:
    """Integer coefficient list with the common denominator cleared."""
    if not p:
        return []
    den = 1
    for c in p:
        den = den * c.denominator // _int_gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = _int_gcd(g, abs(c))
    if g > 1:
        ints = [c // g for c in ints]
    return ints

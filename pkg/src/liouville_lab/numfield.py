"""Number fields, unit lattices and torus-bundle monodromies.

The working order is Z[X]/(f) for a monic integer polynomial f of degree at
most 4.  Norms are exact integers (determinant of the multiplication
matrix, which equals the resultant Res(f, g) for monic f); unit discovery
is a bounded coordinate-box search with exact norm filtering, cross-checked
for real quadratic fields against a continued-fraction Pell oracle.  The
log-embedding vectors of the positive units, together with the exponential
kernel contributions 2*pi*i per complex place and the torsion preimages,
span the rank n-1 lattice whose monodromy matrices glue the torus bundle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import _poly, liealg

Q = Fraction


class FieldError(ValueError):
    """Defining polynomial is unusable for the working order."""


@dataclass(frozen=True)
class Poly:
    """Monic integer polynomial, ascending coefficients, degree 1..4."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        n = len(cs) - 1
        if not 1 <= n <= 4:
            raise FieldError("degree must be between 1 and 4")
        if cs[-1] != 1:
            raise FieldError("polynomial must be monic")
        rational = _poly.poly(cs)
        if _poly.degree(_poly.gcd_poly(rational, _poly.derivative(rational))) > 0:
            raise FieldError("polynomial must be squarefree")
        if n >= 2 and self._has_rational_root():
            raise FieldError("polynomial has a rational root")
        if n == 4 and self._has_quadratic_factor():
            raise FieldError("degree-4 polynomial splits into two quadratics")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _has_rational_root(self) -> bool:
        c0 = self.coeffs[0]
        if c0 == 0:
            return True
        for d in _divisors(abs(c0)):
            for r in (Q(d), Q(-d)):
                if _poly.evaluate(_poly.poly(self.coeffs), r) == 0:
                    return True
        return False

    def _has_quadratic_factor(self) -> bool:
        # f = (X^2 + aX + b)(X^2 + cX + d) over Z: solve coefficientwise
        f0, f1, f2, f3 = self.coeffs[0], self.coeffs[1], self.coeffs[2], self.coeffs[3]
        if f0 == 0:
            return True
        for b in _signed_divisors(f0):
            if f0 % b:
                continue
            d = f0 // b
            s = f3                       # a + c
            m = f2 - b - d               # a * c
            disc = s * s - 4 * m
            if disc < 0:
                continue
            rt = math.isqrt(disc)
            if rt * rt != disc:
                continue
            for a in ((s + rt) // 2, (s - rt) // 2):
                if (s + rt) % 2 and a == (s + rt) // 2:
                    continue
                if (s - rt) % 2 and a == (s - rt) // 2:
                    continue
                c = s - a
                if a * d + b * c == f1:
                    return True
        return False


def _divisors(n: int):
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out += [d, n // d]
    return sorted(set(out))


def _signed_divisors(n: int):
    ds = _divisors(abs(n))
    return [d for a in ds for d in (a, -a)]


@dataclass
class NumberField:
    """Defining polynomial plus polished embeddings, real roots first.

    Real roots are ordered descending; complex representatives have
    positive imaginary part (one per conjugate pair), ordered by
    descending real part.  That ordering is the only choice made here, and
    all downstream lattice data states vectors in it.
    """

    poly: Poly
    real_roots: list
    complex_roots: list

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def signature(self) -> tuple:
        return len(self.real_roots), len(self.complex_roots)

    @property
    def is_totally_real(self) -> bool:
        return not self.complex_roots

    def all_embedding_points(self):
        return [complex(r) for r in self.real_roots] + list(self.complex_roots)

    def embed(self, x: "OrderElement"):
        """Values of x under the r real and s complex embeddings."""
        reals = [_eval_int_poly(x.coords, r) for r in self.real_roots]
        cplx = [_eval_int_poly(x.coords, z) for z in self.complex_roots]
        return reals, cplx

    def discriminant(self) -> int:
        """disc(f) = (-1)^{n(n-1)/2} Res(f, f'), exact."""
        f = _poly.poly(self.poly.coeffs)
        fp = _poly.derivative(f)
        n = self.degree
        res = _resultant_int(self.poly.coeffs, [int(c) for c in fp])
        return (-1) ** (n * (n - 1) // 2) * res


def _eval_int_poly(coords, x):
    acc = 0.0 if not isinstance(x, complex) else 0j
    for c in reversed(coords):
        acc = acc * x + c
    return acc


def _resultant_int(f_coeffs, g_coeffs) -> int:
    """Resultant of integer polynomials via the Sylvester determinant."""
    f = list(f_coeffs)
    g = list(g_coeffs)
    n, m = len(f) - 1, len(g) - 1
    if n < 0 or m < 0:
        return 0
    size = n + m
    rows = []
    for i in range(m):
        row = [0] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(n):
        row = [0] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return _poly.int_det(rows)


def field_from_poly(coeffs) -> NumberField:
    """Build a NumberField: companion-matrix roots plus Newton polishing."""
    p = Poly(tuple(coeffs))
    n = p.degree
    if n == 1:
        roots = [complex(-p.coeffs[0], 0.0)]
    else:
        comp = np.zeros((n, n))
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = [-c for c in p.coeffs[:-1]]
        roots = [complex(z) for z in np.linalg.eigvals(comp)]
    fpoly = _poly.poly(p.coeffs)
    dpoly = _poly.derivative(fpoly)
    polished = []
    for z in roots:
        for _ in range(10):
            fz = _eval_cpoly(fpoly, z)
            dz = _eval_cpoly(dpoly, z)
            if dz == 0:
                break
            z = z - fz / dz
        polished.append(z)
    reals, cplx = [], []
    for z in polished:
        if abs(z.imag) <= 1e-10 * (1 + abs(z)):
            reals.append(z.real)
        elif z.imag > 0:
            cplx.append(z)
    reals.sort(reverse=True)
    cplx.sort(key=lambda z: -z.real)
    field = NumberField(p, reals, cplx)
    if len(reals) + 2 * len(cplx) != n:
        raise FieldError("embedding count does not match degree")
    for z in field.all_embedding_points():
        if abs(_eval_cpoly(fpoly, z)) > 1e-12 * (1 + abs(z)) ** n:
            raise FieldError("root polishing failed")
    return field


def _eval_cpoly(p, z):
    acc = 0j
    for c in reversed(p):
        acc = acc * z + complex(c)
    return acc


@dataclass(frozen=True)
class OrderElement:
    """Element of Z[X]/(f) in the power basis, exact integer coordinates."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __neg__(self):
        return OrderElement(tuple(-c for c in self.coords))

    def is_one(self) -> bool:
        return self.coords[0] == 1 and all(c == 0 for c in self.coords[1:])


def one(field: NumberField) -> OrderElement:
    return OrderElement((1,) + (0,) * (field.degree - 1))


def multiply(field: NumberField, x: OrderElement, y: OrderElement) -> OrderElement:
    n = field.degree
    prod = [0] * (2 * n - 1)
    for i, a in enumerate(x.coords):
        for j, b in enumerate(y.coords):
            prod[i + j] += a * b
    # reduce mod f using monicity: X^n = -(c_0 + ... + c_{n-1} X^{n-1})
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c == 0:
            continue
        prod[k] = 0
        for i in range(n):
            prod[k - n + i] -= c * field.poly.coeffs[i]
    return OrderElement(tuple(prod[:n]))


def power_element(field, x: OrderElement, k: int) -> OrderElement:
    out = one(field)
    for _ in range(k):
        out = multiply(field, out, x)
    return out


def mult_matrix(field: NumberField, x: OrderElement):
    """Integer matrix of multiplication by x in the power basis (columns)."""
    n = field.degree
    cols = []
    for j in range(n):
        ej = OrderElement(tuple(1 if i == j else 0 for i in range(n)))
        cols.append(multiply(field, x, ej).coords)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def norm(field: NumberField, x: OrderElement) -> int:
    """Exact field norm: det of the multiplication matrix (= Res(f, x))."""
    value = _poly.int_det(mult_matrix(field, x))
    reals, cplx = field.embed(x)
    approx = 1.0
    for v in reals:
        approx *= v
    for z in cplx:
        approx *= abs(z) ** 2
    if abs(approx - value) > 1e-6 * max(1.0, abs(value)):
        raise ArithmeticError(
            f"embedding product {approx} disagrees with exact norm {value}"
        )
    return value


def invert_unit(field: NumberField, u: OrderElement) -> OrderElement:
    """Inverse of a unit (|norm| = 1) via the adjugate, exactly."""
    m = mult_matrix(field, u)
    det = _poly.int_det(m)
    if det not in (1, -1):
        raise ValueError("element is not a unit")
    n = field.degree
    inv = _int_matrix_inverse_unimodular(m, det)
    return OrderElement(tuple(inv[i][0] for i in range(n)))


def _int_matrix_inverse_unimodular(m, det):
    n = len(m)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [m[a][b] for b in range(n) if b != j]
                for a in range(n) if a != i
            ]
            cof = _poly.int_det(minor) if n > 1 else 1
            adj[j][i] = (-1) ** (i + j) * cof
    return [[x * det for x in row] for row in adj]  # det in {1,-1}


def log_vector(field: NumberField, u: OrderElement):
    """Log embedding: (log rho_i(u)..., log|sigma_j(u)|...)."""
    reals, cplx = field.embed(u)
    return [math.log(abs(v)) for v in reals] + [math.log(abs(z)) for z in cplx]


@dataclass
class UnitGroup:
    """Torsion units plus free generators of a finite-index unit subgroup."""

    torsion: list                  # all roots of unity found in the order
    torsion_generator: OrderElement
    torsion_order: int
    free_generators: list          # shortest-log-first, rank = r + s - 1
    rank: int


def find_units(field: NumberField, box_bound: int) -> UnitGroup:
    """Enumerate |coords| <= box_bound, keep exact norm +-1, reduce.

    Raises if the candidate count exceeds 10^6 or the free rank found falls
    short of the Dirichlet rank r + s - 1 (in which case the caller should
    increase box_bound rather than accept a deficient lattice).
    """
    n = field.degree
    if (2 * box_bound + 1) ** n > 10 ** 6:
        raise ValueError("box too large: more than 10^6 candidates")
    r, s = field.signature
    units = []
    for coords in product(range(-box_bound, box_bound + 1), repeat=n):
        if all(c == 0 for c in coords):
            continue
        u = OrderElement(coords)
        if _poly.int_det(mult_matrix(field, u)) in (1, -1):
            units.append(u)
    torsion, free_candidates = [], []
    for u in units:
        lv = log_vector(field, u)
        size = math.sqrt(sum(v * v for v in lv))
        if size <= 1e-9:
            if _is_root_of_unity(field, u):
                torsion.append(u)
            else:  # pragma: no cover - log-null non-torsion cannot happen
                free_candidates.append((size, u))
        else:
            free_candidates.append((size, u))
    tor_gen, tor_order = _torsion_generator(field, torsion)
    rank_target = r + s - 1
    free = _greedy_rank_filter(field, free_candidates, rank_target)
    if len(free) < rank_target:
        raise ValueError(
            f"unit rank {len(free)} below Dirichlet rank {rank_target}; "
            "increase box_bound"
        )
    return UnitGroup(torsion, tor_gen, tor_order, free, len(free))


def _is_root_of_unity(field, u) -> bool:
    p = one(field)
    for _ in range(12):
        p = multiply(field, p, u)
        if p.is_one():
            return True
    return False


def _element_order(field, u) -> int:
    p = one(field)
    for m in range(1, 13):
        p = multiply(field, p, u)
        if p.is_one():
            return m
    raise ValueError("torsion order exceeds 12")


def _torsion_generator(field, torsion):
    best, best_order = one(field), 1
    for u in torsion:
        m = _element_order(field, u)
        if m > best_order or (m == best_order and u.coords > best.coords):
            best, best_order = u, m
    return best, best_order


def _greedy_rank_filter(field, candidates, rank_target):
    """Shortest-first selection of log vectors increasing the rank."""
    chosen = []
    chosen_logs = []
    for _, u in sorted(candidates, key=lambda t: (t[0], t[1].coords)):
        lv = log_vector(field, u)
        if _residual_norm(chosen_logs, lv) > 1e-8:
            chosen.append(_canonical_unit(field, u))
            chosen_logs.append(log_vector(field, chosen[-1]))
            if len(chosen) == rank_target:
                break
    return chosen


def _residual_norm(basis, v):
    v = np.array(v, dtype=float)
    for b in basis:
        b = np.array(b, dtype=float)
        nb = np.dot(b, b)
        if nb > 0:
            v = v - (np.dot(v, b) / nb) * b
    return float(np.linalg.norm(v))


def _canonical_unit(field, u) -> OrderElement:
    """Pick the representative of {±u, ±u^-1} with first log-embedding > 0.

    Normalizes reporting: for Q[sqrt 2] this selects 3 + 2X rather than its
    inverse 3 - 2X.  Sign is chosen to make the first embedding positive.
    """
    candidates = [u, -u]
    inv = invert_unit(field, u)
    candidates += [inv, -inv]
    r, s = field.signature

    def keyfun(w):
        reals, cplx = field.embed(w)
        first = reals[0] if r else abs(cplx[0])
        return (first <= 0, -(first > 1), w.coords)

    best = min(candidates, key=keyfun)
    return best


def positive_units(group: UnitGroup, field: NumberField):
    """Generators with all real embeddings positive; squares repair failures."""
    out = []
    for u in group.free_generators:
        reals, _ = field.embed(u)
        if all(v > 0 for v in reals):
            out.append(u)
        else:
            out.append(_canonical_unit(field, multiply(field, u, u)))
    return out


@dataclass
class LatticeData:
    """Basis of the log-embedding lattice plus monodromy matrices."""

    gamma_basis: list         # vectors: r real entries then s complex entries
    monodromy: list           # integer matrices, one per generator used
    generators: list          # OrderElements matching `monodromy`
    rank: int

    def flattened_basis(self):
        flat = []
        for vec in self.gamma_basis:
            row = []
            for z in vec:
                if isinstance(z, complex):
                    row += [z.real, z.imag]
                else:
                    row.append(z)
            flat.append(row)
        return flat


def gamma_lattice(field: NumberField, gens) -> LatticeData:
    """Preimage lattice of the positive units in the trace-zero hyperplane.

    The basis consists of the log vectors of the free positive generators,
    together with the reduced lattice generated by the torsion preimages and
    the kernel vectors 2*pi*i per complex place.  Rank must come out to
    n - 1 exactly (r + s - 1 free part plus s from the kernel/torsion).
    """
    r, s = field.signature
    n = field.degree
    basis = []
    monodromy_gens = list(gens)
    for u in gens:
        basis.append(_full_log_vector(field, u))
    if s:
        tor_gen, tor_order = _torsion_from_gens(field)
        imag_rows = []
        if tor_order > 1:
            _, cplx = field.embed(tor_gen)
            args = [cmath.phase(z) for z in cplx]
            ints = []
            for a in args:
                k = round(a * tor_order / (2 * math.pi))
                if abs(a * tor_order / (2 * math.pi) - k) > 1e-9:
                    raise ArithmeticError("torsion argument not commensurable")
                ints.append(k)
            imag_rows.append(ints)
            monodromy_gens.append(tor_gen)
        unit = tor_order if tor_order > 1 else 1
        for j in range(s):
            imag_rows.append([unit if i == j else 0 for i in range(s)])
        reduced = _hnf_rows(imag_rows)
        for row in reduced:
            vec = [0.0] * r + [
                complex(0.0, k * 2 * math.pi / unit) for k in row
            ]
            basis.append(vec)
    # verify trace-zero hyperplane membership and rank
    for vec in basis:
        tr = sum(v for v in vec[:r]) + 2 * sum(v.real for v in vec[r:])
        if abs(tr) > 1e-10:
            raise ArithmeticError("lattice vector leaves the trace-zero hyperplane")
    flat = [
        [v for z in vec for v in ((z.real, z.imag) if isinstance(z, complex) else (z,))]
        for vec in basis
    ]
    rank = int(np.linalg.matrix_rank(np.array(flat), tol=1e-8)) if flat else 0
    if rank != n - 1:
        raise ArithmeticError(f"lattice rank {rank} != n - 1 = {n - 1}")
    mats = monodromy_matrices(field, monodromy_gens)
    return LatticeData(basis, mats, monodromy_gens, rank)


_TORSION_CACHE: dict = {}


def _torsion_from_gens(field):
    key = field.poly.coeffs
    if key not in _TORSION_CACHE:
        grp = find_units(field, 1)
        _TORSION_CACHE[key] = (grp.torsion_generator, grp.torsion_order)
    return _TORSION_CACHE[key]


def _full_log_vector(field, u):
    reals, cplx = field.embed(u)
    return [math.log(v) for v in reals] + [
        complex(math.log(abs(z)), cmath.phase(z)) for z in cplx
    ]


def _hnf_rows(rows):
    """Row-style Hermite reduction of an integer row lattice (small sizes)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    cols = len(rows[0])
    out = []
    pivot_col = 0
    while pivot_col < cols and rows:
        with_pivot = [r for r in rows if r[pivot_col] != 0]
        without = [r for r in rows if r[pivot_col] == 0]
        if not with_pivot:
            rows = without
            pivot_col += 1
            continue
        while len(with_pivot) > 1:
            with_pivot.sort(key=lambda r: abs(r[pivot_col]))
            base = with_pivot[0]
            rest = []
            for r in with_pivot[1:]:
                q = r[pivot_col] // base[pivot_col]
                r = [a - q * b for a, b in zip(r, base)]
                if r[pivot_col] != 0:
                    rest.append(r)
                elif any(r):
                    without.append(r)
            with_pivot = [base] + rest
        piv = with_pivot[0]
        if piv[pivot_col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        rows = without
        pivot_col += 1
    return out


def monodromy_matrices(field: NumberField, gens):
    """Integer matrices of multiplication by each generator; det = 1 exact.

    A float cross-check verifies that the embedding matrix conjugates each
    monodromy to diag(rho_i(u), complex blocks) within 1e-8.
    """
    mats = []
    n = field.degree
    emb = np.zeros((n, n))
    row = 0
    for root in field.real_roots:
        emb[row, :] = [root ** j for j in range(n)]
        row += 1
    for z in field.complex_roots:
        emb[row, :] = [(z ** j).real for j in range(n)]
        emb[row + 1, :] = [(z ** j).imag for j in range(n)]
        row += 2
    for u in gens:
        m = mult_matrix(field, u)
        det = _poly.int_det(m)
        if det != 1:
            raise ArithmeticError("monodromy determinant is not 1")
        mf = np.array(m, dtype=float)
        conj = emb @ mf @ np.linalg.inv(emb)
        reals, cplx = field.embed(u)
        target = np.zeros((n, n))
        at = 0
        for v in reals:
            target[at, at] = v
            at += 1
        for z in cplx:
            target[at, at] = z.real
            target[at, at + 1] = -z.imag
            target[at + 1, at] = z.imag
            target[at + 1, at + 1] = z.real
            at += 2
        if np.max(np.abs(conj - target)) > 1e-8:
            raise ArithmeticError("monodromy does not diagonalize to embeddings")
        mats.append(m)
    return mats


# -- Pell oracle for real quadratic orders --------------------------------------


def pell_fundamental_unit(field: NumberField) -> OrderElement:
    """Continued-fraction fundamental unit of Z[X]/(f), f real quadratic.

    Walks the periodic surd expansion of the larger root with exact integer
    state and returns the first convergent p/q with |p^2 + b p q + c q^2| = 1
    as the canonical positive representative.
    """
    if field.degree != 2 or not field.is_totally_real:
        raise ValueError("Pell oracle requires a real quadratic field")
    c, b, _ = field.poly.coeffs
    disc = b * b - 4 * c
    # theta = (-b + sqrt(disc)) / 2: surd state x = (P + sqrt(D)) / Qd
    P, D, Qd = -b, disc, 2
    p_prev, p_cur = 1, None
    q_prev, q_cur = 0, None
    for _ in range(200):
        a = _floor_surd(P, D, Qd)
        if p_cur is None:
            p_cur, q_cur = a, 1
        else:
            p_cur, p_prev = a * p_cur + p_prev, p_cur
            q_cur, q_prev = a * q_cur + q_prev, q_cur
        # convergent element p - q theta, whose norm is q^2 f(p/q)
        nrm = p_cur * p_cur + b * p_cur * q_cur + c * q_cur * q_cur
        if abs(nrm) == 1 and q_cur > 0:
            u = OrderElement((p_cur, -q_cur))
            reals, _ = field.embed(u)
            if any(v < 0 for v in reals) or nrm == -1:
                u = multiply(field, u, u)
            return _canonical_unit(field, u)
        P = a * Qd - P
        Qd = (D - P * P) // Qd
    raise ArithmeticError("Pell expansion did not terminate")


def _floor_surd(P: int, D: int, Qd: int) -> int:
    """floor((P + sqrt(D)) / Qd) with exact integer arithmetic, D non-square."""
    t = math.isqrt(D)
    if Qd > 0:
        return (P + t) // Qd
    m = (P + t) // Qd
    k = m * Qd - P
    return m if (k >= 0 and D < k * k) else m - 1


# -- hyperbolic SL(2,Z) lattices -------------------------------------------------


@dataclass
class Sl2Lattice:
    matrix: list
    tau: float
    eigenbasis: np.ndarray
    residual: float


def hyperbolic_sl2_lattice(a) -> Sl2Lattice:
    """Expansion rate and eigenbasis of a hyperbolic SL(2,Z) matrix.

    tau = log of the larger eigenvalue; the verification reassembles A from
    diag(e^-tau, e^tau) in the eigenbasis and requires 1e-9 accuracy.
    """
    rows = [list(map(int, r)) for r in a]
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    tr = rows[0][0] + rows[1][1]
    if det != 1:
        raise ValueError("matrix must have determinant 1")
    if abs(tr) <= 2:
        raise ValueError("matrix is not hyperbolic")
    lam = (tr + math.sqrt(tr * tr - 4)) / 2
    tau = math.log(lam)
    A = np.array(rows, dtype=float)
    vals, vecs = np.linalg.eig(A)
    order = np.argsort(vals)  # ascending: e^-tau then e^tau
    Qm = vecs[:, order]
    D = np.diag([math.exp(-tau), math.exp(tau)])
    residual = float(np.max(np.abs(Qm @ D @ np.linalg.inv(Qm) - A)))
    if residual > 1e-9:
        raise ArithmeticError("eigenbasis reconstruction failed")
    return Sl2Lattice(rows, tau, Qm, residual)


# -- full pipeline ----------------------------------------------------------------


@dataclass
class PairReport:
    field: NumberField
    units: UnitGroup
    positive_generators: list
    lattice: LatticeData
    preset: liealg.Preset | None
    certificate: liealg.PositivityCertificate | None


def build_liealg_pair(field: NumberField, box_bound: int | None = None) -> PairReport:
    """Units, lattice and (totally real case) the exact pair certificate.

    For s > 0 only the lattice data is produced; the left-invariant pair on
    the associated group involves the linear product model, which is checked
    numerically by the family module, not certified here.
    """
    if box_bound is None:
        box_bound = _default_box(field)
    units = find_units(field, box_bound)
    pos = positive_units(units, field)
    lattice = gamma_lattice(field, pos)
    preset = None
    cert = None
    if field.is_totally_real:
        preset = liealg.totally_real(field.degree)
        cert = liealg.liouville_pair_check(
            preset.algebra, preset.alpha_plus, preset.alpha_minus
        )
    return PairReport(field, units, pos, lattice, preset, cert)


def _default_box(field: NumberField) -> int:
    return {1: 1, 2: 40, 3: 12, 4: 8}[field.degree]

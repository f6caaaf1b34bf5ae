"""Parameter-dependent contact-form families and grid certificates.

Forms here live on a coframe (dp1[, dp2], static closed directions, algebra
coframe) with coefficients built from a small profile library whose
derivatives are validated against finite differences at construction.
Evaluation at parameter values hands everything to the exterior engine, so
a grid verdict is a statement about sampled top coefficients in a declared
coframe order, nothing more; reports label such verdicts "grid-certified",
in contrast to the exact Sturm certificates of the algebra layer.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _poly
from .exterior import (EXACT, FLOAT64, Coframe, Form, VectorElem,
                       interior_product, mask_blade)
from .liealg import LieAlgebra, Preset

Q = Fraction


class ProfileError(ValueError):
    """Profile derivative failed the finite-difference validation."""


class CapExceededError(RuntimeError):
    """A bounded search hit its cap; carries the violating sample if any."""

    def __init__(self, message, violating_s=None):
        super().__init__(message)
        self.violating_s = violating_s


_FD_STEP = 1e-5
_FD_TOL = 1e-6
_FD_POINTS = 64


class ProfileFn:
    """Scalar profile with an analytic derivative, closed under arithmetic.

    The derivative is checked against central finite differences on 64
    seeded sample points at construction (knots of piecewise profiles are
    excluded from the sampling).
    """

    def __init__(self, fn, dfn, label="f", domain=(-3.0, 3.0), knots=(),
                 check=True):
        self.fn = fn
        self.dfn = dfn
        self.label = label
        self.domain = domain
        self.knots = tuple(knots)
        if check:
            self._validate()

    def _validate(self):
        rng = np.random.default_rng(1234)
        a, b = self.domain
        count = 0
        for _ in range(6 * _FD_POINTS):
            if count >= _FD_POINTS:
                break
            s = float(rng.uniform(a, b))
            if any(abs(s - k) < 10 * _FD_STEP for k in self.knots):
                continue
            count += 1
            fd = (self.fn(s + _FD_STEP) - self.fn(s - _FD_STEP)) / (2 * _FD_STEP)
            dv = self.dfn(s)
            scale = max(1.0, abs(dv), abs(fd))
            if abs(fd - dv) > _FD_TOL * scale:
                raise ProfileError(
                    f"derivative of {self.label} fails the FD check at s={s}:"
                    f" analytic {dv} vs central difference {fd}"
                )

    def __call__(self, s):
        return self.fn(s)

    def deriv(self, s):
        return self.dfn(s)

    def derivative(self) -> "ProfileFn":
        dfn = self.dfn

        def numeric_second(s):
            # queried only by diagnostics beyond second order, never by
            # evaluation paths; a central difference suffices there
            return (dfn(s + _FD_STEP) - dfn(s - _FD_STEP)) / (2 * _FD_STEP)

        return ProfileFn(self.dfn, numeric_second, f"{self.label}'",
                         self.domain, self.knots, check=False)

    def __add__(self, other):
        other = as_profile(other)
        return ProfileFn(
            lambda s: self.fn(s) + other.fn(s),
            lambda s: self.dfn(s) + other.dfn(s),
            f"({self.label}+{other.label})",
            self.domain, self.knots + other.knots, check=False,
        )

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-as_profile(other))

    def __neg__(self):
        return ProfileFn(
            lambda s: -self.fn(s), lambda s: -self.dfn(s),
            f"(-{self.label})", self.domain, self.knots, check=False,
        )

    def __mul__(self, other):
        other = as_profile(other)
        return ProfileFn(
            lambda s: self.fn(s) * other.fn(s),
            lambda s: self.dfn(s) * other.fn(s) + self.fn(s) * other.dfn(s),
            f"({self.label}*{other.label})",
            self.domain, self.knots + other.knots, check=False,
        )

    __rmul__ = __mul__

    def precompose_affine(self, a, b) -> "ProfileFn":
        """The profile s -> f(a s + b)."""
        a, b = float(a), float(b)
        knots = tuple((k - b) / a for k in self.knots) if a else ()
        return ProfileFn(
            lambda s: self.fn(a * s + b),
            lambda s: a * self.dfn(a * s + b),
            f"{self.label}({a}s+{b})",
            self.domain, knots, check=False,
        )


def as_profile(x) -> ProfileFn:
    if isinstance(x, ProfileFn):
        return x
    return const(float(x))


def const(c) -> ProfileFn:
    c = float(c)
    return ProfileFn(lambda s: c, lambda s: 0.0, f"{c}", check=False)


def linear(a, b=0.0) -> ProfileFn:
    a, b = float(a), float(b)
    return ProfileFn(lambda s: a * s + b, lambda s: a, f"{a}s+{b}")


def exp_fn(a=1.0, b=0.0) -> ProfileFn:
    a, b = float(a), float(b)
    return ProfileFn(
        lambda s: math.exp(a * s + b),
        lambda s: a * math.exp(a * s + b),
        f"exp({a}s+{b})",
    )


def sin_fn(a=1.0, b=0.0) -> ProfileFn:
    a, b = float(a), float(b)
    return ProfileFn(
        lambda s: math.sin(a * s + b),
        lambda s: a * math.cos(a * s + b),
        f"sin({a}s+{b})",
    )


def cos_fn(a=1.0, b=0.0) -> ProfileFn:
    a, b = float(a), float(b)
    return ProfileFn(
        lambda s: math.cos(a * s + b),
        lambda s: -a * math.sin(a * s + b),
        f"cos({a}s+{b})",
    )


def smoothstep5() -> ProfileFn:
    """Quintic smoothstep x^3 (10 - 15x + 6x^2) clamped to [0, 1]; C^2."""
    def fn(s):
        if s <= 0.0:
            return 0.0
        if s >= 1.0:
            return 1.0
        return s ** 3 * (10 - 15 * s + 6 * s * s)

    def dfn(s):
        if s <= 0.0 or s >= 1.0:
            return 0.0
        return 30 * s * s * (1 - s) ** 2

    return ProfileFn(fn, dfn, "S5", knots=(0.0, 1.0))


def smoothstep3() -> ProfileFn:
    """Cubic smoothstep 3x^2 - 2x^3 clamped; the second cutoff choice (C^1)."""
    def fn(s):
        if s <= 0.0:
            return 0.0
        if s >= 1.0:
            return 1.0
        return s * s * (3 - 2 * s)

    def dfn(s):
        if s <= 0.0 or s >= 1.0:
            return 0.0
        return 6 * s * (1 - s)

    return ProfileFn(fn, dfn, "S3", knots=(0.0, 1.0))


def cutoff_step(kind="quintic") -> ProfileFn:
    """A cutoff psi with psi = 0 on (-inf, 0] and psi = 1 on [1, inf)."""
    return smoothstep5() if kind == "quintic" else smoothstep3()


def plateau_bump(eps=1.0, kind="quintic") -> ProfileFn:
    """Bump that is 1 exactly on [eps/3, 2eps/3] and 0 outside [0, eps]."""
    step = cutoff_step(kind)
    up = step.precompose_affine(3.0 / eps, 0.0)
    down = step.precompose_affine(-3.0 / eps, 3.0)
    mid = eps / 2

    def fn(s):
        return up(s) if s < mid else down(s)

    def dfn(s):
        return up.deriv(s) if s < mid else down.deriv(s)

    return ProfileFn(fn, dfn, f"plateau[{kind}]",
                     knots=(0.0, eps / 3, 2 * eps / 3, eps))


def lutz_twist_profile(k: int, eps=1.0, kind="quintic") -> ProfileFn:
    """phi_k(s) = s + 2 pi k S((s - eps/3) / (eps/3)): slope one outside the
    window (eps/3, 2eps/3), climbing by 2 pi k across it."""
    step = cutoff_step(kind).precompose_affine(3.0 / eps, -1.0)
    return linear(1.0, 0.0) + (2 * math.pi * k) * step


# -- parameter-dependent forms ------------------------------------------------


class ParamCoeff:
    """Sum of separable products f(p1) g(p2), closed under d/dp1, d/dp2."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = list(terms)

    @classmethod
    def of(cls, f=None, g=None):
        return cls([(as_profile(f if f is not None else 1.0),
                     as_profile(g if g is not None else 1.0))])

    def __call__(self, u, v=0.0):
        return sum(f(u) * g(v) for f, g in self.terms)

    def d1_coeff(self) -> "ParamCoeff":
        return ParamCoeff([(f.derivative(), g) for f, g in self.terms])

    def d2_coeff(self) -> "ParamCoeff":
        return ParamCoeff([(f, g.derivative()) for f, g in self.terms])

    def plus(self, other) -> "ParamCoeff":
        return ParamCoeff(self.terms + other.terms)

    def scaled(self, c) -> "ParamCoeff":
        c = float(c)
        return ParamCoeff([(as_profile(c) * f, g) for f, g in self.terms])


class ParamForm:
    """Form with profile coefficients over (params, static, algebra) slots.

    Parameter and static covectors are closed; algebra covectors carry the
    Chevalley-Eilenberg differential.  d() = dp1 ^ d/dp1 (+ dp2 ^ d/dp2)
    plus the constant-coefficient differential of each blade, the latter
    precomputed through the exterior engine.
    """

    def __init__(self, params, static, algebra, degree, terms):
        self.params = tuple(params)
        self.static = tuple(static)
        self.algebra = algebra
        alg_names = algebra.names if algebra is not None else ()
        self.coframe = Coframe(self.params + self.static + tuple(alg_names))
        self.degree = degree
        self.terms = dict(terms)
        self._dblade_cache = {}

    @property
    def nparams(self) -> int:
        return len(self.params)

    @property
    def offset(self) -> int:
        return len(self.params) + len(self.static)

    def copy_with(self, degree, terms) -> "ParamForm":
        return ParamForm(self.params, self.static, self.algebra, degree, terms)

    def add_term(self, blade_names, coeff: ParamCoeff):
        mask = 0
        for name in blade_names:
            mask |= 1 << self.coframe.index(name)
        self.terms[mask] = self.terms[mask].plus(coeff) if mask in self.terms \
            else coeff

    def plus(self, other: "ParamForm") -> "ParamForm":
        if other.coframe != self.coframe or other.degree != self.degree:
            raise ValueError("param form mismatch")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m].plus(c) if m in terms else c
        return self.copy_with(self.degree, terms)

    def at(self, u, v=0.0) -> Form:
        vals = {}
        for m, c in self.terms.items():
            x = c(u, v)
            if x:
                vals[m] = x
        return Form(self.coframe, self.degree, vals, FLOAT64)

    def _slot_d1(self, i):
        """d of the i-th basis covector as a float Form on the full coframe."""
        if self.algebra is None or i < self.offset:
            return None
        base = self.algebra._d1()[i - self.offset]
        if base.is_zero():
            return None
        terms = {m << self.offset: float(c) for m, c in base.terms.items()}
        return Form(self.coframe, 2, terms, FLOAT64)

    def _dblade(self, mask):
        """Constant part of d(blade): dict mask -> float coefficient."""
        if mask in self._dblade_cache:
            return self._dblade_cache[mask]
        cf = self.coframe
        idxs = mask_blade(mask)
        k = len(idxs)
        acc = {}
        for pos, i in enumerate(idxs):
            di = self._slot_d1(i)
            if di is None:
                continue
            before = Form(cf, pos, {_mask_of(idxs[:pos]): 1.0}, FLOAT64)
            after = Form(cf, k - pos - 1, {_mask_of(idxs[pos + 1:]): 1.0},
                         FLOAT64)
            piece = before.wedge(di).wedge(after)
            sign = -1.0 if pos % 2 else 1.0
            for m, c in piece.terms.items():
                acc[m] = acc.get(m, 0.0) + sign * c
        acc = {m: c for m, c in acc.items() if c != 0.0}
        self._dblade_cache[mask] = acc
        return acc

    def d(self) -> "ParamForm":
        if self.degree >= self.coframe.dim:
            return self.copy_with(self.coframe.dim, {})
        out = {}

        def add(mask, coeff):
            out[mask] = out[mask].plus(coeff) if mask in out else coeff

        for mask, coeff in self.terms.items():
            if not mask & 1:
                add(mask | 1, coeff.d1_coeff())  # dp1 lands in slot 0: sign +
            if self.nparams == 2 and not mask & 2:
                sign = -1.0 if mask & 1 else 1.0
                dc = coeff.d2_coeff()
                add(mask | 2, dc if sign > 0 else dc.scaled(-1.0))
            for m, c in self._dblade(mask).items():
                add(m, coeff.scaled(c))
        return self.copy_with(self.degree + 1, out)

    def d_squared_sup(self, samples) -> float:
        dd = self.d().d()
        worst = 0.0
        for pt in samples:
            u, v = pt if isinstance(pt, tuple) else (pt, 0.0)
            worst = max(worst, dd.at(u, v).sup_norm())
        return worst


def _mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# -- pairs as plain data -------------------------------------------------------


@dataclass
class PairData:
    """Algebra plus the float pair forms, however the caller produced them."""

    algebra: LieAlgebra
    alpha_plus: Form
    alpha_minus: Form
    label: str = "pair"

    @classmethod
    def from_preset(cls, preset: Preset) -> "PairData":
        if preset.alpha_plus is None or preset.alpha_minus is None:
            raise ValueError(f"preset {preset.key} carries no pair")
        return cls(preset.algebra, preset.alpha_plus.to_float(),
                   preset.alpha_minus.to_float(), preset.key)


def _as_pair(pair) -> PairData:
    if isinstance(pair, PairData):
        return pair
    if isinstance(pair, Preset):
        return PairData.from_preset(pair)
    raise TypeError("expected a Preset or PairData")


# -- profile triples and the Giroux-torsion family -------------------------------


@dataclass
class ProfileTriple:
    """lambda = f(s) a+ + g(s) a- + h(s) dt over (ds, dt, algebra)."""

    f: ProfileFn
    g: ProfileFn
    h: ProfileFn
    pair: PairData
    interval: tuple

    def __post_init__(self):
        s0, s1 = self.interval
        for i in range(257):
            s = s0 + (s1 - s0) * i / 256
            fv, gv = self.f(s), self.g(s)
            if fv < -1e-12 or gv < -1e-12 or (abs(fv) < 1e-12 and abs(gv) < 1e-12):
                raise ValueError(
                    f"profile triple invalid at s={s}: f={fv}, g={gv}"
                )

    def to_param_form(self) -> ParamForm:
        g = self.pair.algebra
        pf = ParamForm(("ds", "dt"), (), g, 1, {})
        off = pf.offset
        for m, c in self.pair.alpha_plus.terms.items():
            pf.terms[m << off] = ParamCoeff([(self.f * float(c), const(1.0))])
        for m, c in self.pair.alpha_minus.terms.items():
            key = m << off
            add = ParamCoeff([(self.g * float(c), const(1.0))])
            pf.terms[key] = pf.terms[key].plus(add) if key in pf.terms else add
        key = 1 << 1  # dt
        pf.terms[key] = ParamCoeff([(self.h, const(1.0))])
        return pf

    def lambda_at(self, s) -> Form:
        return self.to_param_form().at(s)


def gt_form(pair, k: int, check_pair: bool = True) -> ProfileTriple:
    """The Giroux-torsion family (1+cos)/2 a+ + (1-cos)/2 a- + sin s dt.

    Domain [0, 2 k pi].  Emits a warning (not an error) when the input pair
    fails its exact certificate, so corrupted fixtures stay usable in tests.
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    src = pair
    pair = _as_pair(pair)
    if check_pair and isinstance(src, Preset) and src.alpha_plus.ring.exact:
        from .liealg import liouville_pair_check
        cert = liouville_pair_check(src.algebra, src.alpha_plus,
                                    src.alpha_minus)
        if cert.verdict != "positive":
            import warnings
            warnings.warn(
                f"input pair is not certified Liouville ({cert.verdict}); "
                "the torsion family may fail its grid check",
                stacklevel=2,
            )
    f = 0.5 * (cos_fn() + 1.0)
    g = 0.5 * (const(1.0) - cos_fn())
    h = sin_fn()
    return ProfileTriple(f, g, h, pair, (0.0, 2 * math.pi * k))


@dataclass
class GridCheck:
    min_value: float
    argmin: float
    passed: bool
    samples: int
    orientation: str
    kind: str = "grid-certified"


def _grid_points(interval, grid_n):
    s0, s1 = interval
    pts = {s0 + (s1 - s0) * i / max(grid_n, 1) for i in range(grid_n + 1)}
    pts.add(s0)
    pts.add(s1)
    # all multiples of pi/2 inside: the critical angles of the trig profiles
    j = math.ceil(s0 / (math.pi / 2))
    while j * math.pi / 2 <= s1 + 1e-12:
        pts.add(j * math.pi / 2)
        j += 1
    return sorted(pts)


def contact_grid_check(obj, grid_n: int = 1024, threads: int = 1) -> GridCheck:
    """Sampled positivity of lambda ^ dlambda^(n-1) over the parameter grid."""
    if isinstance(obj, ProfileTriple):
        pf = obj.to_param_form()
        interval = obj.interval
    else:
        pf = obj
        interval = getattr(obj, "interval", (0.0, 2 * math.pi))
    dim = pf.coframe.dim
    if dim % 2 == 0:
        raise ValueError("contact check needs odd total dimension")
    npow = (dim - 1) // 2
    pts = _grid_points(interval, grid_n)
    if not pts:
        raise ValueError("empty grid")
    dpf = pf.d()

    def top_at(s):
        lam = pf.at(s)
        dlam = dpf.at(s)
        return lam.wedge(dlam.power(npow)).top_coefficient()

    values = _map_maybe_parallel(top_at, pts, threads)
    min_value, argmin = min(zip(values, pts))
    return GridCheck(min_value, argmin, min_value > 0, len(pts),
                     "volume = " + "∧".join(pf.coframe.names))


def _map_maybe_parallel(fn, pts, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, pts))
    return [fn(p) for p in pts]


# -- Reeb fields -----------------------------------------------------------------


@dataclass
class ReebResult:
    X: VectorElem          # coordinates on the algebra
    u: float
    s: float
    residual_pairing: float    # |lambda(R) - 1|
    residual_closure: float    # sup norm of i_R dlambda
    branch: str


def reeb_field(triple: ProfileTriple, s: float, tol: float = 1e-8) -> ReebResult:
    """Solve for R = X_s + u(s) dt from the stacked linear system.

    One scalar equation (hf'-h'f) a+(X) + (hg'-h'g) a-(X) = -h' plus the
    closure equations i_X (f da+ + g da-) = 0, solved by least squares with
    a residual gate; u follows the h- or h'-branch.
    """
    pair = triple.pair
    g = pair.algebra
    m = g.dim
    fv, gv, hv = triple.f(s), triple.g(s), triple.h(s)
    fp, gp, hp = triple.f.deriv(s), triple.g.deriv(s), triple.h.deriv(s)
    ap = pair.alpha_plus
    am = pair.alpha_minus
    dap = g.ce_differential(ap)
    dam = g.ce_differential(am)
    ap_vec = _covector_array(ap)
    am_vec = _covector_array(am)
    omega = fv * _skew_array(dap, m) + gv * _skew_array(dam, m)
    rows = [
        (hv * fp - hp * fv) * ap_vec + (hv * gp - hp * gv) * am_vec
    ]
    rhs = [-hp]
    for j in range(m):
        rows.append(-omega[j, :])  # i_X omega paired with e_j: omega(X, e_j)
        rhs.append(0.0)
    a = np.array(rows)
    bvec = np.array(rhs)
    x, *_ = np.linalg.lstsq(a, bvec, rcond=None)
    sys_residual = float(np.max(np.abs(a @ x - bvec)))
    if sys_residual > tol:
        raise ArithmeticError(
            f"Reeb system residual {sys_residual:.2e} at s={s}: "
            "form is not contact there"
        )
    ap_x = float(ap_vec @ x)
    am_x = float(am_vec @ x)
    if abs(hv) > 1e-8:
        u = (1.0 - fv * ap_x - gv * am_x) / hv
        branch = "h"
    elif abs(hp) > 1e-12:
        u = -(fp * ap_x + gp * am_x) / hp
        branch = "h-prime"
    else:
        raise ArithmeticError("h and h' both vanish: invalid profile triple")
    pf = triple.to_param_form()
    lam = pf.at(s)
    dlam = pf.d().at(s)
    coords = (0.0, u) + tuple(float(v) for v in x)
    rvec = VectorElem(lam.coframe, coords)
    pairing = abs(sum(lam.terms.get(1 << i, 0.0) * coords[i]
                      for i in range(lam.coframe.dim)) - 1.0)
    closure = interior_product(rvec, dlam).sup_norm()
    if pairing > tol or closure > tol:
        raise ArithmeticError(
            f"Reeb verification failed at s={s}: "
            f"|lambda(R)-1|={pairing:.2e}, |i_R dlambda|={closure:.2e}"
        )
    return ReebResult(VectorElem(g.coframe(), tuple(float(v) for v in x)),
                      float(u), float(s), pairing, closure, branch)


def reeb_branch_values(triple: ProfileTriple, s: float):
    """Both u-branch values where defined (for branch-consistency tests)."""
    pair = triple.pair
    g = pair.algebra
    res = reeb_field(triple, s)
    fv, gv, hv = triple.f(s), triple.g(s), triple.h(s)
    fp, gp, hp = triple.f.deriv(s), triple.g.deriv(s), triple.h.deriv(s)
    ap_x = float(_covector_array(pair.alpha_plus) @ np.array(res.X.coords))
    am_x = float(_covector_array(pair.alpha_minus) @ np.array(res.X.coords))
    u_h = (1.0 - fv * ap_x - gv * am_x) / hv if hv else None
    u_hp = -(fp * ap_x + gp * am_x) / hp if hp else None
    return u_h, u_hp


def _covector_array(a: Form) -> np.ndarray:
    n = a.coframe.dim
    out = np.zeros(n)
    for m, c in a.terms.items():
        out[m.bit_length() - 1] = float(c)
    return out


def _skew_array(w: Form, n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for m, c in w.terms.items():
        idx = mask_blade(m)
        out[idx[0], idx[1]] = float(c)
        out[idx[1], idx[0]] = -float(c)
    return out


# -- Lutz-Mori family identity ---------------------------------------------------


def lutz_lambda_k(pair, k: int, eps=1.0, kind="quintic") -> ParamForm:
    """lambda_k with the twist profile phi_k substituted into the family."""
    pair = _as_pair(pair)
    phi = lutz_twist_profile(k, eps, kind)
    cphi = ProfileFn(lambda s: math.cos(phi(s)),
                     lambda s: -math.sin(phi(s)) * phi.deriv(s),
                     f"cos(phi_{k})", knots=phi.knots, check=False)
    sphi = ProfileFn(lambda s: math.sin(phi(s)),
                     lambda s: math.cos(phi(s)) * phi.deriv(s),
                     f"sin(phi_{k})", knots=phi.knots, check=False)
    f = 0.5 * (cphi + 1.0)
    g = 0.5 * (const(1.0) - cphi)
    return ProfileTriple(f, g, sphi, pair, (-eps, eps)).to_param_form()


def lutz_family_check(pair, k: int, tau: float, psi: ProfileFn | None = None,
                      grid_n: int = 512, eps=1.0, kind="quintic") -> float:
    """Pointwise identity for the almost-contact homotopy interpolation.

    Verifies lambda_{k,tau} ^ (d lambda_{k,tau})^{n-1}
    = (1 - tau psi)^n lambda_k ^ (d lambda_k)^{n-1} on the grid and returns
    the worst relative error.
    """
    pair = _as_pair(pair)
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    if psi is None:
        psi = plateau_bump(eps, kind)
    lam_k = lutz_lambda_k(pair, k, eps, kind)
    scale = ProfileFn(lambda s: 1.0 - tau * psi(s),
                      lambda s: -tau * psi.deriv(s),
                      f"(1-{tau}psi)", knots=psi.knots, check=False)
    lam_tau = ParamForm(lam_k.params, lam_k.static, lam_k.algebra, 1, {})
    for m, c in lam_k.terms.items():
        lam_tau.terms[m] = ParamCoeff(
            [(scale * f, g) for f, g in c.terms]
        )
    ds_term = ParamCoeff([(ProfileFn(lambda s: tau * psi(s),
                                     lambda s: tau * psi.deriv(s),
                                     "tau psi", knots=psi.knots, check=False),
                           const(1.0))])
    key = 1  # ds
    lam_tau.terms[key] = lam_tau.terms[key].plus(ds_term) \
        if key in lam_tau.terms else ds_term
    dim = lam_k.coframe.dim
    npow = (dim + 1) // 2
    dlam_k = lam_k.d()
    dlam_tau = lam_tau.d()
    worst = 0.0
    for s in _grid_points((-eps, eps), grid_n):
        lhs = lam_tau.at(s).wedge(dlam_tau.at(s).power(npow - 1)) \
            .top_coefficient()
        base = lam_k.at(s).wedge(dlam_k.at(s).power(npow - 1)).top_coefficient()
        rhs = (1.0 - tau * psi(s)) ** npow * base
        err = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        worst = max(worst, err)
    return worst


# -- the nondegenerate 2-form cone -------------------------------------------------


@dataclass
class XiResult:
    identity_error: float
    top_power_value: float
    nonzero: bool


def xi_nondegenerate(pair, c_plus: float, c_minus: float, b: float,
                     delta: float) -> XiResult:
    """Check w^p = p B dt ^ (C+ a+ - C- a-) ^ (C+ da+ + C- da-)^(p-1).

    Here p is the top power (half the dimension of the t-circle times the
    algebra), so for a (2n-3)-dimensional pair algebra p = n - 1 matches the
    coefficient in the displayed identity.
    """
    pair = _as_pair(pair)
    if c_plus < 0 or c_minus < 0 or (c_plus == 0 and c_minus == 0):
        raise ValueError("need C+ and C- nonnegative, not both zero")
    g = pair.algebra
    cf = Coframe(("dt",) + g.names)
    ap = _shift_to(pair.alpha_plus, cf, 1)
    am = _shift_to(pair.alpha_minus, cf, 1)
    dap = _shift_to(g.ce_differential(pair.alpha_plus), cf, 1)
    dam = _shift_to(g.ce_differential(pair.alpha_minus), cf, 1)
    dt = Form.covector(cf, 0, ring=FLOAT64)
    omega_bundle = c_plus * dap + c_minus * dam
    gamma = c_plus * ap + (-c_minus) * am
    omega = omega_bundle + delta * ap.wedge(am) + b * dt.wedge(gamma)
    p = cf.dim // 2
    lhs = omega.power(p).top_coefficient()
    rhs = (p * b) * dt.wedge(gamma).wedge(omega_bundle.power(p - 1)) \
        .top_coefficient()
    err = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return XiResult(err, lhs, lhs != 0.0)


def _shift_to(a: Form, cf: Coframe, offset: int) -> Form:
    terms = {m << offset: float(c) for m, c in a.terms.items()}
    return Form(cf, a.degree, terms, FLOAT64)


# -- linear contact-product models --------------------------------------------------


@dataclass
class LinearModelResult:
    passed: bool
    min_top: float
    factor_error: float


def linear_model_pair_check(g: LieAlgebra, alpha: Form, mu: float, nu: float,
                            grid_n: int = 64) -> LinearModelResult:
    """Positivity and closed-form factorization of the product model volume.

    The model B = a(s) e^{nu t} alpha + b(s) e^{mu t} dtheta on
    (ds, dtheta, dt) x g, with a = e^s + e^-s and b = e^s - e^-s, must have
    dB^(q+2) = (q+1)(q+2) a^q e^{(mu + (q+1) nu) t} (nu a^2 - mu b^2)
    ds^dtheta^dt^alpha^dalpha^q.
    """
    if not nu > mu:
        raise ValueError("need nu > mu")
    from .liealg import contact_check
    if contact_check(g, alpha if alpha.ring.exact else alpha).verdict \
            != "positive":
        raise ValueError("base form must be positive contact")
    q = (g.dim - 1) // 2
    a_prof = exp_fn(1.0) + exp_fn(-1.0)
    b_prof = exp_fn(1.0) - exp_fn(-1.0)
    pf = ParamForm(("ds", "dt"), ("dθ",), g, 1, {})
    off = pf.offset
    for m, c in alpha.terms.items():
        pf.terms[m << off] = ParamCoeff([(a_prof * float(c), exp_fn(nu))])
    pf.terms[1 << 2] = ParamCoeff([(b_prof, exp_fn(mu))])  # dtheta slot
    dpf = pf.d()
    alpha_dalpha = alpha.to_float().wedge(
        g.ce_differential(alpha.to_float()).power(q)
    )
    base_vol = alpha_dalpha.top_coefficient()
    worst_err = 0.0
    min_top = math.inf
    grid = np.linspace(-2.0, 2.0, grid_n)
    for s in grid:
        a_v, b_v = a_prof(s), b_prof(s)
        for t in grid:
            # declared orientation is ds^dθ^dt^(algebra); storage order is
            # (ds, dt, dθ, algebra), one transposition away
            top = -dpf.at(s, t).power(q + 2).top_coefficient()
            predicted = (
                (q + 1) * (q + 2) * a_v ** q
                * math.exp((mu + (q + 1) * nu) * t)
                * (nu * a_v ** 2 - mu * b_v ** 2) * base_vol
            )
            err = abs(top - predicted) / max(1.0, abs(top), abs(predicted))
            worst_err = max(worst_err, err)
            min_top = min(min_top, top)
    return LinearModelResult(min_top > 0 and worst_err <= 1e-8,
                             min_top, worst_err)


# -- weak domination --------------------------------------------------------------


@dataclass
class WeakFillingCertificate:
    verdict: str                  # positive | indefinite | negative
    symplectic_ok: bool           # alpha ^ Omega^(n-1) > 0
    ray_ok: bool                  # positivity for all tau > 0
    kind: str
    polynomial: list | None = None
    witness: tuple | None = None
    orientation: str = ""


def weak_domination_ray_check(alpha: Form, omega: Form,
                              dalpha: Form) -> WeakFillingCertificate:
    """Certify alpha ^ (Omega + tau dalpha)^(n-1) > 0 for all tau >= 0.

    Exact (Sturm on the tau-polynomial) when all three forms are rational;
    float fallback samples tau on [0, 1000] and tests the leading sign.
    Reports the two halves separately: Omega symplectic on the hyperplane
    (tau = 0) and the open-ray positivity.
    """
    if alpha.degree != 1 or omega.degree != 2 or dalpha.degree != 2:
        raise ValueError("need a 1-form and two 2-forms")
    dim = alpha.coframe.dim
    if dim % 2 == 0:
        raise ValueError("weak domination lives on odd dimensions")
    npow = (dim - 1) // 2
    exact = alpha.ring.exact and omega.ring.exact and dalpha.ring.exact
    orientation = "volume = " + "∧".join(alpha.coframe.names)
    if exact:
        coeffs = []
        for j in range(npow + 1):
            c = Q(math.comb(npow, j)) * alpha.wedge(
                dalpha.power(j).wedge(omega.power(npow - j))
            ).top_coefficient()
            coeffs.append(c)
        p = _poly.trim([Q(c) for c in coeffs])
        symplectic_ok = _poly.evaluate(p, 0) > 0 if p else False
        ray_ok, witness = _poly.positive_on_open_ray(p)
        verdict = "positive" if (symplectic_ok and ray_ok) else "indefinite"
        return WeakFillingCertificate(
            verdict, symplectic_ok, ray_ok, "exact-sturm", p, witness,
            orientation,
        )
    taus = np.concatenate([np.linspace(0, 1, 256), np.linspace(1, 1000, 256)])
    alpha_f, omega_f, dalpha_f = (x.to_float() for x in (alpha, omega, dalpha))
    worst = (math.inf, None)
    for tau in taus:
        val = alpha_f.wedge((omega_f + float(tau) * dalpha_f).power(npow)) \
            .top_coefficient()
        if val < worst[0]:
            worst = (val, float(tau))
    lead = alpha_f.wedge(dalpha_f.power(npow)).top_coefficient()
    symplectic_ok = alpha_f.wedge(omega_f.power(npow)).top_coefficient() > 0
    ray_ok = worst[0] > 0 and lead > 0
    verdict = "positive" if (symplectic_ok and ray_ok) else "indefinite"
    return WeakFillingCertificate(
        verdict, symplectic_ok, ray_ok, "grid",
        None, None if ray_ok else ("point",) + worst[::-1], orientation,
    )


def sol_weak_filling_ray_fixture(eps) -> WeakFillingCertificate:
    """Boundary-face weak domination for the suspension model, at s0 = 0.

    alpha = dθ + a+ + a-,  Omega = eps (dθ ^ T* + X* ^ Y*) + ds ^ (a+ - a-)
    + da+ + da-, and dalpha carries the collar ds terms; with s0 = 0 all
    coefficients are rational so the ray certificate is exact.
    """
    eps = Q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    from .liealg import sol_from_sl2
    preset = sol_from_sl2([[2, 1], [1, 1]])
    g = preset.algebra
    # boundary orientation of the face: dθ before ds makes the ray positive
    cf = Coframe(("dθ", "ds") + g.names)
    ap = _shift_exact(preset.alpha_plus, cf, 2)
    am = _shift_exact(preset.alpha_minus, cf, 2)
    dap = _shift_exact(g.ce_differential(preset.alpha_plus), cf, 2)
    dam = _shift_exact(g.ce_differential(preset.alpha_minus), cf, 2)
    ds = Form.covector(cf, 1)
    dtheta = Form.covector(cf, 0)
    tstar = Form.covector(cf, 2 + g.coframe().index("T*"))
    xstar = Form.covector(cf, 2 + g.coframe().index("X*"))
    ystar = Form.covector(cf, 2 + g.coframe().index("Y*"))
    alpha = dtheta + ap + am
    dalpha = ds.wedge(ap - am) + dap + dam
    omega_closed = dtheta.wedge(tstar) + xstar.wedge(ystar)
    omega = eps * omega_closed + dalpha
    return weak_domination_ray_check(alpha, omega, dalpha)


def _shift_exact(a: Form, cf: Coframe, offset: int) -> Form:
    terms = {m << offset: c for m, c in a.terms.items()}
    return Form(cf, a.degree, terms, EXACT)


# -- the suspension weak-filling fixture --------------------------------------------


@dataclass
class SolFixtureResult:
    wedge_plus_zero: bool
    wedge_minus_zero: bool
    min_top: float
    passed: bool


def sol_weak_filling_fixture(eps: float, grid_n: int = 128,
                             c: float = 2.0) -> SolFixtureResult:
    """Nondegeneracy of d[e^s a+ + e^-s a- + sigma dθ] + eps w on a grid.

    First verifies the wedge identities w ^ da± = 0 exactly in the
    invariant frame (the input that makes the perturbation harmless at
    every scale), then samples the top power of the perturbed product form
    over a (sigma, s) grid.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    from .liealg import sol_from_sl2
    preset = sol_from_sl2([[2, 1], [1, 1]])
    g = preset.algebra
    # exact check of w ^ da± = 0 on the theta-extended frame
    cf = Coframe(("dθ",) + g.names)
    dap = _shift_exact(g.ce_differential(preset.alpha_plus), cf, 1)
    dam = _shift_exact(g.ce_differential(preset.alpha_minus), cf, 1)
    dtheta = Form.covector(cf, 0)
    tstar = Form.covector(cf, 1 + g.coframe().index("T*"))
    xstar = Form.covector(cf, 1 + g.coframe().index("X*"))
    ystar = Form.covector(cf, 1 + g.coframe().index("Y*"))
    omega_closed = dtheta.wedge(tstar) + xstar.wedge(ystar)
    plus_zero = omega_closed.wedge(dap).is_zero()
    minus_zero = omega_closed.wedge(dam).is_zero()
    # beta = e^s a+ + e^-s a- + sigma dθ as a two-parameter form
    pf = ParamForm(("ds", "dσ"), ("dθ",), g, 1, {})
    off = pf.offset
    for m, cc in preset.alpha_plus.terms.items():
        pf.terms[m << off] = ParamCoeff([(exp_fn(1.0) * float(cc), const(1.0))])
    for m, cc in preset.alpha_minus.terms.items():
        key = m << off
        add = ParamCoeff([(exp_fn(-1.0) * float(cc), const(1.0))])
        pf.terms[key] = pf.terms[key].plus(add) if key in pf.terms else add
    pf.terms[1 << 2] = ParamCoeff([(const(1.0), linear(1.0))])  # sigma dθ
    dbeta = pf.d()
    omega_shift = Form(
        dbeta.coframe, 2,
        {m << 2: float(cc) for m, cc in omega_closed.terms.items()}, FLOAT64,
    )
    min_top = math.inf
    p = dbeta.coframe.dim // 2
    for s in np.linspace(-c, c, grid_n):
        for sigma in np.linspace(-1.0, 1.0, grid_n):
            w = dbeta.at(s, sigma) + float(eps) * omega_shift
            top = w.power(p).top_coefficient()
            min_top = min(min_top, top)
    return SolFixtureResult(plus_zero, minus_zero, min_top,
                            plus_zero and minus_zero and min_top > 0)


# -- cutoff Liouville forms ---------------------------------------------------------


def cutoff_liouville(pair, c: float, psi: ProfileFn) -> ParamForm:
    """beta = psi(c+s) e^s a+ + psi(c-s) e^-s a- over (ds, algebra)."""
    pair = _as_pair(pair)
    if psi(0.0) != 0.0 or psi(1.0) != 1.0 or psi(-1.0) != 0.0 or psi(2.0) != 1.0:
        raise ValueError("psi must vanish on (-inf,0] and equal 1 on [1,inf)")
    g = pair.algebra
    pf = ParamForm(("ds",), (), g, 1, {})
    off = pf.offset
    plus_prof = psi.precompose_affine(1.0, c) * exp_fn(1.0)
    minus_prof = psi.precompose_affine(-1.0, c) * exp_fn(-1.0)
    for m, cc in pair.alpha_plus.terms.items():
        pf.terms[m << off] = ParamCoeff([(plus_prof * float(cc), const(1.0))])
    for m, cc in pair.alpha_minus.terms.items():
        key = m << off
        add = ParamCoeff([(minus_prof * float(cc), const(1.0))])
        pf.terms[key] = pf.terms[key].plus(add) if key in pf.terms else add
    return pf


def cutoff_positive_on_grid(pair, c: float, psi: ProfileFn,
                            grid_n: int = 256):
    """(min top of dbeta^n, argmin) over s in [-c-1, c+1]."""
    pf = cutoff_liouville(pair, c, psi)
    dpf = pf.d()
    p = pf.coframe.dim // 2
    worst = (math.inf, None)
    for s in np.linspace(-c - 1.0, c + 1.0, grid_n + 1):
        top = dpf.at(s).power(p).top_coefficient()
        if top < worst[0]:
            worst = (top, float(s))
    return worst


def min_c_search(pair, psi: ProfileFn, grid_n: int = 256,
                 cap: float = 64.0, tol: float = 1e-3) -> float:
    """Smallest c (within tol) whose cutoff form is positive on the grid."""
    pair = _as_pair(pair)

    def passes(c):
        return cutoff_positive_on_grid(pair, c, psi, grid_n)[0] > 0

    if passes(0.0):
        return 0.0
    if not passes(cap):
        worst = cutoff_positive_on_grid(pair, cap, psi, grid_n)
        raise CapExceededError(
            f"no positive cutoff constant below {cap}", worst[1]
        )
    lo, hi = 0.0, cap
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- ideal annulus and reparametrization checks --------------------------------------


def ideal_annulus_check(grid_n: int = 512) -> float:
    """max |sin s (cot s dθ + dt) - (cos s dθ + sin s dt)| on (0, pi)."""
    worst = 0.0
    for i in range(1, grid_n):
        s = math.pi * i / grid_n
        worst = max(
            worst,
            abs(math.sin(s) * (math.cos(s) / math.sin(s)) - math.cos(s)),
            abs(math.sin(s) * 1.0 - math.sin(s)),
        )
    return worst


def gt_reparam_check(pair, grid_n: int = 512) -> float:
    """Substituting u = ln((1+cos s)/ sin s) reproduces the torsion form.

    Compares sin(s) [dt + (e^u a+ + e^-u a-)/2] with the family form
    coefficientwise on an interior grid of (0, pi).
    """
    pair = _as_pair(pair)
    triple = gt_form(pair, 1)
    worst = 0.0
    for i in range(1, grid_n):
        s = math.pi * i / grid_n
        u = math.log((1 + math.cos(s)) / math.sin(s))
        sin_s = math.sin(s)
        fpred = sin_s * math.exp(u) / 2
        gpred = sin_s * math.exp(-u) / 2
        worst = max(worst, abs(fpred - triple.f(s)), abs(gpred - triple.g(s)),
                    abs(sin_s - triple.h(s)))
    return worst


# -- agreement between the exact pair certificate and the direct grid ---------------


def beta_grid_check(pair, s_range=(-10.0, 10.0), grid_n: int = 256):
    """(min, argmin) of the top of d(e^-s a- + e^s a+)^n over the s-grid."""
    pair = _as_pair(pair)
    g = pair.algebra
    pf = ParamForm(("ds",), (), g, 1, {})
    off = pf.offset
    for m, cc in pair.alpha_plus.terms.items():
        pf.terms[m << off] = ParamCoeff([(exp_fn(1.0) * float(cc), const(1.0))])
    for m, cc in pair.alpha_minus.terms.items():
        key = m << off
        add = ParamCoeff([(exp_fn(-1.0) * float(cc), const(1.0))])
        pf.terms[key] = pf.terms[key].plus(add) if key in pf.terms else add
    dpf = pf.d()
    p = pf.coframe.dim // 2
    worst = (math.inf, None)
    for s in np.linspace(s_range[0], s_range[1], grid_n + 1):
        top = dpf.at(s).power(p).top_coefficient()
        if top < worst[0]:
            worst = (top, float(s))
    return worst


def run_family_descriptor(descriptor: dict) -> dict:
    """Run a family check from its JSON descriptor.

    {"family": "gt", "k": 2, "pair": "sol:2,1,1,1", "grid": 1024} returns
    the grid result with verdict and the orientation declaration.
    """
    from .liealg import preset
    family = descriptor.get("family")
    if family != "gt":
        raise ValueError(f"unknown family {family!r}")
    pair = preset(descriptor["pair"])
    k = int(descriptor.get("k", 1))
    grid_n = int(descriptor.get("grid", 1024))
    chk = contact_grid_check(gt_form(pair, k), grid_n,
                             threads=int(descriptor.get("threads", 1)))
    return {
        "family": "gt",
        "pair": descriptor["pair"],
        "k": k,
        "grid": grid_n,
        "min_value": chk.min_value,
        "argmin": chk.argmin,
        "verdict": "pass" if chk.passed else "negative",
        "certificate": chk.kind,
        "orientation": chk.orientation,
    }


def product_pair_fixture(pair, alpha2_algebra: LieAlgebra, alpha2: Form):
    """Uncertified generator for the pair extension a± + e^t a2.

    Returns the two parameter-dependent forms on (dt,) x g x g2 without any
    certificate; callers may grid-sample them but no exactness is claimed.
    """
    pair = _as_pair(pair)
    g1 = pair.algebra
    merged = _merge_algebras(g1, alpha2_algebra)
    out = []
    for base in (pair.alpha_plus, pair.alpha_minus):
        pf = ParamForm(("dt",), (), merged, 1, {})
        off = pf.offset
        for m, c in base.terms.items():
            pf.terms[m << off] = ParamCoeff([(const(float(c)), const(1.0))])
        for m, c in alpha2.terms.items():
            key = m << (off + g1.dim)
            pf.terms[key] = ParamCoeff([(exp_fn(1.0) * float(c), const(1.0))])
        out.append(pf)
    return tuple(out)


def _merge_algebras(g1: LieAlgebra, g2: LieAlgebra) -> LieAlgebra:
    names = tuple(g1.names) + tuple(f"₂{n}" for n in g2.names)
    brackets = dict(g1.brackets)
    for (i, j), row in g2.brackets.items():
        brackets[(i + g1.dim, j + g1.dim)] = {
            k + g1.dim: v for k, v in row.items()
        }
    return LieAlgebra(names, brackets)

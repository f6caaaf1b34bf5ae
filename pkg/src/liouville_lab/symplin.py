"""Cotamed complex structures and simultaneous pencil reduction.

Conventions, stated in every report: a skew form acts as w(v, w) = v^T A w,
taming means the symmetrized matrix (A J - J^T A)/2 is positive definite,
and the pencil endomorphism is B = A0^{-1} A1.  The block reduction follows
the chain construction of the generalized-eigenspace proof: real-eigenvalue
chains v_j = eps^{-j} (B - lam)^j v_0 paired with w-chains normalized by
w0(v_k, w_k) = 1, and complex chains realified as sqrt(2) (Re, -Im), which
orients each 4x4 block to the printed (mu, nu) model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _poly
from .exterior import EXACT, Coframe, Form

Q = Fraction

MAX_PENCIL_DIM = 12


class PencilError(ValueError):
    """Ill-conditioned pencil: eigenvalue clusters cannot be separated."""


class CotamedExistenceError(ValueError):
    """construct_cotamed called on a pencil with no cotamed structure."""


class RetryExhaustedError(RuntimeError):
    """Verification kept failing after the epsilon-halving schedule."""


# -- skew forms and complex structures ------------------------------------------


@dataclass
class SkewForm:
    """Antisymmetric bilinear form w(v, w) = v^T A w; exact or float."""

    matrix: object  # list-of-lists of Fractions, or np.ndarray

    def __post_init__(self):
        if isinstance(self.matrix, np.ndarray):
            a = self.matrix
            if a.shape[0] != a.shape[1]:
                raise ValueError("square matrix required")
            if a.shape[0] % 2 or a.shape[0] > MAX_PENCIL_DIM:
                raise ValueError(f"dimension must be even and <= {MAX_PENCIL_DIM}")
            if np.max(np.abs(a + a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
                raise ValueError("matrix is not antisymmetric")
            self.exact = False
        else:
            rows = [[Q(x) for x in r] for r in self.matrix]
            n = len(rows)
            if any(len(r) != n for r in rows):
                raise ValueError("square matrix required")
            if n % 2 or n > MAX_PENCIL_DIM:
                raise ValueError(f"dimension must be even and <= {MAX_PENCIL_DIM}")
            for i in range(n):
                for j in range(n):
                    if rows[i][j] != -rows[j][i]:
                        raise ValueError("matrix is not antisymmetric")
            self.matrix = rows
            self.exact = True

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def to_array(self) -> np.ndarray:
        if isinstance(self.matrix, np.ndarray):
            return self.matrix
        return np.array([[float(x) for x in r] for r in self.matrix])

    def to_form(self) -> Form:
        """The corresponding 2-form sum_{i<j} A_ij e^i ^ e^j (exact only)."""
        if not self.exact:
            raise ValueError("to_form requires an exact skew form")
        n = self.dim
        cf = Coframe(tuple(f"e{i + 1}" for i in range(n)))
        terms = {}
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j]:
                    terms[(1 << i) | (1 << j)] = self.matrix[i][j]
        return Form(cf, 2, terms, EXACT)


def standard_omega(n2: int) -> SkewForm:
    """Standard form as interleaved Darboux pairs (e1,e2), (e3,e4), ...

    This convention has Pfaffian +1 in every dimension; the block basis of
    the pencil reduction uses the grouped [[0, I], [-I, 0]] layout instead.
    """
    rows = [[Q(0)] * n2 for _ in range(n2)]
    for i in range(0, n2, 2):
        rows[i][i + 1] = Q(1)
        rows[i + 1][i] = Q(-1)
    return SkewForm(rows)


@dataclass
class ComplexStructure:
    """Matrix J with J^2 = -I (1e-10 in float, exact for rational input)."""

    matrix: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.matrix, dtype=float)
        self.matrix = J
        n = J.shape[0]
        if np.max(np.abs(J @ J + np.eye(n))) > 1e-10:
            raise ValueError("matrix does not square to -identity")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def pfaffian(a: SkewForm) -> Fraction:
    """Exact recursive-expansion Pfaffian of a rational skew form."""
    if not a.exact:
        raise ValueError("exact Pfaffian requires a rational skew form")
    value = _pf_rows(a.matrix)
    det = _poly.frac_det(a.matrix)
    if value * value != det:
        raise ArithmeticError("Pfaffian square differs from determinant")
    return value


def _pf_rows(rows) -> Fraction:
    n = len(rows)
    if n == 0:
        return Q(1)
    if n % 2:
        return Q(0)
    if n == 2:
        return rows[0][1]
    total = Q(0)
    sign = 1
    for j in range(1, n):
        c = rows[0][j]
        if c != 0:
            keep = [k for k in range(1, n) if k != j]
            sub = [[rows[a][b] for b in keep] for a in keep]
            total += sign * c * _pf_rows(sub)
        sign = -sign
    return total


def is_nondegenerate(a: SkewForm) -> bool:
    if a.exact:
        return pfaffian(a) != 0
    arr = a.to_array()
    det = float(np.linalg.det(arr))
    scale = max(1.0, float(np.max(np.abs(arr)))) ** a.dim
    return abs(det) > 1e-12 * scale


def tames(a: SkewForm, j: ComplexStructure, tol: float = 1e-10) -> bool:
    """w tames J iff the symmetric part of A J is positive definite."""
    if a.dim != j.dim:
        raise ValueError("dimension mismatch")
    if a.exact:
        Jm = j.matrix
        if np.allclose(Jm, np.round(Jm)):
            rows = [[Q(int(round(Jm[r][c]))) for c in range(a.dim)]
                    for r in range(a.dim)]
            prod = [[sum(a.matrix[r][k] * rows[k][c] for k in range(a.dim))
                     for c in range(a.dim)] for r in range(a.dim)]
            sym = [[(prod[r][c] + prod[c][r]) / 2 for c in range(a.dim)]
                   for r in range(a.dim)]
            return _exact_positive_definite(sym)
    arr = a.to_array()
    m = arr @ j.matrix
    s = (m + m.T) / 2
    eig = np.linalg.eigvalsh(s)
    scale = max(1.0, float(np.max(np.abs(s))))
    return bool(eig[0] > tol * scale)


def taming_margin(a: SkewForm, j: ComplexStructure) -> float:
    arr = a.to_array()
    m = arr @ j.matrix
    s = (m + m.T) / 2
    return float(np.linalg.eigvalsh(s)[0])


def _exact_positive_definite(sym) -> bool:
    n = len(sym)
    for k in range(1, n + 1):
        minor = [row[:k] for row in sym[:k]]
        if _poly.frac_det(minor) <= 0:
            return False
    return True


# -- the pencil endomorphism and existence tests ---------------------------------


def pencil_endomorphism(a0: SkewForm, a1: SkewForm) -> np.ndarray:
    """B = A0^{-1} A1; verified w0-symmetric (A0 B is antisymmetric)."""
    if a0.dim != a1.dim:
        raise ValueError("dimension mismatch")
    if not is_nondegenerate(a0):
        raise ValueError("omega_0 is degenerate")
    m0 = a0.to_array()
    m1 = a1.to_array()
    b = np.linalg.solve(m0, m1)
    check = m0 @ b
    if np.max(np.abs(check + check.T)) > 1e-9 * max(1.0, np.max(np.abs(check))):
        raise ArithmeticError("pencil endomorphism lost w0-symmetry")
    return b


def _has_negative_real_eigenvalue(b: np.ndarray, rel_tol: float = 1e-8) -> bool:
    for lam in np.linalg.eigvals(b):
        if lam.real < 0 and abs(lam.imag) <= rel_tol * abs(lam.real):
            return True
    return False


def segment_nondegenerate(a0: SkewForm, a1: SkewForm,
                          cross_validate: bool = True,
                          samples: int = 10 ** 4) -> bool:
    """Whether (1-t) w0 + t w1 stays symplectic on [0, 1].

    Decided by the spectrum of B = A0^{-1} A1 (no negative real eigenvalue);
    cross-validated by sampling the determinant along the segment.
    """
    b = pencil_endomorphism(a0, a1)
    if not is_nondegenerate(a1):
        raise ValueError("omega_1 is degenerate")
    verdict = not _has_negative_real_eigenvalue(b)
    if cross_validate:
        m0, m1 = a0.to_array(), a1.to_array()
        t = np.linspace(0.0, 1.0, samples)
        mats = (1 - t)[:, None, None] * m0 + t[:, None, None] * m1
        dets = np.linalg.det(mats)
        scale = max(abs(dets[0]), abs(dets[-1]))
        sampled = bool(np.min(np.abs(dets)) > 1e-9 * scale)
        if verdict and not sampled:
            # a sampled near-zero overrules a borderline spectral verdict;
            # the converse does not (degeneracies can fall between samples)
            verdict = False
    return verdict


def ray_nondegenerate(a0: SkewForm, a1: SkewForm) -> bool:
    """Whether w0 + t w1 stays symplectic for all t >= 0."""
    b = pencil_endomorphism(a0, a1)
    if not is_nondegenerate(a1):
        raise ValueError("omega_1 is degenerate")
    return not _has_negative_real_eigenvalue(b)


def cotamed_exists(a0: SkewForm, a1: SkewForm) -> bool:
    """Whether some J is tamed by both forms (same spectral criterion)."""
    return ray_nondegenerate(a0, a1)


# -- simultaneous reduction -------------------------------------------------------


@dataclass
class RealBlock:
    eigenvalue: object  # float, or Fraction on the exact path
    chain_length: int   # k + 1

    @property
    def size(self) -> int:
        return 2 * self.chain_length


@dataclass
class ComplexBlock:
    mu: float
    nu: float
    chain_length: int

    @property
    def size(self) -> int:
        return 4 * self.chain_length


@dataclass
class PencilBlocks:
    blocks: list
    basis: np.ndarray      # columns are the basis vectors
    eps: float
    omega0_residual: float
    omega1_residual: float

    def model_matrices(self):
        return _model_matrices(self.blocks)


def _model_matrices(blocks):
    """(A0_model, A1_model) in the block basis (v's first, then w's)."""
    size = sum(b.size for b in blocks)
    a0 = np.zeros((size, size))
    a1 = np.zeros((size, size))
    at = 0
    for b in blocks:
        if isinstance(b, RealBlock):
            m = b.chain_length
            lam_blk = float(b.eigenvalue) * np.eye(m)
            eye = np.eye(m)
            a0[at:at + m, at + m:at + 2 * m] = eye
            a0[at + m:at + 2 * m, at:at + m] = -eye
            a1[at:at + m, at + m:at + 2 * m] = lam_blk
            a1[at + m:at + 2 * m, at:at + m] = -lam_blk.T
            at += 2 * m
        else:
            m = b.chain_length
            rot = np.array([[b.mu, b.nu], [-b.nu, b.mu]])
            eye2 = np.eye(2)
            big = 2 * m
            lam_blk = np.zeros((big, big))
            id_blk = np.zeros((big, big))
            for i in range(m):
                lam_blk[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rot
                id_blk[2 * i:2 * i + 2, 2 * i:2 * i + 2] = eye2
            a0[at:at + big, at + big:at + 2 * big] = id_blk
            a0[at + big:at + 2 * big, at:at + big] = -id_blk
            a1[at:at + big, at + big:at + 2 * big] = lam_blk
            a1[at + big:at + 2 * big, at:at + big] = -lam_blk.T
            at += 2 * big
    return a0, a1


def _model_with_chain_eps(blocks, eps):
    """Block matrices including the eps chain couplings (the exact target)."""
    a0, a1 = _model_matrices(blocks)
    at = 0
    for b in blocks:
        if isinstance(b, RealBlock):
            m = b.chain_length
            for i in range(m - 1):
                a1[at + i, at + m + i + 1] += eps
                a1[at + m + i + 1, at + i] -= eps
            at += 2 * m
        else:
            m = b.chain_length
            big = 2 * m
            for i in range(m - 1):
                for d in range(2):
                    a1[at + 2 * i + d, at + big + 2 * (i + 1) + d] += eps
                    a1[at + big + 2 * (i + 1) + d, at + 2 * i + d] -= eps
            at += 2 * big
    return a0, a1


def _cluster_eigenvalues(vals, rel_tol=1e-7):
    """Group numerically repeated eigenvalues; raise if gaps are ambiguous."""
    scale = max(1.0, float(np.max(np.abs(vals))))
    order = sorted(range(len(vals)), key=lambda i: (vals[i].real, vals[i].imag))
    clusters = []
    for idx in order:
        v = vals[idx]
        for c in clusters:
            if abs(v - c[0]) <= rel_tol * scale * 10:
                c[1].append(idx)
                c[0] = np.mean([vals[i] for i in c[1]])
                break
        else:
            clusters.append([v, [idx]])
    centers = [c[0] for c in clusters]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            gap = abs(centers[i] - centers[j])
            if gap < 100 * rel_tol * scale:
                raise PencilError(
                    f"eigenvalue clusters separated by only {gap:.2e}"
                )
    return [(complex(c[0]), len(c[1])) for c in clusters]


def simultaneous_reduce(a0: SkewForm, a1: SkewForm, eps: float = 1e-3,
                        max_retries: int = 6) -> PencilBlocks:
    """Simultaneous block reduction of two symplectic forms.

    Returns a basis in which w0 is exactly standard blockwise and w1 is
    within 10*eps of the block model assembled from real eigenvalues and
    complex (mu, nu) pairs.  Rational inputs whose endomorphism has rational
    spectrum and is diagonalizable take an exact path.
    """
    if not (is_nondegenerate(a0) and is_nondegenerate(a1)):
        raise ValueError("both forms must be nondegenerate")
    exact = a0.exact and a1.exact
    if exact:
        got = _try_exact_reduce(a0, a1)
        if got is not None:
            return got
    current_eps = eps
    last_error = None
    for _ in range(max_retries + 1):
        try:
            result = _float_reduce(a0, a1, current_eps)
        except PencilError:
            raise
        except (ArithmeticError, np.linalg.LinAlgError) as err:
            last_error = err
            current_eps /= 2
            continue
        if result.omega0_residual <= 1e-9 and result.omega1_residual <= 10 * eps:
            return result
        last_error = ArithmeticError(
            f"residuals {result.omega0_residual:.2e}/{result.omega1_residual:.2e}"
        )
        current_eps /= 2
    raise RetryExhaustedError(f"reduction failed after retries: {last_error}")


def _float_reduce(a0: SkewForm, a1: SkewForm, eps: float) -> PencilBlocks:
    m0 = a0.to_array()
    b = pencil_endomorphism(a0, a1)
    n = b.shape[0]
    vals = np.linalg.eigvals(b)
    clusters = _cluster_eigenvalues(vals)
    blocks = []
    columns = []
    scale = max(1.0, float(np.max(np.abs(vals))))
    for lam, mult in sorted(clusters, key=lambda c: (abs(c[0].imag) > 1e-8 * scale,
                                                     -c[0].real)):
        if lam.imag < -1e-8 * scale:
            continue  # conjugate partner of a complex cluster handled above
        if abs(lam.imag) <= 1e-8 * scale:
            space = _generalized_eigenspace(b, lam.real, mult)
            vblocks, vcols = _extract_real_chains(b, m0, lam.real, space, eps)
        else:
            space = _generalized_eigenspace(b.astype(complex), lam, mult)
            vblocks, vcols = _extract_complex_chains(b, m0, lam, space, eps)
        blocks += vblocks
        columns += vcols
    basis = np.column_stack(columns)
    if basis.shape != (n, n):
        raise ArithmeticError("block extraction lost dimensions")
    model0, model1 = _model_matrices(blocks)
    # Newton correction toward exact w0-standardness: for antisymmetric
    # error E, the update basis (I - Omega^{-1} E / 2) cancels E to first
    # order, and two or three passes reach machine accuracy
    for _ in range(3):
        err = basis.T @ m0 @ basis - model0
        if float(np.max(np.abs(err))) <= 1e-13:
            break
        delta = -0.5 * np.linalg.solve(model0, err)
        basis = basis @ (np.eye(n) + delta)
    t0 = basis.T @ m0 @ basis
    t1 = basis.T @ a1.to_array() @ basis
    _, model1_eps = _model_with_chain_eps(blocks, eps)
    r0 = float(np.max(np.abs(t0 - model0)))
    r1_exact = float(np.max(np.abs(t1 - model1_eps)))
    r1_model = float(np.max(np.abs(t1 - model1)))
    # the eps chain couplings are part of the construction: against the
    # coupled target the transport must be near machine accuracy, while the
    # contract residual is measured against the uncoupled block model
    if r1_exact > 1e-6 * max(1.0, float(np.max(np.abs(t1)))):
        raise ArithmeticError(f"chain relations violated by {r1_exact:.2e}")
    return PencilBlocks(blocks, basis, eps, r0, r1_model)


def _generalized_eigenspace(b, lam, mult):
    n = b.shape[0]
    m = np.linalg.matrix_power(b - lam * np.eye(n, dtype=b.dtype), mult)
    u, s, vh = np.linalg.svd(m)
    scale = max(1.0, float(s[0]) if len(s) else 1.0)
    null_mask = s <= 1e-8 * scale
    basis = vh[null_mask].conj().T
    if basis.shape[1] < (mult if np.iscomplexobj(b) else mult):
        raise ArithmeticError("generalized eigenspace dimension deficient")
    return basis


def _nilpotency_index(nmat, space):
    """Largest k with (B - lam)^k nonzero on span(space), via restriction.

    The zero threshold scales with the ambient operator norm: eigenspace
    bases computed through SVD carry noise of order cond * machine epsilon,
    which must not read as a nontrivial chain.
    """
    m = space.shape[1]
    r, *_ = np.linalg.lstsq(space, nmat @ space, rcond=None)
    scale = max(1.0, float(np.linalg.norm(nmat, 2)),
                float(np.linalg.norm(r, 2)))
    k = 0
    rk = np.eye(m, dtype=r.dtype)
    while k < m:
        rk_next = r @ rk
        if np.linalg.norm(rk_next, 2) <= 1e-7 * scale ** (k + 1):
            break
        rk = rk_next
        k += 1
    return k, rk


def _extract_real_chains(b, m0, lam, space, eps):
    """Chains within one real generalized eigenspace, with w-duals."""
    blocks, columns = [], []
    n = b.shape[0]
    space = np.real(space)
    nmat = b - lam * np.eye(n)
    while space.shape[1] > 0:
        k, rk = _nilpotency_index(nmat, space)
        j0 = int(np.argmax(np.linalg.norm(rk, axis=0)))
        v0 = space[:, j0]
        vs = [v0]
        for _ in range(k):
            vs.append(nmat @ vs[-1] / eps)
        wk = _solve_pairing(m0, vs, space, want_index=k)
        ws = [wk]
        for _ in range(k):
            ws.insert(0, nmat @ ws[0] / eps)
        vs, ws = _balance_chain(vs, ws)
        columns += vs + ws
        blocks.append(RealBlock(lam, k + 1))
        space = _symplectic_complement(m0, vs + ws, space)
    return blocks, columns


def _balance_chain(vs, ws):
    """Rescale v's by c and w's by 1/c to balance norms.

    A single factor per chain keeps every w0/w1 pairing (including the eps
    couplings) intact while conditioning the final basis matrix.
    """
    vn = max(float(np.linalg.norm(v)) for v in vs)
    wn = max(float(np.linalg.norm(w)) for w in ws)
    if vn == 0 or wn == 0:
        return vs, ws
    c = math.sqrt(wn / vn)
    return [c * v for v in vs], [w / c for w in ws]


def _extract_complex_chains(b, m0, lam, space, eps):
    """Chains for a conjugate pair; returns realified columns."""
    blocks, columns = [], []
    n = b.shape[0]
    bc = b.astype(complex)
    nmat = bc - lam * np.eye(n)
    nmat_conj = bc - np.conj(lam) * np.eye(n)
    while space.shape[1] > 0:
        k, rk = _nilpotency_index(nmat, space)
        j0 = int(np.argmax(np.linalg.norm(rk, axis=0)))
        v0 = space[:, j0]
        vs = [v0]
        for _ in range(k):
            vs.append(nmat @ vs[-1] / eps)
        # w-chain lives in the conjugate eigenspace; pair sesquilinearly
        conj_space = np.conj(space)
        wk = _solve_pairing_complex(m0, vs, conj_space, want_index=k)
        ws = [wk]
        for _ in range(k):
            ws.insert(0, nmat_conj @ ws[0] / eps)
        vs, ws = _balance_chain(vs, ws)
        # realify as (sqrt 2 Re, -sqrt 2 Im); the minus orients the block so
        # the transported w1 matches the printed (mu, nu) model exactly
        vcols, wcols = [], []
        for v in vs:
            vcols.append(math.sqrt(2) * np.real(v))
            vcols.append(-math.sqrt(2) * np.imag(v))
        for w in ws:
            wcols.append(math.sqrt(2) * np.real(w))
            wcols.append(-math.sqrt(2) * np.imag(w))
        columns += vcols + wcols
        blocks.append(ComplexBlock(lam.real, lam.imag, k + 1))
        # remaining u in E_lam must satisfy v_j^T m0 u = 0 and
        # conj(w_j)^T m0 u = 0 (the pairings not killed by eigenvalue
        # orthogonality); the helper conjugates its inputs internally
        constraints = [np.conj(v) for v in vs] + list(ws)
        space = _complex_complement(m0, constraints, space)
    return blocks, columns


def _solve_pairing(m0, vs, space, want_index):
    """w in span(space) with w0(v_j, w) = delta_{j, want_index}."""
    a = np.array([v @ m0 @ space for v in vs])
    rhs = np.zeros(len(vs))
    rhs[want_index] = 1.0
    sol, residual, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    w = space @ sol
    if np.max(np.abs(a @ sol - rhs)) > 1e-8:
        raise ArithmeticError("pairing system inconsistent")
    return w


def _solve_pairing_complex(m0, vs, conj_space, want_index):
    a = np.array([np.conj(v) @ m0 @ conj_space for v in vs])
    rhs = np.zeros(len(vs), dtype=complex)
    rhs[want_index] = 1.0
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    w = conj_space @ sol
    if np.max(np.abs(a @ sol - rhs)) > 1e-8:
        raise ArithmeticError("pairing system inconsistent")
    return w


def _symplectic_complement(m0, extracted, space):
    """Vectors of span(space) w0-orthogonal to all extracted vectors."""
    cons = np.array([v @ m0 @ space for v in extracted])
    _, s, vh = np.linalg.svd(cons)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if len(s) else 1.0)))
    null = vh[rank:].conj().T
    return space @ null


def _complex_complement(m0, constraint_vecs, space):
    cons = np.array([np.conj(v) @ m0 @ space for v in constraint_vecs])
    _, s, vh = np.linalg.svd(cons)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if len(s) else 1.0)))
    null = vh[rank:].conj().T
    return space @ null


def _try_exact_reduce(a0: SkewForm, a1: SkewForm):
    """Exact reduction for rational pencils with rational, semisimple spectrum.

    Returns None when the spectrum is not rational or the endomorphism is
    not diagonalizable; callers fall back to the float path.
    """
    n = a0.dim
    m0 = a0.matrix
    m1 = a1.matrix
    b = _frac_solve_matrix(m0, m1)
    charpoly = _frac_charpoly(b)
    roots = _rational_roots(charpoly)
    total = sum(m for _, m in roots)
    if total != n:
        return None
    columns = []
    blocks = []
    for lam, mult in sorted(roots, key=lambda t: -t[0]):
        kernel = _frac_kernel(_mat_sub_scaled(b, lam))
        if len(kernel) != mult:
            return None  # nontrivial Jordan structure: use floats
        space = kernel
        while space:
            v0 = space[0]
            w0 = _frac_pairing(m0, [v0], space, 0)
            columns += [v0, w0]
            blocks.append(RealBlock(lam, 1))
            space = _frac_symplectic_complement(m0, [v0, w0], space)
    basis_cols = columns
    basis = np.array([[float(x) for x in col] for col in zip(*basis_cols)])
    t0 = [[_frac_bilinear(m0, u, v) for v in basis_cols] for u in basis_cols]
    t1 = [[_frac_bilinear(m1, u, v) for v in basis_cols] for u in basis_cols]
    model0, model1 = _model_matrices(blocks)
    r0 = max(
        abs(float(t0[i][j]) - model0[i][j])
        for i in range(n) for j in range(n)
    )
    exact0 = all(
        Q(t0[i][j]) == _float_to_frac(model0[i][j])
        for i in range(n) for j in range(n)
    )
    r1 = max(
        abs(float(t1[i][j]) - model1[i][j])
        for i in range(n) for j in range(n)
    )
    if not exact0:
        return None
    return PencilBlocks(blocks, basis, 0.0, 0.0 if exact0 else r0, r1)


def _float_to_frac(x):
    return Q(x).limit_denominator(10 ** 12)


def _frac_solve_matrix(m0, m1):
    n = len(m0)
    aug = [[m0[i][j] for j in range(n)] + [m1[i][j] for j in range(n)]
           for i in range(n)]
    _frac_rref(aug, n)
    return [[aug[i][n + j] for j in range(n)] for i in range(n)]


def _frac_rref(aug, ncols_left):
    n = len(aug)
    row = 0
    for col in range(ncols_left):
        piv = None
        for r in range(row, n):
            if aug[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        row += 1


def _frac_charpoly(b):
    """Characteristic polynomial via Faddeev-LeVerrier, exact."""
    n = len(b)
    coeffs = [Q(1)]
    m = [[Q(0)] * n for _ in range(n)]
    c = Q(1)
    mk = m
    for k in range(1, n + 1):
        mk = _mat_add_diag(_frac_matmul(b, mk), c)
        c = -Q(_frac_trace(_frac_matmul(b, mk)), k)
        coeffs.append(c)
    # coeffs are [1, c1, ..., cn] for lambda^n + c1 lambda^{n-1} + ...
    return list(reversed(coeffs))


def _frac_matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def _mat_add_diag(m, c):
    out = [row[:] for row in m]
    for i in range(len(m)):
        out[i][i] += c
    return out


def _frac_trace(m):
    return sum(m[i][i] for i in range(len(m)))


def _rational_roots(p):
    """(root, multiplicity) pairs of the rational roots of p."""
    ints = _poly.content_cleared(p)
    if not ints:
        return []
    lead = ints[-1]
    const = ints[0]
    if const == 0:
        return []  # zero eigenvalue: degenerate, rejected upstream
    candidates = set()
    for a in _divisors_of(abs(const)):
        for bq in _divisors_of(abs(lead)):
            candidates.add(Q(a, bq))
            candidates.add(Q(-a, bq))
    roots = []
    for r in sorted(candidates):
        if _poly.evaluate(p, r) == 0:
            m = 0
            q = list(p)
            while _poly.evaluate(q, r) == 0:
                q = _poly.divmod_poly(q, _poly.poly([-r, 1]))[0]
                m += 1
            roots.append((r, m))
    return roots


def _divisors_of(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out += [d, n // d]
        d += 1
    return sorted(set(out))


def _mat_sub_scaled(b, lam):
    n = len(b)
    return [[b[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]


def _frac_kernel(m):
    n = len(m)
    aug = [row[:] for row in m]
    _frac_rref(aug, n)
    pivots = []
    for row in aug:
        for j, x in enumerate(row):
            if x != 0:
                pivots.append(j)
                break
    free = [j for j in range(n) if j not in pivots]
    kernel = []
    for f in free:
        vec = [Q(0)] * n
        vec[f] = Q(1)
        for r, p in enumerate(pivots):
            vec[p] = -aug[r][f]
        kernel.append(vec)
    return kernel


def _frac_bilinear(m, u, v):
    n = len(m)
    return sum(u[i] * m[i][j] * v[j] for i in range(n) for j in range(n))


def _frac_pairing(m0, vs, space, want):
    rows = [[_frac_bilinear(m0, v, s) for s in space] for v in vs]
    rhs = [Q(1) if i == want else Q(0) for i in range(len(vs))]
    sol = _frac_lstsq_exact(rows, rhs)
    n = len(space[0])
    return [sum(sol[j] * space[j][i] for j in range(len(space)))
            for i in range(n)]


def _frac_lstsq_exact(rows, rhs):
    ncols = len(rows[0])
    aug = [row[:] + [r] for row, r in zip(rows, rhs)]
    _frac_rref(aug, ncols)
    sol = [Q(0)] * ncols
    for row in aug:
        piv = None
        for j in range(ncols):
            if row[j] != 0:
                piv = j
                break
        if piv is None:
            if row[-1] != 0:
                raise ArithmeticError("inconsistent pairing system")
            continue
        sol[piv] = row[-1]
    return sol


def _frac_symplectic_complement(m0, extracted, space):
    out = []
    for s in space:
        vals = [_frac_bilinear(m0, v, s) for v in extracted]
        out.append((s, vals))
    # Gaussian elimination on the constraint values to find the null combo
    k = len(space)
    rows = [[out[j][1][i] for j in range(k)] for i in range(len(extracted))]
    aug = [row[:] for row in rows]
    _frac_rref(aug, k)
    pivots = []
    for row in aug:
        for j in range(k):
            if row[j] != 0:
                pivots.append(j)
                break
    free = [j for j in range(k) if j not in pivots]
    basis = []
    n = len(space[0])
    for f in free:
        coeffs = [Q(0)] * k
        coeffs[f] = Q(1)
        for r, p in enumerate(pivots):
            coeffs[p] = -aug[r][f]
        vec = [sum(coeffs[j] * space[j][i] for j in range(k)) for i in range(n)]
        basis.append(vec)
    return basis


# -- cotamed construction ---------------------------------------------------------


def construct_cotamed(a0: SkewForm, a1: SkewForm, eps: float = 1e-3,
                      max_retries: int = 6) -> ComplexStructure:
    """Build J tamed by both forms via blockwise normal-form structures.

    Real blocks (eigenvalues are positive under the existence hypothesis)
    get the standard rotation per (v_j, w_j) pair; complex blocks get the
    phase structure J_phi with phi = pi - psi/2, psi = arg(mu + i nu).  The
    result is verified against both forms; epsilon is halved on failure.
    """
    if not cotamed_exists(a0, a1):
        raise CotamedExistenceError("pencil admits no cotamed structure")
    current_eps = eps
    last = None
    for _ in range(max_retries + 1):
        reduction = simultaneous_reduce(a0, a1, current_eps)
        jblocks = _blockwise_j(reduction.blocks)
        basis = reduction.basis
        # the conjugated structure squares to -I exactly in exact
        # arithmetic; polishing removes the cond(basis)^2 float drift
        j = _polish_square_root(basis @ jblocks @ np.linalg.inv(basis))
        try:
            cand = ComplexStructure(j)
        except ValueError as err:
            last = err
            current_eps /= 2
            continue
        if tames(a0, cand) and tames(a1, cand):
            return cand
        last = ArithmeticError("blockwise J failed a taming verification")
        current_eps /= 2
    raise RetryExhaustedError(
        f"cotamed construction failed after retries "
        f"(cond(A0)={np.linalg.cond(a0.to_array()):.2e}, "
        f"cond(A1)={np.linalg.cond(a1.to_array()):.2e}): {last}"
    )


def _blockwise_j(blocks) -> np.ndarray:
    size = sum(b.size for b in blocks)
    j = np.zeros((size, size))
    at = 0
    for b in blocks:
        if isinstance(b, RealBlock):
            if b.eigenvalue <= 0:
                raise ArithmeticError(
                    "real block with nonpositive eigenvalue cannot be tamed"
                )
            m = b.chain_length
            # per (v_i, w_i) pair: J v = w, J w = -v  (tames both standard
            # and lambda-scaled standard forms when lambda > 0)
            for i in range(m):
                j[at + m + i, at + i] = 1.0
                j[at + i, at + m + i] = -1.0
            at += 2 * m
        else:
            psi = math.atan2(b.nu, b.mu)
            phi = math.pi - psi / 2
            rot = np.array([
                [math.cos(phi), -math.sin(phi)],
                [math.sin(phi), math.cos(phi)],
            ])
            m = b.chain_length
            big = 2 * m
            for i in range(m):
                j[at + 2 * i:at + 2 * i + 2,
                  at + big + 2 * i:at + big + 2 * i + 2] = rot
                j[at + big + 2 * i:at + big + 2 * i + 2,
                  at + 2 * i:at + 2 * i + 2] = -rot.T
            at += 2 * big
    return j


# -- Cayley transform for complex structures ---------------------------------------


def cayley_map(j0: ComplexStructure, j: ComplexStructure) -> np.ndarray:
    """A = (J + J0)^{-1} (J - J0); anticommutes with J0, A - I invertible.

    The raw solve leaves anticommutator noise of order cond * eps; after the
    sanity gate the result is projected onto the exactly anticommuting
    subspace so downstream convex combinations stay inside the chart.
    """
    s = j.matrix + j0.matrix
    if abs(np.linalg.det(s)) < 1e-12:
        raise ValueError("J + J0 is singular (J = -J0 boundary)")
    a = np.linalg.solve(s, j.matrix - j0.matrix)
    anti = a @ j0.matrix + j0.matrix @ a
    if np.max(np.abs(anti)) > 1e-9 * max(1.0, float(np.max(np.abs(a)))):
        raise ArithmeticError("Cayley image does not anticommute with J0")
    return (a + j0.matrix @ a @ j0.matrix) / 2


def cayley_inverse(j0: ComplexStructure, a: np.ndarray) -> ComplexStructure:
    """Inverse transform A -> (A - I) J0 (A - I)^{-1}."""
    a = np.asarray(a, dtype=float)
    anti = a @ j0.matrix + j0.matrix @ a
    if np.max(np.abs(anti)) > 1e-10 * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError("A does not anticommute with J0")
    s = a - np.eye(a.shape[0])
    if abs(np.linalg.det(s)) < 1e-12:
        raise ValueError("A - I is singular (eigenvalue 1)")
    return ComplexStructure(s @ j0.matrix @ np.linalg.inv(s))


def interpolate_tamed(j0: ComplexStructure, j1: ComplexStructure,
                      j2: ComplexStructure, t: float,
                      taming_forms=()) -> ComplexStructure:
    """Convex interpolation through the Cayley chart at J0.

    If every listed form tames J0, J1 and J2, the result is tamed as well
    (convexity of the chart image); this is checked when forms are passed.
    """
    a1 = cayley_map(j0, j1)
    a2 = cayley_map(j0, j2)
    out = cayley_inverse(j0, (1 - t) * a1 + t * a2)
    for f in taming_forms:
        if not tames(f, out):
            raise ArithmeticError("interpolation left the taming cone")
    return out


def compatible_j(a: SkewForm) -> ComplexStructure:
    """The canonical w-compatible structure J = -(-A^2)^{-1/2} A."""
    arr = a.to_array()
    m = -(arr @ arr)
    vals, vecs = np.linalg.eigh((m + m.T) / 2)
    if np.min(vals) <= 0:
        raise ValueError("form is degenerate")
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
    return ComplexStructure(_polish_square_root(-inv_sqrt @ arr))


def _polish_square_root(j: np.ndarray) -> np.ndarray:
    """Drive J^2 + I toward zero: J <- J (I + E/2) is quadratic in E.

    Stops as soon as an iteration fails to improve (the attainable error is
    floored at roughly |J|^2 machine epsilon, and iterating past the floor
    just accumulates roundoff).
    """
    n = j.shape[0]
    eye = np.eye(n)
    best = j
    best_err = float(np.max(np.abs(j @ j + eye)))
    for _ in range(4):
        if best_err <= 1e-14:
            break
        cand = best @ (eye + (best @ best + eye) / 2)
        cand_err = float(np.max(np.abs(cand @ cand + eye)))
        if cand_err >= best_err:
            break
        best, best_err = cand, cand_err
    return best


def taming_threshold(omega: SkewForm, d: SkewForm, j: ComplexStructure,
                     tol: float = 1e-6, cap: float = 1e6) -> float:
    """Smallest T >= 0 with omega + t d taming J for the sampled t-ladder.

    Requires d to tame J.  Returns 0 when omega already tames J; otherwise
    bisects the taming margin of omega + t d (a concave function of t, so
    the passing set is a ray) and certifies at {T, 2T, 10T, 1000T}.
    """
    if not tames(d, j):
        raise ValueError("direction form must tame J")

    def margin(t):
        m = (omega.to_array() + t * d.to_array()) @ j.matrix
        s = (m + m.T) / 2
        return float(np.linalg.eigvalsh(s)[0])

    if margin(0.0) > 0:
        return 0.0
    hi = 1.0
    trail = []
    while margin(hi) <= 0:
        trail.append((hi, margin(hi)))
        hi *= 2
        if hi > cap:
            raise ArithmeticError(
                f"no taming threshold below {cap}; margins {trail[-5:]}"
            )
    lo = 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if margin(mid) > 0:
            hi = mid
        else:
            lo = mid
    t_star = hi
    for t in (t_star, 2 * t_star, 10 * t_star, 1000 * t_star):
        if margin(t) <= 0:
            raise ArithmeticError(f"sampled certificate failed at t={t}")
    return t_star


# -- randomized suites ------------------------------------------------------------


def random_skew(rng: np.random.Generator, dim: int) -> SkewForm:
    m = rng.standard_normal((dim, dim))
    return SkewForm(m - m.T)


def random_nondegenerate_pair(rng, dim):
    while True:
        a0 = random_skew(rng, dim)
        a1 = random_skew(rng, dim)
        if is_nondegenerate(a0) and is_nondegenerate(a1):
            return a0, a1


def random_tamed_j(rng, a: SkewForm, max_tries: int = 80) -> ComplexStructure:
    """Random J tamed by a: a Cayley perturbation of the compatible J.

    The perturbation radius shrinks with failed attempts; the chart center
    itself is tamed, so the sampler always terminates in practice.
    """
    j0 = compatible_j(a)
    n = a.dim
    for attempt in range(max_tries):
        x = rng.standard_normal((n, n))
        anti = (x + j0.matrix @ x @ j0.matrix) / 2
        norm = np.linalg.norm(anti, 2)
        if norm == 0:
            continue
        radius = rng.uniform(0.1, 0.8) * (0.8 ** (attempt // 10))
        cand = cayley_inverse(j0, anti * (radius / norm))
        if tames(a, cand):
            return cand
    raise RuntimeError("failed to sample a tamed structure")


@dataclass
class SuiteReport:
    name: str
    trials: int
    mismatches: int
    worst_margin: float
    seeds: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0


def appendix_equivalence_suite(trials: int, dims=(4, 6, 8, 10),
                               seed: int = 0) -> SuiteReport:
    """Randomized three-way equivalence check of the existence criteria.

    For each random nondegenerate pair: segment and ray nondegeneracy agree
    with the spectral test and obey the sign law (real eigenvalues positive
    when the segment survives); when existence holds, construct_cotamed
    must succeed with both tamings verified; when it fails, the negative
    eigenvalue's predicted degeneracy parameter t0 = 1/(1 - lam) must make
    the pencil member singular (smallest singular value collapses), and the
    construction must refuse.
    """
    mismatches = 0
    worst = math.inf
    per_dim = {}
    ill_conditioned = 0
    for dim in dims:
        bad = 0
        for trial in range(trials):
            rng = np.random.default_rng(seed + 7919 * dim + trial)
            a0, a1 = random_nondegenerate_pair(rng, dim)
            b = pencil_endomorphism(a0, a1)
            spectral = not _has_negative_real_eigenvalue(b)
            seg = segment_nondegenerate(a0, a1, cross_validate=False)
            ray = ray_nondegenerate(a0, a1)
            if seg != spectral or ray != spectral:
                bad += 1
                continue
            if spectral:
                real_eigs = [
                    lam.real for lam in np.linalg.eigvals(b)
                    if abs(lam.imag) <= 1e-8 * max(1.0, abs(lam.real))
                ]
                if any(lr <= 0 for lr in real_eigs):
                    bad += 1
                    continue
                try:
                    j = construct_cotamed(a0, a1)
                except PencilError:
                    # near-degenerate spectrum: reported, not guessed
                    ill_conditioned += 1
                    continue
                except RetryExhaustedError:
                    bad += 1
                    continue
                margin = min(taming_margin(a0, j), taming_margin(a1, j))
                worst = min(worst, margin)
                if margin <= 0:
                    bad += 1
            else:
                neg = min(
                    lam.real for lam in np.linalg.eigvals(b)
                    if lam.real < 0
                    and abs(lam.imag) <= 1e-8 * abs(lam.real)
                )
                t0 = 1.0 / (1.0 - neg)
                member = (1 - t0) * a0.to_array() + t0 * a1.to_array()
                sv = np.linalg.svd(member, compute_uv=False)
                if sv[-1] > 1e-8 * sv[0]:
                    bad += 1  # eigenvalue predicted a degeneracy that isn't
                    continue
                try:
                    construct_cotamed(a0, a1)
                    bad += 1  # should have refused
                except CotamedExistenceError:
                    pass
        per_dim[dim] = bad
        mismatches += bad
    return SuiteReport(
        "appendix-equivalence", trials * len(dims), mismatches,
        worst if worst < math.inf else 0.0, [seed],
        {"per_dim": per_dim, "ill_conditioned_reported": ill_conditioned},
    )


def cayley_roundtrip_suite(trials: int, dim: int = 6, seed: int = 0) -> SuiteReport:
    worst = 0.0
    mismatches = 0
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        a = random_skew(rng, dim)
        while not is_nondegenerate(a):
            a = random_skew(rng, dim)
        j0 = compatible_j(a)
        j = random_tamed_j(rng, a)
        back = cayley_inverse(j0, cayley_map(j0, j))
        err = float(np.max(np.abs(back.matrix - j.matrix)))
        worst = max(worst, err)
        if err > 1e-10:
            mismatches += 1
    return SuiteReport("cayley-roundtrip", trials, mismatches, worst, [seed])


def interpolation_suite(trials: int, dim: int = 6, seed: int = 0,
                        ts=(0.25, 0.5, 0.75)) -> SuiteReport:
    mismatches = 0
    worst = math.inf
    for trial in range(trials):
        rng = np.random.default_rng(seed + 31 * trial)
        a = random_skew(rng, dim)
        while not is_nondegenerate(a):
            a = random_skew(rng, dim)
        j0 = compatible_j(a)
        j1 = random_tamed_j(rng, a)
        j2 = random_tamed_j(rng, a)
        for t in ts:
            out = interpolate_tamed(j0, j1, j2, t)
            margin = taming_margin(a, out)
            worst = min(worst, margin)
            if margin <= 0:
                mismatches += 1
    return SuiteReport(
        "interpolation-convexity", trials * len(ts), mismatches,
        worst if worst < math.inf else 0.0, [seed],
    )


def remark_pair():
    """The R^4 pair w0 = dx1^dx3 + dx2^dx4, w1 = dx2^dx1 + dx3^dx4."""
    a0 = SkewForm([
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 0, 0, 0],
        [0, -1, 0, 0],
    ])
    a1 = SkewForm([
        [0, -1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, -1, 0],
    ])
    return a0, a1


def cocompatible_counterexample_suite(trials: int, seed: int = 0) -> SuiteReport:
    """No w0-compatible J is tamed by w1 for the wedge-orthogonal pair.

    Verifies w0 ^ w1 = 0 exactly, then samples random w0-compatible
    structures (symplectic conjugates of the standard one) and exhibits for
    each a vector v with w1(v, Jv) <= 0.  Survivors are counted; the
    expected count is zero.
    """
    a0, a1 = remark_pair()
    wedge_top = a0.to_form().wedge(a1.to_form()).top_coefficient()
    if wedge_top != 0:
        raise ArithmeticError("w0 ^ w1 is not exactly zero")
    m0 = a0.to_array()
    m1 = a1.to_array()
    j_std = compatible_j(a0)
    survivors = 0
    worst = -math.inf
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        c = rng.standard_normal((4, 4))
        ham = np.linalg.solve(m0, (c + c.T) / 2)
        s = _expm(ham * 0.5)
        j = ComplexStructure(s @ j_std.matrix @ np.linalg.inv(s))
        m = m1 @ j.matrix
        sym = (m + m.T) / 2
        vals, vecs = np.linalg.eigh(sym)
        vmin = float(vals[0])
        worst = max(worst, vmin)
        if vmin > 0:
            survivors += 1
            continue
        v = vecs[:, 0]
        if not float(v @ m1 @ (j.matrix @ v)) <= 1e-12:
            survivors += 1
    return SuiteReport(
        "cocompatible-counterexample", trials, survivors, worst, [seed],
        {"wedge_top": str(wedge_top)},
    )


def _expm(m: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring matrix exponential (Taylor core)."""
    norm = np.linalg.norm(m, 1)
    k = max(0, int(math.ceil(math.log2(max(norm, 1e-16)))) + 1)
    small = m / (2 ** k)
    out = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for i in range(1, 20):
        term = term @ small / i
        out = out + term
    for _ in range(k):
        out = out @ out
    return out

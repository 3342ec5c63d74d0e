"""Gaudin Hamiltonians as coefficients of determinant-form operators.

build_M expands the signed permutation sum of first-order operator entries
once per (rep, z); the coefficients are matrix polynomials over powers of
T(x) = prod (x - z_s), so every later evaluation is cheap.  build_K re-expands
the derivative-on-the-left form.  The checks (commutativity, Shapovalov
symmetry, spectra, eigenvalue matching, polynomial solutions, the central
element) are pure functions of the built operators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionCap, NotDiagonalizable, NotInvariant, PoleAtX,
                     ZeroVector)
from .master import MasterSpec, TuplePoint, fundamental_op_typeA
from .polyops import Poly
from .rep import Subspace, TensorRep

GAUDIN_DIM_CAP = 256
INVARIANCE_TOL = 1e-10
POLE_EXCLUSION = 1e-9


def _ptrim(c: np.ndarray) -> np.ndarray:
    """Trim trailing near-zero matrix coefficients of a matrix polynomial."""
    if c.shape[0] == 0:
        return c
    mags = np.abs(c).reshape(c.shape[0], -1).max(axis=1)
    top = mags.max(initial=0.0)
    thr = 1e-14 * max(top, 1.0)
    keep = np.nonzero(mags > thr)[0]
    if keep.size == 0:
        return c[:1] * 0.0
    return c[: keep[-1] + 1]


def _pconv(mat: np.ndarray, scalar: np.ndarray) -> np.ndarray:
    """Multiply a matrix polynomial (deg-first) by a scalar polynomial."""
    out = np.zeros((mat.shape[0] + scalar.size - 1,) + mat.shape[1:], dtype=complex)
    for j, s in enumerate(scalar):
        if s != 0:
            out[j : j + mat.shape[0]] += s * mat
    return out


class MatRat:
    """Matrix polynomial over a power of the master denominator: P(x)/T(x)^k."""

    __slots__ = ("num", "power", "T")

    def __init__(self, num: np.ndarray, power: int, T: np.ndarray):
        self.num = _ptrim(np.asarray(num, dtype=complex))
        self.power = int(power)
        self.T = np.asarray(T, dtype=complex)

    @classmethod
    def zero(cls, dim: int, T: np.ndarray) -> "MatRat":
        return cls(np.zeros((1, dim, dim)), 0, T)

    @classmethod
    def identity(cls, dim: int, T: np.ndarray) -> "MatRat":
        return cls(np.eye(dim)[None, :, :], 0, T)

    @property
    def dim(self) -> int:
        return self.num.shape[1]

    def _lift(self, power: int) -> np.ndarray:
        """Numerator after raising the denominator power to `power`."""
        num = self.num
        for _ in range(power - self.power):
            num = _pconv(num, self.T)
        return num

    def __add__(self, other: "MatRat") -> "MatRat":
        p = max(self.power, other.power)
        a, b = self._lift(p), other._lift(p)
        n = max(a.shape[0], b.shape[0])
        out = np.zeros((n,) + a.shape[1:], dtype=complex)
        out[: a.shape[0]] += a
        out[: b.shape[0]] += b
        return MatRat(out, p, self.T)

    def __sub__(self, other: "MatRat") -> "MatRat":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "MatRat":
        return MatRat(scalar * self.num, self.power, self.T)

    def matmul(self, other: "MatRat") -> "MatRat":
        a, b = self.num, other.num
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1], b.shape[2]),
                       dtype=complex)
        for i in range(a.shape[0]):
            for j in range(b.shape[0]):
                out[i + j] += a[i] @ b[j]
        return MatRat(out, self.power + other.power, self.T)

    def deriv(self) -> "MatRat":
        d = self.num.shape[0]
        dP = np.zeros((max(d - 1, 1),) + self.num.shape[1:], dtype=complex)
        for g in range(1, d):
            dP[g - 1] = g * self.num[g]
        if self.power == 0:
            return MatRat(dP, 0, self.T)
        dT = np.array([g * self.T[g] for g in range(1, self.T.size)], dtype=complex)
        term1 = _pconv(dP, self.T)
        term2 = _pconv(self.num, dT)
        n = max(term1.shape[0], term2.shape[0])
        out = np.zeros((n,) + term1.shape[1:], dtype=complex)
        out[: term1.shape[0]] += term1
        out[: term2.shape[0]] -= self.power * term2
        return MatRat(out, self.power + 1, self.T)

    def eval(self, x: complex) -> np.ndarray:
        acc = np.array(self.num[-1])
        for g in range(self.num.shape[0] - 2, -1, -1):
            acc = acc * x + self.num[g]
        tval = 0.0j
        for c in self.T[::-1]:
            tval = tval * x + c
        return acc / tval**self.power

    def isclose(self, other: "MatRat", tol: float = 1e-12) -> bool:
        d = self - other
        scale = max(np.abs(self._lift(max(self.power, other.power))).max(initial=0.0), 1.0)
        return bool(np.abs(d.num).max(initial=0.0) <= tol * scale)


def _op_mul(A: dict, B: dict, dim: int, T: np.ndarray) -> dict:
    """Compose operator dicts {power_of_d: MatRat} using d^p ∘ C = sum binom."""
    out: dict = {}
    for p, Ap in A.items():
        for q, Bq in B.items():
            term = Bq
            for j in range(0, p + 1):
                c = math.comb(p, j)
                contrib = Ap.matmul(term)
                key = p + q - j
                if c != 1:
                    contrib = float(c) * contrib
                out[key] = out.get(key, MatRat.zero(dim, T)) + contrib
                if j < p:
                    term = term.deriv()
    return out


@dataclass(frozen=True)
class OperatorDiffOp:
    """Monic operator d^m + C_1(x) d^{m-1} + ... + C_m(x) with matrix-rational
    coefficients; poles only at the marked points z."""

    order: int
    coeffs: tuple  # MatRat for k = 1..order
    rep: TensorRep
    z: np.ndarray

    @property
    def dim(self) -> int:
        return self.rep.dim

    def coefficient(self, i: int) -> MatRat:
        if not 1 <= i <= self.order:
            raise ValueError(f"coefficient index {i} out of 1..{self.order}")
        return self.coeffs[i - 1]

    def check_pole(self, x: complex) -> None:
        z = self.z
        if z.size and np.abs(x - z).min() < POLE_EXCLUSION * (1.0 + np.abs(z).max()):
            raise PoleAtX(f"x={x} is too close to a marked point")


def build_M(rep: TensorRep, z) -> OperatorDiffOp:
    """Expand the signed permutation sum of X_{i,j} entries into standard form."""
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != rep.n:
        raise ValueError("need one z per tensor slot")
    if rep.dim > GAUDIN_DIM_CAP:
        raise DimensionCap(f"dimension {rep.dim} exceeds Gaudin cap {GAUDIN_DIM_CAP}")
    dim = rep.dim
    m = rep.r + 1
    T = Poly.from_roots(z).coeffs if z.size else np.array([1.0 + 0j])
    # B[j][i](x) = sum_s E^{(s)}_{j,i} T_s(x) / T(x), T_s = T/(x - z_s)
    Bnum = np.zeros((m, m, max(z.size, 1), dim, dim), dtype=complex)
    for s in range(1, rep.n + 1):
        Ts = Poly.from_roots(np.delete(z, s - 1)).coeffs
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                E = rep.generator(j, i, s).toarray()
                for g in range(Ts.size):
                    Bnum[i - 1, j - 1, g] += Ts[g] * E

    def X(i, j):  # operator dict for X_{i,j}
        power = 1 if rep.n else 0
        coeff = MatRat(-Bnum[i - 1, j - 1] if rep.n else np.zeros((1, dim, dim)),
                       power, T)
        out = {0: coeff}
        if i == j:
            out[1] = MatRat.identity(dim, T)
        return out

    total: dict = {}
    for sigma in itertools.permutations(range(1, m + 1)):
        sign = 1.0
        perm = list(sigma)
        for a in range(len(perm)):
            for b in range(a + 1, len(perm)):
                if perm[a] > perm[b]:
                    sign = -sign
        term = X(1, sigma[0])
        for i in range(2, m + 1):
            term = _op_mul(term, X(i, sigma[i - 1]), dim, T)
        for p, mat in term.items():
            mat = sign * mat
            total[p] = total.get(p, MatRat.zero(dim, T)) + mat
    lead = total.get(m, MatRat.zero(dim, T))
    if not lead.isclose(MatRat.identity(dim, T)):
        raise AssertionError("expansion lost the monic leading coefficient")
    coeffs = tuple(total.get(m - k, MatRat.zero(dim, T)) for k in range(1, m + 1))
    return OperatorDiffOp(m, coeffs, rep, z)


def build_K(M: OperatorDiffOp) -> OperatorDiffOp:
    """K = d^m - d^{m-1} M_1 + ... + (-1)^m M_m, re-expanded to standard form."""
    m = M.order
    dim = M.dim
    T = M.coeffs[0].T if M.coeffs else np.array([1.0 + 0j])
    out: dict = {m: MatRat.identity(dim, T)}
    for k in range(1, m + 1):
        sign = -1.0 if k % 2 else 1.0
        term = M.coeffs[k - 1]
        for j in range(0, m - k + 1):
            c = sign * math.comb(m - k, j)
            out[m - k - j] = out.get(m - k - j, MatRat.zero(dim, T)) + c * term
            if j < m - k:
                term = term.deriv()
    coeffs = tuple(out.get(m - k, MatRat.zero(dim, T)) for k in range(1, m + 1))
    return OperatorDiffOp(m, coeffs, M.rep, M.z)


def hamiltonian_matrix(op: OperatorDiffOp, i: int, x: complex,
                       sub: Subspace = None) -> np.ndarray:
    """Compression P^T K_i(x) P onto the subspace (or the full matrix)."""
    op.check_pole(x)
    K = op.coefficient(i).eval(x)
    if sub is None:
        return K
    P = sub.basis_matrix
    Y = K @ P
    scale = np.linalg.norm(Y)
    if scale > 0:
        defect = np.linalg.norm(Y - P @ (P.conj().T @ Y)) / scale
        if defect > INVARIANCE_TOL:
            raise NotInvariant(f"subspace not invariant: defect {defect:.2e}")
    return P.T @ Y


def commutation_defect(op: OperatorDiffOp, u: complex, v: complex,
                       sub: Subspace = None) -> float:
    """max over i,j of ||[K_i(u), K_j(v)]|| / (1 + ||K_i(u)|| ||K_j(v)||)."""
    A = [hamiltonian_matrix(op, i, u, sub) for i in range(1, op.order + 1)]
    B = [hamiltonian_matrix(op, j, v, sub) for j in range(1, op.order + 1)]
    worst = 0.0
    for Ai in A:
        for Bj in B:
            num = np.linalg.norm(Ai @ Bj - Bj @ Ai)
            den = 1.0 + np.linalg.norm(Ai) * np.linalg.norm(Bj)
            worst = max(worst, num / den)
    return worst


def shapovalov_defect(op: OperatorDiffOp, x: complex, rep: TensorRep = None) -> float:
    """max_i ||G K_i(x) - K_i(x)^T G|| / ||G K_i(x)|| with G the tensor Gram."""
    rep = rep or op.rep
    G = np.diag(rep.gram_diag())
    worst = 0.0
    for i in range(1, op.order + 1):
        K = hamiltonian_matrix(op, i, x)
        GK = G @ K
        scale = np.linalg.norm(GK)
        if scale == 0.0:
            continue
        worst = max(worst, np.linalg.norm(GK - K.T @ G) / scale)
    return worst


def real_spectrum_check(op: OperatorDiffOp, sub: Subspace, x_samples) -> bool:
    """All eigenvalues of all compressions at the (real) samples are real."""
    for x in x_samples:
        for i in range(1, op.order + 1):
            K = hamiltonian_matrix(op, i, complex(x), sub)
            if K.size == 0:
                continue
            for lam in np.linalg.eigvals(K):
                if abs(lam.imag) > 1e-8 * (1.0 + abs(lam)):
                    return False
    return True


def central_element_check(factor, x_samples) -> float:
    """Defect of the signed-sum central element against its scalar value.

    The element is the permutation expansion of ((x-r+k-1) delta - E) factors
    on a single module; it must act as psi(x) = prod_{i=0..r}(x - r + i + m_i).
    """
    r = factor.rank
    dim = factor.dim
    E = {(i, j): factor.E(i, j) for i in range(1, r + 2) for j in range(1, r + 2)}
    worst = 0.0
    for x in x_samples:
        x = complex(x)
        A = np.zeros((dim, dim), dtype=complex)
        for sigma in itertools.permutations(range(1, r + 2)):
            sign = 1.0
            for a in range(r + 1):
                for b in range(a + 1, r + 1):
                    if sigma[a] > sigma[b]:
                        sign = -sign
            term = np.eye(dim, dtype=complex)
            for k in range(1, r + 2):
                fac = -E[(sigma[k - 1], k)].astype(complex)
                if sigma[k - 1] == k:
                    fac = fac + (x - (r + 1 - k)) * np.eye(dim)
                term = term @ fac
            A += sign * term
        psi = 1.0 + 0.0j
        for i in range(r + 1):
            psi *= x - r + i + factor.m_values[i]
        if psi == 0:
            continue
        worst = max(worst, float(np.abs(A - psi * np.eye(dim)).max() / abs(psi)))
    return worst


def polynomial_solutions_check(op: OperatorDiffOp, degree_bound: int) -> int:
    """Dimension of vector-polynomial solutions of op·u = 0, deg <= bound."""
    m = op.order
    dim = op.dim
    pmax = max((c.power for c in op.coeffs), default=0)
    T = op.coeffs[0].T if op.coeffs else np.array([1.0 + 0j])
    qs = []
    lead = np.eye(dim, dtype=complex)[None, :, :]
    for _ in range(pmax):
        lead = _pconv(lead, T)
    qs.append(lead)  # multiplies u^{(m)}
    for c in op.coeffs:
        num = c.num
        for _ in range(pmax - c.power):
            num = _pconv(num, T)
        qs.append(num)
    maxdeg = max(q.shape[0] - 1 for q in qs)
    nrows = (maxdeg + degree_bound + 1) * dim
    ncols = (degree_bound + 1) * dim
    A = np.zeros((nrows, ncols), dtype=complex)
    for k, q in enumerate(qs):
        p = m - k
        for j in range(p, degree_bound + 1):
            fall = 1.0
            for i in range(p):
                fall *= j - i
            for g in range(q.shape[0]):
                row = (g + j - p) * dim
                A[row : row + dim, j * dim : (j + 1) * dim] += fall * q[g]
    svals = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(svals > 1e-10 * svals.max())) if svals.size else 0
    return ncols - rank


def eigenvalue_match(op: OperatorDiffOp, vec, t: TuplePoint, spec: MasterSpec,
                     x_samples) -> float:
    """max residual ||K_i(x) w - lambda_i(x) w|| / ||w|| against the
    factorized critical-point operator's coefficients."""
    w = np.asarray(vec.coords if hasattr(vec, "coords") else vec, dtype=complex)
    nrm = np.linalg.norm(w)
    if nrm == 0.0:
        raise ZeroVector("eigenvalue check needs a nonzero vector")
    D = fundamental_op_typeA(t, spec)
    if D.order != op.order:
        raise ValueError("operator orders disagree")
    worst = 0.0
    for x in x_samples:
        x = complex(x)
        op.check_pole(x)
        for i in range(1, op.order + 1):
            K = op.coefficient(i).eval(x)
            lam = D.coeffs[i - 1](x)
            worst = max(worst, float(np.linalg.norm(K @ w - lam * w) / nrm))
    return worst


def simple_spectrum_check(op: OperatorDiffOp, sub: Subspace, x_samples,
                          rng=None, separation: float = 1e-6) -> bool:
    """Joint eigenvalue tuples across samples are pairwise distinct.

    Diagonalizes a random real combination of the commuting compressions and
    reads every compression in that eigenbasis; retries with a fresh
    combination when the eigenvector matrix is ill-conditioned.
    """
    rng = rng or np.random.default_rng(0)
    mats = [hamiltonian_matrix(op, i, complex(x), sub)
            for i in range(1, op.order + 1) for x in x_samples]
    k = sub.dim
    if k <= 1:
        return True
    for _ in range(5):
        weights = rng.standard_normal(len(mats))
        C = sum(w * M for w, M in zip(weights, mats))
        _, V = np.linalg.eig(C)
        if np.linalg.cond(V) > 1e8:
            continue
        Vinv = np.linalg.inv(V)
        tuples = np.empty((k, len(mats)), dtype=complex)
        for idx, M in enumerate(mats):
            tuples[:, idx] = np.diag(Vinv @ M @ V)
        for a in range(k):
            for b in range(a + 1, k):
                if np.abs(tuples[a] - tuples[b]).max() <= separation:
                    return False
        return True
    raise NotDiagonalizable("no well-conditioned random combination found")


def sample_points(z, count: int = 5, rng=None, radius_factor: float = 2.0,
                  real: bool = False, exclusion: float = 1e-3):
    """Random sample points in a disc around the marked points, off the poles."""
    rng = rng or np.random.default_rng(0)
    z = np.asarray(z, dtype=complex).ravel()
    R = radius_factor * (1.0 + (np.abs(z).max() if z.size else 0.0))
    out = []
    while len(out) < count:
        if real:
            x = complex(rng.uniform(-R, R))
        else:
            x = complex(rng.uniform(-R, R), rng.uniform(-R, R))
        if z.size and np.abs(x - z).min() < exclusion * (1.0 + np.abs(z).max()):
            continue
        out.append(x)
    return out


@dataclass(frozen=True)
class SpectralReport:
    """Bundle of spectral diagnostics at fixed sample points."""

    x_samples: tuple
    eigen_residuals: tuple
    commutator_defect: float
    symmetry_defect: float
    real_spectrum: bool
    simple_spectrum: bool

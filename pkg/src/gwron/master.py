"""Master functions, Bethe-ansatz residuals, and critical-point operators.

A master-function instance is Cartan-like data (gram matrix of simple-root
scalar products), nonnegative integer weight pairings, marked points z, and
group sizes l.  Critical points of the master function are zeros of the
residual (the gradient of its logarithm).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadExponents, Collision, InexactDivision
from .polyops import Poly, RatFn, ScalarDiffOp, compose_factors, wronskian

COLLISION_REL = 1e-8


@dataclass(frozen=True)
class ExponentSpec:
    """Strictly increasing exponents at infinity and their derived data."""

    d: tuple

    def __post_init__(self):
        d = tuple(int(v) for v in self.d)
        object.__setattr__(self, "d", d)
        if len(d) < 2:
            raise BadExponents("need at least two exponents")
        if any(v < 0 for v in d) or any(b <= a for a, b in zip(d, d[1:])):
            raise BadExponents(f"exponents must be strictly increasing and >= 0: {d}")

    @property
    def r(self) -> int:
        return len(self.d) - 1

    @property
    def l(self) -> tuple:
        ks = [dj - j for j, dj in enumerate(self.d)]  # d_j - (j+1) + 1, 0-based j
        out = []
        acc = 0
        for k in ks[:-1]:
            acc += k
            out.append(acc)
        if any(v < 0 for v in out):
            raise BadExponents(f"negative l derived from {self.d}")
        return tuple(out)

    @property
    def n(self) -> int:
        return sum(dj - j for j, dj in enumerate(self.d))

    @property
    def lam(self) -> tuple:
        """Coefficients <Lambda(d), H_i> of the dominant weight."""
        l = self.l
        r = self.r
        ext = (0,) + l + (0,)
        out = []
        for i in range(1, r + 1):
            v = (self.n if i == r else 0) - 2 * ext[i] + ext[i - 1] + ext[i + 1]
            out.append(v)
        if any(v < 0 for v in out):
            raise BadExponents(f"weight from {self.d} is not dominant: {out}")
        return tuple(out)


@dataclass(frozen=True)
class TuplePoint:
    """Candidate/critical point, coordinates grouped by color."""

    groups: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "groups", tuple(tuple(complex(c) for c in g) for g in self.groups)
        )

    @property
    def l(self) -> tuple:
        return tuple(len(g) for g in self.groups)

    @property
    def size(self) -> int:
        return sum(self.l)

    def flat(self) -> np.ndarray:
        return np.array([c for g in self.groups for c in g], dtype=complex)

    @classmethod
    def from_flat(cls, l: Sequence[int], flat) -> "TuplePoint":
        flat = np.asarray(flat, dtype=complex).ravel()
        groups, pos = [], 0
        for li in l:
            groups.append(tuple(flat[pos : pos + li]))
            pos += li
        return cls(tuple(groups))

    def canonical(self) -> "TuplePoint":
        """Sort each group by (real, imag): the orbit representative."""
        return TuplePoint(
            tuple(tuple(sorted(g, key=lambda z: (z.real, z.imag))) for g in self.groups)
        )

    def conj(self) -> "TuplePoint":
        return TuplePoint(tuple(tuple(c.conjugate() for c in g) for g in self.groups))


@dataclass(frozen=True)
class TupleY:
    """Monic polynomials whose roots are the grouped coordinates."""

    ys: tuple


@dataclass(frozen=True)
class MasterSpec:
    """A master-function instance: Cartan data, weights, marked points, l."""

    r: int
    gram: np.ndarray
    weights: np.ndarray
    z: np.ndarray
    l: tuple
    d: tuple = None  # exponent origin, when built from an ExponentSpec

    def __post_init__(self):
        gram = np.asarray(self.gram, dtype=float)
        weights = np.asarray(self.weights, dtype=float).reshape(-1, self.r)
        z = np.asarray(self.z, dtype=complex).ravel()
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        if gram.shape != (self.r, self.r):
            raise ValueError("gram must be r x r")
        if not np.array_equal(gram, gram.T):
            raise ValueError("gram must be symmetric")
        if np.any(np.diag(gram) <= 0):
            raise ValueError("gram diagonal must be positive")
        off = gram - np.diag(np.diag(gram))
        if np.any(off > 0):
            raise ValueError("gram off-diagonal entries must be nonpositive")
        if np.any(weights < 0):
            raise ValueError("weight pairings must be nonnegative")
        if len(self.l) != self.r:
            raise ValueError("need one group size per color")
        n = z.size
        if weights.shape[0] != n:
            raise ValueError("one weight row per z point")
        if n >= 2:
            dz = np.abs(z[:, None] - z[None, :])
            np.fill_diagonal(dz, np.inf)
            if dz.min() <= 1e-10 * max(np.abs(z).max(), 1.0):
                raise ValueError("z points must be pairwise distinct")
        colors = np.concatenate(
            [np.full(li, i, dtype=int) for i, li in enumerate(self.l)]
        ) if sum(self.l) else np.zeros(0, dtype=int)
        object.__setattr__(self, "_colors", colors)

    @property
    def n(self) -> int:
        return int(self.z.size)

    @property
    def is_type_a(self) -> bool:
        expect = 2.0 * np.eye(self.r) - np.eye(self.r, k=1) - np.eye(self.r, k=-1)
        return bool(np.array_equal(self.gram, expect))


def spec_from_exponents(dspec: ExponentSpec, z) -> MasterSpec:
    """Type-A spec with all weights omega_r, built from exponent data."""
    z = np.asarray(z, dtype=complex).ravel()
    l = dspec.l  # validates, may raise BadExponents
    dspec.lam
    if z.size != dspec.n:
        raise ValueError(f"need n={dspec.n} points for d={dspec.d}, got {z.size}")
    r = dspec.r
    gram = 2.0 * np.eye(r) - np.eye(r, k=1) - np.eye(r, k=-1)
    weights = np.zeros((dspec.n, r))
    weights[:, r - 1] = 1.0
    return MasterSpec(r=r, gram=gram, weights=weights, z=z, l=l, d=dspec.d)


# ---------------------------------------------------------------------------
# Residual / Jacobian kernels, batched over leading axes.

def collision_tol(spec: MasterSpec, tmax: float) -> float:
    zmax = float(np.abs(spec.z).max(initial=0.0))
    return COLLISION_REL * (1.0 + max(zmax, tmax))


def _collision_mask(spec: MasterSpec, T: np.ndarray) -> np.ndarray:
    """True where the batch row is collision-free."""
    B, L = T.shape
    ok = np.ones(B, dtype=bool)
    if L == 0:
        return ok
    tol = COLLISION_REL * (
        1.0 + np.maximum(np.abs(spec.z).max(initial=0.0), np.abs(T).max(axis=1))
    )
    if spec.n:
        dz = np.abs(T[:, :, None] - spec.z[None, None, :]).min(axis=(1, 2))
        ok &= dz > tol
    if L >= 2:
        dt = np.abs(T[:, :, None] - T[:, None, :])
        dt[:, np.arange(L), np.arange(L)] = np.inf
        ok &= dt.min(axis=(1, 2)) > tol
    return ok


def _residual_batch(spec: MasterSpec, T: np.ndarray) -> np.ndarray:
    B, L = T.shape
    if L == 0:
        return np.zeros((B, 0), dtype=complex)
    c = spec._colors
    res = np.zeros((B, L), dtype=complex)
    if spec.n:
        wz = spec.weights[:, c].T  # (L, n)
        res -= (wz[None, :, :] / (T[:, :, None] - spec.z[None, None, :])).sum(axis=2)
    if L >= 2:
        G = spec.gram[c[:, None], c[None, :]]  # (L, L)
        DT = T[:, :, None] - T[:, None, :]
        np.einsum("bll->bl", DT)[:] = 1.0  # dodge 0/0 on the diagonal
        inv = G[None, :, :] / DT
        np.einsum("bll->bl", inv)[:] = 0.0
        res += inv.sum(axis=2)
    return res


def _jacobian_batch(spec: MasterSpec, T: np.ndarray) -> np.ndarray:
    B, L = T.shape
    J = np.zeros((B, L, L), dtype=complex)
    if L == 0:
        return J
    c = spec._colors
    diag = np.zeros((B, L), dtype=complex)
    if spec.n:
        wz = spec.weights[:, c].T
        diag += (wz[None, :, :] / (T[:, :, None] - spec.z[None, None, :]) ** 2).sum(axis=2)
    if L >= 2:
        G = spec.gram[c[:, None], c[None, :]]
        DT = T[:, :, None] - T[:, None, :]
        np.einsum("bll->bl", DT)[:] = 1.0
        off = G[None, :, :] / DT**2
        np.einsum("bll->bl", off)[:] = 0.0
        J += off
        diag -= off.sum(axis=2)
    np.einsum("bll->bl", J)[:] = diag
    return J


def _require_collision_free(spec: MasterSpec, t: TuplePoint) -> np.ndarray:
    if t.l != spec.l:
        raise ValueError(f"tuple group sizes {t.l} do not match spec l={spec.l}")
    T = t.flat()[None, :]
    if not _collision_mask(spec, T)[0]:
        raise Collision("coordinates too close to z or to each other")
    return T


def log_master(spec: MasterSpec, t: TuplePoint) -> complex:
    """log Phi at t (principal branches); only its gradient is canonical."""
    T = _require_collision_free(spec, t)[0]
    c = spec._colors
    acc = 0.0j
    if spec.n and T.size:
        wz = spec.weights[:, c].T
        acc -= (wz * np.log(T[:, None] - spec.z[None, :])).sum()
    L = T.size
    for p in range(L):
        for q in range(p + 1, L):
            acc += spec.gram[c[p], c[q]] * np.log(T[p] - T[q])
    return complex(acc)


def bae_residual(spec: MasterSpec, t: TuplePoint) -> np.ndarray:
    """Gradient of log Phi at t, flattened in group-major order."""
    T = _require_collision_free(spec, t)
    return _residual_batch(spec, T)[0]


def bae_jacobian(spec: MasterSpec, t: TuplePoint) -> np.ndarray:
    """Analytic Jacobian of bae_residual (the complex Hessian of log Phi)."""
    T = _require_collision_free(spec, t)
    return _jacobian_batch(spec, T)[0]


def tuple_y(t: TuplePoint) -> TupleY:
    return TupleY(tuple(Poly.from_roots(g) for g in t.groups))


def _ln_prime(factors) -> RatFn:
    """Logarithmic derivative of prod p_j^{e_j}, as a single RatFn."""
    parts = [(p, e) for p, e in factors if e != 0 and p.degree > 0]
    if not parts:
        return RatFn.zero()
    den = Poly.one()
    for p, _ in parts:
        den = den * p
    num = Poly.zero()
    for j, (p, e) in enumerate(parts):
        term = e * p.deriv()
        for k, (q, _) in enumerate(parts):
            if k != j:
                term = term * q
        num = num + term
    return RatFn(num, den)


def _compose_over_base(u_nums, base: Poly, base_roots) -> ScalarDiffOp:
    """Expand prod_k (d - A_k/base) keeping every coefficient as P / base^a.

    Generic RatFn composition squares denominators at each derivative and the
    resulting coefficient cancellation destroys the rational structure; over a
    fixed base the denominator power grows by one per step and the numerator
    arithmetic stays conditioned.  Numerators are finally deflated against the
    exactly-known base roots, so coefficients of critical-point operators come
    out with poles at the marked points only.
    """
    Bp = base.deriv()

    def lift(P, da):
        for _ in range(da):
            P = P * base
        return P

    def add(entry, P, a):
        P0, a0 = entry
        if a0 == a:
            return (P0 + P, a)
        if a0 < a:
            return (lift(P0, a - a0) + P, a)
        return (P0 + lift(P, a0 - a), a0)

    coeffs = {1: (Poly.one(), 0), 0: (-u_nums[-1], 1)}
    for A in u_nums[-2::-1]:
        new = {}
        for p, (P, a) in coeffs.items():
            dP = (P.deriv() * base - a * (P * Bp), a + 1) if a else (P.deriv(), 0)
            uP = (-(A * P), a + 1)
            new[p + 1] = add(new.get(p + 1, (Poly.zero(), 0)), P, a)
            new[p] = add(add(new.get(p, (Poly.zero(), 0)), *dP), *uP)
        coeffs = new
    m = len(u_nums)
    out = []
    for k in range(1, m + 1):
        P, a = coeffs.get(m - k, (Poly.zero(), 0))
        out.append(_deflate_ratio(P, a, base_roots))
    return ScalarDiffOp(m, tuple(out))


def _deflate_ratio(P: Poly, power: int, base_roots) -> RatFn:
    """P / prod(x - rho)^power, cancelling roots where P demonstrably vanishes.

    Deflation is conservative: a root is cancelled only while the numerator
    residual is far below its evaluation scale, so a kept spurious factor
    costs nothing (the near-zero stays in the numerator) while a genuine
    pole can never be dropped.
    """
    if P.is_zero:
        return RatFn.zero()
    remaining = []
    for rho in base_roots:
        for _ in range(power):
            if P.degree < 1:
                remaining.append(rho)
                continue
            mags = np.abs(P.coeffs)
            eval_scale = float(mags @ np.maximum(1.0, abs(rho)) **
                               np.arange(mags.size))
            if abs(P(rho)) <= 1e-8 * eval_scale:
                P, _ = divmod(P, Poly.from_roots([rho]))
            else:
                remaining.append(rho)
    return RatFn(P, Poly.from_roots(remaining))


def _t_factor_exponents(spec: MasterSpec, upto: int) -> np.ndarray:
    """Exponent of (x - z_s) in T_1 ... T_upto, per s (upto is 1-based)."""
    if upto <= 0 or spec.n == 0:
        return np.zeros(spec.n)
    return spec.weights[:, :upto].sum(axis=1)


def fundamental_op_typeA(t: TuplePoint, spec: MasterSpec) -> ScalarDiffOp:
    """The factorized operator of a critical point, expanded.

    Factors, left to right: (d - ln'(T_1..T_r / y_r)),
    (d - ln'(y_r T_1..T_{r-1} / y_{r-1})), ..., (d - ln'(y_1)).
    For the all-omega_r spec this is the classical form with a single T.
    """
    if not spec.is_type_a:
        raise ValueError("factorized operator requires a type-A gram matrix")
    if t.l != spec.l:
        raise ValueError(f"tuple group sizes {t.l} do not match spec l={spec.l}")
    ys = tuple_y(t).ys
    r = spec.r
    facs = [Poly.from_roots([z]) for z in spec.z]
    roots = [complex(z) for z in spec.z]
    y_slot = {}
    for gi, y in enumerate(ys):
        if y.degree > 0:
            y_slot[gi] = len(facs)
            facs.append(y)
            roots.extend(t.groups[gi])
    base = Poly.one()
    for f in facs:
        base = base * f
    cof = []
    for j in range(len(facs)):
        c = Poly.one()
        for k, f in enumerate(facs):
            if k != j:
                c = c * f
        cof.append(c)

    def u_num(t_upto, y_plus=None, y_minus=None):
        exps = {}
        if t_upto > 0:
            col = _t_factor_exponents(spec, t_upto)
            for s in range(spec.n):
                e = int(round(col[s]))
                if e:
                    exps[s] = exps.get(s, 0) + e
        if y_plus is not None and y_plus in y_slot:
            exps[y_slot[y_plus]] = exps.get(y_slot[y_plus], 0) + 1
        if y_minus is not None and y_minus in y_slot:
            exps[y_slot[y_minus]] = exps.get(y_slot[y_minus], 0) - 1
        acc = Poly.zero()
        for j, e in exps.items():
            acc = acc + e * (facs[j].deriv() * cof[j])
        return acc

    u_nums = [u_num(r, y_minus=r - 1)]
    for i in range(r, 1, -1):
        u_nums.append(u_num(i - 1, y_plus=i - 1, y_minus=i - 2))
    u_nums.append(u_num(0, y_plus=0))
    return _compose_over_base(u_nums, base, roots)


def recover_tuple(V_basis: Sequence[Poly], spec: MasterSpec) -> TupleY:
    """Recover the tuple y from an echelon basis of the fundamental space.

    y_i is the monic multiple of Wr(f_1..f_i) / (T_{i-1} T_{i-2}^2 ... T_1^{i-1});
    an inexact quotient means V is not a fundamental space for this spec.
    """
    basis = list(V_basis)
    degs = [f.degree for f in basis]
    if any(b <= a for a, b in zip(degs, degs[1:])):
        raise ValueError("basis must have strictly increasing degrees")
    ys = []
    for i in range(1, spec.r + 1):
        w = wronskian(basis[:i])
        exps = np.zeros(spec.n)
        for j in range(1, i):
            exps += (i - j) * spec.weights[:, j - 1]
        roots = []
        for s in range(spec.n):
            roots.extend([spec.z[s]] * int(round(exps[s])))
        if roots:
            div = Poly.from_roots(roots)
            q, rem = divmod(w, div)
            if rem.max_abs_coeff() > 1e-8 * max(w.max_abs_coeff(), 1e-300):
                raise InexactDivision(
                    f"Wronskian quotient for y_{i} has remainder above tolerance")
            w = q
        if w.is_zero:
            raise InexactDivision(f"vanishing Wronskian chain at level {i}")
        ys.append(w.monic())
    return TupleY(tuple(ys))

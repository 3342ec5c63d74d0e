"""Dense complex polynomials, rational functions, and monic scalar ODEs.

Everything downstream (master functions, fundamental operators, Gaudin
eigenvalues) is built over these three types.  Coefficients are complex
doubles; degree decisions use a deterministic relative trim threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IrregularSingularity, ZeroWronskian

TRIM_REL = 1e-12


class _Infinity:
    """Sentinel for the point at infinity in exponent computations."""

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def _is_infinity(point) -> bool:
    if point is INFINITY or isinstance(point, _Infinity):
        return True
    if isinstance(point, (int, float)) and math.isinf(point):
        return True
    return False


def _trim(c: np.ndarray) -> np.ndarray:
    """Drop trailing (highest-degree) coefficients below the relative threshold."""
    if c.size == 0:
        return c
    mags = np.abs(c)
    thr = TRIM_REL * max(float(mags.max()), 1.0)
    keep = np.nonzero(mags > thr)[0]
    if keep.size == 0:
        return c[:0]
    return c[: keep[-1] + 1]


class Poly:
    """Univariate polynomial with complex coefficients, ascending degree.

    The zero polynomial has an empty coefficient array; otherwise the
    leading coefficient is nonzero by construction (trimming).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex]):
        c = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex).ravel()
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def from_roots(cls, roots: Iterable[complex], scale: complex = 1.0) -> "Poly":
        c = np.array([scale], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return cls(c)

    @classmethod
    def zero(cls) -> "Poly":
        return cls([])

    @classmethod
    def one(cls) -> "Poly":
        return cls([1.0])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0.0, 1.0])

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        if self.is_zero:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return complex(self.coeffs[-1])

    def monic(self) -> "Poly":
        return Poly(self.coeffs / self.leading)

    def __call__(self, x):
        if self.is_zero:
            return np.zeros_like(np.asarray(x, dtype=complex)) if np.ndim(x) else 0j
        xs = np.asarray(x, dtype=complex)
        acc = np.full_like(xs, self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            acc = acc * xs + c
        return acc if np.ndim(x) else complex(acc)

    def deriv(self, order: int = 1) -> "Poly":
        c = self.coeffs
        for _ in range(order):
            if c.size <= 1:
                return Poly.zero()
            c = c[1:] * np.arange(1, c.size, dtype=float)
        return Poly(c)

    def shift(self, z0: complex) -> "Poly":
        """Taylor shift: returns q with q(w) = p(w + z0)."""
        if self.is_zero:
            return self
        # repeated synthetic division by (x - z0); remainders are Taylor coeffs
        work = np.array(self.coeffs, dtype=complex)
        out = np.empty_like(work)
        n = work.size
        for k in range(n):
            # divide work (degree n-1-k) by (x - z0)
            for i in range(n - k - 2, -1, -1):
                work[i] = work[i] + z0 * work[i + 1]
            out[k] = work[0]
            work = work[1:]
        return Poly(out)

    def conj(self) -> "Poly":
        return Poly(np.conj(self.coeffs))

    def __add__(self, other) -> "Poly":
        other = _coerce_poly(other)
        a, b = self.coeffs, other.coeffs
        if a.size < b.size:
            a, b = b, a
        c = np.array(a, dtype=complex)
        c[: b.size] += b
        return Poly(c)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce_poly(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, RatFn):
            return NotImplemented
        other = _coerce_poly(other)
        if self.is_zero or other.is_zero:
            return Poly.zero()
        return Poly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = _coerce_poly(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Poly.zero(), self
        rem = np.array(self.coeffs, dtype=complex)
        d = np.array(other.coeffs, dtype=complex)
        lead = d[-1]
        quot = np.zeros(self.degree - other.degree + 1, dtype=complex)
        for k in range(quot.size - 1, -1, -1):
            q = rem[k + other.degree] / lead
            quot[k] = q
            rem[k : k + d.size] -= q * d
        return Poly(quot), Poly(rem[: other.degree] if other.degree > 0 else rem[:0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Poly, int, float, complex)):
            return NotImplemented
        other = _coerce_poly(other)
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.array_equal(self.coeffs, other.coeffs)
        )

    def isclose(self, other: "Poly", tol: float = 1e-9) -> bool:
        a, b = self.coeffs, other.coeffs
        n = max(a.size, b.size)
        pa = np.zeros(n, dtype=complex)
        pb = np.zeros(n, dtype=complex)
        pa[: a.size] = a
        pb[: b.size] = b
        scale = max(np.abs(pa).max(initial=0.0), np.abs(pb).max(initial=0.0), 1.0)
        return bool(np.abs(pa - pb).max(initial=0.0) <= tol * scale)

    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))

    def __repr__(self):
        if self.is_zero:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if abs(c) == 0:
                continue
            cs = f"{c:.6g}" if c.imag else f"{c.real:.6g}"
            terms.append(cs if k == 0 else f"({cs})*x^{k}")
        return "Poly(" + " + ".join(terms) + ")"


def _coerce_poly(v) -> Poly:
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, float, complex, np.integer, np.floating, np.complexfloating)):
        return Poly([complex(v)])
    raise TypeError(f"cannot interpret {type(v)!r} as Poly")


class RatFn:
    """Ratio of two polynomials; the denominator is kept monic and nonzero."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _coerce_poly(num)
        den = Poly.one() if den is None else _coerce_poly(den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        lead = den.leading
        object.__setattr__(self, "num", Poly(num.coeffs / lead))
        object.__setattr__(self, "den", Poly(den.coeffs / lead))

    def __setattr__(self, name, value):
        raise AttributeError("RatFn is immutable")

    @classmethod
    def zero(cls) -> "RatFn":
        return cls(Poly.zero())

    @classmethod
    def one(cls) -> "RatFn":
        return cls(Poly.one())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def deriv(self) -> "RatFn":
        return RatFn(self.num.deriv() * self.den - self.num * self.den.deriv(),
                     self.den * self.den)

    def conj(self) -> "RatFn":
        return RatFn(self.num.conj(), self.den.conj())

    def __add__(self, other) -> "RatFn":
        other = _coerce_ratfn(other)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.den)

    def __sub__(self, other) -> "RatFn":
        return self + (-_coerce_ratfn(other))

    def __rsub__(self, other) -> "RatFn":
        return _coerce_ratfn(other) + (-self)

    def __mul__(self, other) -> "RatFn":
        other = _coerce_ratfn(other)
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFn":
        other = _coerce_ratfn(other)
        if other.is_zero:
            raise ZeroDivisionError("division by zero RatFn")
        return RatFn(self.num * other.den, self.den * other.num)

    def isclose(self, other: "RatFn", tol: float = 1e-9) -> bool:
        """Equality as rational functions, by cross-multiplication."""
        other = _coerce_ratfn(other)
        return (self.num * other.den).isclose(other.num * self.den, tol)

    def reduce(self, root_tol: float = 1e-10) -> "RatFn":
        """Best-effort cancellation of common roots of num and den."""
        if self.is_zero or self.den.degree == 0:
            return self
        nroots = list(find_roots(self.num))
        droots = list(find_roots(self.den))
        kept_d = []
        for dr in droots:
            match = None
            for i, nr in enumerate(nroots):
                if abs(nr - dr) <= root_tol * (1.0 + abs(dr)):
                    match = i
                    break
            if match is None:
                kept_d.append(dr)
            else:
                nroots.pop(match)
        if len(kept_d) == len(droots):
            return self
        num = Poly.from_roots(nroots, scale=self.num.leading)
        den = Poly.from_roots(kept_d)
        return RatFn(num, den)

    def __repr__(self):
        return f"RatFn({self.num!r} / {self.den!r})"


def _coerce_ratfn(v) -> RatFn:
    if isinstance(v, RatFn):
        return v
    return RatFn(_coerce_poly(v))


@dataclass(frozen=True)
class ScalarDiffOp:
    """Monic linear differential operator d^m + a_1 d^{m-1} + ... + a_m.

    ``coeffs[k-1]`` is the RatFn coefficient of d^{m-k}; the leading 1 is
    implicit.
    """

    order: int
    coeffs: tuple

    def __post_init__(self):
        if self.order < 1 or len(self.coeffs) != self.order:
            raise ValueError("ScalarDiffOp needs exactly `order` coefficients")
        object.__setattr__(self, "coeffs", tuple(_coerce_ratfn(c) for c in self.coeffs))

    def apply(self, f: Poly) -> RatFn:
        """The rational function (D f)(x)."""
        out = _coerce_ratfn(f.deriv(self.order))
        for k, a in enumerate(self.coeffs, start=1):
            out = out + a * f.deriv(self.order - k)
        return out

    def isclose(self, other: "ScalarDiffOp", tol: float = 1e-9) -> bool:
        return self.order == other.order and all(
            a.isclose(b, tol) for a, b in zip(self.coeffs, other.coeffs)
        )


# ---------------------------------------------------------------------------
# Determinants of polynomial matrices (cofactor expansion; sizes are small).

def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = None
    for j in range(n):
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def wronskian(fs: Sequence[Poly]) -> Poly:
    """Wronskian determinant det(f_i^{(j)}), exact polynomial arithmetic."""
    fs = [_coerce_poly(f) for f in fs]
    if not fs:
        raise ValueError("wronskian of empty sequence")
    rows = []
    for f in fs:
        row = [f]
        for _ in range(len(fs) - 1):
            row.append(row[-1].deriv())
        rows.append(row)
    return _det(rows)


def monic_wronskian(fs: Sequence[Poly]) -> Poly:
    w = wronskian(fs)
    if w.is_zero:
        raise ZeroWronskian("functions are linearly dependent")
    return w.monic()


def fundamental_operator(basis: Sequence[Poly]) -> ScalarDiffOp:
    """Monic operator of order len(basis) whose kernel is span(basis).

    Coefficients are Cramer ratios of Wronskian-type minors: the operator is
    det of the (m+1)x(m+1) derivative matrix bordered by (g, g', ..., g^(m)),
    divided by Wr(basis).
    """
    basis = [_coerce_poly(f) for f in basis]
    m = len(basis)
    rows = []
    for f in basis:
        row = [f]
        for _ in range(m):
            row.append(row[-1].deriv())
        rows.append(row)
    minors = []
    for j in range(m + 1):
        minors.append(_det([[row[c] for c in range(m + 1) if c != j] for row in rows]))
    w = minors[m]  # = Wr(basis)
    if w.is_zero:
        raise ZeroWronskian("basis is linearly dependent")
    # coefficient of d^{m-k} is (-1)^k * minors[m-k] / w
    coeffs = []
    for k in range(1, m + 1):
        num = minors[m - k]
        if k % 2:
            num = -num
        coeffs.append(RatFn(num, w))
    return ScalarDiffOp(m, tuple(coeffs))


def compose_factors(us: Sequence[RatFn]) -> ScalarDiffOp:
    """Expanded product of first-order factors prod_k (d/dx - u_k).

    ``us[-1]`` is the rightmost factor; expansion uses d∘a = a·d + a'.
    """
    us = [_coerce_ratfn(u) for u in us]
    if not us:
        raise ValueError("compose_factors of empty sequence")
    # coeffs_by_power[p] = coefficient of d^p
    coeffs = {1: RatFn.one(), 0: -us[-1]}
    for u in us[-2::-1]:
        new = {}
        for p, a in coeffs.items():
            new[p + 1] = new.get(p + 1, RatFn.zero()) + a
            new[p] = new.get(p, RatFn.zero()) + a.deriv() - u * a
        coeffs = new
    m = len(us)
    return ScalarDiffOp(m, tuple(coeffs.get(m - k, RatFn.zero()) for k in range(1, m + 1)))


def formal_conjugate(op: ScalarDiffOp) -> ScalarDiffOp:
    """Re-expansion of sum_k (-1)^k (d/dx)^{m-k} ∘ a_k into standard form.

    The sign convention keeps the result monic (so it equals the formal
    adjoint times (-1)^m), and it is an involution.
    """
    m = op.order
    out = {m: RatFn.one()}
    for k in range(1, m + 1):
        a = op.coeffs[k - 1]
        sign = -1 if k % 2 else 1
        d = a
        for j in range(0, m - k + 1):
            c = sign * math.comb(m - k, j)
            out[m - k - j] = out.get(m - k - j, RatFn.zero()) + c * d
            if j < m - k:
                d = d.deriv()
    return ScalarDiffOp(m, tuple(out.get(m - k, RatFn.zero()) for k in range(1, m + 1)))


def _cleared_poly_coeffs(op: ScalarDiffOp):
    """Multiply through by all denominators: returns Polys q_0..q_m with
    q_0 d^m + q_1 d^{m-1} + ... + q_m proportional to op."""
    dens = [c.den for c in op.coeffs]
    lead = Poly.one()
    for d in dens:
        lead = lead * d
    qs = [lead]
    for k, c in enumerate(op.coeffs):
        q = c.num
        for j, d in enumerate(dens):
            if j != k:
                q = q * d
        qs.append(q)
    return qs


def echelon_basis(vectors, tol: float = 1e-10):
    """Reduced echelon basis (by polynomial degree, monic) of a coefficient span.

    ``vectors``: iterable of 1-d complex arrays (ascending degree). Returns a
    list of Poly with strictly increasing degrees.
    """
    vs = [np.array(v, dtype=complex) for v in vectors]
    if not vs:
        return []
    n = max(v.size for v in vs)
    vs = [np.concatenate([v, np.zeros(n - v.size, dtype=complex)]) for v in vs]

    def vdeg(v):
        mags = np.abs(v)
        m = mags.max(initial=0.0)
        if m == 0.0:
            return -1
        idx = np.nonzero(mags > tol * m)[0]
        return -1 if idx.size == 0 else int(idx[-1])

    pivots = {}  # degree -> vector (monic at that degree)
    for v in vs:
        v = v.copy()
        d = vdeg(v)
        while d >= 0 and d in pivots:
            v = v - v[d] * pivots[d]
            d = vdeg(v)
        if d >= 0:
            pivots[d] = v / v[d]
    # back-substitution for full reduction
    degs = sorted(pivots)
    for i, d in enumerate(degs):
        for d2 in degs[i + 1 :]:
            pivots[d2] = pivots[d2] - pivots[d2][d] * pivots[d]
            pivots[d2][d] = 0.0
    out = []
    for d in degs:
        v = pivots[d]
        v[np.abs(v) <= tol * max(1.0, np.abs(v).max())] = 0.0
        v[d] = 1.0
        out.append(Poly(v[: d + 1]))
    return out


def polynomial_kernel(op: ScalarDiffOp, degree_bound: int) -> list:
    """Basis of polynomial solutions of op·f = 0 with deg f <= degree_bound.

    Linear algebra on coefficient vectors after clearing denominators; the
    basis comes back echelonized by degree (strictly increasing, monic).
    """
    if degree_bound < 0:
        raise ValueError("degree_bound must be >= 0")
    qs = _cleared_poly_coeffs(op)
    m = op.order
    ncols = degree_bound + 1
    maxq = max((q.degree for q in qs if not q.is_zero), default=0)
    nrows = maxq + degree_bound + 1
    A = np.zeros((nrows, ncols), dtype=complex)
    for k, q in enumerate(qs):  # q multiplies f^{(m-k)}
        if q.is_zero:
            continue
        p = m - k
        qc = q.coeffs
        for j in range(p, ncols):
            fall = 1.0
            for i in range(p):
                fall *= j - i
            A[j - p : j - p + qc.size, j] += fall * qc
        # j < p contributes nothing (derivative kills the monomial)
    if A.size == 0:
        return []
    _, s, vh = np.linalg.svd(A)
    null = vh[_numerical_rank(s):]
    return echelon_basis(np.conj(null))


def _numerical_rank(s: np.ndarray, hard: float = 1e-9, soft: float = 1e-3,
                    cliff: float = 1e2) -> int:
    """Rank from singular values: a dominant cliff into the sub-`soft` regime
    marks the kernel; otherwise the hard relative threshold decides.

    Coefficients in rational form may keep uncancelled near-common factors
    (residual poles ~1e-8), which lifts true kernel directions to ~1e-9..1e-8
    while non-solutions stay many orders higher; smoothly decaying spectra
    (e.g. truncated exponentials) have no such cliff and keep full rank.
    """
    if s.size == 0 or s[0] == 0.0:
        return 0
    rel = s / s[0]
    rank = int(np.sum(rel > hard))
    best_i, best_ratio = None, cliff
    for i in range(s.size - 1):
        if rel[i + 1] < soft:
            ratio = rel[i] / rel[i + 1] if rel[i + 1] > 0 else np.inf
            if ratio >= best_ratio:
                best_ratio = ratio
                best_i = i
    if best_i is not None:
        return min(rank, best_i + 1)
    return rank


def _falling_factorial_poly(p: int) -> np.ndarray:
    """Coefficients (ascending) of rho(rho-1)...(rho-p+1)."""
    c = np.array([1.0], dtype=complex)
    for i in range(p):
        c = np.convolve(c, np.array([-i, 1.0], dtype=complex))
    return c


@dataclass(frozen=True)
class ExponentReport:
    """Exponents (indicial roots) of an operator at one point."""

    point: object
    exponents: tuple

    def as_integers(self, tol: float = 1e-6):
        out = []
        for e in self.exponents:
            n = round(e.real)
            if abs(e - n) > tol:
                raise ValueError(f"exponent {e} is not integral to {tol}")
            out.append(n)
        return tuple(sorted(out))


def _laurent_indicial_coeff(a: RatFn, z0: complex, k: int, m: int) -> complex:
    """Laurent coefficient c_{-k} of a at z0, checking pole order <= k.

    Evaluates w^m a(z0 + w) on a small circle and reads Taylor coefficients
    off the DFT; coefficient-space methods (Taylor shift) lose accuracy when
    another root sits close to z0, while plain Horner evaluation does not.
    The circle stays well inside the nearest other pole.
    """
    if a.is_zero:
        return 0.0j
    scale = 1.0 + abs(z0)
    rho = 0.05 * scale
    if a.den.degree > 0:
        far = [abs(r - z0) for r in find_roots(a.den)
               if abs(r - z0) > 1e-3 * scale]
        if far:
            rho = min(rho, 0.25 * min(far))
    N = 128
    w = rho * np.exp(2j * np.pi * np.arange(N) / N)
    vals = a.num(z0 + w) / a.den(z0 + w) * w**m
    ghat = np.fft.fft(vals) / N  # ghat[i] ~ g_i rho^i for f = sum g_i w^i
    vmax = max(float(np.abs(vals).max()), 1e-300)
    # analyticity of w^m a (pole order <= m): negative modes must vanish
    if np.abs(ghat[-4:]).max() > 1e-7 * vmax:
        raise IrregularSingularity(
            f"pole order above operator order at {z0}")
    # pole order <= k: Taylor coefficients g_0 .. g_{m-k-1} must vanish
    if m - k > 0 and np.abs(ghat[: m - k]).max() > 1e-7 * vmax:
        raise IrregularSingularity(
            f"coefficient has pole order above {k} at {z0}")
    return complex(ghat[m - k] / rho ** (m - k))


def exponents_at(op: ScalarDiffOp, point) -> ExponentReport:
    """Roots of the indicial polynomial at a finite point or at INFINITY.

    At infinity the convention is: a solution asymptotic to x^d has
    exponent -d.
    """
    m = op.order
    chi = _falling_factorial_poly(m)
    acc = np.zeros(m + 1, dtype=complex)
    acc[: chi.size] += chi
    if _is_infinity(point):
        for k in range(1, m + 1):
            a = op.coeffs[k - 1]
            if a.is_zero:
                continue
            rel = a.num.degree - a.den.degree
            if rel > -k:
                raise IrregularSingularity(f"coefficient {k} grows like x^{rel} at infinity")
            if rel == -k:
                Ak = a.num.leading / a.den.leading
                f = _falling_factorial_poly(m - k)
                acc[: f.size] += Ak * f
        roots = find_roots(Poly(acc))
        return ExponentReport(INFINITY, tuple(sorted((-r for r in roots),
                                                     key=lambda z: (z.real, z.imag))))
    z0 = complex(point)
    for k in range(1, m + 1):
        a = op.coeffs[k - 1]
        if a.is_zero:
            continue
        c = _laurent_indicial_coeff(a, z0, k, m)
        f = _falling_factorial_poly(m - k)
        acc[: f.size] += c * f
    roots = find_roots(Poly(acc))
    return ExponentReport(z0, tuple(sorted(roots, key=lambda z: (z.real, z.imag))))


def find_roots(p: Poly) -> tuple:
    """All complex roots with multiplicity (companion matrix + Newton polish)."""
    p = _coerce_poly(p)
    if p.is_zero:
        raise ValueError("zero polynomial has every point as a root")
    if p.degree == 0:
        return ()
    roots = np.roots(p.coeffs[::-1])
    dp = p.deriv()
    scale = p.max_abs_coeff()
    for _ in range(3):
        vals = p(roots)
        if np.abs(vals).max(initial=0.0) <= 1e-12 * scale:
            break
        dvals = dp(roots)
        ok = np.abs(dvals) > 1e-14 * max(scale, 1.0)
        step = np.zeros_like(roots)
        step[ok] = vals[ok] / dvals[ok]
        cand = roots - step
        better = np.abs(p(cand)) <= np.abs(vals)
        roots = np.where(better, cand, roots)
    return tuple(sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag)))


def ramification_points(fs: Sequence[Poly]) -> tuple:
    """Roots (with multiplicity) of the Wronskian of the given polynomials."""
    w = wronskian(fs)
    if w.is_zero:
        raise ZeroWronskian("dependent input: Wronskian vanishes identically")
    if w.degree == 0:
        return ()
    return find_roots(w)


def is_real_space(op: ScalarDiffOp, tol: float = 1e-8) -> bool:
    """True iff all coefficients are real rational functions to tolerance."""
    for a in op.coeffs:
        for part in (a.num, a.den):
            for c in part.coeffs:
                if abs(c.imag) > tol * (1.0 + abs(c)):
                    return False
    return True

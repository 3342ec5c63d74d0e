"""Tensor products of gl_{r+1} highest-weight factors at desk scale.

The workhorse is the tensor power of the (r+1)-dimensional dual vector
representation (gl highest weight (0,...,0,-1)), realized concretely by
E_{i,j} e*_k = -delta_{ik} e*_j.  For r = 1, symmetric powers of the dual
2-dimensional representation provide arbitrary finite-dimensional
irreducible factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionCap
from .master import ExponentSpec

DIM_CAP = 4096
NULLSPACE_REL = 1e-10


class DualVectorFactor:
    """The dual vector representation (C^{r+1})* with the minus-transpose action."""

    def __init__(self, r: int):
        self.rank = r
        self.dim = r + 1
        self.hw_index = r  # e*_{r+1}
        # m_i = (omega_r, alpha_1 + ... + alpha_i)
        self.m_values = tuple(1 if i == r else 0 for i in range(r + 1))

    def E(self, i: int, j: int) -> np.ndarray:
        """Matrix of E_{i,j} (1-based): e*_i -> -e*_j."""
        out = np.zeros((self.dim, self.dim))
        out[j - 1, i - 1] = -1.0
        return out

    def weight(self, k: int) -> np.ndarray:
        """<wt(e*_a), H_i> = delta_{a,i+1} - delta_{a,i}, a = k+1 (k 0-based)."""
        w = np.zeros(self.rank, dtype=int)
        a = k + 1
        for i in range(1, self.rank + 1):
            w[i - 1] = (1 if a == i + 1 else 0) - (1 if a == i else 0)
        return w


class Sl2SymFactor:
    """Symmetric power Sym^m of the dual 2-dimensional representation.

    Basis u_0..u_m with u_0 the highest weight vector; the actions are the
    explicit tridiagonal ones induced from E_{i,j} e*_k = -delta_{ik} e*_j.
    """

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("m must be >= 0")
        self.rank = 1
        self.m = m
        self.dim = m + 1
        self.hw_index = 0
        self.m_values = (0, m)

    def E(self, i: int, j: int) -> np.ndarray:
        m = self.m
        out = np.zeros((self.dim, self.dim))
        a = np.arange(self.dim)
        if i == 1 and j == 1:
            out[a, a] = -a
        elif i == 2 and j == 2:
            out[a, a] = -(m - a)
        elif i == 1 and j == 2:  # E_{1,2} u_a = -a u_{a-1}
            out[a[:-1], a[1:]] = -a[1:]
        elif i == 2 and j == 1:  # E_{2,1} u_a = -(m-a) u_{a+1}
            out[a[1:], a[:-1]] = -(m - a[:-1])
        else:
            raise ValueError("sl2 factor has generators with i,j in {1,2}")
        return out

    def weight(self, k: int) -> np.ndarray:
        return np.array([self.m - 2 * k], dtype=int)


def _factor_gram(factor) -> np.ndarray:
    """Diagonal of the factor Shapovalov form, propagated from S(w,w)=1."""
    dim = factor.dim
    g = np.full(dim, np.nan)
    g[factor.hw_index] = 1.0
    pairs = [(factor.E(i + 1, i), factor.E(i, i + 1)) for i in range(1, factor.rank + 1)]
    for _ in range(dim + 1):
        changed = False
        for F, E in pairs:
            for b in range(dim):
                if np.isnan(g[b]):
                    continue
                col = F[:, b]
                nz = np.nonzero(col)[0]
                if nz.size != 1:
                    continue
                c = int(nz[0])
                if not np.isnan(g[c]):
                    continue
                f = col[c]
                back = E @ col  # tau(F) F e_b
                g[c] = back[b] * g[b] / (f * f)
                changed = True
        if not changed:
            break
    if np.isnan(g).any():
        raise ValueError("Shapovalov propagation did not reach every basis vector")
    return g


class TensorRep:
    """Tensor product of highest-weight factors with sparse generator actions."""

    def __init__(self, r: int, factors, cap: int = DIM_CAP):
        self.r = r
        self.factors = tuple(factors)
        for f in self.factors:
            if f.rank != r:
                raise ValueError("factor rank does not match the tensor rank")
        dim = 1
        for f in self.factors:
            dim *= f.dim
        if dim > cap:
            raise DimensionCap(f"dimension {dim} exceeds cap {cap}")
        self.dim = dim
        self.n = len(self.factors)
        w = np.zeros((1, r), dtype=int)
        for f in self.factors:
            fw = np.array([f.weight(k) for k in range(f.dim)], dtype=int)
            w = (w[:, None, :] + fw[None, :, :]).reshape(-1, r)
        self._weights = w  # (dim, r)
        self._gram_diag = None

    def generator(self, i: int, j: int, s: int) -> sp.csr_matrix:
        """Sparse matrix of E^{(s)}_{i,j} (all arguments 1-based)."""
        if not (1 <= s <= self.n):
            raise ValueError(f"slot {s} out of range 1..{self.n}")
        mat = sp.csr_matrix(self.factors[s - 1].E(i, j))
        left = 1
        for f in self.factors[: s - 1]:
            left *= f.dim
        right = 1
        for f in self.factors[s:]:
            right *= f.dim
        out = sp.kron(sp.identity(left, format="csr"), mat, format="csr")
        out = sp.kron(out, sp.identity(right, format="csr"), format="csr")
        return out

    def raising_sum(self, i: int) -> sp.csr_matrix:
        """Sum over slots of E^{(s)}_{i,i+1}."""
        acc = None
        for s in range(1, self.n + 1):
            g = self.generator(i, i + 1, s)
            acc = g if acc is None else acc + g
        if acc is None:
            acc = sp.csr_matrix((self.dim, self.dim))
        return acc

    def weight_indices(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=int).ravel()
        if mu.size != self.r:
            raise ValueError(f"mu must have {self.r} entries")
        return np.nonzero((self._weights == mu[None, :]).all(axis=1))[0]

    def gram_diag(self) -> np.ndarray:
        if self._gram_diag is None:
            g = np.array([1.0])
            for f in self.factors:
                g = np.kron(g, _factor_gram(f))
            self._gram_diag = g
        return self._gram_diag

    def highest_vector(self) -> np.ndarray:
        v = np.zeros(self.dim)
        idx = 0
        for f in self.factors:
            idx = idx * f.dim + f.hw_index
        v[idx] = 1.0
        return v


class RepSpace(TensorRep):
    """Tensor power of the dual vector representation, basis {1..r+1}^n."""

    def __init__(self, r: int, n: int, cap: int = DIM_CAP):
        super().__init__(r, [DualVectorFactor(r) for _ in range(n)], cap=cap)

    @property
    def basis(self):
        """Multi-indices a in {1..r+1}^n in lexicographic (kron) order."""
        return list(itertools.product(range(1, self.r + 2), repeat=self.n))


def sl2_rep(ms, cap: int = DIM_CAP) -> TensorRep:
    """Tensor product of Sym^{m_s} dual factors for r = 1."""
    return TensorRep(1, [Sl2SymFactor(int(m)) for m in ms], cap=cap)


@dataclass(frozen=True)
class WeightVector:
    """Integer weight in the H_i coordinates."""

    mu: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(int(v) for v in self.mu))


@dataclass(frozen=True)
class Subspace:
    """Orthonormal column basis of a subspace of a tensor representation."""

    parent: object
    basis_matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis_matrix.shape[1]


def _mu_of(mu):
    return mu.mu if isinstance(mu, WeightVector) else mu


def generator_action(rep: TensorRep, i: int, j: int, s: int) -> sp.csr_matrix:
    return rep.generator(i, j, s)


def weight_space(rep: TensorRep, mu) -> Subspace:
    idx = rep.weight_indices(_mu_of(mu))
    P = np.zeros((rep.dim, idx.size))
    P[idx, np.arange(idx.size)] = 1.0
    return Subspace(rep, P)


def singular_subspace(rep: TensorRep, mu) -> Subspace:
    """Kernel of all raising sums inside the mu weight space, orthonormalized."""
    mu = np.asarray(_mu_of(mu), dtype=int).ravel()
    idx = rep.weight_indices(mu)
    if idx.size == 0:
        return Subspace(rep, np.zeros((rep.dim, 0)))
    blocks = []
    for i in range(1, rep.r + 1):
        alpha_i = np.zeros(rep.r, dtype=int)
        alpha_i[i - 1] = 2
        if i >= 2:
            alpha_i[i - 2] = -1
        if i <= rep.r - 1:
            alpha_i[i] = -1
        rows = rep.weight_indices(mu + alpha_i)
        if rows.size == 0:
            continue
        R = rep.raising_sum(i).tocsc()
        blocks.append(R[rows][:, idx].toarray())
    if not blocks:
        P = np.zeros((rep.dim, idx.size))
        P[idx, np.arange(idx.size)] = 1.0
        return Subspace(rep, P)
    M = np.vstack(blocks)
    _, svals, vh = np.linalg.svd(M)
    if svals.size == 0:
        rank = 0
    else:
        rank = int(np.sum(svals > NULLSPACE_REL * svals[0]))
    null = vh[rank:].conj().T  # (k, nullity), orthonormal columns
    P = np.zeros((rep.dim, null.shape[1]))
    P[idx] = null.real if np.abs(null.imag).max(initial=0.0) < 1e-14 else null
    return Subspace(rep, P)


def multiplicity_N(dspec: ExponentSpec) -> int:
    """Multiplicity of L_{Lambda(d)} in the n-fold tensor power = dim Sing[mu]."""
    rep = RepSpace(dspec.r, dspec.n)
    return singular_subspace(rep, dspec.lam).dim


def shapovalov_gram(rep: TensorRep, subspace: Subspace = None) -> np.ndarray:
    """Gram matrix of the tensor Shapovalov form, in the monomial basis
    (or compressed to the given subspace basis)."""
    G = np.diag(rep.gram_diag())
    if subspace is None:
        return G
    P = subspace.basis_matrix
    return P.T @ G @ P

"""The universal weight function and Bethe-vector checks.

The weight function is a double sum over index sequences (distributions of
colored lowering operators into tensor slots) and within-color permutations;
its values at critical points are the Bethe vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import Collision, ZeroVector
from .master import MasterSpec, TuplePoint, _collision_mask
from .rep import RepSpace, TensorRep, singular_subspace, sl2_rep

MAX_TOTAL_L = 8
MAX_N = 6
RANK_REL = 1e-8


@dataclass(frozen=True)
class IndexSequence:
    """Blocks of colors, one block per tensor slot; color i appears l_i times."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    def counts(self, r: int) -> tuple:
        c = [0] * r
        for b in self.blocks:
            for i in b:
                c[i - 1] += 1
        return tuple(c)


@dataclass(frozen=True)
class BetheVector:
    """Value of the weight function: coordinates in the tensor monomial basis."""

    coords: np.ndarray
    weight: tuple


def enumerate_P(l, n: int):
    """All distributions of the color multiset {1^{l_1},...,r^{l_r}} into n
    ordered blocks with internal order; streamed lazily."""
    l = tuple(int(v) for v in l)
    r = len(l)

    def contents(rem):
        yield (), rem
        for c in range(r):
            if rem[c] > 0:
                rem2 = rem[:c] + (rem[c] - 1,) + rem[c + 1 :]
                for tail, rem3 in contents(rem2):
                    yield (c + 1,) + tail, rem3

    def blocks(s, rem, acc):
        if s == n:
            if not any(rem):
                yield IndexSequence(tuple(acc))
            return
        for content, rem2 in contents(rem):
            yield from blocks(s + 1, rem2, acc + [content])

    yield from blocks(0, l, [])


def _tree_sum(terms):
    """Pairwise (tree) summation for order-independent accumulation."""
    items = list(terms)
    if not items:
        return 0.0
    while len(items) > 1:
        nxt = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def default_rep(spec: MasterSpec) -> TensorRep:
    """Tensor module matching the spec's weights.

    All-omega_r rows give the dual-vector tensor power; for r = 1, arbitrary
    rows m_s give a product of symmetric-power factors.
    """
    W = spec.weights
    if spec.n == 0 or (np.array_equal(W[:, : spec.r - 1], np.zeros_like(W[:, : spec.r - 1]))
                       and np.array_equal(W[:, spec.r - 1], np.ones(spec.n))):
        return RepSpace(spec.r, spec.n)
    if spec.r == 1:
        ms = W[:, 0]
        if not np.array_equal(ms, np.round(ms)):
            raise ValueError("sl2 factor weights must be integers")
        return sl2_rep(np.round(ms).astype(int))
    raise ValueError("no concrete module for these weights (need omega_r rows, or r=1)")


def _mu_coords(spec: MasterSpec) -> tuple:
    """<mu, H_i> for mu = sum_s Lambda_s - sum_i l_i alpha_i."""
    out = []
    for i in range(spec.r):
        v = spec.weights[:, i].sum() * 2.0 / spec.gram[i, i]
        for j in range(spec.r):
            v -= spec.l[j] * 2.0 * spec.gram[j, i] / spec.gram[i, i]
        out.append(int(round(v)))
    return tuple(out)


def weight_function(spec: MasterSpec, t: TuplePoint, rep: TensorRep = None) -> BetheVector:
    """Evaluate the universal weight function at t.

    Double sum over index sequences I and within-color permutations sigma of
    chain scalars times E_I v; accumulation is tree-summed per sum level.
    """
    l = spec.l
    n = spec.n
    if sum(l) > MAX_TOTAL_L or n > MAX_N:
        raise ValueError(f"weight_function capped at total l <= {MAX_TOTAL_L}, n <= {MAX_N}")
    if t.l != l:
        raise ValueError(f"tuple group sizes {t.l} do not match spec l={l}")
    if not _collision_mask(spec, t.flat()[None, :])[0]:
        raise Collision("coordinates too close to z or to each other")
    rep = rep or default_rep(spec)
    groups = [np.asarray(g, dtype=complex) for g in t.groups]
    z = spec.z
    perms = [list(itertools.permutations(range(li))) for li in l]

    contributions = []
    for I in enumerate_P(l, n):
        slot_vecs = []
        dead = False
        for s, block in enumerate(I.blocks):
            v = np.zeros(rep.factors[s].dim, dtype=complex)
            v[rep.factors[s].hw_index] = 1.0
            for i in reversed(block):
                v = rep.factors[s].E(i + 1, i) @ v
            if not np.any(v):
                dead = True
                break
            slot_vecs.append(v)
        if dead:
            continue
        # labels: positions of color i numbered 1..l_i in block-major order
        labels = []
        next_label = [0] * spec.r
        for block in I.blocks:
            row = []
            for i in block:
                row.append((i - 1, next_label[i - 1]))
                next_label[i - 1] += 1
            labels.append(row)
        sigma_terms = []
        for sigma in itertools.product(*perms):
            w = 1.0 + 0.0j
            for s, row in enumerate(labels):
                if not row:
                    continue
                coords = [groups[i][sigma[i][j]] for (i, j) in row]
                for a in range(len(coords) - 1):
                    w /= coords[a] - coords[a + 1]
                w /= coords[-1] - z[s]
            sigma_terms.append(w)
        scalar = _tree_sum(sigma_terms)
        vec = slot_vecs[0] if slot_vecs else np.ones(1, dtype=complex)
        for v in slot_vecs[1:]:
            vec = np.kron(vec, v)
        if rep.n == 0:
            vec = np.ones(1, dtype=complex)
        contributions.append(scalar * vec)
    if contributions:
        coords = _tree_sum(contributions)
    else:
        coords = np.zeros(rep.dim, dtype=complex)
    if rep.n == 0:
        coords = np.ones(1, dtype=complex) if sum(l) == 0 else np.zeros(1, dtype=complex)
    mu = _mu_coords(spec)
    idx = rep.weight_indices(mu)
    mask = np.zeros(rep.dim, dtype=bool)
    mask[idx] = True
    assert not np.any(coords[~mask]), "weight function left its weight space"
    return BetheVector(coords, mu)


def is_singular(v: BetheVector, rep: TensorRep) -> float:
    """Defect max_i ||(sum_s E^{(s)}_{i,i+1}) v|| / ||v||."""
    coords = np.asarray(v.coords if isinstance(v, BetheVector) else v, dtype=complex)
    nrm = np.linalg.norm(coords)
    if nrm == 0.0:
        raise ZeroVector("singularity defect of the zero vector")
    worst = 0.0
    for i in range(1, rep.r + 1):
        worst = max(worst, float(np.linalg.norm(rep.raising_sum(i) @ coords)) / nrm)
    return worst


@dataclass(frozen=True)
class BasisReport:
    rank: int
    expected: int
    singular_dim: int
    passed: bool


def bethe_basis_check(spec: MasterSpec, orbits, rep: TensorRep = None) -> BasisReport:
    """Assemble Bethe vectors, project to the singular space, and report rank."""
    rep = rep or default_rep(spec)
    mu = _mu_coords(spec)
    sing = singular_subspace(rep, mu)
    cols = []
    for orbit in orbits:
        t = orbit.rep if hasattr(orbit, "rep") else orbit
        cols.append(weight_function(spec, t, rep).coords)
    expected = sing.dim
    if not cols:
        return BasisReport(0, expected, sing.dim, expected == 0)
    M = sing.basis_matrix.T @ np.column_stack(cols)
    svals = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(svals > RANK_REL * svals.max())) if svals.size else 0
    return BasisReport(rank, expected, sing.dim, rank == expected)

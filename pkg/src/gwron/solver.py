"""Multi-start Newton solver for Bethe-ansatz critical points.

Seeds (random box samples plus structured interlacing/midpoint seeds) are
polished in numpy batches; converged points are canonicalized by sorting
within color groups and deduplicated into orbit representatives.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import Collision, NoConvergence, NotRealData
from .master import (MasterSpec, TuplePoint, _collision_mask, _jacobian_batch,
                     _residual_batch, bae_residual, fundamental_op_typeA)
from .polyops import is_real_space

SOLVE_TOL = 1e-11
DEDUPE_TOL = 1e-7
MAX_ITERS = 100
MAX_HALVINGS = 30
BARREN_SEEDS_AFTER_TARGET = 200
# Critical points are finite; the raw residual also decays ~ C/|t| along
# diverging Newton paths, so iterates past this radius are failures, not roots.
ESCAPE_RADIUS_FACTOR = 1e4


@dataclass(frozen=True)
class CriticalOrbit:
    """Canonical representative of one Sigma_l-orbit of critical points."""

    rep: TuplePoint
    residual_norm: float
    newton_iters: int


@dataclass(frozen=True)
class SolveReport:
    orbits: tuple
    target_count: int
    seeds_tried: int
    failures: int


@dataclass(frozen=True)
class SolveStrategy:
    n_seeds: int = 2000
    rng_seed: int = 0
    box_scale: float = 2.0
    jobs: int = 1


def _sup(v: np.ndarray) -> np.ndarray:
    return np.abs(v).max(axis=-1, initial=0.0)


def _newton_batch(spec: MasterSpec, T0: np.ndarray, tol: float = SOLVE_TOL):
    """Damped Newton on all rows of T0 at once.

    Returns (T, done, iters, rnorm); ``done`` rows reached residual
    sup-norm <= tol along a collision-free path.  Rows that stall keep
    their best point, with ``done`` False.
    """
    T = np.array(T0, dtype=complex)
    B, L = T.shape
    escape = ESCAPE_RADIUS_FACTOR * (1.0 + np.abs(spec.z).max(initial=0.0))
    iters = np.zeros(B, dtype=int)
    ok = _collision_mask(spec, T)
    ok &= np.abs(T).max(axis=1, initial=0.0) <= escape
    active = ok.copy()
    res = np.full((B, L), np.inf, dtype=complex)
    res[active] = _residual_batch(spec, T[active])
    rnorm = np.full(B, np.inf)
    rnorm[active] = _sup(res[active])
    done = active & (rnorm <= tol)
    active &= ~done
    for _ in range(MAX_ITERS):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        J = _jacobian_batch(spec, T[idx])
        try:
            step = np.linalg.solve(J, res[idx][..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.empty((idx.size, L), dtype=complex)
            for row in range(idx.size):
                try:
                    step[row] = np.linalg.solve(J[row], res[idx[row]])
                except np.linalg.LinAlgError:
                    step[row] = np.linalg.lstsq(J[row], res[idx[row]], rcond=None)[0]
        lam = np.ones(idx.size)
        improved = np.zeros(idx.size, dtype=bool)
        newT = np.array(T[idx])
        newres = np.array(res[idx])
        for _h in range(MAX_HALVINGS + 1):
            trial_rows = ~improved
            if not trial_rows.any():
                break
            cand = T[idx[trial_rows]] - lam[trial_rows, None] * step[trial_rows]
            free = _collision_mask(spec, cand)
            free &= np.abs(cand).max(axis=1, initial=0.0) <= escape
            cres = np.full_like(cand, np.inf)
            if free.any():
                cres[free] = _residual_batch(spec, cand[free])
            better = free & (_sup(cres) < rnorm[idx[trial_rows]])
            tr = np.nonzero(trial_rows)[0]
            accept = tr[better]
            newT[accept] = cand[better]
            newres[accept] = cres[better]
            improved[accept] = True
            lam[tr[~better]] *= 0.5
        T[idx[improved]] = newT[improved]
        res[idx[improved]] = newres[improved]
        rnorm[idx[improved]] = _sup(newres[improved])
        iters[idx[improved]] += 1
        stuck = idx[~improved]
        active[stuck] = False
        newly = idx[improved][rnorm[idx[improved]] <= tol]
        done[newly] = True
        active[newly] = False
    return T, done, iters, rnorm


def newton_polish(spec: MasterSpec, t0: TuplePoint,
                  return_iters: bool = False):
    """Polish one seed to a critical point; raises on failure."""
    if t0.l != spec.l:
        raise ValueError(f"tuple group sizes {t0.l} do not match spec l={spec.l}")
    T0 = t0.flat()[None, :]
    if not _collision_mask(spec, T0)[0]:
        raise Collision("seed collides with z or itself")
    T, done, iters, _ = _newton_batch(spec, T0)
    if not done[0]:
        raise NoConvergence("Newton did not reach the residual target")
    t = TuplePoint.from_flat(spec.l, T[0])
    return (t, int(iters[0])) if return_iters else t


def _group_patterns(mids: np.ndarray, li: int, s: float, cap: int = 2000):
    """Coordinate tuples for one group: real midpoints and conjugate pairs."""
    pats = []
    idx = range(mids.size)
    for b in range(li // 2 + 1):
        a = li - 2 * b
        if a > mids.size:
            continue
        for real_idx in itertools.combinations(idx, a):
            rest = [i for i in idx if i not in real_idx]
            for pair_idx in itertools.combinations(rest, b):
                coords = [complex(mids[i]) for i in real_idx]
                for i in pair_idx:
                    coords.extend([mids[i] + 1j * s, mids[i] - 1j * s])
                pats.append(np.array(coords, dtype=complex))
                if len(pats) >= cap:
                    return pats
    return pats


def _interlacing_seeds(spec: MasterSpec, rng: np.random.Generator, cap: int = 768):
    """Structured seeds: real points interlacing sorted real z, plus
    conjugate pairs hung off the Wronskian-root midpoints."""
    L = sum(spec.l)
    if spec.n < 2 or np.abs(spec.z.imag).max(initial=0.0) > 0:
        return np.zeros((0, L), dtype=complex)
    zs = np.sort(spec.z.real)
    mids = 0.5 * (zs[1:] + zs[:-1])
    span = max(zs[-1] - zs[0], 1.0)
    s = 0.75 * span / max(spec.n - 1, 1)
    choices = [_group_patterns(mids, li, s) for li in spec.l]
    if any(len(c) == 0 for c in choices):
        return np.zeros((0, L), dtype=complex)
    seeds = []
    for combo in itertools.product(*choices):
        seeds.append(np.concatenate([c for c in combo]) if L else np.zeros(0))
        if len(seeds) >= cap:
            break
    base = np.array(seeds)
    tiny = base + 1e-4 * span * rng.standard_normal(base.shape)
    wide = base + 0.05 * span * (
        rng.standard_normal(base.shape) + 1j * rng.standard_normal(base.shape))
    return np.concatenate([tiny, wide], axis=0)


def _random_seeds(spec: MasterSpec, count: int, rng: np.random.Generator,
                  box_scale: float):
    L = sum(spec.l)
    center = spec.z.mean() if spec.n else 0.0
    R = box_scale * (1.0 + np.abs(spec.z).max(initial=0.0))
    re = rng.uniform(-R, R, size=(count, L))
    im = 0.5 * R * rng.uniform(-1.0, 1.0, size=(count, L))
    return center + re + 1j * im


def _pinch_seeds(spec: MasterSpec, count: int, rng: np.random.Generator):
    """Random structured seeds near the real z configuration.

    Mixture per coordinate: uniform inside a random gap, pinched against a
    random z_s at log-spaced distance (the marked points attract coordinates,
    so equilibria can hug them), or complex off a gap midpoint.
    """
    L = sum(spec.l)
    if count <= 0 or spec.n < 2 or np.abs(spec.z.imag).max(initial=0.0) > 0:
        return np.zeros((0, L), dtype=complex)
    zs = np.sort(spec.z.real)
    gaps = np.column_stack([zs[:-1], zs[1:]])
    local = np.minimum(np.concatenate([[np.inf], np.diff(zs)]),
                       np.concatenate([np.diff(zs), [np.inf]]))
    local = np.where(np.isfinite(local), local, np.diff(zs).max())
    out = np.empty((count, L), dtype=complex)
    for k in range(count):
        for p in range(L):
            u = rng.random()
            g = rng.integers(gaps.shape[0])
            a, b = gaps[g]
            if u < 0.45:
                out[k, p] = rng.uniform(a, b)
            elif u < 0.72:
                s = rng.integers(zs.size)
                delta = local[s] * 10.0 ** rng.uniform(-2.2, -0.4)
                out[k, p] = zs[s] + delta * rng.choice([-1.0, 1.0])
            else:
                mid = 0.5 * (a + b)
                height = (b - a) * 10.0 ** rng.uniform(-0.8, 0.4)
                out[k, p] = (mid + 0.3 * (b - a) * rng.uniform(-1, 1)
                             + 1j * height * rng.choice([-1.0, 1.0]))
    return out


def orbit_distance(l, flat_a: np.ndarray, flat_b: np.ndarray) -> float:
    """Sup distance between two orbits under the best within-group matching.

    Sorting by (re, im) is unstable when coordinates differ only by noise in
    the real part (conjugate pairs), so orbit identity is decided by optimal
    assignment per group instead.
    """
    pos = 0
    worst = 0.0
    for li in l:
        if li:
            a = flat_a[pos : pos + li]
            b = flat_b[pos : pos + li]
            cost = np.abs(a[:, None] - b[None, :])
            rows, cols = linear_sum_assignment(cost)
            worst = max(worst, float(cost[rows, cols].max()))
        pos += li
    return worst


def _symmetrize_conjugate(spec: MasterSpec, flat: np.ndarray) -> np.ndarray:
    """Average a conjugation-invariant orbit with its matched conjugate.

    Makes real coordinates exactly real and complex pairs exactly conjugate;
    callers re-verify the residual afterwards.
    """
    out = np.array(flat)
    conj = np.conj(flat)
    pos = 0
    for li in spec.l:
        if li:
            a = flat[pos : pos + li]
            c = conj[pos : pos + li]
            cost = np.abs(a[:, None] - c[None, :])
            rows, cols = linear_sum_assignment(cost)
            if cost[rows, cols].max() <= 100 * DEDUPE_TOL:
                out[pos : pos + li] = 0.5 * (a + c[cols])
        pos += li
    return out


def _chunk_worker(args):
    spec, chunk = args
    return _newton_batch(spec, chunk)


def solve_all(spec: MasterSpec, strategy: SolveStrategy = None, *,
              n_seeds: int = None, rng_seed: int = None, box_scale: float = None,
              jobs: int = None) -> SolveReport:
    """Find all critical-point orbits by multi-start Newton.

    Deterministic for a fixed rng_seed, independent of the worker count:
    seeds are pre-generated and merged in seed order.  When the target count
    is known and unmet, up to two extra waves of n_seeds fresh seeds are
    drawn with progressively wider boxes.
    """
    st = strategy or SolveStrategy()
    if n_seeds is not None:
        st = SolveStrategy(n_seeds, st.rng_seed, st.box_scale, st.jobs)
    if rng_seed is not None:
        st = SolveStrategy(st.n_seeds, rng_seed, st.box_scale, st.jobs)
    if box_scale is not None:
        st = SolveStrategy(st.n_seeds, st.rng_seed, box_scale, st.jobs)
    if jobs is not None:
        st = SolveStrategy(st.n_seeds, st.rng_seed, st.box_scale, jobs)

    target = -1
    if spec.d is not None:
        from .rep import multiplicity_N
        from .master import ExponentSpec
        target = multiplicity_N(ExponentSpec(spec.d))

    L = sum(spec.l)
    if L == 0:
        orbit = CriticalOrbit(TuplePoint(tuple(() for _ in spec.l)), 0.0, 0)
        return SolveReport((orbit,), target, 0, 0)

    rng = np.random.default_rng(st.rng_seed)

    def wave_seeds(wave: int) -> np.ndarray:
        structured = (_interlacing_seeds(spec, rng) if wave == 0
                      else np.zeros((0, L), dtype=complex))
        remaining = max(st.n_seeds - structured.shape[0], 0)
        pinch = _pinch_seeds(spec, int(0.45 * remaining), rng)
        box = _random_seeds(spec, remaining - pinch.shape[0], rng,
                            st.box_scale * (1.0 + 0.5 * wave))
        return np.concatenate([structured, pinch, box], axis=0)[: st.n_seeds]

    reps: list[np.ndarray] = []
    iters_of: list[int] = []
    failures = 0
    tried = 0
    barren = 0
    chunk_size = 256

    def consume(T, done, iters):
        nonlocal failures, tried, barren
        for row in range(T.shape[0]):
            tried += 1
            if not done[row]:
                failures += 1
                continue
            flat = T[row]
            is_new = all(
                orbit_distance(spec.l, flat, known) > DEDUPE_TOL for known in reps)
            if is_new:
                reps.append(flat)
                iters_of.append(int(iters[row]))
                barren = 0
            else:
                barren += 1

    max_waves = 3 if target >= 0 else 1
    for wave in range(max_waves):
        seeds = wave_seeds(wave)
        chunks = [seeds[i : i + chunk_size]
                  for i in range(0, seeds.shape[0], chunk_size)]
        stop = False
        if st.jobs and st.jobs > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(max_workers=st.jobs) as ex:
                for T, done, iters, _ in ex.map(_chunk_worker,
                                                [(spec, c) for c in chunks]):
                    consume(T, done, iters)
                    if (target >= 0 and len(reps) >= target
                            and barren >= BARREN_SEEDS_AFTER_TARGET):
                        stop = True
                        break
        else:
            for chunk in chunks:
                T, done, iters, _ = _newton_batch(spec, chunk)
                consume(T, done, iters)
                if (target >= 0 and len(reps) >= target
                        and barren >= BARREN_SEEDS_AFTER_TARGET):
                    stop = True
                    break
        if stop or target < 0 or len(reps) >= target:
            break

    # Final pass: polish each representative to the numerical floor, make
    # conjugation-invariant orbits exactly symmetric for real z, re-dedupe,
    # and re-verify residual and collision-freeness through the public API.
    orbits = []
    kept: list[np.ndarray] = []
    real_z = spec.n == 0 or np.abs(spec.z.imag).max(initial=0.0) == 0.0
    if reps:
        P, _, _, rn = _newton_batch(spec, np.array(reps), tol=1e-16)
        for flat, rnorm, its in zip(P, rn, iters_of):
            if rnorm > SOLVE_TOL:
                continue
            if real_z:
                sym = _symmetrize_conjugate(spec, flat)
                try:
                    t_sym = TuplePoint.from_flat(spec.l, sym)
                    if np.abs(bae_residual(spec, t_sym)).max(initial=0.0) <= SOLVE_TOL:
                        flat = sym
                except Collision:
                    pass
            if any(orbit_distance(spec.l, flat, k) <= DEDUPE_TOL for k in kept):
                continue
            t = TuplePoint.from_flat(spec.l, flat).canonical()
            resid = float(np.abs(bae_residual(spec, t)).max(initial=0.0))
            if resid > SOLVE_TOL:
                continue
            kept.append(flat)
            orbits.append(CriticalOrbit(t, resid, its))
    orbits.sort(key=lambda o: tuple((c.real, c.imag) for g in o.rep.groups for c in g))
    return SolveReport(tuple(orbits), target, tried, failures)


def conjugation_check(report: SolveReport, spec: MasterSpec) -> list:
    """Per orbit: is the orbit invariant under complex conjugation?"""
    if np.abs(spec.z.imag).max(initial=0.0) != 0.0:
        raise NotRealData("conjugation check needs real z")
    out = []
    for orbit in report.orbits:
        flat = orbit.rep.flat()
        dist = orbit_distance(spec.l, flat, np.conj(flat))
        out.append(bool(dist <= DEDUPE_TOL))
    return out


def reality_check(report: SolveReport, spec: MasterSpec, tol: float = 1e-8) -> list:
    """Per orbit: does the fundamental space have real coefficients?"""
    if spec.d is None:
        raise ValueError("reality check needs a spec with exponent origin")
    return [is_real_space(fundamental_op_typeA(o.rep, spec), tol) for o in report.orbits]

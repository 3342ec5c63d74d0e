import numpy as np
import pytest

from gwron.errors import Collision, NoConvergence, NotRealData
from gwron.master import (ExponentSpec, MasterSpec, TuplePoint,
                          fundamental_op_typeA, bae_residual,
                          spec_from_exponents)
from gwron.polyops import polynomial_kernel
from gwron.solver import (DEDUPE_TOL, SOLVE_TOL, SolveStrategy,
                          conjugation_check, newton_polish, orbit_distance,
                          reality_check, solve_all)


def spec12():
    return spec_from_exponents(ExponentSpec((1, 2)), [0.0, 1.0])


def spec23():
    return spec_from_exponents(ExponentSpec((2, 3)), [-3.0, -1.0, 1.0, 3.0])


class TestNewtonPolish:
    def test_converges_to_half(self):
        t = newton_polish(spec12(), TuplePoint(((0.4,),)))
        assert abs(t.groups[0][0] - 0.5) < 1e-10

    def test_critical_start_is_fixed(self):
        t, iters = newton_polish(spec12(), TuplePoint(((0.5,),)), return_iters=True)
        assert iters == 0 and t.groups[0][0] == 0.5

    def test_attraction_basin(self):
        t = newton_polish(spec12(), TuplePoint(((0.5001 + 0.3j,),)))
        assert abs(t.groups[0][0] - 0.5) < 1e-10

    def test_collision_seed(self):
        with pytest.raises(Collision):
            newton_polish(spec12(), TuplePoint(((1.0 + 1e-13,),)))

    def test_diverging_seed_fails(self):
        spec = spec12()
        with pytest.raises(NoConvergence):
            newton_polish(spec, TuplePoint(((1e7,),)))


class TestSolveAll:
    def test_worked_example(self):
        report = solve_all(spec12(), n_seeds=300)
        assert report.target_count == 1
        assert len(report.orbits) == 1
        assert abs(report.orbits[0].rep.groups[0][0] - 0.5) < 1e-11

    def test_two_orbits(self):
        report = solve_all(spec23(), n_seeds=800)
        assert report.target_count == 2
        assert len(report.orbits) == 2

    def test_trivial(self):
        spec = spec_from_exponents(ExponentSpec((0, 1)), [])
        report = solve_all(spec)
        assert len(report.orbits) == 1 and report.target_count == 1
        assert report.orbits[0].rep.groups == ((),)

    def test_determinism(self):
        a = solve_all(spec23(), SolveStrategy(500, rng_seed=42))
        b = solve_all(spec23(), SolveStrategy(500, rng_seed=42))
        assert a == b

    def test_residuals_verified(self):
        report = solve_all(spec23(), n_seeds=800)
        for o in report.orbits:
            assert o.residual_norm <= SOLVE_TOL
            res = bae_residual(spec23(), o.rep)  # also re-checks collisions
            assert np.abs(res).max() <= SOLVE_TOL

    def test_canonical_sorted(self):
        report = solve_all(spec23(), n_seeds=800)
        for o in report.orbits:
            for g in o.rep.groups:
                keys = [(c.real, c.imag) for c in g]
                assert keys == sorted(keys)

    def test_orbits_distinct(self):
        spec = spec_from_exponents(ExponentSpec((2, 4)), [-4.0, -2.0, 0.0, 2.0, 4.0])
        report = solve_all(spec, n_seeds=1500)
        for i, a in enumerate(report.orbits):
            for b in report.orbits[i + 1:]:
                assert orbit_distance(spec.l, a.rep.flat(), b.rep.flat()) > DEDUPE_TOL

    def test_count_never_exceeds_target(self):
        rng = np.random.default_rng(0)
        for d in ((1, 3), (2, 3), (0, 2, 4)):
            ds = ExponentSpec(d)
            z = np.sort(rng.uniform(-3, 3, ds.n))
            report = solve_all(spec_from_exponents(ds, z), n_seeds=1200)
            assert len(report.orbits) <= report.target_count

    def test_distinct_orbits_give_distinct_spaces(self):
        spec = spec23()
        report = solve_all(spec, n_seeds=800)
        bases = []
        for o in report.orbits:
            ker = polynomial_kernel(fundamental_op_typeA(o.rep, spec), 3)
            bases.append(np.concatenate([
                np.pad(f.coeffs, (0, 4 - f.coeffs.size)) for f in ker]))
        for i in range(len(bases)):
            for j in range(i + 1, len(bases)):
                assert np.abs(bases[i] - bases[j]).max() > 1e-6

    def test_conjugation_closure_setwise(self):
        spec = spec_from_exponents(ExponentSpec((2, 4)), [-4.0, -2.0, 0.0, 2.0, 4.0])
        report = solve_all(spec, n_seeds=1500)
        flats = [o.rep.flat() for o in report.orbits]
        for f in flats:
            assert any(orbit_distance(spec.l, np.conj(f), g) <= DEDUPE_TOL
                       for g in flats)


class TestChecks:
    def test_conjugation_worked(self):
        spec = spec12()
        report = solve_all(spec, n_seeds=300)
        assert conjugation_check(report, spec) == [True]

    def test_conjugation_complex_orbit(self):
        # d=(2,3) has one real orbit and one conjugate-pair orbit; both invariant
        report = solve_all(spec23(), n_seeds=800)
        assert conjugation_check(report, spec23()) == [True, True]

    def test_not_real_data(self):
        spec = spec_from_exponents(ExponentSpec((1, 2)), [0.0, 1j])
        report = solve_all(spec, n_seeds=100)
        with pytest.raises(NotRealData):
            conjugation_check(report, spec)

    def test_reality_worked(self):
        spec = spec12()
        report = solve_all(spec, n_seeds=300)
        assert reality_check(report, spec) == [True]

    def test_reality_four_points(self):
        report = solve_all(spec23(), n_seeds=800)
        assert reality_check(report, spec23()) == [True, True]

    def test_reality_nonreal_z_still_runs(self):
        spec = spec_from_exponents(ExponentSpec((1, 2)), [0.0, 1j])
        report = solve_all(spec, n_seeds=400)
        flags = reality_check(report, spec)
        assert all(isinstance(v, bool) for v in flags)

    def test_reality_requires_exponent_origin(self):
        spec = MasterSpec(r=1, gram=[[2.0]], weights=[[1.0], [1.0]],
                          z=[0.0, 1.0], l=(1,))
        report = solve_all(spec, n_seeds=200)
        with pytest.raises(ValueError):
            reality_check(report, spec)


class TestGeneralCartan:
    B2 = np.array([[2.0, -2.0], [-2.0, 4.0]])
    C2 = np.array([[4.0, -2.0], [-2.0, 2.0]])
    A2 = np.array([[2.0, -1.0], [-1.0, 2.0]])

    @pytest.mark.parametrize("gram", [A2, B2, C2], ids=["A2", "B2", "C2"])
    def test_conjugation_invariance_harness(self, gram):
        # small-l instances with real z and dominant Lambda_infty
        rng = np.random.default_rng(13)
        z = np.sort(rng.uniform(-2, 2, 2))
        weights = np.array([[1.0, 1.0], [1.0, 1.0]])
        spec = MasterSpec(r=2, gram=gram, weights=weights, z=z, l=(1, 1))
        report = solve_all(spec, n_seeds=1500)
        assert len(report.orbits) > 0, "harness instance found no critical points"
        flags = conjugation_check(report, spec)
        assert all(flags), f"conjecture violated: {report.orbits}"

import numpy as np
import pytest

from gwron.bethe import weight_function
from gwron.errors import DimensionCap, NotInvariant, PoleAtX, ZeroVector
from gwron.gaudin import (MatRat, OperatorDiffOp, build_K, build_M,
                          central_element_check, commutation_defect,
                          eigenvalue_match, hamiltonian_matrix,
                          polynomial_solutions_check, real_spectrum_check,
                          sample_points, shapovalov_defect,
                          simple_spectrum_check)
from gwron.master import (ExponentSpec, TuplePoint, fundamental_op_typeA,
                          spec_from_exponents)
from gwron.polyops import INFINITY, Poly, exponents_at
from gwron.rep import (DualVectorFactor, RepSpace, Sl2SymFactor, Subspace,
                       singular_subspace)
from gwron.solver import solve_all

Z2 = [0.0, 1.0]


def bsum(rep, j, i, z, x):
    return sum(rep.generator(j, i, s).toarray() / (x - z[s - 1])
               for s in range(1, len(z) + 1))


class TestBuildM:
    def test_r1_paper_formula(self):
        # M = (d - B11)(d - B22) - B21 B12 with B_{ji} = sum E^{(s)}_{j,i}/(x-z_s):
        # coefficient of d: -(B11 + B22); constant: -B22' + B11 B22 - B21 B12
        rep = RepSpace(1, 2)
        M = build_M(rep, Z2)
        for x in (0.37 + 0.2j, -1.4, 2.25 - 1.1j):
            B11 = bsum(rep, 1, 1, Z2, x)
            B22 = bsum(rep, 2, 2, Z2, x)
            B21 = bsum(rep, 2, 1, Z2, x)
            B12 = bsum(rep, 1, 2, Z2, x)
            B22p = -sum(rep.generator(2, 2, s).toarray() / (x - Z2[s - 1]) ** 2
                        for s in (1, 2))
            assert np.allclose(M.coefficient(1).eval(x), -(B11 + B22), atol=1e-12)
            assert np.allclose(M.coefficient(2).eval(x),
                               -B22p + B11 @ B22 - B21 @ B12, atol=1e-12)

    def test_empty_tensor(self):
        for r in (1, 2):
            M = build_M(RepSpace(r, 0), [])
            assert M.order == r + 1
            assert all(np.abs(c.eval(0.3)).max() == 0.0 for c in M.coeffs)

    def test_m1_trace_part(self):
        # sum_i E_{ii} acts as -identity per slot, so M1 = sum_s Id/(x - z_s)
        rep = RepSpace(1, 2)
        M = build_M(rep, Z2)
        x = 0.4 - 0.7j
        expect = sum(1.0 / (x - z) for z in Z2) * np.eye(4)
        assert np.allclose(M.coefficient(1).eval(x), expect, atol=1e-12)

    def test_dimension_cap(self):
        with pytest.raises(DimensionCap):
            build_M(RepSpace(1, 9), list(range(9)))

    def test_pole_structure(self):
        # coefficient M_i has poles only at z of order <= i
        rep = RepSpace(2, 2)
        M = build_M(rep, Z2)
        for i in range(1, 4):
            c = M.coefficient(i)
            assert c.power <= i


class TestBuildK:
    def test_k1_is_minus_m1(self):
        rep = RepSpace(1, 2)
        M = build_M(rep, Z2)
        K = build_K(M)
        assert K.coefficient(1).isclose(-1.0 * M.coefficient(1))

    def test_k2_relation(self):
        # K2 = M2 - r * M1'
        for r, n in ((1, 2), (2, 2)):
            rep = RepSpace(r, n)
            z = [0.0, 1.0]
            M = build_M(rep, z)
            K = build_K(M)
            expect = M.coefficient(2) - float(r) * M.coefficient(1).deriv()
            assert K.coefficient(2).isclose(expect)

    def test_constant_coefficient_case(self):
        K = build_K(build_M(RepSpace(2, 0), []))
        assert all(np.abs(c.eval(1.3)).max() == 0.0 for c in K.coeffs)

    def test_double_conjugation_returns_m(self):
        # K(K(M)) = M coefficient-wise
        rep = RepSpace(1, 2)
        M = build_M(rep, Z2)
        back = build_K(build_K(M))
        for i in range(1, M.order + 1):
            assert back.coefficient(i).isclose(M.coefficient(i))


class TestHamiltonianMatrix:
    def test_singlet_compression(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        sub = singular_subspace(rep, [0])
        mat = hamiltonian_matrix(K, 2, 0.3 + 0.1j, sub)
        assert mat.shape == (1, 1)

    def test_decay_at_large_x(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        big = K.coefficient(1).eval(1e8)
        assert np.abs(big).max() < 1e-6

    def test_full_space_identity_compression(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        full = Subspace(rep, np.eye(4))
        x = 0.9 + 0.4j
        assert np.allclose(hamiltonian_matrix(K, 2, x, full),
                           K.coefficient(2).eval(x))

    def test_pole_raises(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        with pytest.raises(PoleAtX):
            hamiltonian_matrix(K, 1, 1.0 + 1e-12)

    def test_not_invariant_raises(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        P = np.zeros((4, 1))
        P[1, 0] = 1.0  # e*_1 ⊗ e*_2 alone: K_2 mixes it with e*_2 ⊗ e*_1
        with pytest.raises(NotInvariant):
            hamiltonian_matrix(K, 2, 0.3, Subspace(rep, P))


class TestCommutation:
    def test_r1_n2(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        sub = singular_subspace(rep, [0])
        assert commutation_defect(K, 0.44, -1.3, sub) <= 1e-10

    def test_same_point(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        assert commutation_defect(K, 0.44, 0.44) <= 1e-13

    def test_full_space_r2(self):
        rep = RepSpace(2, 3)
        K = build_K(build_M(rep, [-1.0, 0.5, 2.0]))
        assert commutation_defect(K, 0.1 + 0.9j, -2.2 + 0.3j) <= 1e-10


class TestShapovalov:
    def test_r1_n2(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        assert shapovalov_defect(K, 0.77) <= 1e-11

    def test_r2_n2(self):
        rep = RepSpace(2, 2)
        K = build_K(build_M(rep, Z2))
        assert shapovalov_defect(K, -0.31) <= 1e-10

    def test_real_spectrum(self):
        rep = RepSpace(1, 4)
        z = [-3.0, -1.0, 1.0, 3.0]
        K = build_K(build_M(rep, z))
        sub = singular_subspace(rep, [0])
        xs = sample_points(z, 5, np.random.default_rng(1), real=True)
        assert real_spectrum_check(K, sub, xs)

    def test_zero_dim_subspace_vacuous(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        sub = Subspace(rep, np.zeros((4, 0)))
        assert real_spectrum_check(K, sub, [0.3])


class TestCentralElement:
    def test_dual_factors(self):
        xs = sample_points([], 5, np.random.default_rng(3))
        for r in (1, 2, 3):
            assert central_element_check(DualVectorFactor(r), xs) <= 1e-10

    def test_r1_explicit_psi(self):
        # on (C^2)*: A(x) = (x-1)(x+1) Id exactly
        f = DualVectorFactor(1)
        for x in (2.0, -0.7, 1.3j):
            psi = (x - 1) * (x + 1)
            # defect measures |A - psi I|/|psi|; zero defect pins A = psi I
            assert central_element_check(f, [x]) <= 1e-14

    def test_sym_factor(self):
        xs = sample_points([], 5, np.random.default_rng(4))
        for m in (1, 2, 4):
            assert central_element_check(Sl2SymFactor(m), xs) <= 1e-10

    def test_leading_term(self):
        # A(x)/x^{r+1} -> Id: defect against psi ~ x^{r+1} stays small at large x
        assert central_element_check(DualVectorFactor(2), [1e6]) <= 1e-10


class TestPolynomialSolutions:
    def test_r1_n2(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        assert polynomial_solutions_check(K, 6) == 8

    def test_n0(self):
        for r in (1, 2):
            K = build_K(build_M(RepSpace(r, 0), []))
            assert polynomial_solutions_check(K, r + 3) == r + 1

    def test_non_vacuous_control(self):
        # d/dx - 1 on a one-dimensional space has no polynomial solutions
        rep = RepSpace(1, 0)  # dim 1, but build an order-1 operator by hand
        T = np.array([1.0 + 0j])
        op = OperatorDiffOp(1, (MatRat(-np.ones((1, 1, 1)), 0, T),), rep,
                            np.zeros(0, dtype=complex))
        assert polynomial_solutions_check(op, 10) == 0


class TestEigenvalueMatch:
    def test_worked_example(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        spec = spec_from_exponents(ExponentSpec((1, 2)), Z2)
        t = TuplePoint(((0.5,),))
        w = weight_function(spec, t, rep)
        xs = sample_points(Z2, 5, np.random.default_rng(5))
        assert eigenvalue_match(K, w, t, spec, xs) <= 1e-9

    def test_lambda1_is_minus_lnprime_T(self):
        spec = spec_from_exponents(ExponentSpec((1, 2)), Z2)
        D = fundamental_op_typeA(TuplePoint(((0.5,),)), spec)
        T = Poly.from_roots(Z2)
        for x in (0.3 + 0.4j, -1.2):
            expect = -T.deriv()(x) / T(x)
            assert abs(D.coeffs[0](x) - expect) < 1e-12

    def test_scale_invariance(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        spec = spec_from_exponents(ExponentSpec((1, 2)), Z2)
        t = TuplePoint(((0.5,),))
        w = weight_function(spec, t, rep).coords
        xs = sample_points(Z2, 3, np.random.default_rng(6))
        a = eigenvalue_match(K, w, t, spec, xs)
        b = eigenvalue_match(K, 17.3j * w, t, spec, xs)
        assert abs(a - b) < 1e-12

    def test_zero_vector_raises(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        spec = spec_from_exponents(ExponentSpec((1, 2)), Z2)
        with pytest.raises(ZeroVector):
            eigenvalue_match(K, np.zeros(4), TuplePoint(((0.5,),)), spec, [0.3])

    def test_m_eigenvalues_use_reversed_plus_factorization(self):
        # M-eigenvalues come from (d+ln'(y1))...(d+ln'(T/y_r)); K from D_t
        from gwron.master import tuple_y
        from gwron.polyops import RatFn, compose_factors
        rep = RepSpace(1, 2)
        M = build_M(rep, Z2)
        spec = spec_from_exponents(ExponentSpec((1, 2)), Z2)
        t = TuplePoint(((0.5,),))
        w = weight_function(spec, t, rep).coords
        y1 = tuple_y(t).ys[0]
        T = Poly.from_roots(Z2)
        u1 = RatFn(y1.deriv(), y1)
        q = RatFn(T.deriv(), T) - u1  # ln'(T/y1)
        Mop = compose_factors([-1.0 * u1, -1.0 * q])  # (d + ln'y1)(d + ln'(T/y1))
        for x in sample_points(Z2, 4, np.random.default_rng(7)):
            for i in (1, 2):
                lam = Mop.coeffs[i - 1](x)
                resid = np.linalg.norm(M.coefficient(i).eval(x) @ w - lam * w)
                assert resid <= 1e-9 * np.linalg.norm(w)


class TestSimpleSpectrum:
    def test_two_orbits_distinct(self):
        rep = RepSpace(1, 4)
        z = [-3.0, -1.0, 1.0, 3.0]
        K = build_K(build_M(rep, z))
        sub = singular_subspace(rep, [0])
        xs = sample_points(z, 5, np.random.default_rng(8), real=True)
        assert simple_spectrum_check(K, sub, xs)

    def test_dim_one_vacuous(self):
        rep = RepSpace(1, 2)
        K = build_K(build_M(rep, Z2))
        sub = singular_subspace(rep, [0])
        assert simple_spectrum_check(K, sub, [0.4])


class TestExponentConsistency:
    def test_dt_exponents_at_marked_points_and_infinity(self):
        # D_t at z_s: {0, m1+1, ..., mr+r} with m_i = delta_{ir};
        # at infinity: {-l - m_{i-1} - (i-1)} which equals -d reversed
        rng = np.random.default_rng(9)
        for d in ((2, 3), (1, 2, 4)):
            ds = ExponentSpec(d)
            z = np.sort(rng.uniform(-2.5, 2.5, ds.n))
            spec = spec_from_exponents(ds, z)
            report = solve_all(spec, n_seeds=1500)
            D = fundamental_op_typeA(report.orbits[0].rep, spec)
            r = ds.r
            expect_zs = tuple([0] + [i + (1 if i == r else 0) for i in range(1, r + 1)])
            for zs in z:
                assert exponents_at(D, complex(zs)).as_integers() == expect_zs
            assert exponents_at(D, INFINITY).as_integers() == tuple(-v for v in d[::-1])

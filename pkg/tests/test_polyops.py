import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwron.errors import IrregularSingularity, ZeroWronskian
from gwron.polyops import (INFINITY, Poly, RatFn, ScalarDiffOp, compose_factors,
                           echelon_basis, exponents_at, find_roots,
                           formal_conjugate, fundamental_operator, is_real_space,
                           monic_wronskian, polynomial_kernel,
                           ramification_points, wronskian)

X = Poly.x()
ONE = Poly.one()


def p(*coeffs):
    return Poly(coeffs)


def rand_poly(rng, deg, real=False):
    c = rng.standard_normal(deg + 1)
    if not real:
        c = c + 1j * rng.standard_normal(deg + 1)
    c[-1] += 2.0  # keep the degree honest
    return Poly(c)


class TestWronskian:
    def test_single(self):
        assert wronskian([X]) == X

    def test_hand_expanded(self):
        assert wronskian([X - 0.5, X * X]).isclose(p(0, -1, 1), 1e-14)

    def test_monomials(self):
        assert wronskian([ONE, X, X * X]) == p(2)

    def test_monic_rescale(self):
        assert monic_wronskian([2 * X, 3 * X * X]).isclose(p(0, 0, 1), 1e-14)

    def test_dependent_raises(self):
        with pytest.raises(ZeroWronskian):
            monic_wronskian([X, 2 * X])

    def test_already_monic(self):
        assert monic_wronskian([X - 0.5, X * X]).isclose(p(0, -1, 1), 1e-14)


class TestFundamentalOperator:
    def test_annihilates_kernel(self):
        D = fundamental_operator([X - 0.5, X * X])
        for f in (X - 0.5, X * X, 3 * (X - 0.5) - 2 * X * X):
            val = D.apply(f)
            assert val.num.max_abs_coeff() <= 1e-12 * max(val.den.max_abs_coeff(), 1)

    def test_matches_factorized_form(self):
        # D = (d - ln'(T/y1))(d - ln'(y1)) with y1 = x - 1/2, T = x^2 - x
        y1 = X - 0.5
        T = p(0, -1, 1)
        u_left = RatFn(T.deriv(), T) - RatFn(y1.deriv(), y1)
        u_right = RatFn(y1.deriv(), y1)
        D1 = compose_factors([u_left, u_right])
        D2 = fundamental_operator([y1, X * X])
        assert D1.isclose(D2, 1e-12)

    def test_degree_one_space(self):
        D = fundamental_operator([ONE, X])
        assert all(c.is_zero for c in D.coeffs)

    def test_monomial_space(self):
        D = fundamental_operator([ONE, X, X * X])
        assert D.order == 3
        assert all(c.is_zero for c in D.coeffs)

    def test_dependent_raises(self):
        with pytest.raises(ZeroWronskian):
            fundamental_operator([X, 2 * X])


class TestComposeFactors:
    def test_single_zero(self):
        op = compose_factors([RatFn.zero()])
        assert op.order == 1 and op.coeffs[0].is_zero

    def test_kernel_annihilation(self):
        y1 = X - 0.5
        T = p(0, -1, 1)
        u_left = RatFn(T.deriv(), T) - RatFn(y1.deriv(), y1)
        op = compose_factors([u_left, RatFn(y1.deriv(), y1)])
        for f in (y1, X * X):
            val = op.apply(f)
            assert val.num.max_abs_coeff() <= 1e-10 * max(val.den.max_abs_coeff(), 1)

    def test_constant_factors(self):
        op = compose_factors([RatFn(p(2)), RatFn(p(3))])
        assert op.coeffs[0].num.isclose(p(-5), 1e-14)
        assert op.coeffs[1].num.isclose(p(6), 1e-14)


class TestFormalConjugate:
    def test_first_order(self):
        op = ScalarDiffOp(1, (RatFn.zero(),))
        assert formal_conjugate(op).isclose(op, 1e-14)

    def test_constant_second_order(self):
        op = ScalarDiffOp(2, (RatFn.zero(), RatFn(p(4.5))))
        assert formal_conjugate(op).isclose(op, 1e-14)

    def test_expansion(self):
        # d^2 + a d -> d^2 - a d - a'
        op = ScalarDiffOp(2, (RatFn(X), RatFn.zero()))
        fc = formal_conjugate(op)
        assert fc.coeffs[0].num.isclose(-X, 1e-14)
        assert fc.coeffs[1].num.isclose(p(-1), 1e-14)

    def test_k_from_m_relations(self):
        # conjugate(D) has a_1* = -a_1 and a_2* = a_2 - (m-1) a_1'
        rng = np.random.default_rng(5)
        a1 = RatFn(rand_poly(rng, 2), rand_poly(rng, 1))
        a2 = RatFn(rand_poly(rng, 2), rand_poly(rng, 2))
        a3 = RatFn(rand_poly(rng, 1), rand_poly(rng, 1))
        op = ScalarDiffOp(3, (a1, a2, a3))
        fc = formal_conjugate(op)
        assert fc.coeffs[0].isclose(-1 * a1, 1e-11)
        assert fc.coeffs[1].isclose(a2 - 2 * a1.deriv(), 1e-11)


class TestPolynomialKernel:
    def test_d2(self):
        ker = polynomial_kernel(ScalarDiffOp(2, (RatFn.zero(), RatFn.zero())), 3)
        assert len(ker) == 2
        assert ker[0].isclose(ONE, 1e-12) and ker[1].isclose(X, 1e-12)

    def test_round_trip(self):
        D = fundamental_operator([X - 0.5, X * X])
        ker = polynomial_kernel(D, 2)
        assert len(ker) == 2
        assert ker[0].isclose(X - 0.5, 1e-9)
        assert ker[1].isclose(X * X, 1e-9)

    def test_exponential_not_polynomial(self):
        op = ScalarDiffOp(1, (RatFn(p(-1)),))
        assert polynomial_kernel(op, 10) == []


class TestExponents:
    def test_worked_example_at_roots(self):
        D = fundamental_operator([X - 0.5, X * X])
        assert exponents_at(D, 0.0).as_integers() == (0, 2)
        assert exponents_at(D, 1.0).as_integers() == (0, 2)

    def test_worked_example_at_infinity(self):
        D = fundamental_operator([X - 0.5, X * X])
        assert exponents_at(D, INFINITY).as_integers() == (-2, -1)

    def test_regular_point(self):
        op = ScalarDiffOp(2, (RatFn.zero(), RatFn.zero()))
        assert exponents_at(op, 0.7 - 0.3j).as_integers() == (0, 1)

    def test_infinity_sign_convention(self):
        # kernel {1, x^2}: solutions x^0 and x^2 -> exponents {0, -2}
        D = fundamental_operator([ONE, X * X])
        assert exponents_at(D, INFINITY).as_integers() == (-2, 0)

    def test_irregular_raises(self):
        op = ScalarDiffOp(1, (RatFn(ONE, X * X),))  # pole order 2 > 1
        with pytest.raises(IrregularSingularity):
            exponents_at(op, 0.0)
        op2 = ScalarDiffOp(1, (RatFn(X),))  # grows at infinity
        with pytest.raises(IrregularSingularity):
            exponents_at(op2, INFINITY)


class TestRootsAndRamification:
    def test_ramification_worked(self):
        pts = ramification_points([X - 0.5, X * X])
        assert np.allclose(sorted(c.real for c in pts), [0.0, 1.0], atol=1e-9)

    def test_constant_wronskian(self):
        assert ramification_points([ONE, X]) == ()

    def test_single_root(self):
        pts = ramification_points([ONE, X * X])
        assert len(pts) == 1 and abs(pts[0]) < 1e-12

    def test_find_roots_examples(self):
        assert np.allclose(sorted(r.real for r in find_roots(p(0, -1, 1))), [0, 1])
        roots = find_roots(p(1, 0, 1))
        assert np.allclose(sorted(r.imag for r in roots), [-1, 1], atol=1e-9)
        double = find_roots(Poly.from_roots([2, 2]))
        assert np.allclose([r.real for r in double], [2, 2], atol=1e-5)

    def test_residual_target(self):
        rng = np.random.default_rng(2)
        q = rand_poly(rng, 6)
        for r in find_roots(q):
            assert abs(q(r)) <= 1e-12 * q.max_abs_coeff() * 10


class TestRealSpace:
    def test_real_construction(self):
        assert is_real_space(fundamental_operator([X - 0.5, X * X]))

    def test_complex_kernel(self):
        assert not is_real_space(fundamental_operator([X - 1j, X * X]))

    def test_constant_coefficients(self):
        assert is_real_space(ScalarDiffOp(2, (RatFn.zero(), RatFn.zero())))


class TestInvariants:
    def test_alternation(self):
        rng = np.random.default_rng(0)
        f, g, h = (rand_poly(rng, 3) for _ in range(3))
        assert wronskian([f, f, g]).is_zero
        w1 = wronskian([f, g, h])
        w2 = wronskian([g, f, h])
        assert (w1 + w2).max_abs_coeff() <= 1e-12 * max(w1.max_abs_coeff(), 1)

    def test_basis_change_covariance(self):
        rng = np.random.default_rng(1)
        basis = [rand_poly(rng, k + 2) for k in range(3)]
        C = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        new_basis = [sum((C[i, j] * basis[j] for j in range(3)), Poly.zero())
                     for i in range(3)]
        assert monic_wronskian(basis).isclose(monic_wronskian(new_basis), 1e-9)

    def test_quotient_identity(self):
        # Wr(f_1/f_m, ..., f_{m-1}/f_m, 1)(u) = Wr(f_1..f_m)(u) / f_m(u)^m
        rng = np.random.default_rng(3)
        m = 3
        for _ in range(5):
            fs = [rand_poly(rng, k + 2) for k in range(m)]
            u = complex(rng.standard_normal(), rng.standard_normal())
            if abs(fs[-1](u)) < 1e-3:
                continue
            ratios = [RatFn(f, fs[-1]) for f in fs[:-1]] + [RatFn.one()]
            M = np.empty((m, m), dtype=complex)
            for i, f in enumerate(ratios):
                g = f
                for j in range(m):
                    M[i, j] = g(u)
                    g = g.deriv()
            lhs = np.linalg.det(M)
            rhs = wronskian(fs)(u) / fs[-1](u) ** m
            assert abs(lhs - rhs) <= 1e-9 * max(abs(rhs), 1)

    def test_kernel_fundamental_round_trip(self):
        rng = np.random.default_rng(4)
        basis = [rand_poly(rng, k + 1, real=True) for k in range(3)]
        D = fundamental_operator(basis)
        ker = polynomial_kernel(D, max(f.degree for f in basis))
        expect = echelon_basis([f.coeffs for f in basis])
        assert len(ker) == len(expect)
        for a, b in zip(ker, expect):
            assert a.isclose(b, 1e-9)

    def test_double_conjugate_identity(self):
        rng = np.random.default_rng(6)
        us = [RatFn(rand_poly(rng, 1), rand_poly(rng, 1)) for _ in range(3)]
        op = compose_factors(us)
        back = formal_conjugate(formal_conjugate(op))
        assert back.isclose(op, 1e-12)

    def test_exponents_at_simple_wronskian_root(self):
        # fundamental operator, simple root z_s: exponents {0,...,r-1, r+1}
        rng = np.random.default_rng(7)
        for r in (1, 2):
            d = tuple(range(1, r + 1)) + (r + 2,)  # l = (1,...,1)
            from gwron.master import (ExponentSpec, TuplePoint,
                                      fundamental_op_typeA, spec_from_exponents)
            from gwron.solver import solve_all
            ds = ExponentSpec(d)
            z = np.sort(rng.uniform(-2, 2, ds.n))
            spec = spec_from_exponents(ds, z)
            rep = solve_all(spec, n_seeds=600)
            D = fundamental_op_typeA(rep.orbits[0].rep, spec)
            expect = tuple(range(r)) + (r + 1,)
            assert exponents_at(D, complex(z[0])).as_integers() == expect

    def test_find_roots_sum_product(self):
        rng = np.random.default_rng(8)
        q = rand_poly(rng, 5)
        roots = find_roots(q)
        c = q.coeffs
        assert abs(sum(roots) + c[-2] / c[-1]) <= 1e-9 * (1 + abs(c[-2] / c[-1]))
        prod = np.prod(roots)
        expect = (-1) ** 5 * c[0] / c[-1]
        assert abs(prod - expect) <= 1e-9 * (1 + abs(expect))


coeff_strategy = st.one_of(
    st.just(0j),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=3,
                       allow_nan=False, allow_infinity=False))


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff_strategy, min_size=1, max_size=5),
       st.lists(coeff_strategy, min_size=1, max_size=5))
def test_poly_ring_axioms(a, b):
    pa, pb = Poly(a), Poly(b)
    assert (pa * pb).isclose(pb * pa, 1e-12)
    assert (pa + pb).isclose(pb + pa, 1e-12)
    q, rem = divmod(pa * pb + pa, pb) if not pb.is_zero else (None, None)
    if q is not None:
        recon = q * pb + rem
        assert recon.isclose(pa * pb + pa, 1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4),
       st.integers(min_value=0, max_value=9999))
def test_poly_shift_evaluates(da, db, seed):
    rng = np.random.default_rng(seed)
    q = rand_poly(rng, da + db)
    z0 = complex(rng.standard_normal(), rng.standard_normal())
    shifted = q.shift(z0)
    w = complex(rng.standard_normal(), rng.standard_normal())
    assert abs(shifted(w) - q(w + z0)) <= 1e-9 * (1 + abs(q(w + z0)))

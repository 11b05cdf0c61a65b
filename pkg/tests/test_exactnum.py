import random
from fractions import Fraction

from gradman.exactnum import (
    Poly,
    PolyMatrix,
    RatFunc,
    kernel_basis,
    poly_inverse,
    poly_solve,
    rank_at,
    rank_generic,
    rat_inverse,
    rat_kernel,
    rat_rank,
    rat_solve,
)


def P(nvars, terms):
    """Build a Poly from {exps: coeff}."""
    return Poly(nvars, {tuple(e): Fraction(c) for e, c in terms.items()})


def rand_poly(rng, nvars=2, max_deg=3, max_terms=4):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exps = tuple(rng.randint(0, max_deg) for _ in range(nvars))
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if c != 0:
            terms[exps] = terms.get(exps, Fraction(0)) + c
    return Poly(nvars, {e: c for e, c in terms.items() if c != 0})


class TestPolyArith:
    def test_difference_of_squares(self):
        x = Poly.var(1, 0)
        one = Poly.one(1)
        lhs = x.add(one).mul(x.sub(one))
        assert lhs == x.mul(x).sub(one)

    def test_additive_identity(self):
        rng = random.Random(1)
        for _ in range(20):
            p = rand_poly(rng)
            assert p.add(Poly.zero(2)) == p

    def test_monomial_product_against_dense_oracle(self):
        # dense-array multiplication oracle on two variables, degree <= 4
        def dense(p, size=9):
            a = [[Fraction(0)] * size for _ in range(size)]
            for (i, j), c in p.terms.items():
                a[i][j] += c
            return a

        def dense_mul(a, b):
            size = len(a)
            out = [[Fraction(0)] * size for _ in range(size)]
            for i in range(size):
                for j in range(size):
                    if a[i][j] == 0:
                        continue
                    for k in range(size - i):
                        for l in range(size - j):
                            out[i + k][j + l] += a[i][j] * b[k][l]
            return out

        rng = random.Random(7)
        for _ in range(30):
            p, q = rand_poly(rng, max_deg=4), rand_poly(rng, max_deg=4)
            got = dense(p.mul(q), 18)
            want = dense_mul(dense(p, 18), dense(q, 18))
            assert got == want
        # separated coefficients: (2x) * (3y) = 6xy
        two_x = P(2, {(1, 0): 2})
        three_y = P(2, {(0, 1): 3})
        assert two_x.mul(three_y) == P(2, {(1, 1): 6})

    def test_ring_axioms_randomized(self):
        rng = random.Random(11)
        for _ in range(60):
            a, b, c = (rand_poly(rng) for _ in range(3))
            assert a.mul(b.mul(c)) == a.mul(b).mul(c)
            assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
            assert a.add(b) == b.add(a)

    def test_div_exact(self):
        x, y = Poly.var(2, 0), Poly.var(2, 1)
        p = x.add(y).mul(x.sub(y))
        assert p.div_exact(x.add(y)) == x.sub(y)
        assert p.div_exact(x) is None

    def test_compose_and_eval(self):
        x, y = Poly.var(2, 0), Poly.var(2, 1)
        p = x.mul(x).add(y.scale(3))
        q = p.compose([y, x])  # swap variables
        assert q == y.mul(y).add(x.scale(3))
        assert p.eval([2, 5]) == Fraction(19)

    def test_derivative_antiderivative(self):
        rng = random.Random(3)
        for _ in range(20):
            p = rand_poly(rng)
            assert p.antiderivative(0).derivative(0) == p


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        m = PolyMatrix.identity(3, 1)
        assert kernel_basis(m) == []

    def test_zero_matrix_kernel(self):
        m = PolyMatrix.zero(2, 2, 1)
        basis = kernel_basis(m)
        assert len(basis) == 2
        for v, flag in basis:
            assert flag

    def test_one_by_two_kernel(self):
        x = Poly.var(1, 0)
        m = PolyMatrix(1, 2, [[x, Poly.const(1, -1)]], 1)
        basis = kernel_basis(m)
        assert len(basis) == 1
        v, flag = basis[0]
        assert flag
        # M v = 0 identically
        assert m.entries[0][0].mul(v[0]).add(m.entries[0][1].mul(v[1])).is_zero()
        # spans (1, x)
        assert v[1].mul(Poly.one(1)) == v[0].mul(x)

    def test_kernel_vectors_annihilated(self):
        rng = random.Random(5)
        for _ in range(10):
            rows, cols = rng.randint(1, 3), rng.randint(1, 4)
            m = PolyMatrix(
                rows, cols,
                [[rand_poly(rng, nvars=1, max_deg=2, max_terms=2) for _ in range(cols)]
                 for _ in range(rows)],
                1,
            )
            for v, _ in kernel_basis(m):
                for i in range(rows):
                    s = Poly.zero(1)
                    for j in range(cols):
                        s = s.add(m.entries[i][j].mul(v[j]))
                    assert s.is_zero()


class TestRank:
    def test_identity_rank(self):
        m = PolyMatrix.identity(2, 1)
        assert rank_generic(m) == 2
        assert rank_at(m, [Fraction(3)]) == 2

    def test_single_variable_entry(self):
        m = PolyMatrix(1, 1, [[Poly.var(1, 0)]], 1)
        assert rank_generic(m) == 1
        assert rank_at(m, [Fraction(0)]) == 0

    def test_dependent_rows(self):
        x = Poly.var(1, 0)
        m = PolyMatrix(2, 2, [[x, x], [Poly.one(1), Poly.one(1)]], 1)
        # row reduction by hand: second column minus first column is zero
        assert rank_generic(m) == 1

    def test_generic_rank_dominates_point_rank(self):
        rng = random.Random(13)
        for _ in range(15):
            rows, cols = rng.randint(1, 3), rng.randint(1, 3)
            m = PolyMatrix(
                rows, cols,
                [[rand_poly(rng, nvars=2, max_deg=2, max_terms=2) for _ in range(cols)]
                 for _ in range(rows)],
                2,
            )
            g = rank_generic(m)
            for _ in range(4):
                pt = [Fraction(rng.randint(-3, 3)) for _ in range(2)]
                assert g >= rank_at(m, pt)


class TestFractionField:
    def test_ratfunc_simplifies_exact_quotients(self):
        x = Poly.var(1, 0)
        r = RatFunc(x.mul(x), x)
        assert r.as_poly() == x

    def test_poly_solve_consistency(self):
        x = Poly.var(1, 0)
        m = PolyMatrix(2, 2, [[x, Poly.one(1)], [Poly.zero(1), x]], 1)
        sol, bad = poly_solve(m, [x.mul(x), x])
        assert bad is None
        # second coordinate solves x * c = x, so c = 1; first: x*a + 1 = x^2
        assert sol[1].as_poly() == Poly.one(1)
        assert sol[0].as_poly() is None  # a = (x^2 - 1)/x is not polynomial

    def test_poly_solve_inconsistent(self):
        m = PolyMatrix.zero(1, 1, 1)
        sol, bad = poly_solve(m, [Poly.one(1)])
        assert sol is None and bad == 0

    def test_poly_inverse(self):
        x = Poly.var(1, 0)
        m = PolyMatrix(2, 2, [[Poly.one(1), x], [Poly.zero(1), Poly.one(1)]], 1)
        inv = poly_inverse(m)
        assert inv is not None
        assert m.mul(inv) == PolyMatrix.identity(2, 1)
        bad = PolyMatrix(1, 1, [[x]], 1)
        assert poly_inverse(bad) is None


class TestRatHelpers:
    def test_rank_and_kernel(self):
        m = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
        assert rat_rank(m) == 1
        k = rat_kernel(m)
        assert len(k) == 1
        v = k[0]
        assert m[0][0] * v[0] + m[0][1] * v[1] == 0

    def test_solve_and_inverse(self):
        m = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
        x, bad = rat_solve(m, [Fraction(3), Fraction(2)])
        assert bad is None and x == [Fraction(1), Fraction(1)]
        inv = rat_inverse(m)
        assert inv == [[Fraction(1), Fraction(-1)], [Fraction(-1), Fraction(2)]]

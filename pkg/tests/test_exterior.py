import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxforms.errors import InvalidInput, NotClosed
from darbouxforms.exterior import (
    DifferentialForm,
    LinearChange,
    class_of_two_form,
    darboux_basis_at,
    euler_primitive,
    exterior_derivative,
    form_degree,
    interior_product,
    pullback_linear,
    radial_field,
    random_form,
    random_linear_change,
    wedge,
    wedge_power,
)
from darbouxforms.polyring import Polynomial

from helpers import F, P, forms, vector_fields


def evaluate_on(form, point, vectors):
    """Value of the form at ``point`` on the given tangent vectors (a determinant sum)."""
    total = Fraction(0)
    for idx, c in form.items():
        minor = [[Fraction(v[i]) for v in vectors] for i in idx]
        det = Fraction(str(sympy.Matrix(minor).det())) if idx else 1
        total += c.evaluate(point) * det
    return total


def shuffle_wedge_value(a, b, point, vectors):
    p = a.r
    total = Fraction(0)
    for left in combinations(range(len(vectors)), p):
        right = [i for i in range(len(vectors)) if i not in left]
        perm = list(left) + right
        inversions = sum(perm[i] > perm[j] for i in range(len(perm)) for j in range(i + 1, len(perm)))
        total += (-1) ** inversions * evaluate_on(a, point, [vectors[i] for i in left]) * evaluate_on(
            b, point, [vectors[i] for i in right]
        )
    return total


class TestWedge:
    def test_alternating(self):
        assert not wedge(DifferentialForm.dz(2, 0), DifferentialForm.dz(2, 0))

    def test_antisymmetry(self):
        assert wedge(DifferentialForm.dz(2, 1), DifferentialForm.dz(2, 0)) == -DifferentialForm.dz(2, 0, 1)

    def test_coefficients_multiply(self):
        assert wedge(F("z1 dz1", 2), F("z2 dz2", 2)) == F("z1*z2 dz1 ^ dz2", 2)

    def test_power_of_symplectic(self):
        w = F("dz1 ^ dz2 + dz3 ^ dz4", 4)
        assert wedge_power(w, 2) == F("2 dz1 ^ dz2 ^ dz3 ^ dz4", 4)
        assert not wedge_power(F("dz1 ^ dz2", 2), 2)
        assert wedge_power(w, 0) == DifferentialForm.function(Polynomial.constant(4, 1))

    def test_power_cache_returns_consistent_results(self):
        w = F("z1 dz1 ^ dz2 + z3 dz3 ^ dz4 + z5 dz5 ^ dz6", 6)
        cube = wedge_power(w, 3)
        assert cube == wedge(w, wedge(w, w))
        assert wedge_power(w, 2) == wedge(w, w)
        assert not wedge_power(w, 4)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_matches_shuffle_formula(self, data):
        n = data.draw(st.integers(1, 4))
        a = data.draw(forms(n))
        b = data.draw(forms(n, r=data.draw(st.integers(0, n - a.r))))
        rng = random.Random(data.draw(st.integers(0, 10**6)))
        point = [rng.randint(-3, 3) for _ in range(n)]
        vecs = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(a.r + b.r)]
        assert evaluate_on(wedge(a, b), point, vecs) == shuffle_wedge_value(a, b, point, vecs)


class TestDerivative:
    def test_single_term(self):
        assert exterior_derivative(F("z1 dz2", 2)) == F("dz1 ^ dz2", 2)

    def test_constant_coefficients(self):
        assert not exterior_derivative(F("dz1 ^ dz2", 2))

    def test_repeated_differential(self):
        assert not exterior_derivative(F("z1 dz1 ^ dz2", 2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4).flatmap(forms))
    def test_d_squared(self, a):
        assert not exterior_derivative(exterior_derivative(a))


class TestInterior:
    def test_radial_on_dz1(self):
        assert interior_product(radial_field(1), F("dz1", 1)) == F("z1", 1)

    def test_radial_on_area(self):
        assert interior_product(radial_field(2), F("dz1 ^ dz2", 2)) == F("z1 dz2 - z2 dz1", 2)

    def test_linear_over_coefficients(self):
        got = interior_product(radial_field(3), F("z3 dz1 ^ dz2", 3))
        assert got == F("z1*z3 dz2 - z2*z3 dz1", 3)

    def test_euler_orthogonal_prototype(self):
        assert not interior_product(radial_field(2), F("z1 dz2 - z2 dz1", 2))

    def test_radial_field_components(self):
        assert radial_field(1).components == (Polynomial.variable(1, 0),)
        assert radial_field(3).components == tuple(Polynomial.variable(3, i) for i in range(3))

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_twice_is_zero(self, data):
        n = data.draw(st.integers(2, 4))
        a = data.draw(forms(n, r=data.draw(st.integers(2, n))))
        X = data.draw(vector_fields(n))
        assert not interior_product(X, interior_product(X, a))


class TestDegreeAndPullback:
    def test_form_degree(self):
        assert form_degree(F("z1^2 dz1", 1)) == 2
        assert form_degree(F("dz1 ^ dz2", 2)) == 0
        assert form_degree(F("z1 dz1 + z2^2 dz2", 2)) == 2

    def test_projection(self):
        assert pullback_linear(F("dz1", 2), [[1, 0, 0], [0, 1, 0]]) == F("dz1", 3)

    def test_swap(self):
        assert pullback_linear(F("z1 dz2", 2), [[0, 1], [1, 0]]) == F("z2 dz1", 2)

    def test_shear(self):
        got = pullback_linear(F("dz1 ^ dz2", 2), [[1, 0, 1], [0, 1, 0]])
        assert got == F("dz1 ^ dz2 + dz3 ^ dz2", 3)

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_pullback_commutes_with_d_and_wedge(self, data):
        n = data.draw(st.integers(1, 3))
        a = data.draw(forms(n))
        b = data.draw(forms(n, r=data.draw(st.integers(0, n - a.r))))
        M = data.draw(st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=n, max_size=n))
        assert pullback_linear(exterior_derivative(a), M) == exterior_derivative(pullback_linear(a, M))
        assert pullback_linear(wedge(a, b), M) == wedge(pullback_linear(a, M), pullback_linear(b, M))


class TestEulerPrimitive:
    def test_exact_one_form(self):
        assert euler_primitive(F("2*z1 dz1", 1)) == F("z1^2", 1)

    def test_area_form(self):
        assert euler_primitive(F("dz1 ^ dz2", 2)) == F("1/2*z1 dz2 - 1/2*z2 dz1", 2)

    def test_product(self):
        assert euler_primitive(F("z2 dz1 + z1 dz2", 2)) == F("z1*z2", 2)

    def test_requires_closed(self):
        with pytest.raises(NotClosed):
            euler_primitive(F("z1 dz2", 2))

    def test_random_closed_forms(self):
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(2, 4)
            a = F("0", n)
            while not a:
                a = exterior_derivative(random_form(rng, n, rng.randint(1, n - 1), rng.randint(1, 3)))
            assert exterior_derivative(euler_primitive(a)) == a


class TestTwoFormClass:
    def test_degenerate(self):
        assert class_of_two_form(F("z1 dz1 ^ dz2", 3)) == 1

    def test_two_blocks(self):
        w = F("6*z2 dz1 ^ dz2 + 6*z4 dz3 ^ dz4", 4)
        assert wedge(w, w) == F("72*z2*z4 dz1 ^ dz2 ^ dz3 ^ dz4", 4)
        assert class_of_two_form(w) == 2

    def test_invariant_under_linear_change(self):
        rng = random.Random(3)
        w = F("6*z2 dz1 ^ dz2 + 6*z4 dz3 ^ dz4", 4)
        for _ in range(10):
            assert class_of_two_form(random_linear_change(rng, 4).to_old(w)) == 2


class TestDarbouxBasis:
    @staticmethod
    def standard(n, k):
        return sum((DifferentialForm.dz(n, i, k + i) for i in range(k)), DifferentialForm.zero(n, 2))

    def test_already_normal(self):
        L, k = darboux_basis_at(F("dz1 ^ dz2", 2), (0, 0))
        assert k == 1
        assert L.to_new(F("dz1 ^ dz2", 2)) == self.standard(2, 1)

    def test_scaling(self):
        L, k = darboux_basis_at(F("2 dz1 ^ dz2", 2), (0, 0))
        assert k == 1 and L.to_new(F("2 dz1 ^ dz2", 2)) == self.standard(2, 1)

    def test_elimination(self):
        w = F("dz1 ^ dz2 + dz1 ^ dz3", 3)
        L, k = darboux_basis_at(w, (0, 0, 0))
        assert k == 1 and L.to_new(w) == self.standard(3, 1)

    def test_at_a_point(self):
        w = F("z1 dz1 ^ dz2 + z3 dz3 ^ dz4", 4)
        p = (1, 0, 2, 0)
        L, k = darboux_basis_at(w, p)
        assert k == 2
        assert L.to_new(w.evaluate(p)) == self.standard(4, 2)


class TestLinearChange:
    def test_round_trip(self):
        rng = random.Random(0)
        a = F("z1*z2 dz1 ^ dz3 - z3^2 dz2 ^ dz3", 3)
        L = random_linear_change(rng, 3)
        assert L.to_old(L.to_new(a)) == a
        p = P("z1*z2 - z3", 3)
        assert L.poly_to_old(L.poly_to_new(p)) == p

    def test_singular_rejected(self):
        with pytest.raises(InvalidInput):
            LinearChange([[1, 2], [2, 4]])

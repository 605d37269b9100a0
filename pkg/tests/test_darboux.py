import random
from fractions import Fraction

import pytest

from darbouxforms.darboux import (
    CONTACT_SUM,
    LINEAR_PULLBACK,
    DarbouxNormalForm,
    assemble_split,
    beta_lift,
    canonical_split,
    certified_normal_form,
    find_regular_point,
    medeiros_decompose,
    normal_form,
    random_normal_form_instance,
    reconstruct,
    solve_coupling,
    structural_violations,
)
from darbouxforms.errors import InvalidInput, NoCoupling, NonzeroPureZBlock, NotDecomposable, NotHomogeneous
from darbouxforms.exterior import (
    DifferentialForm,
    LinearChange,
    differential,
    exterior_derivative,
    wedge,
    wedge_power,
)
from darbouxforms.polyring import Polynomial

from helpers import F, P


class TestRegularPoint:
    def test_first_grid_point(self):
        assert find_regular_point(F("z1 dz1 ^ dz2", 3), 1) == (1, 0, 0)

    def test_needs_both_blocks(self):
        w = F("2*z2 dz1 ^ dz2 + 2*z4 dz3 ^ dz4", 4)
        p = find_regular_point(w, 2)
        assert p[1] * p[3] != 0

    def test_off_the_axes(self):
        # w^2 = 2 (z1 - z2)(z3 + z4) dz1..dz4 vanishes on every coordinate axis point
        w = F("(z1 - z2) dz1 ^ dz2 + (z3 + z4) dz3 ^ dz4", 4)
        p = find_regular_point(w, 2)
        assert all(0 <= v <= 2 for v in p)
        assert wedge_power(w, 2).evaluate(p)


class TestSplit:
    def test_allocation(self):
        s = canonical_split(F("z1 dz1 ^ dz2", 2), 1)
        assert s.pi[0] == F("z1 dz1", 2)
        assert s.bars_zero

    def test_mixed_block(self):
        w = F("2*z3 dz1 ^ dz3", 3)
        s = canonical_split(w, 1)
        assert s.eta_bar[0] == F("-2*z3 dz3", 3)
        assert not s.pi_bar[0]
        assert assemble_split(s, 3, 1) == w

    def test_pure_z_block(self):
        with pytest.raises(NonzeroPureZBlock):
            canonical_split(F("z3*z4 dz3 ^ dz4", 4), 1)

    def test_reassembles_random(self):
        rng = random.Random(2)
        for _ in range(10):
            w, _ = random_normal_form_instance(rng, 5, 2, change=False)
            try:
                s = canonical_split(w, 2)
            except NonzeroPureZBlock:
                continue
            assert assemble_split(s, 5, 2) == w


class TestCoupling:
    def test_zero(self):
        assert solve_coupling([DifferentialForm.zero(3, 1)], [F("z1 dz3", 3)]) == [[0]]

    def test_scalar(self):
        assert solve_coupling([F("2*z1 dz3", 3)], [F("z1 dz3", 3)]) == [[2]]

    def test_mismatch(self):
        with pytest.raises(NoCoupling):
            solve_coupling([F("z2 dz3", 3)], [F("z1 dz3", 3)])


class TestBetaLift:
    def test_area(self):
        assert beta_lift(F("dz1 ^ dz2", 3), 1) == F("z1 dz2", 3)

    def test_mixed(self):
        beta = beta_lift(F("dz3 ^ dz1", 3), 1)
        assert beta == F("z3 dz1", 3)
        assert exterior_derivative(beta) == F("dz3 ^ dz1", 3)

    def test_sum(self):
        c = F("2 dz1 ^ dz2 + dz3 ^ dz2", 3)
        beta = beta_lift(c, 1)
        assert beta == F("2*z1 dz2 + z3 dz2", 3)
        assert exterior_derivative(beta) == c


class TestNormalForm:
    def test_linear_pullback(self):
        w = F("z1 dz1 ^ dz2", 3)
        nf, _ = normal_form(w)
        assert nf.variant == LINEAR_PULLBACK and nf.k == 1
        assert reconstruct(nf) == w

    def test_contact_sum(self):
        w = F("2*z2 dz1 ^ dz2 + 2*z3 dz1 ^ dz3", 3)
        assert w == wedge(differential(P("z1", 3)), differential(P("z2^2 + z3^2", 3)))
        nf, _ = certified_normal_form(w)
        assert nf.variant == CONTACT_SUM and nf.k == 1
        assert not structural_violations(nf)

    def test_constant_coefficients_rejected(self):
        with pytest.raises(NotHomogeneous):
            normal_form(F("dz1 ^ dz2", 2))

    def test_reconstruct_by_hand(self):
        n = 2
        nf = DarbouxNormalForm(
            CONTACT_SUM, n, 1, LinearChange.identity(n), zeta=DifferentialForm.zero(2, 2),
            t=(P("z1", 2),), h=(P("z2^2", 2),),
        )
        assert reconstruct(nf) == F("2*z2 dz1 ^ dz2", 2)

    @pytest.mark.parametrize("seed", range(30))
    def test_generated_round_trip(self, seed):
        rng = random.Random(seed)
        k = rng.choice([1, 2])
        n = rng.randint(max(4, 2 * k), 6)
        w, _ = random_normal_form_instance(rng, n, k)
        nf, trace = certified_normal_form(w)
        assert nf.k == k
        assert trace.route in ("coupling", "rank-locus")
        if nf.variant == CONTACT_SUM:
            assert not structural_violations(nf)

    def test_odd_dimension_uses_rank_locus(self):
        # n = 2k + 1 with k = 2: the coupling route is not enough here
        routes = set()
        for seed in range(40):
            rng = random.Random(seed)
            w, _ = random_normal_form_instance(rng, 5, 2)
            nf, trace = certified_normal_form(w)
            routes.add(trace.route)
        assert "rank-locus" in routes


class TestMedeiros:
    def test_sum_of_squares(self):
        w = F("2*z2 dz1 ^ dz2 + 2*z3 dz1 ^ dz3", 3)
        q, t = medeiros_decompose(w)
        assert q.degree() == 2 and t.degree() == 1
        assert wedge(differential(q), differential(t)) == w

    def test_single_block(self):
        a, b = Fraction(3), Fraction(-2)
        w = DifferentialForm(2, 2, {(0, 1): Polynomial.linear([a, b])})
        q, t = medeiros_decompose(w)
        assert wedge(differential(q), differential(t)) == w

    def test_constant_input_rejected(self):
        with pytest.raises(InvalidInput):
            medeiros_decompose(F("dz1 ^ dz2 + dz3 ^ dz4", 4))

    def test_not_decomposable(self):
        with pytest.raises(NotDecomposable):
            medeiros_decompose(F("z1 dz1 ^ dz2 + z3 dz3 ^ dz4", 4))

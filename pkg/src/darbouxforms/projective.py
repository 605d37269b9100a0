"""Codimension-one distributions on projective space and the degree-one classifier.

A distribution on P^n is given by a 1-form ``theta`` on C^(n+1) with
homogeneous coefficients and ``i_R theta = 0``.  Its degree is the
coefficient degree minus one and its class is the largest ``k`` with
``theta ^ (d theta)^k != 0``.

For degree one, ``i_R d(theta) = 3 theta``, so the normal form of the closed
2-form ``d(theta)`` determines ``theta``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .darboux import (
    CONTACT_SUM,
    LINEAR_PULLBACK,
    DarbouxNormalForm,
    normal_form,
    random_closed_linear_two_form,
    random_normal_form_instance,
)
from .errors import (
    AlgorithmFailure,
    ClassZero,
    DegreeNotOne,
    DimensionMismatch,
    EulerConditionFails,
    InvalidInput,
    NotHomogeneous,
    ReconstructionMismatch,
    VanishesInCodimOne,
    ZeroForm,
)
from .exterior import (
    DifferentialForm,
    LinearChange,
    class_of_two_form,
    differential,
    exterior_derivative,
    interior_product,
    pullback_linear,
    radial_field,
    wedge,
    wedge_power,
)
from .polyring import Polynomial, gcd_many

PULLBACK_CASE_I = "PullbackCaseI"
CONTACT_CASE_II = "ContactCaseII"


@dataclass(frozen=True)
class Distribution:
    n: int
    theta: DifferentialForm
    degree: int
    class_k: int
    ground_truth: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Classification:
    """Case i: theta = rho^* theta_block.  Case ii: theta = rho^* alpha + (1/3) sum(t dh - 2 h dt).

    ``rho`` maps C^(n+1) onto the 2k+2 distinguished coordinates; ``t`` and
    ``h`` are in the original coordinates.
    """

    variant: str
    n: int
    k: int
    change: LinearChange
    rho: tuple[tuple[Fraction, ...], ...]
    theta_block: DifferentialForm | None = None
    alpha: DifferentialForm | None = None
    t: tuple[Polynomial, ...] = ()
    h: tuple[Polynomial, ...] = ()
    normal_form: DarbouxNormalForm | None = None

    @property
    def pure_contact(self) -> bool:
        """Case ii with alpha = 0: theta is a linear pullback of the contact form alone."""
        return self.variant == CONTACT_CASE_II and not self.alpha


def _euler(theta: DifferentialForm) -> DifferentialForm:
    return interior_product(radial_field(theta.n), theta)


def pfaff_class(theta: DifferentialForm) -> int:
    """Largest k with theta ^ (d theta)^k != 0, for any nonzero 1-form."""
    if theta.r != 1:
        raise InvalidInput("the class is defined for 1-forms")
    if not theta:
        raise ZeroForm("the zero form has no class")
    dtheta = exterior_derivative(theta)
    k = 0
    while wedge(theta, wedge_power(dtheta, k + 1)):
        k += 1
    return k


def validate(theta: DifferentialForm) -> Distribution:
    if theta.r != 1:
        raise InvalidInput(f"a distribution is given by a 1-form, got a {theta.r}-form")
    if not theta:
        raise ZeroForm("theta is zero")
    degs = theta.coefficient_degrees()
    if len(degs) != 1:
        raise NotHomogeneous(f"coefficients have mixed degrees {sorted(degs)}")
    for _, c in theta.items():
        if not c.is_homogeneous():
            raise NotHomogeneous("coefficients are not homogeneous")
    if _euler(theta):
        raise EulerConditionFails("i_R theta is not zero")
    g = gcd_many(c for _, c in theta.items())
    if not g.is_constant():
        raise VanishesInCodimOne(f"coefficients share the factor {g}")
    (cdeg,) = degs
    return Distribution(theta.n - 1, theta, cdeg - 1, pfaff_class(theta))


def class_of(dist: Distribution) -> int:
    """The class, with the companion identities on d(theta) checked as well."""
    theta = dist.theta
    k = pfaff_class(theta)
    dtheta = exterior_derivative(theta)
    if not dtheta or class_of_two_form(dtheta) != k + 1:
        raise AlgorithmFailure(f"(d theta)^{k + 1} != 0 and (d theta)^{k + 2} = 0 fail for class {k}")
    return k


def contact_form(t: Sequence[Polynomial], h: Sequence[Polynomial]) -> DifferentialForm:
    """sum_i (t_i dh_i - 2 h_i dt_i)."""
    if len(t) != len(h):
        raise DimensionMismatch("t and h must have the same length")
    if not t:
        raise InvalidInput("at least one pair is needed")
    n = t[0].n
    out = DifferentialForm.zero(n, 1)
    for ti, hi in zip(t, h):
        if ti and not (ti.is_homogeneous() and ti.degree() == 1):
            raise NotHomogeneous("t_i must be linear homogeneous")
        if hi and not (hi.is_homogeneous() and hi.degree() == 2):
            raise NotHomogeneous("h_i must be quadratic homogeneous")
        out = out + differential(hi) * ti - differential(ti) * (hi * 2)
    return out


def classify(dist: Distribution) -> Classification:
    theta = dist.theta
    if dist.degree != 1:
        raise DegreeNotOne(f"classification needs degree one, got degree {dist.degree}")
    k = class_of(dist)
    if k == 0:
        raise ClassZero("class 0 distributions are foliations (Jouanolou's classification), not handled here")
    dtheta = exterior_derivative(theta)
    nf, _ = normal_form(dtheta)
    if nf.k != k + 1:
        raise AlgorithmFailure(f"d theta has class {nf.k}, expected {k + 1}")
    m = 2 * nf.k
    rho = tuple(tuple(row) for row in nf.rho())
    R1 = radial_field(m)
    if nf.variant == LINEAR_PULLBACK:
        block = interior_product(R1, nf.eta) / 3
        c = Classification(PULLBACK_CASE_I, dist.n, k, nf.change, rho, theta_block=block, normal_form=nf)
    elif nf.variant == CONTACT_SUM:
        alpha = interior_product(R1, nf.zeta) / 3 if nf.zeta else DifferentialForm.zero(m, 1)
        c = Classification(
            CONTACT_CASE_II,
            dist.n,
            k,
            nf.change,
            rho,
            alpha=alpha,
            t=tuple(nf.t_old()),
            h=tuple(nf.h_old()),
            normal_form=nf,
        )
    else:
        raise AlgorithmFailure(f"unexpected normal form variant {nf.variant!r}")
    if reconstruct(c) != theta:
        raise ReconstructionMismatch("classification does not reconstruct theta")
    return c


def reconstruct(c: Classification) -> DifferentialForm:
    if c.variant == PULLBACK_CASE_I:
        if c.theta_block is None:
            raise InvalidInput("case i classification without a block form")
        return pullback_linear(c.theta_block, c.rho)
    if c.variant == CONTACT_CASE_II:
        if c.alpha is None or len(c.t) != len(c.h):
            raise InvalidInput("malformed case ii classification")
        out = pullback_linear(c.alpha, c.rho)
        if c.t:
            out = out + contact_form(c.t, c.h) / 3
        return out
    raise InvalidInput(f"unknown classification variant {c.variant!r}")


def random_distribution(case: str, k: int, n: int, seed: int, retries: int = 32) -> Distribution:
    """A random degree-one distribution on P^n of class k built for ``case`` ("i" or "ii").

    Case ii: theta = (1/3) i_R (theta_part + sum_{i<=k+1} dt_i ^ dh_i) with the
    2-form drawn by the normal-form generator.  Case i: a random class-k
    degree-one form on C^(2k+2) pulled back along a random linear surjection.
    Invalid draws are retried with the next seed.
    """
    if case not in ("i", "ii"):
        raise InvalidInput("case must be 'i' or 'ii'")
    if k < 1 or 2 * k + 1 > n:
        raise InvalidInput("need k >= 1 and 2k + 1 <= n")
    m = 2 * k + 2
    N = n + 1
    last = None
    for attempt in range(retries):
        rng = random.Random(seed + attempt)
        try:
            if case == "ii":
                w, _ = random_normal_form_instance(rng, N, k + 1)
            else:
                w_block = random_closed_linear_two_form(rng, m, density=0.7)
                if not wedge_power(w_block, k + 1):
                    continue
                S = _random_surjection(rng, m, N)
                w = pullback_linear(w_block, S)
            theta = interior_product(radial_field(N), w) / 3
            dist = validate(theta)
        except (InvalidInput, AlgorithmFailure) as exc:
            last = exc
            continue
        if dist.degree == 1 and dist.class_k == k:
            return Distribution(dist.n, dist.theta, dist.degree, dist.class_k, ground_truth=case)
    raise AlgorithmFailure(f"no valid case {case} distribution after {retries} draws ({last})")


def _random_surjection(rng, m: int, N: int) -> list[list[Fraction]]:
    while True:
        S = [[Fraction(rng.randint(-2, 2)) for _ in range(N)] for _ in range(m)]
        if linalg.rank(S) == m:
            return S

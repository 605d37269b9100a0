"""Seeded invariant suites shared by ``selfcheck`` and the test-suite.

Each suite draws its own cases from ``random.Random(seed)`` and returns a
``SuiteResult``; a failing case is recorded, never raised.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .darboux import (
    CONTACT_SUM,
    certified_normal_form,
    medeiros_decompose,
    random_normal_form_instance,
    structural_violations,
)
from .errors import FormsError
from .exterior import (
    differential,
    exterior_derivative,
    interior_product,
    radial_field,
    random_form,
    random_linear_change,
    random_polynomial,
    random_vector_field,
    wedge,
    wedge_power,
)
from .projective import classify, pfaff_class, random_distribution, reconstruct
from .textio import parse_form, print_form


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.cases > 0 and not self.failures


def _run(name: str, cases: int, seed: int, body) -> SuiteResult:
    res = SuiteResult(name)
    t0 = time.perf_counter()
    for i in range(cases):
        rng = random.Random(seed * 100_003 + i)
        try:
            msg = body(rng, i)
        except FormsError as exc:
            msg = f"{type(exc).__name__}: {exc}"
        res.cases += 1
        if msg:
            res.failures.append(f"case {i}: {msg}")
    res.seconds = time.perf_counter() - t0
    return res


def _calculus_case(rng, i):
    n = rng.randint(1, 6)
    p, q = rng.randint(0, 3), rng.randint(0, 3)
    a = random_form(rng, n, min(p, n), rng.randint(0, 3), homogeneous=False)
    b = random_form(rng, n, min(q, n), rng.randint(0, 3), homogeneous=False)
    p, q = a.r, b.r
    X = random_vector_field(rng, n, rng.randint(0, 2))
    da, db = exterior_derivative(a), exterior_derivative(b)
    if exterior_derivative(da):
        return "d(d a) != 0"
    if wedge(a, b) != wedge(b, a) * (-1) ** (p * q):
        return "graded commutativity"
    lhs = exterior_derivative(wedge(a, b))
    if lhs != wedge(da, b) + wedge(a, db) * (-1) ** p:
        return "Leibniz rule for d"
    if p >= 1 and q >= 1:
        lhs = interior_product(X, wedge(a, b))
        if lhs != wedge(interior_product(X, a), b) + wedge(a, interior_product(X, b)) * (-1) ** p:
            return "Leibniz rule for i_X"
    if p >= 2 and interior_product(X, interior_product(X, a)):
        return "i_X i_X a != 0"
    return None


def _jouanolou_case(rng, i):
    n = rng.randint(2, 5)
    q = rng.randint(1, min(3, n))
    s = rng.randint(0, 3)
    eta = random_form(rng, n, q, s, density=0.6)
    R = radial_field(n)
    lhs = interior_product(R, exterior_derivative(eta)) + exterior_derivative(interior_product(R, eta))
    if lhs != eta * (q + s):
        return f"identity fails for q={q}, s={s}"
    return None


def _darboux_case(rng, i):
    k = rng.choice([1, 2])
    n = rng.randint(max(4, 2 * k), 7)
    w, _ = random_normal_form_instance(rng, n, k)
    nf, _ = certified_normal_form(w)
    if nf.k != k:
        return f"class {nf.k}, built with {k}"
    if nf.variant == CONTACT_SUM:
        bad = structural_violations(nf)
        if bad:
            return "; ".join(bad)
    return None


def _classify_case(rng, i):
    case = "ii" if i % 3 else "i"
    k = 1 + (i // 3) % 2
    n = rng.randint(2 * k + 1, 7)
    dist = random_distribution(case, k, n, rng.randrange(10**9))
    c = classify(dist)
    theta = dist.theta
    if reconstruct(c) != theta:
        return "reconstruction"
    R = radial_field(theta.n)
    dtheta = exterior_derivative(theta)
    if interior_product(R, dtheta) != theta * 3:
        return "i_R d theta != 3 theta"
    if not wedge_power(dtheta, k + 1) or wedge_power(dtheta, k + 2):
        return "power identities of d theta"
    return None


def _medeiros_case(rng, i):
    n = rng.randint(2, 6)
    while True:
        q = random_polynomial(rng, n, 2, density=0.6)
        t = random_polynomial(rng, n, 1, density=0.7)
        w = wedge(differential(q), differential(t))
        if w:
            break
    q2, t2 = medeiros_decompose(w)
    got = wedge(differential(q2), differential(t2))
    return None if got == w else "dq' ^ dt' != dq ^ dt"


def _class_case(rng, i):
    dist = random_distribution("ii", 1, rng.randint(3, 4), rng.randrange(10**9))
    theta = dist.theta
    k = pfaff_class(theta)
    if k != dist.class_k:
        return "class disagrees with the generator"
    for _ in range(5):
        L = random_linear_change(rng, theta.n, -2, 2)
        if pfaff_class(L.to_old(theta)) != k:
            return "class changed under a linear change"
    return None


def _parser_case(rng, i):
    n = rng.randint(1, 5)
    f = random_form(rng, n, rng.randint(0, min(3, n)), rng.randint(0, 3), homogeneous=False)
    f = f * Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    text = print_form(f)
    return None if parse_form(text, n) == f else f"round trip of {text!r}"


SUITES = {
    "calculus": _calculus_case,
    "jouanolou": _jouanolou_case,
    "darboux": _darboux_case,
    "classify": _classify_case,
    "medeiros": _medeiros_case,
    "class-invariance": _class_case,
    "parser": _parser_case,
}

# the projective suites cost far more per case than the others
_COST = {"classify": 5, "class-invariance": 5}


def run_all(seed: int = 1, cases: int = 100, only: list[str] | None = None) -> list[SuiteResult]:
    out = []
    for name, body in SUITES.items():
        if only and name not in only:
            continue
        out.append(_run(name, max(1, cases // _COST.get(name, 1)), seed, body))
    return out

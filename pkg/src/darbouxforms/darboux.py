"""Normal forms for closed 2-forms with linear homogeneous coefficients.

Given such a form ``w`` with ``w^k != 0`` and ``w^(k+1) = 0`` we find linear
coordinates ``(x_1..x_k, y_1..y_k, z)`` in which either

* ``w`` is the pullback of a form on the ``(x, y)`` block (``LinearPullback``), or
* ``w = zeta + sum_i dt_i ^ dh_i`` with ``zeta`` a closed linear 2-form in
  ``(x, y)`` only, ``t_i`` linear in ``(x, y)`` and ``h_i`` quadratic
  (``ContactSum``).

Every result is certified by reconstructing the input exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from . import linalg
from .errors import (
    AlgorithmFailure,
    InvalidInput,
    NoCoupling,
    NonzeroPureZBlock,
    NotClosed,
    NotDecomposable,
    NotHomogeneous,
    ReconstructionMismatch,
    ZeroForm,
    ZetaNotReduced,
)
from .exterior import (
    DifferentialForm,
    LinearChange,
    VectorField,
    class_of_two_form,
    darboux_basis_at,
    differential,
    euler_primitive,
    exterior_derivative,
    interior_product,
    is_closed,
    pullback_linear,
    random_form,
    random_linear_change,
    random_polynomial,
    wedge,
    wedge_power,
)
from .polyring import Polynomial
from .rank_locus import contraction_matrix, low_rank_directions

LINEAR_PULLBACK = "LinearPullback"
CONTACT_SUM = "ContactSum"


@dataclass(frozen=True)
class Split:
    """Allocation of a form in Darboux coordinates into the eta_i / pi_i pieces."""

    eta: tuple[DifferentialForm, ...]
    pi: tuple[DifferentialForm, ...]
    eta_bar: tuple[DifferentialForm, ...]
    pi_bar: tuple[DifferentialForm, ...]
    # (i, j) -> coefficient; l: dx_j in eta_i, g: dy_j in pi_i, h: dx_j in pi_i.
    # The m coefficients (dy_j in eta_i) are gauged to zero.
    allocation: dict = field(default_factory=dict)

    @property
    def bars_zero(self) -> bool:
        return not any(self.eta_bar) and not any(self.pi_bar)


@dataclass(frozen=True)
class DarbouxTrace:
    p0: tuple[Fraction, ...]
    change: LinearChange
    k: int
    form_new: DifferentialForm
    swapped: tuple[int, ...]
    split: Split
    coupling: tuple[tuple[Fraction, ...], ...] | None = None
    beta: tuple[DifferentialForm, ...] = ()
    mu: tuple[DifferentialForm, ...] = ()
    f_eta: tuple[Polynomial, ...] = ()
    f_pi: tuple[Polynomial, ...] = ()
    gamma: tuple[DifferentialForm, ...] = ()
    delta: tuple[DifferentialForm, ...] = ()
    # "coupling" for the Darboux-basis construction; "rank-locus" when the
    # z-directions were found from the low-rank locus of i_v w instead
    route: str = "coupling"
    directions: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def eta(self):
        return self.split.eta

    @property
    def pi(self):
        return self.split.pi

    @property
    def eta_bar(self):
        return self.split.eta_bar

    @property
    def pi_bar(self):
        return self.split.pi_bar


@dataclass(frozen=True)
class DarbouxNormalForm:
    """Normal form in the coordinates ``u = change.M z``.

    ``eta`` and ``zeta`` live on C^(2k) (the x, y block); ``t`` and ``h`` are
    polynomials in all ``n`` new coordinates.
    """

    variant: str
    n: int
    k: int
    change: LinearChange
    eta: DifferentialForm | None = None
    zeta: DifferentialForm | None = None
    t: tuple[Polynomial, ...] = ()
    h: tuple[Polynomial, ...] = ()

    def block(self) -> list[list[Fraction]]:
        """Projection C^n -> C^(2k) onto the (x, y) coordinates, in new coordinates."""
        return projection(self.n, 2 * self.k)

    def rho(self) -> list[list[Fraction]]:
        """The composite linear map old coordinates -> (x, y) block."""
        return linalg.matmul(self.block(), self.change.M)

    def t_old(self) -> list[Polynomial]:
        return [self.change.poly_to_old(p) for p in self.t]

    def h_old(self) -> list[Polynomial]:
        return [self.change.poly_to_old(p) for p in self.h]


def projection(n: int, m: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(m)]


def _roles(n: int, k: int):
    return ["x"] * k + ["y"] * k + ["z"] * (n - 2 * k)


def check_degree_one_closed(w: DifferentialForm) -> None:
    if w.r != 2:
        raise InvalidInput(f"expected a 2-form, got a {w.r}-form")
    if not w:
        raise ZeroForm("the zero form has no normal form")
    if w.coefficient_degrees() != {1}:
        raise NotHomogeneous("coefficients must be homogeneous of degree one")
    if not is_closed(w):
        raise NotClosed("form is not closed")


def _grid_points(n: int, k: int):
    """Points of {0..k}^n by increasing height max|p_i|, then sum, then lexicographically."""
    for height in range(k + 1):
        layer = [p for p in product(range(height + 1), repeat=n) if max(p, default=0) == height]
        layer.sort(key=lambda p: (sum(p), p))
        yield from layer


def find_regular_point(w: DifferentialForm, k: int) -> tuple[Fraction, ...]:
    """A rational point where w^k does not vanish.

    The coefficients of w^k are homogeneous of degree k, so the grid {0..k}^n
    always contains one.
    """
    power = wedge_power(w, k)
    if not power:
        raise InvalidInput(f"w^{k} vanishes identically")
    coeffs = [c for _, c in power.items()]
    for p in _grid_points(w.n, k):
        if any(c.evaluate(p) for c in coeffs):
            return tuple(Fraction(v) for v in p)
    raise AlgorithmFailure("no regular point on the grid")  # unreachable for degree-k coefficients


def canonical_split(w: DifferentialForm, k: int) -> Split:
    """Write w = sum eta_i ^ dx_i + sum pi_i ^ dy_i with the fixed allocation gauge."""
    n = w.n
    role = _roles(n, k)
    zero1 = DifferentialForm.zero(n, 1)
    eta = [zero1] * k
    pi = [zero1] * k
    eta_bar = [zero1] * k
    pi_bar = [zero1] * k
    alloc = {"l": {}, "g": {}, "h": {}}
    for (a, b), c in sorted(w.items()):
        ra, rb = role[a], role[b]
        if ra == "x" and rb == "x":
            i, j = a, b
            eta[j] = eta[j] + DifferentialForm.dz(n, a) * c
            alloc["l"][(j, i)] = c
        elif ra == "y" and rb == "y":
            i, j = a - k, b - k
            pi[j] = pi[j] + DifferentialForm.dz(n, a) * c
            alloc["g"][(j, i)] = c
        elif ra == "x" and rb == "y":
            i, j = a, b - k
            pi[j] = pi[j] + DifferentialForm.dz(n, a) * c
            alloc["h"][(j, i)] = c
        elif ra == "x" and rb == "z":
            eta_bar[a] = eta_bar[a] - DifferentialForm.dz(n, b) * c
        elif ra == "y" and rb == "z":
            pi_bar[a - k] = pi_bar[a - k] - DifferentialForm.dz(n, b) * c
        else:
            raise NonzeroPureZBlock(
                f"coefficient of dz{a + 1} ^ dz{b + 1} is nonzero in Darboux coordinates"
            )
    eta = [e + eb for e, eb in zip(eta, eta_bar)]
    pi = [p + pb for p, pb in zip(pi, pi_bar)]
    return Split(tuple(eta), tuple(pi), tuple(eta_bar), tuple(pi_bar), alloc)


def assemble_split(split: Split, n: int, k: int) -> DifferentialForm:
    total = DifferentialForm.zero(n, 2)
    for i in range(k):
        total = total + wedge(split.eta[i], DifferentialForm.dz(n, i))
        total = total + wedge(split.pi[i], DifferentialForm.dz(n, k + i))
    return total


def _coefficient_vector(f: DifferentialForm) -> dict:
    return {(idx, e): c for idx, p in f.items() for e, c in p.items()}


def solve_coupling(eta_bars: Sequence[DifferentialForm], pi_bars: Sequence[DifferentialForm]) -> list[list[Fraction]]:
    """Constants a[i][j] with eta_bar_i = sum_j a[i][j] pi_bar_j.

    Matches the coefficient of every (monomial, dz_l) pair; free unknowns are
    set to zero.
    """
    k = len(pi_bars)
    if len(eta_bars) != k:
        raise InvalidInput("eta_bars and pi_bars must have the same length")
    pv = [_coefficient_vector(p) for p in pi_bars]
    a = []
    for i, eb in enumerate(eta_bars):
        ev = _coefficient_vector(eb)
        keys = sorted(set(ev).union(*pv), key=repr) if k else sorted(ev, key=repr)
        A = [[p.get(key, Fraction(0)) for p in pv] for key in keys]
        rhs = [ev.get(key, Fraction(0)) for key in keys]
        if not keys:
            a.append([Fraction(0)] * k)
            continue
        sol = linalg.solve(A, rhs)
        if sol is None:
            raise NoCoupling(f"eta_bar_{i + 1} is not a constant combination of the pi_bar_j")
        a.append(sol)
    return a


def beta_lift(c: DifferentialForm, k: int) -> DifferentialForm:
    """A linear 1-form in <dx, dy> with d(beta) = c, for a constant 2-form c."""
    n = c.n
    if c.r != 2:
        raise InvalidInput("beta_lift expects a 2-form")
    beta = DifferentialForm.zero(n, 1)
    for (a, b), coeff in c.items():
        if not coeff.is_constant():
            raise InvalidInput("beta_lift expects constant coefficients")
        v = coeff.constant_term()
        if b < 2 * k:
            beta = beta + DifferentialForm.dz(n, b) * Polynomial.variable(n, a) * v
        elif a < 2 * k:
            beta = beta - DifferentialForm.dz(n, a) * Polynomial.variable(n, b) * v
        else:
            raise NonzeroPureZBlock(f"pure z term dz{a + 1} ^ dz{b + 1} cannot be lifted into <dx, dy>")
    return beta


def swap_change(n: int, k: int, swapped: Sequence[int]) -> LinearChange:
    """x_i' = y_i, y_i' = -x_i for i in ``swapped``; preserves sum dx_i ^ dy_i."""
    S = linalg.identity(n)
    for i in swapped:
        S[i][i] = S[k + i][k + i] = Fraction(0)
        S[i][k + i] = Fraction(1)
        S[k + i][i] = Fraction(-1)
    return LinearChange(S)


def _swap_candidates(k: int, split: Split):
    yield ()
    if not any(split.pi_bar) and any(split.eta_bar):
        yield tuple(range(k))
    for size in range(1, k + 1):
        for s in combinations(range(k), size):
            yield s


def _contact_sum(w_new: DifferentialForm, k: int, split: Split):
    n = w_new.n
    a = solve_coupling(split.eta_bar, split.pi_bar)
    xs = [Polynomial.variable(n, j) for j in range(k)]
    t = []
    for i in range(k):
        s = Polynomial.variable(n, k + i)
        for j in range(k):
            s = s + xs[j] * a[j][i]
        t.append(-s)
    mu = [beta_lift(exterior_derivative(p), k) for p in split.pi]
    beta = [beta_lift(exterior_derivative(e), k) for e in split.eta]
    f_pi = [euler_primitive(p - m).coefficient(()) if p - m else Polynomial.zero(n) for p, m in zip(split.pi, mu)]
    f_eta = [euler_primitive(e - b).coefficient(()) if e - b else Polynomial.zero(n) for e, b in zip(split.eta, beta)]
    delta = [p - pb - m for p, pb, m in zip(split.pi, split.pi_bar, mu)]
    gamma = []
    for i in range(k):
        g = split.eta[i] - split.eta_bar[i]
        for j in range(k):
            g = g - delta[j] * a[i][j]
        gamma.append(g)
    zeta = w_new
    for ti, hi in zip(t, f_pi):
        zeta = zeta - wedge(differential(ti), differential(hi))
    block = set(range(2 * k))
    if zeta.differentials_used() - block or zeta.variables_used() - block or not is_closed(zeta):
        raise ZetaNotReduced("assembled zeta is not a closed form in the (x, y) block")
    return a, t, f_pi, zeta, dict(mu=mu, beta=beta, f_eta=f_eta, gamma=gamma, delta=delta)


def _extend(basis: list, candidates, target: int) -> list:
    out = list(basis)
    for c in candidates:
        if len(out) == target:
            break
        if linalg.rank(out + [c]) > len(out):
            out.append(list(c))
    return out


def _locus_change(w: DifferentialForm, k: int, directions: list) -> LinearChange | None:
    """Coordinates whose z-axes span ``directions`` and whose x's span the image of i_v w."""
    n = w.n
    block = linalg.nullspace(directions, n)  # covectors killing every direction
    if len(block) != 2 * k:
        return None
    image = []
    for v in directions:
        image.extend(contraction_matrix(w, v))
    T, piv = linalg.rref(image)
    T = [row for row in T[: len(piv)]]
    if len(T) > k:
        return None
    if any(linalg.matvec([row], v)[0] for row in T for v in directions):
        return None
    xs = _extend(T, block, k)
    xy = _extend(xs, block, 2 * k)
    rows = _extend(xy, linalg.identity(n), n)
    return LinearChange(rows)


def _rank_locus_sum(w: DifferentialForm, k: int):
    """Contact-sum form from z-directions v along which i_v w has rank <= k."""
    n = w.n
    # a pair (t_i, h_i) with h_i independent of z drops out of i_v w, so the
    # rank along the z-directions can be below k; try the smallest rank first
    change = None
    for r in range(1, k + 1):
        for found in low_rank_directions(w, r):
            if len(found) >= n - 2 * k:
                directions = found[: n - 2 * k]
                change = _locus_change(w, k, directions)
                if change is not None:
                    break
        if change is not None:
            break
    else:
        return None
    w_new = change.to_new(w)
    zs = set(range(2 * k, n))
    # mixed part must be sum_i dx_i ^ (sum_l c_il dz_l)
    c = [[Polynomial.zero(n) for _ in range(n)] for _ in range(k)]
    for (a, b), coeff in w_new.items():
        if a in zs:
            return None
        if b in zs:
            if a >= k:
                return None
            c[a][b] = coeff
    f = []
    for i in range(k):
        fi = Polynomial.zero(n)
        for lz in zs:
            base = Polynomial(n, {e: v for e, v in c[i][lz].items() if not any(e[j] for j in zs)})
            fi = fi + Polynomial.variable(n, lz) * base
            for mz in zs:
                slope = c[i][lz].coefficient(tuple(int(j == mz) for j in range(n)))
                fi = fi + Polynomial.variable(n, lz) * Polynomial.variable(n, mz) * (slope / 2)
        f.append(fi)
    t = [Polynomial.variable(n, i) for i in range(k)]
    zeta = w_new
    for ti, hi in zip(t, f):
        zeta = zeta - wedge(differential(ti), differential(hi))
    block = set(range(2 * k))
    if zeta.differentials_used() - block or zeta.variables_used() - block or not is_closed(zeta):
        raise ZetaNotReduced("assembled zeta is not a closed form in the (x, y) block")
    return change, w_new, t, f, zeta, directions


def normal_form(w: DifferentialForm) -> tuple[DarbouxNormalForm, DarbouxTrace]:
    check_degree_one_closed(w)
    n = w.n
    k = class_of_two_form(w)
    p0 = find_regular_point(w, k)
    base, k_local = darboux_basis_at(w, p0)
    if k_local != k:
        raise AlgorithmFailure(f"rank at the regular point is {2 * k_local}, expected {2 * k}")

    first = canonical_split(base.to_new(w), k)
    if first.bars_zero and n > 2 * k:
        w_new = base.to_new(w)
        if w_new.variables_used() - set(range(2 * k)):
            raise ZetaNotReduced("pullback case has coefficients outside the (x, y) block")
        nf = DarbouxNormalForm(LINEAR_PULLBACK, n, k, base, eta=w_new.restrict_to(range(2 * k)))
        return nf, DarbouxTrace(p0, base, k, w_new, (), first)

    last_error = None
    for swapped in _swap_candidates(k, first):
        change = base.then(swap_change(n, k, swapped)) if swapped else base
        w_new = change.to_new(w)
        split = first if not swapped else canonical_split(w_new, k)
        try:
            a, t, h, zeta_full, extra = _contact_sum(w_new, k, split)
        except NoCoupling as exc:
            last_error = exc
            continue
        nf = DarbouxNormalForm(
            CONTACT_SUM, n, k, change, zeta=zeta_full.restrict_to(range(2 * k)), t=tuple(t), h=tuple(h)
        )
        trace = DarbouxTrace(
            p0,
            change,
            k,
            w_new,
            tuple(swapped),
            split,
            coupling=tuple(tuple(row) for row in a),
            beta=tuple(extra["beta"]),
            mu=tuple(extra["mu"]),
            f_eta=tuple(extra["f_eta"]),
            f_pi=tuple(h),
            gamma=tuple(extra["gamma"]),
            delta=tuple(extra["delta"]),
        )
        return nf, trace

    # Every swap failed: the mixed block is not a constant combination of the
    # pi_bar_j (this happens when they are wedge-dependent, e.g. n = 2k + 1).
    # Look for the z-directions directly instead.
    found = _rank_locus_sum(w, k)
    if found is None:
        raise last_error
    change, w_new, t, h, zeta_full, directions = found
    nf = DarbouxNormalForm(
        CONTACT_SUM, n, k, change, zeta=zeta_full.restrict_to(range(2 * k)), t=tuple(t), h=tuple(h)
    )
    trace = DarbouxTrace(
        p0,
        change,
        k,
        w_new,
        (),
        canonical_split(w_new, k),
        f_pi=tuple(h),
        route="rank-locus",
        directions=tuple(tuple(v) for v in directions),
    )
    return nf, trace


def reconstruct(nf: DarbouxNormalForm) -> DifferentialForm:
    n, k = nf.n, nf.k
    P = projection(n, 2 * k)
    if nf.variant == LINEAR_PULLBACK:
        if nf.eta is None or nf.eta.n != 2 * k:
            raise InvalidInput("malformed LinearPullback normal form")
        return nf.change.to_old(pullback_linear(nf.eta, P))
    if nf.variant == CONTACT_SUM:
        if nf.zeta is None or nf.zeta.n != 2 * k or len(nf.t) != len(nf.h):
            raise InvalidInput("malformed ContactSum normal form")
        total = pullback_linear(nf.zeta, P)
        for ti, hi in zip(nf.t, nf.h):
            total = total + wedge(differential(ti), differential(hi))
        return nf.change.to_old(total)
    raise InvalidInput(f"unknown variant {nf.variant!r}")


def structural_violations(nf: DarbouxNormalForm) -> list[str]:
    """Shape requirements of a normal form that reconstruction alone does not see."""
    m = 2 * nf.k
    block = set(range(m))
    bad = []
    if nf.variant == LINEAR_PULLBACK:
        if nf.eta is None or nf.eta.n != m or nf.eta.coefficient_degrees() - {1}:
            bad.append("eta must be a linear-coefficient 2-form on the block")
        return bad
    if nf.zeta is None or nf.zeta.n != m:
        return ["zeta missing or of the wrong size"]
    if nf.zeta and (nf.zeta.coefficient_degrees() != {1} or not is_closed(nf.zeta)):
        bad.append("zeta must be closed with linear coefficients")
    if len(nf.t) != nf.k or len(nf.h) != nf.k:
        bad.append(f"expected {nf.k} pairs (t_i, h_i)")
    for i, (t, h) in enumerate(zip(nf.t, nf.h), 1):
        if not (t.is_homogeneous() and t.degree() == 1) or t.variables_used() - block:
            bad.append(f"t_{i} is not a linear form in x, y")
        if h and not (h.is_homogeneous() and h.degree() == 2):
            bad.append(f"h_{i} is not a quadratic form")
    return bad


def certified_normal_form(w: DifferentialForm) -> tuple[DarbouxNormalForm, DarbouxTrace]:
    """normal_form followed by the exact reconstruction check."""
    nf, trace = normal_form(w)
    if reconstruct(nf) != w:
        raise ReconstructionMismatch("normal form does not reconstruct the input")
    return nf, trace


def medeiros_decompose(w: DifferentialForm) -> tuple[Polynomial, Polynomial]:
    """Quadratic q and linear t with dq ^ dt = w, for decomposable w."""
    check_degree_one_closed(w)
    if wedge(w, w):
        raise NotDecomposable("w ^ w is not zero")
    nf, _ = normal_form(w)
    n = w.n
    x, y = Polynomial.variable(n, 0), Polynomial.variable(n, 1)
    if nf.variant == CONTACT_SUM and nf.t[0]:
        t1 = nf.t[0]
        b = t1.coefficient(tuple(int(i == 1) for i in range(n)))
        t_new = t1 if b else x
    else:
        # w = (a x + b y) dx ^ dy in the block
        g = (nf.eta if nf.variant == LINEAR_PULLBACK else nf.zeta).coefficient((0, 1))
        t_new = y if g.coefficient((0, 1)) else x
    t = nf.change.poly_to_old(t_new)
    q = _potential_along(w, t)
    if wedge(differential(q), differential(t)) != w:
        raise ReconstructionMismatch("dq ^ dt does not reproduce w")
    return q, t


def _potential_along(w: DifferentialForm, t: Polynomial) -> Polynomial:
    """Given w = alpha ^ dt, return q with dq ^ dt = w."""
    n = w.n
    dt = differential(t)
    if wedge(w, dt):
        raise AlgorithmFailure("w does not have dt as a factor")
    if not dt:
        raise InvalidInput("t must be a non-constant linear polynomial")
    j = min(dt.differentials_used())
    comp = dt.coefficient((j,)).constant_term()
    V = VectorField(tuple(Polynomial.constant(n, Fraction(1) / comp if i == j else 0) for i in range(n)))
    alpha = -interior_product(V, w)
    dalpha = exterior_derivative(alpha)
    lam = -interior_product(V, dalpha) if dalpha else DifferentialForm.zero(n, 1)
    if wedge(lam, dt) != dalpha:
        raise AlgorithmFailure("d(alpha) is not divisible by dt")
    ell = Polynomial.linear([lam.coefficient((i,)).constant_term() for i in range(n)])
    closed = alpha - dt * ell
    if not closed:
        return Polynomial.zero(n)
    return euler_primitive(closed).coefficient(())


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def random_closed_linear_two_form(rng, m: int, density: float = 0.6) -> DifferentialForm:
    """d of a random 1-form with quadratic coefficients: closed, linear coefficients."""
    return exterior_derivative(random_form(rng, m, 1, 2, density=density))


def random_normal_form_instance(rng, n: int, k: int, change: bool = True, theta_part: bool = True):
    """A random degree-one closed 2-form of class k built as
    L*(pi* theta + sum_{i<=k} dt_i ^ dh_i).  Returns (w, ground_truth dict).

    When n >= 2k + 2 and the h_i are generic, class k forces theta into the
    ideal generated by the dt_i, so theta is drawn as d(sum_i g_i dt_i) with
    g_i quadratic in the block; otherwise theta is an arbitrary closed form.
    """
    if 2 * k > n:
        raise InvalidInput("need 2k <= n")
    m = 2 * k
    P = projection(n, m)
    for _ in range(64):
        ts = [Polynomial.linear([rng.randint(-2, 2) for _ in range(m)] + [0] * (n - m)) for _ in range(k)]
        if not theta_part:
            theta = DifferentialForm.zero(m, 2)
        elif n <= m + 1:
            theta = random_closed_linear_two_form(rng, m)
        else:
            theta = DifferentialForm.zero(m, 2)
            for ti in ts:
                g = random_polynomial(rng, m, 2, density=0.5, homogeneous=True, lo=-2, hi=2)
                theta = theta + wedge(differential(g), differential(ti.restrict(range(m))))
        hs = [random_polynomial(rng, n, 2, density=0.4, homogeneous=True, lo=-3, hi=3) for _ in range(k)]
        w0 = pullback_linear(theta, P)
        for ti, hi in zip(ts, hs):
            w0 = w0 + wedge(differential(ti), differential(hi))
        L = random_linear_change(rng, n, -2, 2) if change else LinearChange.identity(n)
        w = L.to_old(w0)
        if not w or w.coefficient_degrees() != {1}:
            continue
        if class_of_two_form(w) == k:
            return w, {"theta": theta, "t": ts, "h": hs, "change": L}
    raise AlgorithmFailure("could not draw a class-k instance")

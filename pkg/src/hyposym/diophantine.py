"""Exact number theory behind the resonance analysis.

Everything here runs in exact arithmetic (big integers, rationals,
quadratic surds, rational intervals); floating point appears only in
reports.  Provided operations:

* continued fractions of rationals, quadratic surds (with period
  detection), and decimal enclosures (certified common prefix),
* Pell equation solutions u^2 - D m^2 = 1 (fundamental solution from the
  continued fraction of sqrt(D), then the standard composition recurrence),
* certified minima of |xi + c eta| (1+|xi|+|eta|)^{-N} over lattice balls,
* Liouville-witness searches (evidence, never proof, unless the input is an
  exact series with a supplied tail enclosure),
* classification of an operator coefficient into the three arms that decide
  the degree-one torus operator: nonzero imaginary part, exact rational,
  or irrational with approximation-quality evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, log
from statistics import median

from .errors import PreconditionError, PrecisionError
from .exact import Enclosure, RealSpec, Surd, is_square

__all__ = [
    "ContinuedFraction",
    "PellSolution",
    "TorusGainResult",
    "Classification",
    "continued_fraction",
    "pell_solutions",
    "torus_min_gain",
    "liouville_witnesses",
    "classify_coefficient",
]


# ---------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients and convergents of a real number.

    ``period`` is (start, length) in quotient indices when the expansion is
    eventually periodic (quadratic surds).  ``complete`` marks a fully
    expanded rational.  ``limited_by_precision`` marks an enclosure whose
    certified common prefix ran out before the requested term count.
    """

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    period: tuple[int, int] | None = None
    complete: bool = False
    limited_by_precision: bool = False

    def value(self) -> Fraction:
        p, q = self.convergents[-1]
        return Fraction(p, q)


def _convergents(quotients) -> tuple[tuple[int, int], ...]:
    out = []
    p1, q1 = 1, 0  # h_{-1}
    p2, q2 = 0, 1  # h_{-2}
    for a in quotients:
        p, q = a * p1 + p2, a * q1 + q2
        out.append((p, q))
        p2, q2, p1, q1 = p1, q1, p, q
    return tuple(out)


def _euclid_quotients(x: Fraction, n_terms: int):
    quotients = []
    num, den = x.numerator, x.denominator
    while den != 0 and len(quotients) < n_terms:
        a = num // den
        quotients.append(a)
        num, den = den, num - a * den
    return quotients, den == 0


def _cmp_sqrt(d: int, t: int) -> int:
    """Sign of sqrt(d) - t for nonsquare d."""
    if t < 0:
        return 1
    return 1 if t * t < d else -1


def _floor_quad(p: int, d: int, q: int) -> int:
    """floor((p + sqrt(d)) / q) exactly; d positive nonsquare, q != 0."""
    s = isqrt(d)
    n = (p + s) // q

    def at_most(k: int) -> bool:
        # k <= (p + sqrt(d)) / q ?
        t = k * q - p
        c = _cmp_sqrt(d, t)
        return c >= 0 if q > 0 else c <= 0

    while not at_most(n):
        n -= 1
    while at_most(n + 1):
        n += 1
    return n


def _surd_quotients(x: Surd, n_terms: int):
    """PQa expansion of a quadratic surd with period detection."""
    r = x.a.denominator * x.b.denominator
    p = x.a.numerator * (r // x.a.denominator)
    b = x.b.numerator * (r // x.b.denominator)
    d = b * b * x.d
    if b < 0:
        p, r = -p, -r
    if (d - p * p) % r != 0:
        p, d, r = p * abs(r), d * r * r, r * abs(r)

    quotients: list[int] = []
    seen: dict[tuple[int, int], int] = {}
    period = None
    while len(quotients) < n_terms:
        state = (p, r)
        if state in seen:
            start = seen[state]
            period = (start, len(quotients) - start)
            cycle = quotients[start:]
            while len(quotients) < n_terms:
                quotients.append(cycle[(len(quotients) - start) % len(cycle)])
            break
        seen[state] = len(quotients)
        a = _floor_quad(p, d, r)
        quotients.append(a)
        p = a * r - p
        r = (d - p * p) // r
    return quotients, period


def continued_fraction(c: RealSpec, n_terms: int) -> ContinuedFraction:
    """Exact continued fraction of ``c`` with up to ``n_terms`` quotients.

    Rationals terminate naturally; quadratic surds are exact with period
    detection; enclosures emit only quotients certified identical for both
    endpoints and stop there.
    """
    if n_terms < 1:
        raise PreconditionError("need at least one quotient")
    if isinstance(c, Fraction):
        quotients, complete = _euclid_quotients(c, n_terms)
        return ContinuedFraction(
            tuple(quotients), _convergents(quotients), complete=complete
        )
    if isinstance(c, Surd):
        quotients, period = _surd_quotients(c, n_terms)
        return ContinuedFraction(tuple(quotients), _convergents(quotients), period)
    if isinstance(c, Enclosure):
        qlo, lo_done = _euclid_quotients(c.lo, n_terms + 1)
        qhi, hi_done = _euclid_quotients(c.hi, n_terms + 1)
        common = []
        for a, b in zip(qlo, qhi):
            if a != b:
                break
            common.append(a)
        if not common:
            raise PrecisionError(
                "enclosure too wide to certify the first partial quotient"
            )
        limited = len(common) < n_terms and not (
            lo_done and hi_done and common == qlo == qhi
        )
        common = common[:n_terms]
        return ContinuedFraction(
            tuple(common),
            _convergents(common),
            complete=False,
            limited_by_precision=limited,
        )
    raise PreconditionError(f"not a real spec: {c!r}")


# ---------------------------------------------------------------------------
# Pell equation


@dataclass(frozen=True)
class PellSolution:
    """Positive solution of u^2 - D m^2 = 1, validated on construction."""

    u: int
    m: int
    d: int

    def __post_init__(self):
        if self.u * self.u - self.d * self.m * self.m != 1:
            raise ValueError(f"not a Pell solution: {self}")

    def singular_twice_ell(self) -> int:
        """The level 2*ell = u - 1 where ell(ell+1) = 2 m^2 (for D = 8)."""
        return self.u - 1


def pell_solutions(d: int, count: int) -> list[PellSolution]:
    """First ``count`` solutions of u^2 - D m^2 = 1 in increasing u.

    The fundamental solution is read off the continued fraction of sqrt(D)
    (period-end convergent; squared when the period is odd) and further
    solutions follow the composition rule u' = u1 u + D m1 m,
    m' = m1 u + u1 m.
    """
    if count < 1:
        raise PreconditionError("count must be at least 1")
    if d <= 0 or is_square(d):
        raise PreconditionError("D must be a positive nonsquare integer")

    root = Surd.make(0, 1, d)
    terms = 16
    cf = continued_fraction(root, terms)
    while cf.period is None:
        terms *= 2
        cf = continued_fraction(root, terms)
    start, length = cf.period
    need = start + 2 * length + 2
    if len(cf.quotients) < need:
        cf = continued_fraction(root, need)

    # the fundamental solution is the first convergent solving the equation
    fundamental = None
    for u, m in cf.convergents:
        if u * u - d * m * m == 1 and m > 0:
            fundamental = (u, m)
            break
    if fundamental is None:  # unreachable: a solution sits at the period end
        raise PreconditionError(f"no fundamental solution found for D={d}")

    u1, m1 = fundamental
    out = [PellSolution(u1, m1, d)]
    u, m = u1, m1
    for _ in range(count - 1):
        u, m = u1 * u + d * m1 * m, m1 * u + u1 * m
        out.append(PellSolution(u, m, d))
    return out


# ---------------------------------------------------------------------------
# certified lattice minima


@dataclass(frozen=True)
class TorusGainResult:
    """Certified minimum of |xi + c eta| (1+|xi|+|eta|)^{-N} over a ball."""

    argmin: tuple[int, int]
    objective_lo: Fraction
    objective_hi: Fraction
    gain_lo: Fraction
    gain_hi: Fraction
    exponent: int
    radius: int
    exact_objective: Fraction | Surd | None = None
    exact_gain: Fraction | Surd | None = None

    @property
    def objective(self) -> float:
        return float((self.objective_lo + self.objective_hi) / 2)

    @property
    def gain(self) -> float:
        return float((self.gain_lo + self.gain_hi) / 2)

    def is_zero(self) -> bool:
        return self.exact_gain == 0


def _ball(radius: int):
    for xi in range(-radius, radius + 1):
        rem = radius - abs(xi)
        for eta in range(-rem, rem + 1):
            if xi or eta:
                yield xi, eta


def _half_ball(radius: int):
    # one representative per mirror pair {(xi,eta), (-xi,-eta)}: the
    # objective is even under the mirror, so the other half carries nothing
    for xi, eta in _ball(radius):
        if eta > 0 or (eta == 0 and xi > 0):
            yield xi, eta


def _weight(xi: int, eta: int, exponent: int) -> Fraction:
    s = 1 + abs(xi) + abs(eta)
    if exponent >= 0:
        return Fraction(1, s**exponent)
    return Fraction(s ** (-exponent))


def _bounds(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, Fraction):
        return x, x
    return x.enclosure()


def torus_min_gain(c: RealSpec, radius: int, exponent: int = 0) -> TorusGainResult:
    """Exact minimum of |xi + c eta| (1+|xi|+|eta|)^{-N} over 0 < |xi|+|eta| <= radius.

    ``c`` must be a real spec (the nonzero-imaginary-part case is decided
    upstream and never reaches this search).  Rational and quadratic-surd
    coefficients give a fully exact answer; enclosures are accepted only
    when they order every candidate (exact ties other than the mirror pair
    (-xi,-eta) therefore need exact input), otherwise a ``PrecisionError``
    asks for more precision.  Exact ties prefer the smallest |xi|+|eta|,
    then the lexicographically smallest pair.
    """
    if not isinstance(c, (Fraction, Surd, Enclosure)):
        raise PreconditionError("torus gain search takes a real coefficient spec")
    if radius < 1:
        raise PreconditionError("radius must be at least 1")
    if not isinstance(exponent, int):
        raise PreconditionError("exponent must be an integer for exact weights")

    if isinstance(c, (Fraction, Surd)):
        best = None
        for xi, eta in _ball(radius):
            gain = abs(xi + c * eta)
            obj = gain * _weight(xi, eta, exponent)
            tie = (abs(xi) + abs(eta), (xi, eta))
            if best is None or obj < best[0] or (obj == best[0] and tie < best[1]):
                best = (obj, tie, gain, (xi, eta))
        obj, _, gain, arg = best
        olo, ohi = _bounds(obj)
        glo, ghi = _bounds(gain)
        return TorusGainResult(
            argmin=arg,
            objective_lo=olo,
            objective_hi=ohi,
            gain_lo=glo,
            gain_hi=ghi,
            exponent=exponent,
            radius=radius,
            exact_objective=obj,
            exact_gain=gain,
        )

    # enclosure coefficient: interval objective per mirror representative
    entries = []
    for xi, eta in _half_ball(radius):
        vlo, vhi = xi + c.lo * eta, xi + c.hi * eta  # eta > 0 except on the axis
        if eta == 0:
            vlo = vhi = Fraction(xi)
        if vlo >= 0:
            alo, ahi = vlo, vhi
        elif vhi <= 0:
            alo, ahi = -vhi, -vlo
        else:
            alo, ahi = Fraction(0), max(-vlo, vhi)
        w = _weight(xi, eta, exponent)
        entries.append((alo * w, ahi * w, alo, ahi, (xi, eta)))

    cand = min(entries, key=lambda e: (e[1], abs(e[4][0]) + abs(e[4][1]), e[4]))
    for other in entries:
        if other[4] != cand[4] and other[0] < cand[1]:
            raise PrecisionError(
                "enclosure too wide to order candidates; widen the coefficient"
            )
    pair = min(cand[4], (-cand[4][0], -cand[4][1]))
    return TorusGainResult(
        argmin=pair,
        objective_lo=cand[0],
        objective_hi=cand[1],
        gain_lo=cand[2],
        gain_hi=cand[3],
        exponent=exponent,
        radius=radius,
    )


# ---------------------------------------------------------------------------
# Liouville witnesses and coefficient classification


def _abs_error_bounds(c: RealSpec, p: int, q: int):
    """Bounds on |c - p/q|: (lo, hi) as Fractions (lo may be 0)."""
    target = Fraction(p, q)
    if isinstance(c, Fraction):
        e = abs(c - target)
        return e, e
    if isinstance(c, Surd):
        e = abs(c - target)
        lo, hi = e.enclosure() if isinstance(e, Surd) else (e, e)
        return max(lo, Fraction(0)), hi
    lo_err = c.lo - target
    hi_err = c.hi - target
    if lo_err >= 0:
        return lo_err, hi_err
    if hi_err <= 0:
        return -hi_err, -lo_err
    return Fraction(0), max(-lo_err, hi_err)


def _exact_error_less_than(c, p: int, q: int, bound: Fraction) -> bool:
    """Certified |c - p/q| < bound (surds compared exactly)."""
    if isinstance(c, Surd):
        diff = abs(c - Fraction(p, q))
        return diff < bound
    _, hi = _abs_error_bounds(c, p, q)
    return hi < bound


def liouville_witnesses(
    c: RealSpec,
    n_max: int,
    q_bound: int,
    *,
    q_min: int = 3,
    n_floor: int = 3,
) -> list[dict]:
    """Convergents approximating ``c`` to super-quadratic order.

    A witness is a convergent p/q with q in [q_min, q_bound] certified to
    satisfy |c - p/q| < q^{-N}; its ``n_achieved`` is the largest such
    N <= n_max.  Only witnesses with n_achieved >= n_floor are reported:
    every irrational has quality-2 convergents (and trivial hits at q <= 2),
    so smaller exponents carry no Liouville signal.  An empty list is
    evidence (not proof) of non-Liouville behavior on the searched range.
    """
    if isinstance(c, Fraction):
        raise PreconditionError("coefficient is rational; witnesses need an irrational")
    if not isinstance(c, (Surd, Enclosure)):
        raise PreconditionError("liouville search takes a real coefficient spec")
    if n_max < n_floor:
        raise PreconditionError(f"n_max must be at least {n_floor}")

    n_terms = 32
    cf = continued_fraction(c, n_terms)
    while cf.convergents[-1][1] <= q_bound:
        if cf.complete or cf.limited_by_precision or len(cf.quotients) < n_terms:
            break
        n_terms *= 2
        cf = continued_fraction(c, n_terms)

    witnesses = []
    for p, q in cf.convergents:
        if q < q_min or q > q_bound:
            continue
        achieved = 0
        for n in range(n_floor, n_max + 1):
            if _exact_error_less_than(c, p, q, Fraction(1, q**n)):
                achieved = n
            else:
                break
        if achieved >= n_floor:
            _, hi = _abs_error_bounds(c, p, q)
            witnesses.append(
                {"p": p, "q": q, "n_achieved": achieved, "err_hi": float(hi)}
            )
    return witnesses


@dataclass(frozen=True)
class Classification:
    """Exact classification of an operator coefficient.

    kind is one of ``im_nonzero``, ``rational``, ``irrational_evidence``.
    The first two arms are exact; the third carries the estimated
    irrationality exposure mu_hat fitted from convergent quality.
    """

    kind: str
    p: int | None = None
    q: int | None = None
    mu_hat: float | None = None
    note: str | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.p is not None:
            out["p"], out["q"] = self.p, self.q
        if self.mu_hat is not None:
            out["mu_hat"] = self.mu_hat
        if self.note:
            out["note"] = self.note
        return out


def _split_complex(c):
    if isinstance(c, tuple) and len(c) == 2:
        return c[0], c[1]
    if isinstance(c, complex):
        return c.real, c.imag
    if isinstance(c, (int, float, Fraction, Surd, Enclosure)):
        return c, 0
    raise PreconditionError(f"cannot classify coefficient {c!r}")


def _estimate_mu(cf: ContinuedFraction) -> float | None:
    qs = [q for _, q in cf.convergents]
    mus = [
        1.0 + log(qs[k + 1]) / log(qs[k])
        for k in range(len(qs) - 1)
        if qs[k] >= 10
    ]
    if not mus:
        return None
    return float(median(mus[-5:]))


def classify_coefficient(c) -> Classification:
    """Sort a coefficient into the arms that decide the torus operator.

    Floats are classified as the exact binary rational they denote (a float
    cannot witness irrationality); pass a surd or enclosure spec to get
    irrationality evidence.
    """
    re_part, im_part = _split_complex(c)

    im_zero = (isinstance(im_part, float) and im_part == 0.0) or im_part == 0
    if not im_zero:
        return Classification(kind="im_nonzero")

    if isinstance(re_part, float):
        f = Fraction(re_part)
        return Classification(
            kind="rational",
            p=f.numerator,
            q=f.denominator,
            note="float literal treated as its exact binary value",
        )
    if isinstance(re_part, (int, Fraction)):
        f = Fraction(re_part)
        return Classification(kind="rational", p=f.numerator, q=f.denominator)
    if isinstance(re_part, Surd):
        cf = continued_fraction(re_part, 48)
        return Classification(kind="irrational_evidence", mu_hat=_estimate_mu(cf))
    if isinstance(re_part, Enclosure):
        if re_part.lo == re_part.hi:
            f = re_part.lo
            return Classification(kind="rational", p=f.numerator, q=f.denominator)
        try:
            cf = continued_fraction(re_part, 48)
        except PrecisionError:
            return Classification(
                kind="irrational_evidence",
                note="enclosure too wide to certify any convergent",
            )
        return Classification(
            kind="irrational_evidence",
            mu_hat=_estimate_mu(cf),
            note="evidence from the certified prefix of an enclosure",
        )
    raise PreconditionError(f"cannot classify coefficient {c!r}")

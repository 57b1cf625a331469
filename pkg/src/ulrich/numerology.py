"""Closed-form cohomology numerology for Ulrich bundles on (P^n, O(d)).

Every value here is exact. Where a formula forces a dimension that is not a
nonnegative integer, the result carries an IntegralityViolation instead of
raising: such a violation means no Ulrich bundle with those parameters exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .arith import gen_binomial


@dataclass(frozen=True)
class UlrichContext:
    n: int
    d: int
    r: int

    def __post_init__(self):
        for name in ("n", "d", "r"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "r": self.r}

    @classmethod
    def from_json(cls, data: dict) -> UlrichContext:
        return cls(int(data["n"]), int(data["d"]), int(data["r"]))

    def __str__(self):
        return f"(n={self.n}, d={self.d}, r={self.r})"


@dataclass(frozen=True)
class IntegralityViolation:
    """A forced dimension that is negative or not an integer."""

    what: str
    index: int
    value: Fraction

    @property
    def reason(self) -> str:
        return "non-integral" if self.value.denominator != 1 else "negative"

    def __str__(self):
        return f"{self.what}={self.index}: forced value {self.value} is {self.reason}"

    def to_json(self) -> dict:
        return {"what": self.what, "index": self.index, "value": str(self.value),
                "reason": self.reason}


@dataclass(frozen=True)
class CohomologyProfile:
    """h^0..h^n of one twist. On a violation the offending raw value is kept."""

    ctx: UlrichContext
    twist: int
    values: tuple
    violation: IntegralityViolation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    @property
    def nonzero_degree(self) -> int | None:
        nz = [q for q, v in enumerate(self.values) if v]
        return nz[0] if len(nz) == 1 else None

    @property
    def is_natural(self) -> bool:
        return sum(1 for v in self.values if v) <= 1


@dataclass(frozen=True)
class ResolutionSignature:
    ctx: UlrichContext
    ranks: tuple
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def alternating_sum(self):
        return sum((-1) ** j * a for j, a in enumerate(self.ranks))

    def expected_pointwise_ranks(self) -> tuple[int, ...]:
        """rho_j = a_{j+1} - a_{j+2} + ... for j = 1..n-1."""
        a = self.ranks
        n = len(a)
        return tuple(sum((-1) ** (k - j - 1) * a[k] for k in range(j + 1, n))
                     for j in range(n - 1))


def _as_count(value: Fraction, what: str, index: int):
    if value.denominator != 1 or value < 0:
        return value, IntegralityViolation(what, index, value)
    return int(value), None


def bott_dimension(n: int, p: int, q: int, t: int) -> int:
    """h^q(P^n, Omega^p(t))."""
    if not (0 <= p <= n and 0 <= q <= n):
        raise ValueError(f"need 0 <= p, q <= n, got n={n}, p={p}, q={q}")
    if q == 0 and t > p:
        return comb(t + n - p, t) * comb(t - 1, p)
    if t == 0 and p == q:
        return 1
    if q == n and t < p - n:
        return comb(-t + p, -t) * comb(-t - 1, n - p)
    return 0


def bott_euler(n: int, p: int, t: int) -> int:
    return sum((-1) ** q * bott_dimension(n, p, q, t) for q in range(n + 1))


def chi_ulrich(ctx: UlrichContext, p: int) -> Fraction:
    """chi(E(p)) = r d^n binom(p/d + n, n)."""
    return ctx.r * ctx.d ** ctx.n * gen_binomial(Fraction(p, ctx.d) + ctx.n, ctx.n)


def ulrich_degree(ctx: UlrichContext, t: int) -> int | None:
    """The only q with h^q(E(t)) possibly nonzero; None on the vanishing twists."""
    n, d = ctx.n, ctx.d
    if t > -d:
        return 0
    if t < -n * d:
        return n
    if t % d == 0:
        return None
    return (-t) // d


def ulrich_profile(ctx: UlrichContext, t: int) -> CohomologyProfile:
    values = [0] * (ctx.n + 1)
    q = ulrich_degree(ctx, t)
    violation = None
    if q is not None:
        values[q], violation = _as_count((-1) ** q * chi_ulrich(ctx, t), "twist", t)
    return CohomologyProfile(ctx, t, tuple(values), violation)


def chi_omega(ctx: UlrichContext, i: int, j: int) -> Fraction:
    """chi(E(i) (x) Omega^j(j))."""
    n, d, r = ctx.n, ctx.d, ctx.r
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    total = Fraction(0)
    for k in range(j + 1):
        total += (-1) ** (j - k) * comb(n + 1, k) * gen_binomial(Fraction(i + j - k, d) + n, n)
    return r * d ** n * total


def omega_degree(ctx: UlrichContext, i: int) -> int:
    # -(q+1)d < i <= -qd, clamped to [0, n]
    return min(max((-i) // ctx.d, 0), ctx.n)


def omega_profile(ctx: UlrichContext, i: int, j: int) -> CohomologyProfile:
    chi = chi_omega(ctx, i, j)
    values = [0] * (ctx.n + 1)
    violation = None
    if chi:
        q = omega_degree(ctx, i)
        values[q], violation = _as_count((-1) ** q * chi, "twist", i)
    return CohomologyProfile(ctx, i, tuple(values), violation)


def resolution_ranks(ctx: UlrichContext) -> ResolutionSignature:
    """The ranks a_1..a_n of the linear resolution of E(-d)."""
    n, d, r = ctx.n, ctx.d, ctx.r
    ranks = []
    bad = []
    for j in range(1, n + 1):
        s = Fraction(0)
        for k in range(j + 1):
            s += (-1) ** (j - k) * comb(n + 1, k) * gen_binomial(Fraction(j - k, d) + n - 1, n)
        a, v = _as_count(-r * d ** n * s, "j", j)
        ranks.append(a)
        if v:
            bad.append(v)
    return ResolutionSignature(ctx, tuple(ranks), tuple(bad))


def first_chern_from_ranks(ranks, r: int, d: int) -> Fraction:
    """c_1(E) read off the resolution: sum_j (-1)^j j a_j + r d."""
    return sum((-1) ** j * j * a for j, a in enumerate(ranks, start=1)) + r * d


def rank2_chern(n: int, d: int) -> tuple[int, Fraction]:
    if n < 2:
        raise ValueError(f"rank-2 Chern classes need n >= 2, got {n}")
    c1 = (n + 1) * (d - 1)
    c2 = Fraction((n + 1) * (d - 1), 12) * ((3 * n + 4) * d - (3 * n + 2))
    return c1, c2


def rank2_obstructed(n: int, d: int) -> bool:
    return rank2_chern(n, d)[1].denominator != 1


def rank1_classify(n: int, d: int) -> int | None:
    """The twist a with O(a) Ulrich for (P^n, O(d)), or None if none exists.

    For n >= 2 both coefficient equations are checked exactly rather than
    assuming the known answer.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n, d >= 1, got n={n}, d={d}")
    if n == 1:
        return d - 1
    twice_a = (n + 1) * (d - 1)
    if twice_a % 2:
        return None
    a = twice_a // 2
    return a if d ** n == comb(a + n, n) else None


@dataclass(frozen=True)
class ForcedZeroRegion:
    """Twists forced to vanish once h^{q0}(E(i0)) != 0 is known."""

    q0: int
    i0: int

    def contains(self, q: int, i: int) -> bool:
        s, s0 = q + i, self.q0 + self.i0
        return (q <= self.q0 - 1 and s <= s0) or (q >= self.q0 + 1 and s >= s0)

    def __contains__(self, qi) -> bool:
        return self.contains(*qi)

    __call__ = contains


def forced_zeros(ctx: UlrichContext, q0: int, i0: int) -> ForcedZeroRegion:
    if not 0 <= q0 <= ctx.n:
        raise ValueError(f"need 0 <= q0 <= n, got q0={q0}")
    return ForcedZeroRegion(q0, i0)

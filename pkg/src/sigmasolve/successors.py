"""Child generation: which prime powers can start a deeper residual.

A node only needs children for residuals with at least two distinct primes
and at least three prime factors counted with multiplicity; smaller
residuals are resolved in closed form at the node itself.  The candidate
set Q of smallest-prime-factor powers is produced either by the prime
wheel (a sliding window of consecutive admissible primes whose products
bound any remaining residual from below) or, when gcd(a, c) > 1, by
jumping through the largest prime power of that gcd, which must divide
every residual.

All bound comparisons are exact integer comparisons; the residual bound
U/m is never materialized as a float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from . import numtheory as nt
from .model import NodeState, legendre_rejects


@dataclass
class WheelState:
    """Window of consecutive admissible primes with cached products.

    prod_p and prod_pm1 are the products of p and (p - 1) over the window,
    maintained incrementally; ell_bigomega is the active lower bound on the
    number of prime factors (with multiplicity) of the residual.
    """

    primes: list[int]
    ell_bigomega: int
    prod_p: int = field(init=False)
    prod_pm1: int = field(init=False)

    def __post_init__(self):
        self.prod_p = 1
        self.prod_pm1 = 1
        for p in self.primes:
            self.prod_p *= p
            self.prod_pm1 *= p - 1

    @property
    def first(self) -> int:
        return self.primes[0]

    def __len__(self) -> int:
        return len(self.primes)

    def grow(self, next_prime: int) -> None:
        self.primes.append(next_prime)
        self.prod_p *= next_prime
        self.prod_pm1 *= next_prime - 1

    def roll(self, next_prime: int) -> None:
        head = self.primes.pop(0)
        self.prod_p //= head
        self.prod_pm1 //= head - 1
        self.grow(next_prime)

    def min_residual(self, squared: bool) -> int:
        """Exact lower bound for any matching residual.

        The window primes bound the distinct prime factors from below; the
        multiplicity surplus contributes extra factors of at least the
        window head.  In the odd-square regime every distinct prime appears
        at least squared.
        """
        if squared:
            surplus = max(0, self.ell_bigomega - 2 * len(self.primes))
            return self.prod_p * self.prod_p * self.first**surplus
        surplus = max(0, self.ell_bigomega - len(self.primes))
        return self.prod_p * self.first**surplus


def _bump(counters: dict | None, key: str) -> None:
    if counters is not None:
        counters[key] = counters.get(key, 0) + 1


def _tau_allows_deep_residual(d: int) -> bool:
    # residual with omega >= 2 and bigomega >= 3 exists iff d is composite
    # and not 4 (4 = 2*2 only fits two distinct primes, exponent 1 each)
    if d < 6 or nt.is_prime(d):
        return False
    return True


def _exponent_filters_reject(
    s: NodeState,
    p: int,
    t: int,
    residual_odd: bool,
    counters: dict | None,
) -> bool:
    """Per-exponent pruning shared by the wheel and the gcd jump."""
    cons = s.cons
    if cons.squarefree and t != 1:
        return True
    if cons.numdiv is not None:
        if cons.numdiv % (t + 1) != 0:
            return True
        if cons.numdiv % 2 == 1 and t % 2 == 1:
            return True  # odd divisor count forces a perfect square
    if cons.bigomega_max is not None and t > cons.bigomega_max - 1:
        return True  # at least one more prime beyond p**t is required
    if p != 2:
        if s.sigma_always_odd() and t % 2 == 1:
            return True  # odd-prime exponents must be even in a (2)square
        if residual_odd and s.odd_residuals_are_squares():
            if t % 2 == 1:
                return True
            if legendre_rejects(s.a, s.b, s.c, p, t):
                _bump(counters, "legendre_pruned")
                return True
    else:
        if s.sigma_always_odd() and legendre_rejects(s.a, s.b, s.c, 2, t):
            _bump(counters, "legendre_pruned")
            return True
    return False


def wheel_successors(
    s: NodeState, counters: dict | None = None
) -> list[tuple[int, int]]:
    """Feasible (p, t) with p the residual's smallest prime factor.

    Per window position: stop when the window's lower bound exceeds the
    residual bound; grow the window when the sigma-ratio upper bound
    a * prod_p / prod_pm1 falls below the attainable ratio b + c/n'; else
    emit powers of the window head and roll.
    """
    cons = s.cons
    if cons.omega_max is not None and cons.omega_max < 2:
        return []
    if cons.bigomega_max is not None and cons.bigomega_max < 3:
        return []
    if cons.numdiv is not None and not _tau_allows_deep_residual(cons.numdiv):
        return []

    need_even = s.residual_must_be_even()
    odd_square_regime = s.odd_residuals_are_squares()
    ell = max(2, cons.omega_min if cons.omega_min is not None else 0)
    if cons.squarefree:
        ell = max(ell, 3)  # squarefree: omega equals bigomega >= 3
    ell_bigomega = max(3, cons.bigomega_min if cons.bigomega_min is not None else 0)

    stream = _admissible_primes(s)
    wheel = WheelState([next(stream) for _ in range(ell)], ell_bigomega)
    out: list[tuple[int, int]] = []

    while True:
        p = wheel.first
        if need_even and p != 2:
            break  # an even residual must start with the prime 2
        squared = odd_square_regime and p > 2
        min_res = wheel.min_residual(squared)
        if min_res * s.m > s.bound:  # min residual exceeds U/m: stop
            break

        # grow when a * P0/P1 < b + c/n_bound (cross-multiplied)
        if s.c >= 0:
            # L = b + c/U' with U' = bound/m
            grow = (
                s.a * wheel.prod_p * s.bound
                < wheel.prod_pm1 * (s.b * s.bound + s.c * s.m)
            )
        else:
            grow = s.a * wheel.prod_p * min_res < wheel.prod_pm1 * (
                s.b * min_res + s.c
            )
        if grow:
            if cons.omega_max is not None and len(wheel) + 1 > cons.omega_max:
                break  # residual would need more distinct primes than allowed
            wheel.grow(next(stream))
            continue

        t_cap = 1 + nt.ilog_floor(p, s.bound, s.m * wheel.prod_p)
        for t in range(1, t_cap + 1):
            if not _exponent_filters_reject(s, p, t, p > 2, counters):
                out.append((p, t))
        if need_even:
            break
        wheel.roll(next(stream))
    return out


def gcd_jump_successors(
    s: NodeState, counters: dict | None = None
) -> list[tuple[int, int]]:
    """Children through the largest prime power of g = gcd(a, c) > 1.

    Every residual is divisible by g, so with p**e the largest prime power
    in g the residual's p-valuation is at least e and at most
    e + log_p(U'/g).  These descents say nothing about the smallest prime
    factor, which is why the node's min_prime survives unchanged.
    """
    cons = s.cons
    g = gcd(s.a, s.c)
    fact = nt.factorize(g)
    p, e = max(fact, key=lambda pe: pe[0] ** pe[1])
    if cons.squarefree and e > 1:
        return []
    if g * s.m > s.bound:
        return []  # the forced divisor alone exceeds the residual bound
    residual_odd = s.residual_known_odd()
    t_cap = e + nt.ilog_floor(p, s.bound, s.m * g)
    out: list[tuple[int, int]] = []
    for t in range(e, t_cap + 1):
        if not _exponent_filters_reject(s, p, t, residual_odd, counters):
            out.append((p, t))
    return out


def successors(
    s: NodeState, counters: dict | None = None
) -> list[tuple[int, int]]:
    """Dispatch between the wheel and the gcd jump for a reduced node."""
    if gcd(s.a, s.c) > 1:
        return gcd_jump_successors(s, counters)
    return wheel_successors(s, counters)


def _admissible_primes(s: NodeState):
    for p in nt.prime_stream(s.min_prime):
        if s.m % p != 0 and s.cons.admits_prime(p):
            yield p

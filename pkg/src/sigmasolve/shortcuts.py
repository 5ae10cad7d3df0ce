"""Closed-form solution finders at a node.

A node with value m and reduced coefficients (a, b, c) owns every solution
n = m * n' whose residual n' has at most one distinct prime factor or at
most two prime factors with multiplicity.  These are found directly, never
by walking children:

  * n' = 1        iff a = b + c
  * n' = p**k     candidate primes p divide a - c (or come from the prime
                  power factors of a when a = c)
  * n' = p * q    by completing the rectangle (Ap+B)(Aq+B) = B**2 - A*C

Each hit is verified by exact evaluation of the node equation before it is
returned; constraint handling here is a prefilter only, the engine applies
the authoritative check at emission time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import numtheory as nt
from .model import InfiniteFamily, NodeState, legendre_rejects
from .numtheory import Factorization


@dataclass(frozen=True)
class ShortcutHit:
    """A residual value solving the node equation, with its factorization."""

    n_prime: int
    fact: Factorization
    method: str


@dataclass(frozen=True)
class RectangleCoefficients:
    """Coefficients of A*p*q + B*p + B*q + C = 0, the n' = p*q form."""

    A: int
    B: int
    C: int

    @classmethod
    def from_node(cls, a: int, b: int, c: int) -> "RectangleCoefficients":
        A, B, C = a - b, a, a - c
        g = gcd(gcd(abs(A), B), abs(C))
        if g > 1:
            A, B, C = A // g, B // g, C // g
        return cls(A, B, C)

    def evaluate(self, p: int, q: int) -> int:
        return self.A * p * q + self.B * p + self.B * q + self.C


def node_equation_holds(s: NodeState, n_prime_sigma: int, n_prime: int) -> bool:
    return s.a * n_prime_sigma == s.b * n_prime + s.c


def solve_unit(s: NodeState) -> ShortcutHit | None:
    """n' = 1, i.e. the node value m itself solves the original equation."""
    if not s.cons.permits_shape(0, 0, 1):
        return None
    if s.residual_must_be_even():
        return None
    if s.a == s.b + s.c:
        return ShortcutHit(1, (), "unit")
    return None


def _prime_power_filters_reject(
    s: NodeState, p: int, k: int, counters: dict | None
) -> bool:
    # the residual here is exactly p**k, so an odd p means an odd residual
    if p != 2 and s.odd_residuals_are_squares():
        if k % 2 == 1:
            return True
        if legendre_rejects(s.a, s.b, s.c, p, k):
            if counters is not None:
                counters["legendre_pruned"] = counters.get("legendre_pruned", 0) + 1
            return True
    if p == 2 and s.sigma_always_odd():
        if legendre_rejects(s.a, s.b, s.c, 2, k):
            if counters is not None:
                counters["legendre_pruned"] = counters.get("legendre_pruned", 0) + 1
            return True
    return False


def solve_prime_power(
    s: NodeState, counters: dict | None = None
) -> list[ShortcutHit]:
    """All residuals n' = p**k solving the node equation.

    Reducing the node equation mod p forces p | a - c.  When a = c the
    exponent is pinned instead: ((a-b)*p + b) * p**(k-1) = a, so k - 1 is
    the p-adic valuation of a.  The a = b = c case is handled upstream by
    configuration reduction and cannot appear here.
    """
    cons = s.cons
    if cons.omega_min is not None and cons.omega_min > 1:
        return []
    if cons.omega_max is not None and cons.omega_max < 1:
        return []
    hits: list[ShortcutHit] = []

    def try_candidate(p: int, k: int) -> None:
        if not s.admissible_prime(p):
            return
        if s.residual_must_be_even() and p != 2:
            return
        if cons.squarefree and k > 1:
            return
        if not cons.permits_shape(1, k, k + 1):
            return
        if _prime_power_filters_reject(s, p, k, counters):
            return
        q = p**k
        sig = nt.sigma(((p, k),))
        if node_equation_holds(s, sig, q):
            hits.append(ShortcutHit(q, ((p, k),), "prime_power"))

    if s.a != s.c:
        for p, _ in nt.factorize(s.a - s.c):
            k_cap = 1 + nt.ilog_floor(p, s.bound, s.m)
            for k in range(1, k_cap + 1):
                try_candidate(p, k)
    else:
        # a = c with a != b: k = 1 is impossible, higher exponents are
        # pinned by the prime power factors of a
        for p, e in nt.factorize(s.a):
            try_candidate(p, e + 1)
    return hits


def solve_semiprime(
    s: NodeState, counters: dict | None = None
) -> tuple[list[ShortcutHit], InfiniteFamily | None]:
    """All residuals n' = p*q (p < q prime) plus a possible infinite family.

    With A = a - b, B = a, C = a - c the node equation for n' = p*q is
    A*p*q + B*p + B*q + C = 0.  For A = 0 the pair sums to a constant D;
    otherwise (A*p + B)(A*q + B) = B**2 - A*C and divisor pairs of the
    right-hand side (both signs) enumerate every candidate.  A vanishing
    right-hand side with -B/A prime means every admissible partner prime
    works: that is reported as a family, not enumerated.
    """
    cons = s.cons
    if not cons.permits_shape(2, 2, 4):
        return [], None
    rect = RectangleCoefficients.from_node(s.a, s.b, s.c)
    A, B, C = rect.A, rect.B, rect.C
    hits: list[ShortcutHit] = []

    def try_pair(p: int, q: int) -> None:
        # p < q guaranteed by callers; p = q belongs to the prime power case
        if not (s.admissible_prime(p) and s.admissible_prime(q)):
            return
        if s.residual_must_be_even() and p != 2:
            return
        if not (nt.is_prime(p) and nt.is_prime(q)):
            return
        sig = (p + 1) * (q + 1)
        if node_equation_holds(s, sig, p * q):
            hits.append(ShortcutHit(p * q, ((p, 1), (q, 1)), "semiprime"))

    if A == 0:
        if C % B != 0:
            return hits, None
        d_sum = -C // B
        if d_sum >= 5:
            for p in nt.primes_upto((d_sum - 1) // 2):
                if not s.admissible_prime(p):
                    continue
                try_pair(p, d_sum - p)
        return hits, None

    n_rect = B * B - A * C
    if n_rect == 0:
        family = None
        if (-B) % A == 0:
            p = -B // A
            if p >= 2 and s.admissible_prime(p) and nt.is_prime(p):
                excluded = frozenset(pp for pp, _ in s.m_fact) | {p}
                if cons.coprime_to > 1:
                    excluded |= frozenset(
                        pp for pp, _ in nt.factorize(cons.coprime_to)
                    )
                family = InfiniteFamily(
                    multiplier=s.m * p,
                    p_min=s.min_prime,
                    excluded_primes=excluded,
                )
        return hits, family

    for d in nt.divisor_iter(abs(n_rect)):
        for d1 in (d, -d):
            d2 = n_rect // d1
            if (d1 - B) % A != 0 or (d2 - B) % A != 0:
                continue
            p = (d1 - B) // A
            q = (d2 - B) // A
            if p < 2 or q <= p:
                continue
            try_pair(p, q)
    return hits, None

"""Data model for the search: equations, node states, constraints, outcomes.

A node of the search tree carries reduced coefficients (a, b, c), the node
value m with its factorization, the global bound U (the residual bound U/m
is always handled as the exact pair (U, m)), an inclusive lower bound
`min_prime` on the smallest prime factor of the residual, and the residual
constraint record.

All types are immutable values and safe to ship between worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd

from . import numtheory as nt
from .numtheory import Factorization


class InvalidEquationError(ValueError):
    """The coefficient triple cannot be handled by this solver."""


class UnsatisfiableConstraintsError(ValueError):
    """The constraint set admits no integer at all."""


# machine-readable reason codes for pruned subtrees
GCD_CONFLICT = "gcd-conflict"
PARITY_CONFLICT = "parity-conflict"
TAU_INDIVISIBLE = "tau-indivisible"
RANGE_EMPTY = "range-empty"


@dataclass(frozen=True)
class Equation:
    """User-level equation a*sigma(n) = b*n + c searched for n <= limit."""

    a: int
    b: int
    c: int
    limit: int

    def normalized(self) -> "Equation":
        a, b, c = self.a, self.b, self.c
        if a <= 0:
            raise InvalidEquationError(
                "coefficient a must be positive (negate all three "
                "coefficients to flip the sign convention)"
            )
        if b == 0:
            raise InvalidEquationError(
                "b = 0 asks for preimages of the divisor sum; "
                "use a dedicated inverse-sigma tool for that case"
            )
        g = gcd(gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        if self.limit < 1:
            raise InvalidEquationError("search limit must be >= 1")
        return Equation(a, b, c, self.limit)

    def holds_for(self, n: int, sigma_n: int) -> bool:
        return self.a * sigma_n == self.b * n + self.c


@dataclass(frozen=True)
class Constraints:
    """Restrictions on admissible n, also used for per-node residuals.

    At a node the instance describes what is still required of the residual
    part n' = n/m: the omega/bigomega bounds and numdiv are residual values,
    even_only is satisfied as soon as m itself is even, and squarefree /
    coprime_to apply verbatim at every level.
    """

    squarefree: bool = False
    even_only: bool = False
    coprime_to: int = 1
    omega_min: int | None = None
    omega_max: int | None = None
    bigomega_min: int | None = None
    bigomega_max: int | None = None
    numdiv: int | None = None

    def validate(self) -> None:
        if self.coprime_to < 1:
            raise UnsatisfiableConstraintsError("coprime_to must be >= 1")
        if (
            self.omega_min is not None
            and self.omega_max is not None
            and self.omega_min > self.omega_max
        ):
            raise UnsatisfiableConstraintsError("omega bounds are inverted")
        if (
            self.bigomega_min is not None
            and self.bigomega_max is not None
            and self.bigomega_min > self.bigomega_max
        ):
            raise UnsatisfiableConstraintsError("bigomega bounds are inverted")
        if self.numdiv is not None and self.numdiv < 1:
            raise UnsatisfiableConstraintsError("numdiv must be >= 1")
        if self.squarefree and self.numdiv is not None:
            d = self.numdiv
            if d & (d - 1):
                raise UnsatisfiableConstraintsError(
                    "a squarefree number has a power-of-two divisor count; "
                    f"numdiv={d} is unsatisfiable"
                )
        if self.even_only and self.coprime_to % 2 == 0:
            raise UnsatisfiableConstraintsError(
                "even_only conflicts with evenness of coprime_to"
            )

    # -- residual bookkeeping ------------------------------------------------

    def admits_prime(self, p: int) -> bool:
        return self.coprime_to % p != 0

    def descend(self, t: int) -> "Constraints | None":
        """Residual constraints after fixing one new prime with exponent t.

        Children of a node are generated only for residuals with at least
        two distinct primes and at least three prime factors counted with
        multiplicity (smaller residuals are handled in closed form at the
        node itself), so those floors are folded in before decrementing.
        Returns None when the prescribed divisor count cannot be split.
        """
        if self.numdiv is not None:
            if self.numdiv % (t + 1) != 0:
                return None
            numdiv = self.numdiv // (t + 1)
        else:
            numdiv = None
        omega_min = max(2, self.omega_min if self.omega_min is not None else 0) - 1
        bigomega_min = (
            max(3, self.bigomega_min if self.bigomega_min is not None else 0) - t
        )
        omega_max = None if self.omega_max is None else self.omega_max - 1
        bigomega_max = None if self.bigomega_max is None else self.bigomega_max - t
        if omega_max is not None and omega_max < max(0, omega_min):
            return None
        if bigomega_max is not None and bigomega_max < max(0, bigomega_min):
            return None
        return replace(
            self,
            omega_min=omega_min,
            omega_max=omega_max,
            bigomega_min=max(0, bigomega_min),
            numdiv=numdiv,
        )

    def permits_shape(self, n_omega: int, n_bigomega: int, n_tau: int) -> bool:
        """Can the residual have the given omega/bigomega/tau profile?"""
        if self.omega_min is not None and n_omega < self.omega_min:
            return False
        if self.omega_max is not None and n_omega > self.omega_max:
            return False
        if self.bigomega_min is not None and n_bigomega < self.bigomega_min:
            return False
        if self.bigomega_max is not None and n_bigomega > self.bigomega_max:
            return False
        if self.numdiv is not None and n_tau != self.numdiv:
            return False
        return True

    # -- final authoritative filter -------------------------------------------

    def accepts(self, n: int, fact: Factorization) -> bool:
        """Exact check of the *original* constraints against a full value n."""
        if self.even_only and n % 2 != 0:
            return False
        if self.coprime_to > 1 and gcd(n, self.coprime_to) != 1:
            return False
        if self.squarefree and any(e > 1 for _, e in fact):
            return False
        w = nt.omega(fact)
        if self.omega_min is not None and w < self.omega_min:
            return False
        if self.omega_max is not None and w > self.omega_max:
            return False
        big = nt.bigomega(fact)
        if self.bigomega_min is not None and big < self.bigomega_min:
            return False
        if self.bigomega_max is not None and big > self.bigomega_max:
            return False
        if self.numdiv is not None and nt.tau(fact) != self.numdiv:
            return False
        return True


@dataclass(frozen=True)
class NodeState:
    """One node of the search tree: equation residue plus bookkeeping."""

    a: int
    b: int
    c: int
    m: int
    m_fact: Factorization
    bound: int  # global U; the residual bound is exactly bound/m
    min_prime: int  # inclusive lower bound for spf of the residual
    cons: Constraints

    def residual_at_most(self, value: int) -> bool:
        """value <= U/m, exactly."""
        return value * self.m <= self.bound

    def admissible_prime(self, p: int) -> bool:
        return p >= self.min_prime and self.m % p != 0 and self.cons.admits_prime(p)

    def residual_must_be_even(self) -> bool:
        return self.cons.even_only and self.m % 2 != 0

    def residual_known_odd(self) -> bool:
        """True when no admissible residual can contain the prime 2."""
        return self.min_prime > 2 or self.m % 2 == 0 or self.cons.coprime_to % 2 == 0

    def odd_residuals_are_squares(self) -> bool:
        """Odd residual => sigma odd => odd square (a odd, b + c odd)."""
        return self.a % 2 == 1 and (self.b + self.c) % 2 == 1

    def sigma_always_odd(self) -> bool:
        """Residual is a square or twice a square (a, c odd, b even)."""
        return self.a % 2 == 1 and self.c % 2 == 1 and self.b % 2 == 0


def legendre_rejects(a: int, b: int, c: int, p: int, t: int) -> bool:
    """Quadratic-residue obstruction for p**t dividing a square-ish residual.

    Valid only when the residual times 2**-v2 is known to be a perfect
    square: then for every odd prime q dividing sigma(p**t) the value
    -b*c (times 2**(t mod 2) when p = 2) must be a quadratic residue
    mod q.  Returns True when some q rules the exponent out.
    """
    s = nt.sigma(((p, t),))
    arg = -b * c if p != 2 else -(2 ** (t % 2)) * b * c
    for q, _ in nt.factorize(s):
        if q != 2 and nt.legendre(arg, q) == -1:
            return True
    return False


@dataclass(frozen=True)
class Solution:
    n: int
    node_m: int
    method: str  # unit | prime_power | semiprime
    within_bound: bool

    def sort_key(self):
        return (self.n, self.node_m)


@dataclass(frozen=True)
class InfiniteFamily:
    """All m*q for primes q >= p_min outside `excluded_primes` solve Eq."""

    multiplier: int
    p_min: int
    excluded_primes: frozenset[int] = field(default_factory=frozenset)

    def members_upto(self, limit: int) -> list[int]:
        out = []
        q_max = limit // self.multiplier
        for q in nt.primes_upto(q_max) if q_max >= 2 else []:
            if q >= self.p_min and q not in self.excluded_primes:
                out.append(self.multiplier * q)
        return sorted(out)

    def smallest_members(self, count: int) -> list[int]:
        out = []
        stream = nt.prime_stream(self.p_min)
        while len(out) < count:
            q = next(stream)
            if q not in self.excluded_primes:
                out.append(self.multiplier * q)
        return out


@dataclass(frozen=True)
class Reduced:
    state: NodeState


@dataclass(frozen=True)
class NoSolutions:
    reason: str


@dataclass(frozen=True)
class FamilyFound:
    family: InfiniteFamily


ReduceOutcome = Reduced | NoSolutions | FamilyFound


def make_root(eq: Equation, cons: Constraints) -> NodeState:
    """Root node for a normalized equation."""
    min_prime = 2
    if cons.coprime_to % 2 == 0:
        min_prime = 3  # even residuals are impossible from the start
    return NodeState(
        a=eq.a,
        b=eq.b,
        c=eq.c,
        m=1,
        m_fact=(),
        bound=eq.limit,
        min_prime=min_prime,
        cons=cons,
    )


def reduce_config(s: NodeState) -> ReduceOutcome:
    """Normalize a node and classify it before any real work happens.

    Cancels the common factor of (a, b, c); detects the all-equal case
    (every admissible prime extends m to a solution); rejects nodes whose
    forced prime divisors of the residual are inadmissible, whose divisor
    budget cannot be met, or whose right-hand side is nonpositive across
    the whole residual range.
    """
    a, b, c = s.a, s.b, s.c
    g = gcd(gcd(a, b), c)
    if g > 1:
        a, b, c = a // g, b // g, c // g
        s = replace(s, a=a, b=b, c=c)

    if s.bound < s.m:
        return NoSolutions(RANGE_EMPTY)

    if s.residual_must_be_even() and not s.admissible_prime(2):
        return NoSolutions(PARITY_CONFLICT)

    # any solution residual is divisible by gcd(a, c)
    g_ac = gcd(a, c)
    if g_ac > 1:
        for q, _ in nt.factorize(g_ac):
            if not s.admissible_prime(q):
                return NoSolutions(GCD_CONFLICT)
        if not s.residual_at_most(g_ac):
            # the forced divisor alone exceeds the residual bound
            return NoSolutions(RANGE_EMPTY)

    if a == b == c:
        excluded = frozenset(p for p, _ in s.m_fact)
        if s.cons.coprime_to > 1:
            excluded |= frozenset(p for p, _ in nt.factorize(s.cons.coprime_to))
        return FamilyFound(
            InfiniteFamily(
                multiplier=s.m, p_min=s.min_prime, excluded_primes=excluded
            )
        )

    # a*sigma(n') is positive; if b*n' + c <= 0 across [1, U/m] nothing fits
    u_floor = s.bound // s.m
    if max(b + c, b * u_floor + c) <= 0:
        return NoSolutions(RANGE_EMPTY)

    return Reduced(s)


def child_state(s: NodeState, p: int, t: int, via_jump: bool = False) -> ReduceOutcome:
    """Descend from node m to node m * p**t and re-reduce.

    Wheel descents advance `min_prime` past p (the new residual's smallest
    prime factor must exceed p); gcd-jump descents leave it unchanged, since
    a jumped-to prime says nothing about the residual's smallest factor.
    """
    cons = s.cons.descend(t)
    if cons is None:
        return NoSolutions(TAU_INDIVISIBLE)
    q = p**t
    if via_jump:
        min_prime = s.min_prime
    else:
        excluded = [pp for pp, _ in s.m_fact] + [p]
        min_prime = nt.next_prime_excluding(p, excluded)
        while (
            s.cons.coprime_to > 1
            and s.cons.coprime_to % min_prime == 0
        ):
            min_prime = nt.next_prime_excluding(min_prime, excluded)
    child = NodeState(
        a=s.a * nt.sigma(((p, t),)),
        b=s.b * q,
        c=s.c,
        m=s.m * q,
        m_fact=nt.merge_factorizations(s.m_fact, ((p, t),)),
        bound=s.bound,
        min_prime=min_prime,
        cons=cons,
    )
    return reduce_config(child)

"""Search orchestration: tree traversal, parallel workers, result merging.

Node processing is a pure function of the node state, so any scheduling of
the frontier yields the same combined result; reports are merged with a
commutative, associative union and sorted at the end, making the output
bit-identical for every worker count.

There is no checkpointing and no way to extend a finished bound: raising U
requires a fresh run.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import gcd

from . import numtheory as nt
from . import shortcuts as sc
from . import successors as su
from .model import (
    Constraints,
    Equation,
    FamilyFound,
    InfiniteFamily,
    NodeState,
    NoSolutions,
    Reduced,
    Solution,
    make_root,
    reduce_config,
    child_state,
)

log = logging.getLogger(__name__)


@dataclass
class Stats:
    nodes: int = 0
    even_nodes: int = 0
    legendre_pruned: int = 0
    pruned: dict[str, int] = field(default_factory=dict)
    wall_time_s: float = 0.0
    workers: int = 1

    def add(self, other: "Stats") -> "Stats":
        merged = dict(self.pruned)
        for k, v in other.pruned.items():
            merged[k] = merged.get(k, 0) + v
        return Stats(
            nodes=self.nodes + other.nodes,
            even_nodes=self.even_nodes + other.even_nodes,
            legendre_pruned=self.legendre_pruned + other.legendre_pruned,
            pruned=merged,
            wall_time_s=self.wall_time_s + other.wall_time_s,
            workers=max(self.workers, other.workers),
        )


@dataclass
class PartialReport:
    """Mergeable accumulation of results from any subset of nodes."""

    solutions: dict[int, Solution] = field(default_factory=dict)
    extras: dict[int, Solution] = field(default_factory=dict)
    families: dict[tuple, InfiniteFamily] = field(default_factory=dict)
    stats: Stats = field(default_factory=Stats)

    def record(self, sol: Solution) -> None:
        target = self.solutions if sol.within_bound else self.extras
        prior = target.get(sol.n)
        if prior is None or sol.sort_key() < prior.sort_key():
            target[sol.n] = sol

    def record_family(self, fam: InfiniteFamily) -> None:
        key = (fam.multiplier, fam.p_min, tuple(sorted(fam.excluded_primes)))
        self.families.setdefault(key, fam)


def merge(r1: PartialReport, r2: PartialReport) -> PartialReport:
    out = PartialReport(stats=r1.stats.add(r2.stats))
    for src in (r1, r2):
        for sol in src.solutions.values():
            out.record(sol)
        for sol in src.extras.values():
            out.record(sol)
        for fam in src.families.values():
            out.record_family(fam)
    return out


@dataclass(frozen=True)
class SolutionReport:
    equation: Equation
    solutions: tuple[Solution, ...]
    extras: tuple[Solution, ...]
    families: tuple[InfiniteFamily, ...]
    stats: Stats

    def ns(self) -> list[int]:
        return [s.n for s in self.solutions]

    def all_values_upto(self, limit: int | None = None) -> list[int]:
        """Solution values including expanded family members, ascending."""
        cap = self.equation.limit if limit is None else limit
        values = {s.n for s in self.solutions if s.n <= cap}
        for fam in self.families:
            values.update(fam.members_upto(cap))
        return sorted(values)


@dataclass(frozen=True)
class VerifyResult:
    n: int
    holds: bool
    sigma_n: int
    lhs: int
    rhs: int


@dataclass(frozen=True)
class _RunContext:
    eq: Equation  # normalized
    cons: Constraints  # original user constraints, the authoritative filter
    strict: bool
    progress_every: int = 0


def verify(eq: Equation, n: int) -> VerifyResult:
    """Exact check of a*sigma(n) = b*n + c for a single n."""
    if n < 1:
        raise ValueError("n must be positive")
    eq = eq.normalized()
    sigma_n = nt.sigma(nt.factorize(n)) if n > 1 else 1
    lhs = eq.a * sigma_n
    rhs = eq.b * n + eq.c
    return VerifyResult(n=n, holds=lhs == rhs, sigma_n=sigma_n, lhs=lhs, rhs=rhs)


# --------------------------------------------------------------------------
# node processing

def _emit(
    hit: sc.ShortcutHit, state: NodeState, ctx: _RunContext, partial: PartialReport
) -> None:
    n = state.m * hit.n_prime
    fact = nt.merge_factorizations(state.m_fact, hit.fact)
    sigma_n = nt.sigma(fact)
    if not ctx.eq.holds_for(n, sigma_n):
        raise AssertionError(
            f"internal error: shortcut produced non-solution n={n} "
            f"at node m={state.m} via {hit.method}"
        )
    if not ctx.cons.accepts(n, fact):
        return
    within = n <= ctx.eq.limit
    if not within and ctx.strict:
        return
    partial.record(Solution(n=n, node_m=state.m, method=hit.method, within_bound=within))


def _admit_family(
    fam: InfiniteFamily, origin: str, ctx: _RunContext, partial: PartialReport
) -> None:
    """Validate a family against the original constraints, then record it.

    All members share the multiplier's profile, so most constraints hold
    for all members or none.  The exception is even_only with an odd
    multiplier, where only the q = 2 member can qualify; it is emitted as
    an ordinary solution instead of a family record.
    """
    cons = ctx.cons
    mult_fact = nt.factorize(fam.multiplier) if fam.multiplier > 1 else ()
    if cons.squarefree and any(e > 1 for _, e in mult_fact):
        return
    if cons.coprime_to > 1 and gcd(fam.multiplier, cons.coprime_to) != 1:
        return
    member_omega = nt.omega(mult_fact) + 1
    member_bigomega = nt.bigomega(mult_fact) + 1
    member_tau = nt.tau(mult_fact) * 2
    probe = Constraints(
        coprime_to=1,
        omega_min=cons.omega_min,
        omega_max=cons.omega_max,
        bigomega_min=cons.bigomega_min,
        bigomega_max=cons.bigomega_max,
        numdiv=cons.numdiv,
    )
    if not probe.permits_shape(member_omega, member_bigomega, member_tau):
        return
    if cons.even_only and fam.multiplier % 2 != 0:
        q = 2
        if q >= fam.p_min and q not in fam.excluded_primes:
            n = fam.multiplier * q
            fact = nt.merge_factorizations(mult_fact, ((2, 1),))
            if ctx.eq.holds_for(n, nt.sigma(fact)) and ctx.cons.accepts(n, fact):
                within = n <= ctx.eq.limit
                if within or not ctx.strict:
                    partial.record(
                        Solution(n=n, node_m=fam.multiplier, method=origin, within_bound=within)
                    )
        return
    # spot-verify the five smallest members before reporting
    sigma_mult = nt.sigma(mult_fact)
    for member in fam.smallest_members(5):
        q = member // fam.multiplier
        if not ctx.eq.holds_for(member, sigma_mult * (q + 1)):
            raise AssertionError(
                f"internal error: family {fam} fails at member {member}"
            )
    partial.record_family(fam)


def _process_node(
    state: NodeState, ctx: _RunContext, partial: PartialReport
) -> list[NodeState]:
    """Run shortcuts at a reduced node, then expand its children."""
    stats = partial.stats
    stats.nodes += 1
    if state.m % 2 == 0:
        stats.even_nodes += 1
    if ctx.progress_every and stats.nodes % ctx.progress_every == 0:
        log.info("nodes=%d current_subtree=m=%d", stats.nodes, state.m)

    counters: dict[str, int] = {}
    unit = sc.solve_unit(state)
    if unit is not None:
        _emit(unit, state, ctx, partial)
    for hit in sc.solve_prime_power(state, counters):
        _emit(hit, state, ctx, partial)
    pair_hits, pair_family = sc.solve_semiprime(state, counters)
    for hit in pair_hits:
        _emit(hit, state, ctx, partial)
    if pair_family is not None:
        _admit_family(pair_family, "semiprime", ctx, partial)

    children: list[NodeState] = []
    for p, t in sorted(su.successors(state, counters)):
        outcome = child_state(state, p, t, via_jump=gcd(state.a, state.c) > 1)
        if isinstance(outcome, Reduced):
            children.append(outcome.state)
        elif isinstance(outcome, FamilyFound):
            _admit_family(outcome.family, "prime_power", ctx, partial)
        elif isinstance(outcome, NoSolutions):
            stats.pruned[outcome.reason] = stats.pruned.get(outcome.reason, 0) + 1
    stats.legendre_pruned += counters.get("legendre_pruned", 0)
    return children


def _process_states(states: list[NodeState], ctx: _RunContext) -> PartialReport:
    partial = PartialReport()
    stack = list(states)
    while stack:
        stack.extend(_process_node(stack.pop(), ctx, partial))
    return partial


def _subtree_task(args: tuple[list[NodeState], _RunContext]) -> PartialReport:
    states, ctx = args
    return _process_states(states, ctx)


# --------------------------------------------------------------------------
# public entry point

def solve(
    eq: Equation,
    constraints: Constraints = Constraints(),
    *,
    strict: bool = True,
    workers: int = 1,
    progress_every: int = 0,
) -> SolutionReport:
    """All n <= U with a*sigma(n) = b*n + c under the given constraints.

    Solutions covered by an infinite family are reported as a family
    record, never enumerated.  With strict=False, solutions above U that
    the closed forms happen to produce are reported separately as extras.
    """
    t0 = time.perf_counter()
    eq = eq.normalized()
    constraints.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    ctx = _RunContext(eq=eq, cons=constraints, strict=strict, progress_every=progress_every)

    partial = PartialReport()
    root = reduce_config(make_root(eq, constraints))
    frontier: list[NodeState] = []
    if isinstance(root, Reduced):
        frontier.append(root.state)
    elif isinstance(root, FamilyFound):
        _admit_family(root.family, "prime_power", ctx, partial)
    else:
        partial.stats.pruned[root.reason] = 1

    if workers == 1:
        partial = merge(partial, _process_states(frontier, ctx))
    else:
        # expand breadth-first until there is enough independent work
        target = 4 * workers
        queue = list(frontier)
        while queue and len(queue) < target:
            state = queue.pop(0)
            queue.extend(_process_node(state, ctx, partial))
        if queue:
            tasks = [([state], ctx) for state in queue]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_subtree_task, tasks):
                    partial = merge(partial, part)

    stats = replace(
        partial.stats, wall_time_s=time.perf_counter() - t0, workers=workers
    )
    return SolutionReport(
        equation=eq,
        solutions=tuple(sorted(partial.solutions.values(), key=Solution.sort_key)),
        extras=tuple(sorted(partial.extras.values(), key=Solution.sort_key)),
        families=tuple(
            sorted(partial.families.values(), key=lambda f: (f.multiplier, f.p_min))
        ),
        stats=stats,
    )


def default_workers() -> int:
    """Worker count from the environment, falling back to the core count."""
    env = os.environ.get("SIGMASOLVE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1

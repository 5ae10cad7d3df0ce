"""Brute-force reference solver, deliberately simple and slow.

Divisor sums come from a classic divisor-iteration sieve, not from the
factorization machinery the engine uses, so the two code paths share no
arithmetic shortcuts.  Used for equivalence testing and CLI spot checks.
"""

from __future__ import annotations

import numpy as np

from .model import Constraints, Equation

DEFAULT_CEILING = 10**7


class OracleCeilingError(ValueError):
    """Requested bound exceeds the configured brute-force ceiling."""


class _Sieves:
    """Grow-only cache of prefix-stable sieve arrays up to some limit."""

    def __init__(self):
        self.limit = 0
        self.sigma = None
        self.tau = None
        self.omega = None
        self.bigomega = None
        self.squarefree = None

    def ensure(self, limit: int) -> None:
        if limit <= self.limit:
            return
        self.limit = limit
        self.sigma = _sigma_sieve(limit)
        self.tau = None
        self.omega = None
        self.bigomega = None
        self.squarefree = None

    def need_tau(self):
        if self.tau is None:
            self.tau = _tau_sieve(self.limit)
        return self.tau

    def need_omega(self):
        if self.omega is None:
            self.omega, self.bigomega = _omega_sieves(self.limit)
        return self.omega

    def need_bigomega(self):
        self.need_omega()
        return self.bigomega

    def need_squarefree(self):
        if self.squarefree is None:
            self.squarefree = _squarefree_sieve(self.limit)
        return self.squarefree


_sieves = _Sieves()


def _sigma_sieve(limit: int) -> np.ndarray:
    sigma = np.arange(limit + 1, dtype=np.int64)  # the divisor d = n itself
    sigma[0] = 0
    for d in range(1, limit // 2 + 1):
        sigma[2 * d :: d] += d
    return sigma


def _tau_sieve(limit: int) -> np.ndarray:
    tau = np.ones(limit + 1, dtype=np.int64)  # the divisor d = n itself
    tau[0] = 0
    for d in range(1, limit // 2 + 1):
        tau[2 * d :: d] += 1
    return tau


def _prime_mask(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def _omega_sieves(limit: int) -> tuple[np.ndarray, np.ndarray]:
    omega = np.zeros(limit + 1, dtype=np.int64)
    bigomega = np.zeros(limit + 1, dtype=np.int64)
    primes = np.nonzero(_prime_mask(limit))[0]
    for p in primes:
        omega[p::p] += 1
        pk = p
        while pk <= limit:
            bigomega[pk::pk] += 1
            pk *= p
    return omega, bigomega


def _squarefree_sieve(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in np.nonzero(_prime_mask(int(limit**0.5) + 1))[0]:
        mask[p * p :: p * p] = False
    return mask


def brute_solve(
    eq: Equation,
    constraints: Constraints = Constraints(),
    ceiling: int = DEFAULT_CEILING,
) -> list[int]:
    """Scan n = 1..U literally and return every match, ascending."""
    eq = eq.normalized()
    constraints.validate()
    limit = eq.limit
    if limit > ceiling:
        raise OracleCeilingError(
            f"oracle bound {limit} exceeds the ceiling {ceiling}"
        )
    _sieves.ensure(limit)
    # coefficients fitting comfortably in int64 with sigma <= ~6n
    if max(abs(eq.a), abs(eq.b), abs(eq.c)) * 8 * limit >= 2**62:
        raise OracleCeilingError("coefficients too large for the int64 sieve")

    n = np.arange(limit + 1, dtype=np.int64)
    mask = eq.a * _sieves.sigma[: limit + 1] == eq.b * n + eq.c
    mask[0] = False

    cons = constraints
    if cons.even_only:
        mask &= n % 2 == 0
    if cons.coprime_to > 1:
        mask &= np.gcd(n, np.int64(cons.coprime_to)) == 1
    if cons.squarefree:
        mask &= _sieves.need_squarefree()[: limit + 1]
    if cons.omega_min is not None:
        mask &= _sieves.need_omega()[: limit + 1] >= cons.omega_min
    if cons.omega_max is not None:
        mask &= _sieves.need_omega()[: limit + 1] <= cons.omega_max
    if cons.bigomega_min is not None:
        mask &= _sieves.need_bigomega()[: limit + 1] >= cons.bigomega_min
    if cons.bigomega_max is not None:
        mask &= _sieves.need_bigomega()[: limit + 1] <= cons.bigomega_max
    if cons.numdiv is not None:
        mask &= _sieves.need_tau()[: limit + 1] == cons.numdiv

    return [int(v) for v in np.nonzero(mask)[0]]


def sigma_upto(limit: int) -> np.ndarray:
    """The sieve's divisor sums for 0..limit (index = n)."""
    _sieves.ensure(limit)
    return _sieves.sigma[: limit + 1]

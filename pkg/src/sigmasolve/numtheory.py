"""Arbitrary-precision number-theoretic primitives.

Everything here is exact integer arithmetic; no floating point is used
anywhere, so comparisons feeding the search pruning cannot be wrong by
rounding.

Primality policy: below 2**64 we run Miller-Rabin with the first twelve
prime bases, which is a proven deterministic test in that range.  Above
2**64 we run Baillie-PSW (strong base-2 Miller-Rabin plus a strong Lucas
test with Selfridge parameters) followed by Miller-Rabin rounds for the
prime bases up to 97.  No composite passing that combination is known.
"""

from __future__ import annotations

import threading
from functools import lru_cache
from math import gcd, isqrt

try:  # mpz arithmetic speeds up the rho inner loop; plain ints work too
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int

Factorization = tuple[tuple[int, int], ...]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_64BIT_BASES = _SMALL_PRIMES  # deterministic for n < 2**64
_MR_EXTRA_BASES = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
_TWO_64 = 1 << 64

# published deterministic base sets for bounded inputs (Jaeschke; Sinclair)
_MR_TIERS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (9080191, (31, 73)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (4759123141, (2, 7, 61)),
    (1122004669633, (2, 13, 23, 1662803)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
)


class FactorizationBudgetError(RuntimeError):
    """A cofactor resisted factoring within the configured work budget."""


# --------------------------------------------------------------------------
# prime cache

class PrimeCache:
    """Growable prime list backed by a plain Eratosthenes sieve.

    Reads are lock-free (the list only ever grows); growth is serialized so
    concurrent callers cannot duplicate work.
    """

    def __init__(self, initial_limit: int = 1 << 16):
        self._lock = threading.Lock()
        self._limit = 0
        self._primes: list[int] = []
        self._grow(initial_limit)

    @property
    def limit(self) -> int:
        return self._limit

    def _grow(self, new_limit: int) -> None:
        with self._lock:
            if new_limit <= self._limit:
                return
            sieve = bytearray([1]) * (new_limit + 1)
            sieve[0:2] = b"\x00\x00"
            for p in range(2, isqrt(new_limit) + 1):
                if sieve[p]:
                    sieve[p * p :: p] = bytearray(len(range(p * p, new_limit + 1, p)))
            self._primes = [i for i in range(new_limit + 1) if sieve[i]]
            self._limit = new_limit

    def ensure(self, limit: int) -> None:
        if limit > self._limit:
            self._grow(max(limit, self._limit * 2))

    def primes_upto(self, limit: int) -> list[int]:
        self.ensure(limit)
        primes = self._primes
        # primes is append-only under the lock; slice by bisection
        lo, hi = 0, len(primes)
        while lo < hi:
            mid = (lo + hi) // 2
            if primes[mid] <= limit:
                lo = mid + 1
            else:
                hi = mid
        return primes[:lo]

    def iter_from(self, start: int):
        """Yield primes >= start, forever, growing the sieve as needed."""
        idx = 0
        primes = self._primes
        lo, hi = 0, len(primes)
        while lo < hi:
            mid = (lo + hi) // 2
            if primes[mid] < start:
                lo = mid + 1
            else:
                hi = mid
        idx = lo
        while True:
            if idx >= len(self._primes):
                self.ensure(self._limit * 2)
            yield self._primes[idx]
            idx += 1


_cache = PrimeCache()


# --------------------------------------------------------------------------
# primality

def _miller_rabin(n: int, base: int) -> bool:
    if base % n == 0:
        return True
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _lucas_strong_probable_prime(n: int) -> bool:
    # Selfridge method A: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    d = 5
    while True:
        j = jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -(d + 2) if d > 0 else -(d - 2)
    p, q = 1, (1 - d) // 4

    s = n + 1
    r = (s & -s).bit_length() - 1
    s >>= r

    # Lucas sequences U_k, V_k mod n by binary double-and-add; qk tracks Q^k.
    u, v, qk = 0, 2, 1
    for bit in bin(s)[2:]:
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (p * u + v) % n, (d * u + p * v) % n
            if u & 1:
                u += n
            if v & 1:
                v += n
            u, v = (u >> 1) % n, (v >> 1) % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(r - 1):
        v = (v * v - 2 * qk) % n
        if v == 0:
            return True
        qk = qk * qk % n
    return False


def is_prime(n: int) -> bool:
    """Deterministic below 2**64; Baillie-PSW plus extra rounds above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _TWO_64:
        for bound, bases in _MR_TIERS:
            if n < bound:
                return all(_miller_rabin(n, a) for a in bases)
        return all(_miller_rabin(n, a) for a in _MR_64BIT_BASES)
    if isqrt(n) ** 2 == n:
        return False
    if not _miller_rabin(n, 2):
        return False
    if not _lucas_strong_probable_prime(n):
        return False
    return all(_miller_rabin(n, a) for a in _MR_EXTRA_BASES)


def next_prime_excluding(n: int, excluded=()) -> int:
    """Smallest prime > n that is not in `excluded`."""
    skip = set(excluded)
    for p in _cache.iter_from(n + 1):
        if p not in skip:
            return p
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# factorization

_TRIAL_LIMIT = 2_048


def _pollard_brent(n: int, seed: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite n."""
    if n % 2 == 0:
        return 2
    n = mpz(n)
    y = mpz(seed % (n - 1) + 1)
    c = mpz((seed * seed + 1) % (n - 1) + 1)
    m = 128
    g = r = q = mpz(1)
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += m
        r <<= 1
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
    return int(g)


@lru_cache(maxsize=65536)
def factorize(n: int, budget: int | None = None) -> Factorization:
    """Complete prime factorization of |n| as ((p1, e1), (p2, e2), ...).

    `budget` caps the number of Pollard-rho restarts per stubborn cofactor;
    exceeding it raises FactorizationBudgetError rather than returning a
    partial answer.  The default (None) never gives up.
    """
    if n == 0:
        raise ValueError("0 has no prime factorization")
    n = abs(n)
    if n == 1:
        return ()
    out: dict[int, int] = {}
    for p in _cache.primes_upto(min(_TRIAL_LIMIT, isqrt(n))):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        if n < (_TRIAL_LIMIT + 1) ** 2 or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            _factor_hard(n, out, budget)
    return tuple(sorted(out.items()))


def _factor_hard(n: int, out: dict[int, int], budget: int | None) -> None:
    stack = [n]
    while stack:
        v = stack.pop()
        if is_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        root = isqrt(v)
        if root * root == v:
            stack.extend((root, root))
            continue
        attempts = 0
        f = v
        while f == v or f == 1:
            attempts += 1
            if budget is not None and attempts > budget:
                raise FactorizationBudgetError(
                    f"cofactor {v} not factored within {budget} rho restarts"
                )
            f = _pollard_brent(v, seed=attempts * 0x9E3779B9 + 1)
        stack.extend((f, v // f))


def refactor(f: Factorization) -> int:
    """Recombine a factorization into the integer it represents."""
    n = 1
    for p, e in f:
        n *= p**e
    return n


# --------------------------------------------------------------------------
# multiplicative functions

def sigma(f: Factorization) -> int:
    """Sum of divisors from a factorization."""
    s = 1
    for p, e in f:
        s *= (p ** (e + 1) - 1) // (p - 1)
    return s


def tau(f: Factorization) -> int:
    """Number of divisors from a factorization."""
    t = 1
    for _, e in f:
        t *= e + 1
    return t


def sigma_of(n: int) -> int:
    return sigma(factorize(n))


def omega(f: Factorization) -> int:
    return len(f)


def bigomega(f: Factorization) -> int:
    return sum(e for _, e in f)


def divisor_iter(n: int):
    """All positive divisors of n, in no particular order."""
    if n < 1:
        raise ValueError("divisors requires n >= 1")
    divs = [1]
    for p, e in factorize(n):
        pk = 1
        extended = []
        for _ in range(e):
            pk *= p
            extended.extend(d * pk for d in divs)
        divs.extend(extended)
    return divs


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    return sorted(divisor_iter(n))


def merge_factorizations(f: Factorization, g: Factorization) -> Factorization:
    """Union of two factorizations of coprime values (exponents add)."""
    out = dict(f)
    for p, e in g:
        out[p] = out.get(p, 0) + e
    return tuple(sorted(out.items()))


# --------------------------------------------------------------------------
# quadratic residues

def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi requires odd n > 0")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, q: int) -> int:
    """Legendre symbol (a/q) for an odd prime q; 0 iff q divides a."""
    if q == 2 or q < 2:
        raise ValueError("legendre requires an odd prime modulus")
    return jacobi(a, q)


# --------------------------------------------------------------------------
# exact logarithms and divisor-count search

def ilog_floor(base: int, num: int, den: int = 1) -> int:
    """Largest t with base**t <= num/den, computed exactly.

    The rational num/den must be >= 1.
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    if num < den or num <= 0 or den <= 0:
        raise ValueError("ilog_floor requires num/den >= 1")
    t = 0
    acc = den * base
    while acc <= num:
        acc *= base
        t += 1
    return t


def smallest_with_tau(d: int, limit: int | None = None) -> int | None:
    """Minimal n with exactly d divisors.

    Searches exponent patterns e1 >= e2 >= ... assigned to 2, 3, 5, ...,
    which is where the minimum must occur.  With `limit` set, returns None
    when the minimum exceeds it (and prunes the search accordingly).
    """
    if d < 1:
        raise ValueError("divisor count must be positive")
    # an exponent pattern has at most bit_length(d) parts (each factor >= 2)
    parts = max(1, d.bit_length())
    table_limit = 64
    while len(_cache.primes_upto(table_limit)) < parts:
        table_limit *= 2
    primes = _cache.primes_upto(table_limit)

    def rec(remaining: int, max_factor: int, idx: int, acc: int) -> int | None:
        if remaining == 1:
            return acc
        best = None
        f = min(remaining, max_factor)
        while f >= 2:
            if remaining % f == 0:
                if idx >= len(primes):
                    raise AssertionError("exponent pattern exceeds prime table")
                value = acc * primes[idx] ** (f - 1)
                if (limit is None or value <= limit) and (
                    best is None or value < best
                ):
                    sub = rec(remaining // f, f, idx + 1, value)
                    if sub is not None and (best is None or sub < best):
                        best = sub
            f -= 1
        return best

    result = rec(d, d, 0, 1)
    if limit is None and result is None:
        raise AssertionError("unbounded search must find a value")
    return result


def prime_stream(start: int, skip_divisors_of: int = 1):
    """Primes >= start, ascending, skipping divisors of `skip_divisors_of`."""
    for p in _cache.iter_from(start):
        if skip_divisors_of % p != 0:
            yield p


def primes_upto(limit: int) -> list[int]:
    return _cache.primes_upto(limit)

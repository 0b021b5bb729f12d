"""Prime tables and the cosine-weighted prime harmonic sum.

>>> table = sieve(30)
>>> table.primes.tolist()
[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
>>> primes_in_range(table, 7, 11).tolist()
[11]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ResourceError, TableTooSmallError
from .summation import csum

DEFAULT_SIEVE_CAP = 10**9
_SEGMENT_ODDS = 1 << 18


def _small_primes(limit):
    """Plain Eratosthenes up to ``limit``; used for the sieving primes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_odd_sieve(limit):
    base = _small_primes(math.isqrt(limit))[1:]  # odd sieving primes
    # index i of a segment stands for the odd number lo + 2*i
    chunks = [np.array([2], dtype=np.int64)]
    lo = 3
    while lo <= limit:
        hi = min(limit, lo + 2 * _SEGMENT_ODDS - 1)
        count = (hi - lo) // 2 + 1
        flags = np.ones(count, dtype=bool)
        for p in base:
            p = int(p)
            sq = p * p
            if sq > hi:
                break
            start = max(sq, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            flags[(start - lo) // 2 :: p] = False
        chunks.append(lo + 2 * np.flatnonzero(flags).astype(np.int64))
        lo = hi + 1 if hi % 2 == 0 else hi + 2
    return np.concatenate(chunks)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to and including ``limit``, ascending.

    The array is marked read-only, so a table can be shared freely.
    """

    limit: int
    primes: np.ndarray

    def __len__(self):
        return int(self.primes.size)

    def __contains__(self, n):
        n = int(n)
        if n > self.limit:
            raise TableTooSmallError(f"{n} exceeds table limit {self.limit}")
        i = int(np.searchsorted(self.primes, n))
        return i < self.primes.size and int(self.primes[i]) == n

    @cached_property
    def log_primes(self):
        out = np.log(self.primes.astype(np.float64))
        out.flags.writeable = False
        return out

    def index_range(self, lo, hi):
        """Slice bounds selecting ``lo < p <= hi``."""
        if hi > self.limit:
            raise TableTooSmallError(f"upper bound {hi} exceeds table limit {self.limit}")
        start = int(np.searchsorted(self.primes, math.floor(lo), side="right"))
        stop = int(np.searchsorted(self.primes, math.floor(hi), side="right"))
        return start, stop


def sieve(limit, cap=DEFAULT_SIEVE_CAP):
    """Return the :class:`PrimeTable` of primes ``<= limit``."""
    if int(limit) != limit:
        raise DomainError("sieve limit must be an integer")
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > cap:
        raise ResourceError(f"sieve limit {limit} exceeds cap {cap}")
    primes = _segmented_odd_sieve(limit) if limit >= 3 else np.array([2], dtype=np.int64)
    primes.flags.writeable = False
    return PrimeTable(limit=limit, primes=primes)


def primes_in_range(table, lo, hi):
    """Primes ``p`` with ``lo < p <= hi`` (strict below, inclusive above)."""
    if not lo < hi:
        raise DomainError(f"need lo < hi, got lo={lo}, hi={hi}")
    start, stop = table.index_range(lo, hi)
    return table.primes[start:stop]


@dataclass(frozen=True)
class MertensComparison:
    a: float
    z: float
    sum_value: float
    reference_value: float
    discrepancy: float


def mertens_reference(a, z):
    """Leading-order value of the cosine prime sum at frequency ``a``.

    ``log(min(1/|a|, log z))`` for ``|a| <= 1/100`` (``1/0`` read as
    infinity) and ``log log(2 + |a|)`` beyond; in the second regime it is
    only an upper-bound shape.
    """
    a = abs(a)
    if a <= 0.01:
        inv = math.inf if a == 0 else 1.0 / a
        return math.log(min(inv, math.log(z)))
    return math.log(math.log(2.0 + a))


def cos_prime_terms(table, a, z, descending=False):
    if not 2 <= z <= table.limit:
        raise DomainError(f"z must lie in [2, {table.limit}], got {z}")
    _, stop = table.index_range(0, z)
    p = table.primes[:stop].astype(np.float64)
    terms = np.cos(a * table.log_primes[:stop]) / p
    return terms[::-1] if descending else terms


def mertens_cos_sum(table, a, z):
    """Compare ``sum_{p<=z} cos(a log p)/p`` with its leading-order shape."""
    total = csum(cos_prime_terms(table, a, z))
    ref = mertens_reference(a, z)
    return MertensComparison(a=float(a), z=float(z), sum_value=total, reference_value=ref, discrepancy=total - ref)

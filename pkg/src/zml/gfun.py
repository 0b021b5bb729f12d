"""The multiplicative weight g(n) and integrals of cosine products.

For ``n = p_1^a_1 ... p_r^a_r``

    g(n) = prod_i binom(a_i, a_i/2) / 2^a_i     (every a_i even), else 0,

which is the mean value of ``prod_i cos(t log p_i)^a_i``. All of it is exact
rational arithmetic on ``fractions.Fraction``; floats appear only once an
integral over ``[T, 2T]`` is requested.

>>> from fractions import Fraction
>>> g_of_n(Factorization.from_int(36))
Fraction(1, 4)
>>> factorization_count_ratio([1, 1])
Fraction(3, 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvariantViolation, ResourceError
from .summation import csum

MAX_EXPONENT = 200
EXPANSION_DEGREE = 20
MAX_RIEMANN_POINTS = 2 * 10**7
_RIEMANN_CHUNK = 1 << 20


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


@dataclass(frozen=True)
class Factorization:
    """``n = prod p^a`` over distinct increasing primes.

    Entries from index ``doubled_split`` on carry frequency ``2 log p``
    rather than ``log p`` in the cosine products.
    """

    entries: tuple
    doubled_split: int | None = None

    def __post_init__(self):
        entries = tuple((int(p), int(a)) for p, a in self.entries)
        object.__setattr__(self, "entries", entries)
        last = 1
        for p, a in entries:
            if p <= last:
                raise DomainError("primes must be distinct and increasing")
            if not _is_prime(p):
                raise DomainError(f"{p} is not prime")
            if a < 1:
                raise DomainError(f"exponent of {p} must be >= 1, got {a}")
            last = p
        r = self.doubled_split
        if r is not None and not 0 <= r <= len(entries):
            raise DomainError(f"doubled_split must lie in [0, {len(entries)}], got {r}")

    @classmethod
    def from_int(cls, n, doubled_split=None):
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        entries = []
        d = 2
        while d * d <= n:
            if n % d == 0:
                a = 0
                while n % d == 0:
                    n //= d
                    a += 1
                entries.append((d, a))
            d += 1 if d == 2 else 2
        if n > 1:
            entries.append((n, 1))
        return cls(tuple(entries), doubled_split)

    @property
    def primes(self):
        return [p for p, _ in self.entries]

    @property
    def exponents(self):
        return [a for _, a in self.entries]

    @property
    def value(self):
        return math.prod(p**a for p, a in self.entries)

    @property
    def oversized(self):
        """True when ``n`` does not fit a signed 64-bit integer."""
        return self.value >= 2**63

    @property
    def multipliers(self):
        """Frequency multiple (1 or 2) of each entry."""
        r = len(self.entries) if self.doubled_split is None else self.doubled_split
        return [1 if i < r else 2 for i in range(len(self.entries))]

    @property
    def degree(self):
        return sum(self.exponents)


def _check_exponents(f):
    for p, a in f.entries:
        if a > MAX_EXPONENT:
            raise ResourceError(f"exponent {a} of {p} exceeds {MAX_EXPONENT}")


def g_prime_power(a):
    """``g(p^a)``, exact."""
    if a % 2:
        return Fraction(0)
    return Fraction(math.comb(a, a // 2), 2**a)


def g_of_n(f):
    _check_exponents(f)
    out = Fraction(1)
    for a in f.exponents:
        out *= g_prime_power(a)
        if out == 0:
            break
    return out


def error_product(f):
    """``n`` for plain frequencies, ``prod p^a * prod p^(2a)`` with a doubled split."""
    return math.prod(p ** (a * c) for (p, a), c in zip(f.entries, f.multipliers))


def cosine_product_integral_formula(T, f):
    """``(T g(n), error bound)`` for ``int_T^2T prod cos(c_i t log p_i)^a_i dt``."""
    g = g_of_n(f)
    return float(Fraction(T) * g), float(error_product(f))


@dataclass(frozen=True)
class CosineIntegral:
    value: float
    constant_part: float
    boundary_part: float
    boundary_bound: float
    terms: int
    method: str


def _expansion(f):
    """Frequencies and coefficients of the product expanded into exponentials."""
    omega = np.zeros(1)
    coef = np.ones(1)
    for (p, a), c in zip(f.entries, f.multipliers):
        b = np.arange(a, -a - 1, -2, dtype=np.float64)  # a - 2l, l = 0..a
        cb = np.array([math.comb(a, l) for l in range(a + 1)], dtype=np.float64) / 2.0**a
        omega = (omega[:, None] + c * math.log(p) * b[None, :]).ravel()
        coef = (coef[:, None] * cb[None, :]).ravel()
    return omega, coef


def _zero_frequency_mask(f):
    """Exact mask of the exponent vectors with every ``b_i = 0``."""
    mask = np.ones(1, dtype=bool)
    for a in f.exponents:
        b0 = np.arange(a, -a - 1, -2) == 0
        mask = (mask[:, None] & b0[None, :]).ravel()
    return mask


def _guard_collisions(f, omega, zero):
    # a nonzero exponent vector with total frequency 0 would need
    # prod p^(c b) = 1, impossible for distinct primes
    suspect = np.flatnonzero(~zero & (np.abs(omega) < 1e-6))
    if suspect.size == 0:
        return
    shape = tuple(a + 1 for a in f.exponents)
    for flat in suspect:
        ls = np.unravel_index(int(flat), shape)
        num = den = 1
        for (p, a), c, l in zip(f.entries, f.multipliers, ls):
            b = c * (a - 2 * int(l))
            if b > 0:
                num *= p**b
            elif b < 0:
                den *= p ** (-b)
        if num == den:
            raise InvariantViolation(f"zero total frequency from a nonzero exponent vector in {f}")


def _closed_form(T, f, gamma):
    omega, coef = _expansion(f)
    zero = _zero_frequency_mask(f)
    _guard_collisions(f, omega, zero)
    const = float(Fraction(T) * g_of_n(f))
    w = omega[~zero]
    cw = coef[~zero]
    parts = cw * (np.sin(w * (2.0 * T + gamma)) - np.sin(w * (T + gamma))) / w
    boundary = csum(parts)
    bound = csum(2.0 * cw / np.abs(w))
    return CosineIntegral(const + boundary, const, boundary, bound, int(omega.size), "closed_form")


def riemann_step(f):
    return min(1e-3, 1.0 / (50.0 * math.log(max(f.value, 2))))


def _riemann(T, f, gamma, max_points):
    h0 = riemann_step(f)
    n = math.ceil(T / h0)
    if n > max_points:
        raise ResourceError(f"Riemann sum needs {n} points, cap is {max_points}")
    h = T / n
    freqs = [(c * math.log(p), a) for (p, a), c in zip(f.entries, f.multipliers)]
    sums = []
    for lo in range(0, n, _RIEMANN_CHUNK):
        t = T + gamma + h * (np.arange(lo, min(n, lo + _RIEMANN_CHUNK)) + 0.5)
        y = np.ones_like(t)
        for w, a in freqs:
            y *= np.cos(w * t) ** a
        sums.append(csum(y))
    value = h * csum(sums)
    const = float(Fraction(T) * g_of_n(f))
    return CosineIntegral(value, const, value - const, math.nan, n, "riemann")


def cosine_product_integral_numeric(T, f, gamma=0.0, *, allow_riemann=True, max_points=MAX_RIEMANN_POINTS):
    """``int_T^2T prod cos(c_i (t + gamma) log p_i)^a_i dt``.

    Exact expansion into exponentials when the degree is at most
    ``EXPANSION_DEGREE``; a midpoint sum otherwise. Returns a
    :class:`CosineIntegral` whose ``value`` is the integral.
    """
    _check_exponents(f)
    if f.degree <= EXPANSION_DEGREE:
        return _closed_form(float(T), f, float(gamma))
    if not allow_riemann:
        raise ResourceError(f"degree {f.degree} exceeds {EXPANSION_DEGREE} and the Riemann path is disabled")
    return _riemann(float(T), f, float(gamma), max_points)


def factorization_count_ratio(alphas):
    """Ordered prime factorisations of ``prod p_j^(2 alpha_j)`` over those of ``prod p_j^alpha_j``.

    ``alphas`` are the multiplicities of the distinct primes; the ratio is
    ``(2n)!/prod (2 alpha_j)!`` divided by ``n!/prod alpha_j!``.
    """
    alphas = [int(a) for a in alphas]
    if not alphas or any(a < 1 for a in alphas):
        raise DomainError("multiplicities must be positive integers")
    n = sum(alphas)
    squares = Fraction(math.factorial(2 * n), math.prod(math.factorial(2 * a) for a in alphas))
    plain = Fraction(math.factorial(n), math.prod(math.factorial(a) for a in alphas))
    return squares / plain


def g_square_product(alphas):
    """``2^(-2n) prod (2 alpha_j)! / (alpha_j!)^2``."""
    n = sum(alphas)
    return Fraction(math.prod(math.factorial(2 * a) for a in alphas),
                    2 ** (2 * n) * math.prod(math.factorial(a) ** 2 for a in alphas))


def _first_primes(count):
    out = []
    n = 2
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n += 1
    return out


def g_square_identity_check(alphas, primes=None):
    """Exact check of ``g(p_1^2 ... p_n^2)`` against :func:`g_square_product`."""
    alphas = [int(a) for a in alphas]
    if primes is None:
        primes = _first_primes(len(alphas))
    f = Factorization(tuple(zip(primes, (2 * a for a in alphas))))
    return g_of_n(f) == g_square_product(alphas)


def c_weight(primes, T, beta):
    """Smoothed product weight of a prime tuple at smoothing length ``T^beta``."""
    log_x = beta * math.log(T)
    logp = np.log(np.asarray(primes, dtype=np.float64))
    if np.any(logp > log_x):
        raise DomainError("every prime must be <= T^beta")
    return float(np.prod(np.exp(-(0.5 + 1.0 / log_x) * logp) * (log_x - logp) / log_x))


def d_weight(primes):
    """``prod p^(-1/2)``, which dominates :func:`c_weight`."""
    return float(np.prod(np.asarray(primes, dtype=np.float64) ** -0.5))


def cos_square_product(gamma_minus, primes):
    """``prod cos(gamma_minus log p)^2``; nonnegative for every input."""
    c = np.cos(gamma_minus * np.log(np.asarray(primes, dtype=np.float64)))
    return float(np.prod(c * c))


def cos_product(gamma_minus, primes):
    """``prod cos(gamma_minus log p)`` over a tuple of primes (repeats allowed)."""
    return float(np.prod(np.cos(gamma_minus * np.log(np.asarray(primes, dtype=np.float64)))))


def random_square_factorization(rng, n_max=10**6, doubled=False):
    """A perfect square ``m^2 <= n_max`` with ``m >= 2`` drawn from ``rng``.

    With ``doubled`` the split point is drawn uniformly over the entries.
    """
    m = int(rng.integers(2, math.isqrt(n_max) + 1))
    f = Factorization.from_int(m * m)
    if doubled:
        return Factorization(f.entries, int(rng.integers(0, len(f.entries) + 1)))
    return f


def describe(f):
    """``2^2*3^2`` style text, with doubled entries marked ``[2x]``."""
    parts = []
    for (p, a), c in zip(f.entries, f.multipliers):
        parts.append(f"{p}^{a}" + ("[2x]" if c == 2 else ""))
    return "*".join(parts)

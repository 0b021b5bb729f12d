"""Riemann zeta on the critical line, Riemann-Siegel theta and Hardy's Z.

Below ``|t| = 30`` values come from Euler-Maclaurin summation; from 30 on
from the Riemann-Siegel formula with correction terms ``C_0 .. C_6``.

The corrections are ``C_n(p) = sum_k d_k^(n) Psi^(3n-4k)(p) / pi^(2n-2k)``
with ``Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)``. ``Psi`` is entire
(every pole of the denominator is cancelled by a zero of the numerator), so
each ``C_n`` is evaluated from a Taylor polynomial in ``z = p - 1/2`` whose
coefficients are generated once, at high precision, from the power series of
numerator and denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from numba import njit, prange

from .errors import AccuracyError, DomainError
from .summation import neumaier_add

CROSSOVER = 30.0
T_BUDGET = 1e9
DEFAULT_TARGET = 1e-8

# d_k^(n) for n = 0..6; entries n >= 5 were recovered by fitting the
# high-precision remainder and are checked by the error-scaling tests.
_D = (
    (Fraction(1),),
    (Fraction(-1, 96),),
    (Fraction(1, 18432), Fraction(1, 64)),
    (Fraction(-1, 5308416), Fraction(-1, 3840), Fraction(-1, 64)),
    (Fraction(1, 2038431744), Fraction(11, 5898240), Fraction(19, 24576), Fraction(1, 128)),
    (Fraction(-1, 96) ** 5 / 120, Fraction(-7, 849346560), Fraction(-901, 82575360), Fraction(-5, 3072)),
    (
        Fraction(1, 96) ** 6 / 720,
        Fraction(17, 652298158080),
        Fraction(18889, 237817036800),
        Fraction(367, 7864320),
        Fraction(5, 2048),
    ),
)
RS_TERMS = len(_D)
_POLY_LEN = 72
_SERIES_DEG = 130


@lru_cache(maxsize=1)
def rs_correction_polynomials():
    """Taylor coefficients of ``C_0..C_6`` in ``z = p - 1/2``.

    ``C_n`` is even in ``z`` for even ``n`` and odd for odd ``n``; row ``n``
    holds the coefficients of ``C_n(z) / z^(n mod 2)`` as a polynomial in
    ``z^2``, lowest degree first.
    """
    with mpmath.workdps(110):
        deg = _SERIES_DEG
        two_pi = 2 * mpmath.pi
        # Psi(z + 1/2) = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z)
        ca, sa = mpmath.cos(5 * mpmath.pi / 8), mpmath.sin(5 * mpmath.pi / 8)
        num = [mpmath.mpf(0)] * (deg + 1)
        for j in range(deg // 4 + 1):
            num[4 * j] += ca * (-1) ** j * two_pi ** (2 * j) / mpmath.factorial(2 * j)
            if 4 * j + 2 <= deg:
                num[4 * j + 2] += sa * (-1) ** j * two_pi ** (2 * j + 1) / mpmath.factorial(2 * j + 1)
        den = [mpmath.mpf(0)] * (deg + 1)
        for j in range(deg // 2 + 1):
            den[2 * j] = (-1) ** j * two_pi ** (2 * j) / mpmath.factorial(2 * j)
        psi = [mpmath.mpf(0)] * (deg + 1)
        for n in range(deg + 1):
            acc = -num[n] - mpmath.fsum(den[j] * psi[n - j] for j in range(2, n + 1, 2))
            psi[n] = acc / den[0]

        def derivative(m):
            return [psi[n + m] * mpmath.factorial(n + m) / mpmath.factorial(n) for n in range(_POLY_LEN)]

        full = np.zeros((RS_TERMS, _POLY_LEN))
        for n, row in enumerate(_D):
            acc = [mpmath.mpf(0)] * _POLY_LEN
            for k, d in enumerate(row):
                scale = mpmath.mpf(d.numerator) / d.denominator / mpmath.pi ** (2 * n - 2 * k)
                for i, c in enumerate(derivative(3 * n - 4 * k)):
                    acc[i] += scale * c
            full[n] = [float(c) for c in acc]
    # C_n has the parity of n in z: keep only the live coefficients, as a
    # polynomial in z^2 (times z for odd n)
    out = np.zeros((RS_TERMS, _POLY_LEN // 2))
    for n in range(RS_TERMS):
        out[n] = full[n, n % 2 :: 2]
    out.flags.writeable = False
    return out


# Bernoulli numbers B_2 .. B_32 for Euler-Maclaurin and Stirling.
_B2K = np.array([float(mpmath.bernoulli(2 * k)) for k in range(1, 17)])
_EM_N = 30
_EM_TERMS = 16


@njit(cache=True)
def _theta_asymptotic(t):
    ti = 1.0 / t
    t2 = ti * ti
    return (
        0.5 * t * math.log(t / (2.0 * math.pi))
        - 0.5 * t
        - math.pi / 8.0
        + ti * (1.0 / 48.0 + t2 * (7.0 / 5760.0 + t2 * (31.0 / 80640.0 + t2 * 127.0 / 430080.0)))
    )


@njit(cache=True)
def _loggamma_stirling(z, b2k):
    # shift to Re z >= 14, then the Stirling series
    shift = 0.0j
    while z.real < 14.0:
        shift += np.log(z)
        z += 1.0
    zi = 1.0 / z
    zi2 = zi * zi
    series = 0.0j
    pw = zi
    for k in range(1, 11):
        series += b2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw
        pw *= zi2
    return (z - 0.5) * np.log(z) - z + 0.5 * math.log(2.0 * math.pi) + series - shift


@njit(cache=True)
def _theta(t, b2k):
    a = abs(t)
    if a >= 30.0:
        th = _theta_asymptotic(a)
    else:
        th = _loggamma_stirling(complex(0.25, 0.5 * a), b2k).imag - 0.5 * a * math.log(math.pi)
    return th if t >= 0 else -th


@njit(cache=True)
def _zeta_em(t, n_head, b2k):
    """zeta(1/2 + i t) by Euler-Maclaurin with ``n_head`` leading terms."""
    s = complex(0.5, t)
    acc_re = 0.0
    c_re = 0.0
    acc_im = 0.0
    c_im = 0.0
    for n in range(1, n_head):
        ln = math.log(n)
        mag = math.exp(-0.5 * ln)
        acc_re, c_re = neumaier_add(acc_re, c_re, mag * math.cos(t * ln))
        acc_im, c_im = neumaier_add(acc_im, c_im, -mag * math.sin(t * ln))
    big_n = float(n_head)
    lnn = math.log(big_n)
    n_pow = np.exp(-s * lnn)  # N^{-s}
    tail = big_n * n_pow / (s - 1.0) + 0.5 * n_pow
    # sum_k B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    rising = s
    pw = n_pow / big_n
    fact = 2.0
    for k in range(1, _EM_TERMS + 1):
        tail += b2k[k - 1] / fact * rising * pw
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k)
        pw /= big_n * big_n
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0)
    return complex(acc_re + c_re, acc_im + c_im) + tail


@njit(cache=True)
def _rs_remainder(t, cpoly):
    """(-1)^(N-1) tau^(-1/2) sum_k C_k(p) tau^(-k)."""
    tau = math.sqrt(t / (2.0 * math.pi))
    n_terms = int(tau)
    z = tau - n_terms - 0.5
    z2 = z * z
    rem = 0.0
    tinv = 1.0
    for k in range(cpoly.shape[0]):
        row = cpoly[k]
        val = 0.0
        for i in range(row.shape[0] - 1, -1, -1):
            val = val * z2 + row[i]
        if k % 2 == 1:
            val *= z
        rem += val * tinv
        tinv /= tau
    sign = 1.0 if (n_terms - 1) % 2 == 0 else -1.0
    return sign * rem / math.sqrt(tau)


@njit(cache=True)
def _z_rs(t, logn, rsqrt, cpoly):
    """Z(t) by Riemann-Siegel for t >= 30."""
    n_terms = int(math.sqrt(t / (2.0 * math.pi)))
    th = _theta_asymptotic(t)
    s = 0.0
    c = 0.0
    for n in range(1, n_terms + 1):
        s, c = neumaier_add(s, c, rsqrt[n] * math.cos(th - t * logn[n]))
    return 2.0 * (s + c) + _rs_remainder(t, cpoly)


@njit(cache=True, parallel=True)
def _z_panels(start, width, n_panels, offsets, rot_re, rot_im, logn, rsqrt, cpoly, b2k, out):
    # Panel i has centre c = start + width*(i + 1/2) and nodes c + offsets[j].
    # n^{-i t} = n^{-i c} * rot[n, j] with rot[n, j] = n^{-i offsets[j]}, so
    # each panel costs one sincos per n plus a complex multiply-add per node.
    m = offsets.shape[0]
    for i in prange(n_panels):
        c = start + width * (i + 0.5)
        lo = c - 0.5 * width
        if lo < 30.0:
            for j in range(m):
                out[i, j] = _z_value(c + offsets[j], logn, rsqrt, cpoly, b2k)
            continue
        acc_re = np.zeros(m)
        acc_im = np.zeros(m)
        n_node = np.empty(m, dtype=np.int64)
        for j in range(m):
            n_node[j] = int(math.sqrt((c + offsets[j]) / (2.0 * math.pi)))
        n_lo = n_node.min()
        n_hi = n_node.max()
        for n in range(1, n_hi + 1):
            ph = c * logn[n]
            br = rsqrt[n] * math.cos(ph)
            bi = -rsqrt[n] * math.sin(ph)
            if n <= n_lo:
                for j in range(m):
                    acc_re[j] += br * rot_re[n, j] - bi * rot_im[n, j]
                    acc_im[j] += br * rot_im[n, j] + bi * rot_re[n, j]
            else:
                # the main-sum length changes inside this panel
                for j in range(m):
                    if n <= n_node[j]:
                        acc_re[j] += br * rot_re[n, j] - bi * rot_im[n, j]
                        acc_im[j] += br * rot_im[n, j] + bi * rot_re[n, j]
        for j in range(m):
            t = c + offsets[j]
            th = _theta_asymptotic(t)
            main = math.cos(th) * acc_re[j] - math.sin(th) * acc_im[j]
            out[i, j] = 2.0 * main + _rs_remainder(t, cpoly)


@njit(cache=True)
def _z_value(t, logn, rsqrt, cpoly, b2k):
    a = abs(t)
    if a >= 30.0:
        return _z_rs(a, logn, rsqrt, cpoly)
    th = _theta(a, b2k)
    return (complex(math.cos(th), math.sin(th)) * _zeta_em(a, _EM_N, b2k)).real


@njit(cache=True, parallel=True)
def _z_array(ts, logn, rsqrt, cpoly, b2k, out):
    for i in prange(ts.shape[0]):
        out[i] = _z_value(ts[i], logn, rsqrt, cpoly, b2k)


@lru_cache(maxsize=8)
def _main_sum_tables(n_max):
    n = np.arange(n_max + 1, dtype=np.float64)
    logn = np.zeros(n_max + 1)
    logn[1:] = np.log(n[1:])
    rsqrt = np.zeros(n_max + 1)
    rsqrt[1:] = 1.0 / np.sqrt(n[1:])
    return logn, rsqrt


def _tables_for(tmax):
    # round the table size up to a power of two so the cache stays small
    need = int(math.sqrt(max(tmax, 1.0) / (2 * math.pi))) + 2
    size = 1 << max(6, need.bit_length())
    return _main_sum_tables(size)


def _check_budget(tmax):
    if not math.isfinite(tmax) or tmax > T_BUDGET:
        raise AccuracyError(f"|t| = {tmax:g} lies beyond the accuracy budget {T_BUDGET:g}")


def hardy_z_array(t):
    """Vectorized Hardy Z; even in ``t``, so negative ordinates are allowed."""
    ts = np.ascontiguousarray(np.asarray(t, dtype=np.float64).ravel())
    out = np.empty_like(ts)
    if ts.size == 0:
        return out.reshape(np.shape(t))
    tmax = float(np.max(np.abs(ts)))
    _check_budget(tmax)
    logn, rsqrt = _tables_for(tmax)
    _z_array(ts, logn, rsqrt, rs_correction_polynomials(), _B2K, out)
    return out.reshape(np.shape(t))


def hardy_z_panels(start, width, n_panels, offsets):
    """Z at the nodes ``start + width*(i + 1/2) + offsets[j]`` of equal panels.

    Returns an ``(n_panels, len(offsets))`` array. Same values as
    :func:`hardy_z_array` up to rounding, several times faster.
    """
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    out = np.empty((int(n_panels), offsets.size))
    if n_panels == 0:
        return out
    tmax = max(abs(start), abs(start + width * n_panels)) + float(np.max(np.abs(offsets)))
    _check_budget(tmax)
    logn, rsqrt = _tables_for(tmax)
    phase = -np.outer(logn, offsets)
    rot_re = np.ascontiguousarray(np.cos(phase))
    rot_im = np.ascontiguousarray(np.sin(phase))
    _z_panels(float(start), float(width), int(n_panels), offsets, rot_re, rot_im, logn, rsqrt,
              rs_correction_polynomials(), _B2K, out)
    return out


def abs_zeta_half_array(t):
    """``|zeta(1/2 + i t)|`` for an array of ordinates."""
    return np.abs(hardy_z_array(t))


def riemann_siegel_error_estimate(t):
    """Heuristic absolute error of the Riemann-Siegel value at ``t >= 30``.

    Truncation part fitted conservatively to the observed decay of the
    remainder after ``C_6``; rounding part from the phase ``t log n``.
    """
    tau = math.sqrt(t / (2 * math.pi))
    n = int(tau)
    trunc = 5e-5 * tau ** -7.5
    rounding = 2.0 * np.finfo(float).eps * (1.0 + t * math.log(n + 1)) * math.sqrt(1.0 + math.log(n + 1))
    return trunc + rounding


def _em_error_estimate(t):
    # first omitted Euler-Maclaurin term, plus summation rounding
    s = complex(0.5, abs(t))
    rising = 1.0 + 0j
    for j in range(2 * _EM_TERMS + 1):
        rising *= s + j
    k = _EM_TERMS + 1
    b = float(mpmath.bernoulli(2 * k))
    nxt = abs(b / math.factorial(2 * k) * rising) * _EM_N ** (-0.5 - 2 * k + 1)
    return nxt + 1e-15 * (1.0 + 2.0 * math.sqrt(_EM_N))


@dataclass(frozen=True)
class CriticalLineValue:
    t: float
    value: complex
    abs_value: float
    method: str
    est_abs_error: float
    degraded: bool = False


def rs_theta(t):
    """Riemann-Siegel theta ``arg Gamma(1/4 + i t/2) - (t/2) log pi``, continuous in ``t``."""
    t = float(t)
    if t <= 0:
        raise DomainError(f"rs_theta needs t > 0, got {t}")
    return float(_theta(t, _B2K))


def zeta_half(t, target=DEFAULT_TARGET):
    """Evaluate ``zeta(1/2 + i t)`` with an error estimate.

    ``method`` records which algorithm produced the value; ``degraded`` is
    set when the estimate exceeds ``target``.
    """
    t = float(t)
    a = abs(t)
    _check_budget(a)
    if a < CROSSOVER:
        val = complex(_zeta_em(a, _EM_N, _B2K))
        method = "euler_maclaurin"
        err = _em_error_estimate(a)
    else:
        z = float(hardy_z_array(np.array([a]))[0])
        th = _theta(a, _B2K)
        val = z * complex(math.cos(th), -math.sin(th))
        method = "riemann_siegel"
        err = riemann_siegel_error_estimate(a)
    if t < 0:
        val = val.conjugate()
    return CriticalLineValue(
        t=t, value=val, abs_value=abs(val), method=method, est_abs_error=err, degraded=err > target
    )


def em_head_length(t):
    """Head length keeping the Euler-Maclaurin tail below double rounding."""
    return max(_EM_N, int(math.ceil(abs(t) / 2.0)) + 10)


def zeta_half_em(t):
    """Euler-Maclaurin value at any ``t`` (cost grows linearly in ``|t|``).

    Exposed so the two algorithms can be compared on their common range.
    """
    t = float(t)
    if abs(t) > 1e5:
        raise AccuracyError("Euler-Maclaurin path is limited to |t| <= 1e5")
    val = complex(_zeta_em(abs(t), em_head_length(t), _B2K))
    return val.conjugate() if t < 0 else val


def zeta_half_rs(t):
    """Riemann-Siegel value of ``zeta(1/2 + i t)`` for ``|t| >= 30``."""
    a = abs(float(t))
    if a < CROSSOVER:
        raise DomainError("Riemann-Siegel path needs |t| >= 30")
    z = float(hardy_z_array(np.array([a]))[0])
    th = _theta(a, _B2K)
    val = z * complex(math.cos(th), -math.sin(th))
    return val.conjugate() if t < 0 else val


def hardy_z(t):
    """Hardy's ``Z(t) = exp(i theta(t)) zeta(1/2 + i t)``, real for real ``t``."""
    t = float(t)
    if t <= 0:
        raise DomainError(f"hardy_z needs t > 0, got {t}")
    _check_budget(t)
    return float(hardy_z_array(np.array([t]))[0])


def count_sign_changes(a, b, samples):
    """Sign changes of Z on an equispaced grid over ``[a, b]``."""
    z = hardy_z_array(np.linspace(a, b, samples))
    s = np.sign(z)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))

"""Shifted moments of zeta on the critical line.

The moment

    I_k(T, a1, a2) = int |zeta(1/2 + i(t + a1))|^k |zeta(1/2 + i(t + a2))|^k dt

is integrated with composite Gauss-Legendre rules on equal panels. Each
refinement level halves every panel; the estimate stops when two successive
levels agree to a relative tolerance. Panel sums are reduced with
``math.fsum``, so the result does not depend on how panels are chunked.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import zeta
from .errors import ConvergenceError, DomainError, SpecError
from .summation import csum

RANGES = ("zero_to_T", "T_to_2T")
T_MIN = 2.0
T_MAX = 1e7
DEFAULT_TOL = 1e-6
DEFAULT_PANEL = 0.25
DEFAULT_ORDER = 16
DEFAULT_MAX_LEVEL = 4
REGIME_THRESHOLDS = (0.1, 10.0)
_CHUNK_PANELS = 1 << 16


@dataclass(frozen=True)
class MomentSpec:
    """Parameters ``(T, k, alpha1, alpha2)`` of a shifted moment.

    Construction validates the admissibility constraints; ``permissive``
    relaxes ``k >= 1`` to ``k >= 0``.
    """

    T: float
    k: float
    alpha1: float = 0.0
    alpha2: float = 0.0
    range: str = "zero_to_T"
    permissive: bool = False

    def __post_init__(self):
        T, k, a1, a2 = self.T, self.k, self.alpha1, self.alpha2
        for name, v in (("T", T), ("k", k), ("alpha1", a1), ("alpha2", a2)):
            if not math.isfinite(v):
                raise SpecError(f"{name} must be finite, got {v}")
        if not T_MIN <= T <= T_MAX:
            raise SpecError(f"T must lie in [{T_MIN:g}, {T_MAX:g}], got {T}")
        if self.permissive:
            if k < 0:
                raise SpecError(f"k must be >= 0, got {k}")
        elif k < 1:
            raise SpecError(f"k must be >= 1 (set permissive for smaller k), got {k}")
        if abs(a1) > 0.5 * T or abs(a2) > 0.5 * T:
            raise SpecError("shifts must satisfy |alpha| <= 0.5 T")
        if abs(a1 + a2) > T**0.6:
            raise SpecError("shifts must satisfy |alpha1 + alpha2| <= T^0.6")
        if self.range not in RANGES:
            raise SpecError(f"range must be one of {RANGES}, got {self.range!r}")

    @property
    def bounds(self):
        if self.range == "zero_to_T":
            return 0.0, float(self.T)
        return float(self.T), 2.0 * self.T

    @property
    def length(self):
        a, b = self.bounds
        return b - a


@dataclass(frozen=True)
class ShiftGeometry:
    gamma_plus: float
    gamma_minus: float
    delta: float
    f_value: float


@dataclass(frozen=True)
class MomentEstimate:
    spec: MomentSpec
    value: float
    panels: int
    refinement_level: int
    error_estimate: float
    runtime_seconds: float
    history: tuple = field(default=(), compare=False)


def f_scaling(T, delta):
    """``min(1/delta, log T)`` for ``delta <= 1/100``, else ``log(2 + delta)``."""
    delta = abs(delta)
    if delta <= 0.01:
        inv = math.inf if delta == 0 else 1.0 / delta
        return min(inv, math.log(T))
    return math.log(2.0 + delta)


def shift_geometry(spec):
    delta = abs(spec.alpha1 - spec.alpha2)
    return ShiftGeometry(
        gamma_plus=0.5 * (spec.alpha1 + spec.alpha2),
        gamma_minus=0.5 * (spec.alpha1 - spec.alpha2),
        delta=delta,
        f_value=f_scaling(spec.T, delta),
    )


def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_values(start, width, n_panels, x):
    """Z at the Gauss nodes of ``n_panels`` equal panels, chunked."""
    out = np.empty((n_panels, x.size))
    offsets = 0.5 * width * x
    for lo in range(0, n_panels, _CHUNK_PANELS):
        hi = min(n_panels, lo + _CHUNK_PANELS)
        out[lo:hi] = zeta.hardy_z_panels(start + width * lo, width, hi - lo, offsets)
    return out


def _sign_change_panels(z_values):
    """Panels whose nodes, or the gap to the next panel, see a sign change of Z."""
    s = np.sign(z_values)
    inside = (s.min(axis=1) != s.max(axis=1)) | (s == 0).any(axis=1)
    across = s[:-1, -1] != s[1:, 0]
    flag = inside.copy()
    flag[:-1] |= across
    flag[1:] |= across
    return flag


def _subdivided_sums(a, width, panels, shifts, k, x, w, splits):
    """Integrals over the given panels with each split into ``splits`` parts."""
    sub = width / splits
    starts = a + width * panels[:, None] + sub * np.arange(splits)[None, :]
    t = starts[..., None] + 0.5 * sub * (x + 1.0)
    integrand = np.ones_like(t)
    for alpha, power in shifts:
        integrand *= np.abs(zeta.hardy_z_array(t + alpha)) ** power
    return (integrand @ (0.5 * sub * w)).sum(axis=1)


def _level_values(specs, level, panel_length, order):
    """One refinement level for several specs sharing ``T``, ``k`` and range.

    Z is evaluated once per distinct shift and reused by every spec.
    """
    a, b = specs[0].bounds
    n0 = max(1, math.ceil((b - a) / panel_length))
    n_panels = n0 << level
    width = (b - a) / n_panels
    x, w = _gauss_legendre(order)
    weights = 0.5 * width * w
    cache = {}
    for s in specs:
        for alpha in (s.alpha1, s.alpha2):
            if alpha not in cache:
                cache[alpha] = _panel_values(a + alpha, width, n_panels, x)
    out = []
    for s in specs:
        if s.alpha1 == s.alpha2:
            shifts = ((s.alpha1, 2.0 * s.k),)
        else:
            shifts = ((s.alpha1, s.k), (s.alpha2, s.k))
        integrand = np.ones((n_panels, order))
        for alpha, power in shifts:
            integrand *= np.abs(cache[alpha]) ** power
        panel_sums = integrand @ weights
        if s.k < 1:
            # |Z|^k has infinite slope at zeros: split those panels in four
            flag = np.zeros(n_panels, dtype=bool)
            for alpha, _ in shifts:
                flag |= _sign_change_panels(cache[alpha])
            idx = np.flatnonzero(flag)
            if idx.size:
                panel_sums[idx] = _subdivided_sums(a, width, idx, shifts, s.k, x, w, 4)
        out.append(csum(panel_sums))
    return out, n_panels


def shifted_moment_multi(specs, tol=DEFAULT_TOL, *, panel_length=DEFAULT_PANEL, order=DEFAULT_ORDER,
                         max_level=DEFAULT_MAX_LEVEL, min_level=1):
    """:func:`shifted_moment` for several specs with a common ``T``, ``k`` and range.

    Returns one :class:`MomentEstimate` per spec, in input order. Refinement
    continues until every spec has converged.
    """
    specs = list(specs)
    if not specs:
        raise DomainError("need at least one spec")
    head = specs[0]
    for s in specs[1:]:
        if (s.T, s.k, s.range) != (head.T, head.k, head.range):
            raise DomainError("specs must share T, k and range")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if min_level < 1 or max_level < min_level:
        raise DomainError("need 1 <= min_level <= max_level")
    t0 = time.perf_counter()
    a, b = head.bounds
    if head.k == 0:
        n0 = max(1, math.ceil((b - a) / panel_length))
        dt = time.perf_counter() - t0
        return [MomentEstimate(s, b - a, n0, 0, 0.0, dt, (b - a,)) for s in specs]
    history = [[] for _ in specs]
    panels = 0
    for level in range(max_level + 1):
        values, panels = _level_values(specs, level, panel_length, order)
        for h, v in zip(history, values):
            h.append(v)
        if level >= min_level and all(abs(h[-1] - h[-2]) < tol * abs(h[-1]) for h in history):
            break
    dt = time.perf_counter() - t0
    results = [MomentEstimate(s, h[-1], panels, len(h) - 1, abs(h[-1] - h[-2]), dt, tuple(h))
               for s, h in zip(specs, history)]
    failed = [r for r in results if not r.error_estimate < tol * abs(r.value)]
    if failed:
        best = results if len(results) > 1 else results[0]
        raise ConvergenceError(
            f"no convergence to relative {tol:g} after {max_level} refinements "
            f"(worst relative change {max(r.error_estimate / r.value for r in failed):.3g})",
            best=best,
        )
    return results


def shifted_moment(spec, tol=DEFAULT_TOL, **kwargs):
    """Estimate ``I_k(T, alpha1, alpha2)`` over ``spec.range``.

    Raises :class:`ConvergenceError` (with ``best``) if the levels do not
    settle within ``max_level`` halvings.
    """
    return shifted_moment_multi([spec], tol, **kwargs)[0]


def conjecture_denominator(spec):
    """``L (log T * F)^(k^2/2)`` with ``L`` the length of the range."""
    geo = shift_geometry(spec)
    return spec.length * (math.log(spec.T) * geo.f_value) ** (spec.k**2 / 2.0)


def conjecture_ratio(spec, tol=DEFAULT_TOL, *, estimate=None, **kwargs):
    if estimate is None:
        estimate = shifted_moment(spec, tol, **kwargs)
    return estimate.value / conjecture_denominator(spec)


def second_moment_reference(T):
    """Classical main terms ``T (log(T/2 pi) + 2 gamma - 1)`` of the mean square."""
    return T * (math.log(T / (2.0 * math.pi)) + 2.0 * np.euler_gamma - 1.0)


def regime_classify(spec, thresholds=REGIME_THRESHOLDS):
    """Label the shift regime from ``delta * log T``.

    A finite-height stand-in for a statement about limits: below the lower
    threshold is ``coalescing``, above the upper ``separated``.
    """
    lo, hi = thresholds
    x = shift_geometry(spec).delta * math.log(spec.T)
    if x < lo:
        return "coalescing"
    if x <= hi:
        return "critical"
    return "separated"

"""Dirichlet-polynomial surrogates for log |zeta| over prime blocks.

Primes are split into blocks ``T^beta_{i-1} < p <= T^beta_i`` along a
geometric beta-ladder. Each block carries a smoothed polynomial ``G_{i,j}``
whose real part controls the size of zeta on ``[T, 2T]``; thresholds on
these real parts sort every ``t`` into one of the sets ``S(0), ..,
S(I-1), T``. The dyadic sums ``P_m`` play the same role for the prime-square
contribution.

The literal threshold ``exp(-1000 k)`` is below every ``beta_i`` at any
computable height, which leaves a single block. ``threshold`` is therefore a
parameter (default 0.2), and ``log_threshold`` reaches the literal value
without underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange
from scipy.optimize import bisect

from .errors import DomainError, InvariantViolation, ResourceError
from .moments import ShiftGeometry, f_scaling
from .primes import PrimeTable, sieve
from .summation import csum, neumaier_add

DEFAULT_THRESHOLD = 0.2
DEFAULT_PRIME_CAP = 10**6
_MAX_BLOCKS = 64


@njit(cache=True, parallel=True)
def _dirichlet_sums(ts, logp, amp, out):
    # out[m] = sum_p amp[p] exp(-i ts[m] log p), ascending p, compensated
    for m in prange(ts.size):
        t = ts[m]
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for j in range(logp.size):
            ph = t * logp[j]
            sr, cr = neumaier_add(sr, cr, amp[j] * math.cos(ph))
            si, ci = neumaier_add(si, ci, -amp[j] * math.sin(ph))
        out[m] = complex(sr + cr, si + ci)


def dirichlet_sum(ts, logp, amp):
    """``sum_p amp_p p^{-i t}`` for every ``t`` in ``ts``."""
    ts = np.asarray(ts, dtype=np.float64)
    out = np.empty(ts.shape, dtype=np.complex128)
    if logp.size == 0:
        out[...] = 0.0
        return out
    flat = out.reshape(-1)
    _dirichlet_sums(np.ascontiguousarray(ts.reshape(-1)), np.ascontiguousarray(logp, dtype=np.float64),
                    np.ascontiguousarray(amp, dtype=np.float64), flat)
    return flat.reshape(ts.shape)


def _as_output(values, t):
    return complex(values.reshape(-1)[0]) if np.ndim(t) == 0 else values


# ---------------------------------------------------------------- ladder


@dataclass(frozen=True)
class BetaLadder:
    T: float
    k: float
    threshold: float
    betas: tuple
    cal_I: int
    log_threshold: float

    def block_bounds(self, i):
        """``(T^beta_{i-1}, T^beta_i)`` as floats (``inf`` on overflow)."""
        logT = math.log(self.T)

        def power(beta):
            e = beta * logT
            return math.exp(e) if e < 700 else math.inf

        return power(self.betas[i - 1]), power(self.betas[i])


def build_ladder(T, k, threshold=DEFAULT_THRESHOLD, *, log_threshold=None):
    """Ladder ``beta_i = 20^(i-1) / (log log T)^2`` up to index ``cal_I``.

    ``cal_I = 1 + max{i >= 1 : beta_i <= threshold}`` with ``max{} = 0``.
    Pass ``log_threshold`` instead of ``threshold`` for values that would
    underflow, such as ``-1000 k``.
    """
    if T < 16:
        raise DomainError(f"T must be >= 16, got {T}")
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    if log_threshold is None:
        if not threshold > 0:
            raise DomainError(f"threshold must be positive, got {threshold}")
        log_threshold = math.log(threshold)
    else:
        threshold = math.exp(log_threshold)
    lll = math.log(math.log(T))

    def beta(i):
        return 20.0 ** (i - 1) / lll**2

    def below(i):
        # compare in log space so that exp(-1000 k) needs no float
        return (i - 1) * math.log(20.0) - 2.0 * math.log(lll) <= log_threshold

    last = 0
    while below(last + 1):
        last += 1
        if last >= _MAX_BLOCKS:
            raise ResourceError(f"threshold {threshold:g} admits more than {_MAX_BLOCKS} blocks")
    cal_I = 1 + last
    betas = (0.0,) + tuple(beta(i) for i in range(1, cal_I + 1))
    return BetaLadder(T=float(T), k=float(k), threshold=threshold, betas=betas, cal_I=cal_I,
                      log_threshold=log_threshold)


# ---------------------------------------------------------------- config


@dataclass(frozen=True, eq=False)
class SurrogateConfig:
    """Ladder, shift geometry and the prime table the sums run over.

    Blocks reaching past ``prime_table.limit`` are cut there and
    ``truncated`` is set; the smoothing weights keep their nominal length
    ``T^beta_j``.
    """

    ladder: BetaLadder
    geometry: ShiftGeometry
    prime_table: PrimeTable
    truncated: bool
    _blocks: dict = field(repr=False)

    @property
    def T(self):
        return self.ladder.T

    @property
    def cal_I(self):
        return self.ladder.cal_I

    def block_primes(self, i):
        lo, hi = self.ladder.block_bounds(i)
        start, stop = self.prime_table.index_range(lo, min(hi, self.prime_table.limit))
        return start, stop

    def block(self, i, j):
        """``(log p, amplitude)`` arrays of ``G_{i,j}``."""
        return self._blocks[(i, j)]


def p_block_count(T):
    """Largest dyadic index ``m`` with ``m <= log log T / log 2``."""
    return int(math.floor(math.log(math.log(T)) / math.log(2.0)))


def build_config(T, k, alpha1=0.0, alpha2=0.0, threshold=DEFAULT_THRESHOLD, *, log_threshold=None,
                 prime_cap=DEFAULT_PRIME_CAP, table=None):
    ladder = build_ladder(T, k, threshold, log_threshold=log_threshold)
    delta = abs(alpha1 - alpha2)
    geo = ShiftGeometry(gamma_plus=0.5 * (alpha1 + alpha2), gamma_minus=0.5 * (alpha1 - alpha2), delta=delta,
                        f_value=f_scaling(T, delta))
    top = ladder.block_bounds(ladder.cal_I)[1]
    need = 2 ** (p_block_count(T) + 1)
    limit = int(max(need, min(math.floor(top), prime_cap)))
    if table is None or table.limit < limit:
        table = sieve(limit)
    truncated = top > table.limit
    logT = math.log(T)
    blocks = {}
    lo_idx = {}
    for i in range(1, ladder.cal_I + 1):
        lo, hi = ladder.block_bounds(i)
        lo_idx[i] = table.index_range(lo, min(hi, table.limit))
    for i in range(1, ladder.cal_I + 1):
        start, stop = lo_idx[i]
        logp = np.ascontiguousarray(table.log_primes[start:stop])
        for j in range(i, ladder.cal_I + 1):
            log_x = ladder.betas[j] * logT
            amp = (np.cos(geo.gamma_minus * logp) * np.exp(-(0.5 + 1.0 / log_x) * logp)
                   * (log_x - logp) / log_x)
            amp.flags.writeable = False
            blocks[(i, j)] = (logp, amp)
    return SurrogateConfig(ladder=ladder, geometry=geo, prime_table=table, truncated=truncated, _blocks=blocks)


# ---------------------------------------------------------------- polynomials


def g_poly(cfg, i, j, t):
    """``G_{i,j}(t)``; ``t`` may be a scalar or an array."""
    if not 1 <= i <= j <= cfg.cal_I:
        raise DomainError(f"need 1 <= i <= j <= {cfg.cal_I}, got i={i}, j={j}")
    logp, amp = cfg.block(i, j)
    ts = np.asarray(t, dtype=np.float64) + cfg.geometry.gamma_plus
    return _as_output(dirichlet_sum(ts, logp, amp), t)


def f_poly(cfg, i, t):
    """``F_i(t) = G_{i, I}(t)``."""
    return g_poly(cfg, i, cfg.cal_I, t)


def full_f_sum(cfg, t):
    """The single sum over all ``p <= T^beta_I`` with the weights of ``F``."""
    parts = [cfg.block(i, cfg.cal_I) for i in range(1, cfg.cal_I + 1)]
    logp = np.concatenate([p[0] for p in parts])
    amp = np.concatenate([p[1] for p in parts])
    ts = np.asarray(t, dtype=np.float64) + cfg.geometry.gamma_plus
    return _as_output(dirichlet_sum(ts, logp, amp), t)


def _dyadic_terms(cfg, lo, hi):
    start, stop = cfg.prime_table.index_range(lo, hi)
    logp = cfg.prime_table.log_primes[start:stop]
    delta = 2.0 * cfg.geometry.gamma_minus
    amp = np.cos(delta * logp) / (2.0 * np.exp(logp))
    return 2.0 * logp, amp


def p_poly(cfg, m, t):
    """``P_m(t)``: primes ``2^m < p <= 2^(m+1)`` at frequency ``2t + alpha1 + alpha2``."""
    m_max = p_block_count(cfg.T)
    if not 0 <= m <= m_max:
        raise DomainError(f"m must lie in [0, {m_max}], got {m}")
    two_logp, amp = _dyadic_terms(cfg, 2**m, 2 ** (m + 1))
    # p^{-i(2t + a1 + a2)} = exp(-i (t + gamma_plus) * 2 log p)
    ts = np.asarray(t, dtype=np.float64) + cfg.geometry.gamma_plus
    return _as_output(dirichlet_sum(ts, two_logp, amp), t)


def p_direct_sum(cfg, t):
    """The summand of ``P_m`` over ``1 < p <= 2^(m_max + 1)`` in one sum."""
    two_logp, amp = _dyadic_terms(cfg, 1, 2 ** (p_block_count(cfg.T) + 1))
    ts = np.asarray(t, dtype=np.float64) + cfg.geometry.gamma_plus
    return _as_output(dirichlet_sum(ts, two_logp, amp), t)


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class ClassLabel:
    """``kind`` is ``"S"``, ``"T"`` or ``"P"``; ``index`` is ``j`` or ``m``."""

    kind: str
    index: int | None = None

    def __str__(self):
        return self.kind if self.index is None else f"{self.kind}({self.index})"


def block_bound(beta):
    return beta ** (-0.75)


def _block_failures(cfg, ts):
    """``fail[i-1, l-1, n]``: ``|Re G_{i,l}(ts[n])| > beta_i^{-3/4}`` (``l >= i``)."""
    I = cfg.cal_I
    fail = np.zeros((I, I, ts.size), dtype=bool)
    for i in range(1, I + 1):
        bound = block_bound(cfg.ladder.betas[i])
        for l in range(i, I + 1):
            fail[i - 1, l - 1] = np.abs(g_poly(cfg, i, l, ts).real) > bound
    return fail


def _memberships_from(fail, I):
    """Literal membership of each sample in ``S(0..I-1)`` and ``T``."""
    n = fail.shape[2]
    block_fail = fail.any(axis=1)  # some l >= i fails at block i
    sets = np.zeros((I + 1, n), dtype=bool)
    ok_so_far = np.ones(n, dtype=bool)
    for j in range(I):
        sets[j] = ok_so_far & block_fail[j]
        ok_so_far &= ~block_fail[j]
    sets[I] = ~fail[np.arange(I), I - 1].any(axis=0)  # |Re F_i| within bounds for all i
    return sets


def _labels_from(fail, I):
    # first block with a violation decides S(j); no violation at all gives T
    block_fail = fail.any(axis=1)
    first = np.where(block_fail.any(axis=0), block_fail.argmax(axis=0), -1)
    return first


def classify_many(cfg, ts):
    """Labels for an array of ordinates, in input order.

    The sets can overlap (the ``S(j)`` tests run over every smoothing length
    ``l``, the ``T`` test only over ``l = I``); the label is the first
    failing block when there is one, and ``T`` otherwise.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    fail = _block_failures(cfg, ts)
    first = _labels_from(fail, cfg.cal_I)
    sets = _memberships_from(fail, cfg.cal_I)
    labels = []
    for n, j in enumerate(first):
        label = ClassLabel("T") if j < 0 else ClassLabel("S", int(j))
        col = sets[:, n]
        held = col[cfg.cal_I] if j < 0 else col[j]
        if not col.any() or not held:
            raise InvariantViolation(f"t={ts[n]!r} fits no set of the decomposition")
        labels.append(label)
    return labels


def classify(cfg, t):
    _check_window(cfg, t)
    return classify_many(cfg, [t])[0]


def memberships(cfg, t):
    """Every set among ``S(0..I-1)``, ``T`` whose definition ``t`` satisfies."""
    fail = _block_failures(cfg, np.array([float(t)]))
    sets = _memberships_from(fail, cfg.cal_I)[:, 0]
    out = [ClassLabel("S", j) for j in range(cfg.cal_I) if sets[j]]
    if sets[cfg.cal_I]:
        out.append(ClassLabel("T"))
    return out


def _check_window(cfg, t):
    if not cfg.T <= t <= 2.0 * cfg.T:
        raise DomainError(f"t must lie in [T, 2T] = [{cfg.T:g}, {2 * cfg.T:g}], got {t}")


def largest_violation(values, m_indices):
    """Largest ``m`` with ``|values[m]| > 2^(-m/10)``, or ``None``."""
    best = None
    for v, m in zip(values, m_indices):
        if abs(v) > 2.0 ** (-m / 10.0):
            best = int(m)
    return best


def classify_p(cfg, t):
    """Label ``P(m)`` for the largest dyadic block out of bounds, else ``None``."""
    _check_window(cfg, t)
    ms = range(p_block_count(cfg.T) + 1)
    reals = [p_poly(cfg, m, t).real for m in ms]
    m = largest_violation(reals, ms)
    return None if m is None else ClassLabel("P", m)


def classify_p_many(cfg, ts):
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    ms = list(range(p_block_count(cfg.T) + 1))
    reals = np.array([p_poly(cfg, m, ts).real for m in ms])
    out = []
    for n in range(ts.size):
        m = largest_violation(reals[:, n], ms)
        out.append(None if m is None else ClassLabel("P", m))
    return out


# ---------------------------------------------------------------- identities


def _second_cutoff(x, T):
    return math.sqrt(x) if T is None else min(math.sqrt(x), math.log(T))


def key_identity_check(x, t, alpha1, alpha2, table, T=None):
    """Residual of the sum-of-two-shifts identity for the majorant sums, ``k = 1``.

    Left side: both shifted majorants summed directly. Right side: the
    single sum with ``cos(gamma_minus log p)`` weights at ``t + gamma_plus``.
    The second sums run to ``sqrt(x)``, or ``min(sqrt(x), log T)`` when
    ``T`` is given. Returns the larger of the two absolute residuals.
    """
    if not 2 <= x <= table.limit:
        raise DomainError(f"x must lie in [2, {table.limit}], got {x}")
    _, stop = table.index_range(0, x)
    logp = table.log_primes[:stop]
    log_x = math.log(x)
    w = np.exp(-(0.5 + 1.0 / log_x) * logp) * (log_x - logp) / log_x
    gp = 0.5 * (alpha1 + alpha2)
    gm = 0.5 * (alpha1 - alpha2)
    lhs1 = csum(np.concatenate([w * np.cos((t + a) * logp) for a in (alpha1, alpha2)]))
    rhs1 = 2.0 * csum(np.cos(gm * logp) * w * np.cos((t + gp) * logp))
    _, stop2 = table.index_range(0, max(1.0, _second_cutoff(x, T)))
    logq = table.log_primes[:stop2]
    inv2q = 0.5 * np.exp(-logq)
    lhs2 = csum(np.concatenate([inv2q * np.cos(2.0 * (t + a) * logq) for a in (alpha1, alpha2)]))
    rhs2 = 2.0 * csum(np.cos(2.0 * gm * logq) * inv2q * np.cos((2.0 * t + alpha1 + alpha2) * logq))
    return max(abs(lhs1 - rhs1), abs(lhs2 - rhs2))


# ---------------------------------------------------------------- majorant


def lambda0_equation(lam):
    return math.exp(-lam) - lam - 0.5 * lam * lam


def solve_lambda0(xtol=1e-13):
    """Positive root of ``exp(-l) = l + l^2/2``."""
    return bisect(lambda0_equation, 0.0, 1.0, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


LAMBDA0 = solve_lambda0()


def sound_rhs(t, lam, x, T, alpha, table):
    """Prime-sum majorant of ``log|zeta(1/2 + i(t + alpha))|``, without its O(1).

    ``t`` may be an array.
    """
    if lam < LAMBDA0:
        raise DomainError(f"lambda must be >= {LAMBDA0:.6f}, got {lam}")
    if not 2 <= x <= T * T:
        raise DomainError(f"x must lie in [2, T^2], got {x}")
    if x > table.limit:
        raise DomainError(f"x={x} exceeds table limit {table.limit}")
    _, stop = table.index_range(0, x)
    logp = table.log_primes[:stop]
    log_x = math.log(x)
    amp = np.exp(-(0.5 + lam / log_x) * logp) * (log_x - logp) / log_x
    _, stop2 = table.index_range(0, max(1.0, _second_cutoff(x, T)))
    logq = table.log_primes[:stop2]
    u = np.asarray(t, dtype=np.float64) + alpha
    first = dirichlet_sum(u, logp, amp).real
    second = dirichlet_sum(u, 2.0 * logq, 0.5 * np.exp(-logq)).real
    out = first + second + 0.5 * (1.0 + lam) * math.log(T) / log_x
    return float(out) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------- moment-method sizes


def taylor_truncation_length(k, beta_i):
    """``floor(100 k beta_i^{-3/4})``, the Taylor length for ``exp(k Re F_i)``."""
    if not (k > 0 and beta_i > 0):
        raise DomainError("k and beta_i must be positive")
    return math.floor(100.0 * k * beta_i ** (-0.75))


def taylor_exp_gap(x, k, n_terms):
    """``exp(k x)`` minus its Taylor polynomial of degree ``n_terms``."""
    y = k * x
    terms = np.empty(n_terms + 1)
    term = 1.0
    for n in range(n_terms + 1):
        terms[n] = term
        term *= y / (n + 1)
    return math.exp(y) - csum(terms)


def moment_exponent(beta):
    """``M = 2 floor(1 / (10 beta))``, the even power in the indicator bound."""
    return 2 * math.floor(1.0 / (10.0 * beta))


def dyadic_exponent(m):
    """``N = 2 floor(2^(3m/4))`` used for the ``P_m`` indicator bound."""
    return 2 * math.floor(2.0 ** (0.75 * m))


def indicator_majorant(x, bound, power):
    """``(x / bound)^power``, which dominates ``1{|x| > bound}`` for even ``power``."""
    if power % 2:
        raise DomainError("power must be even")
    return (np.asarray(x, dtype=np.float64) / bound) ** power


"""Closed-form and quadrature-based ensemble formulas.

All entropies and exponents are in nats per variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import erfc, log_ndtr


class NumericFailure(RuntimeError):
    """A saddle-point / fixed-point search failed to converge."""


# ---------------------------------------------------------------------------
# Cover's formula for the continuous perceptron
# ---------------------------------------------------------------------------


def cover_probability(N: int, M: int) -> float:
    """P(N, M): probability M random points share a half-space in R^N."""
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    top = min(N - 1, M - 1)
    if max(N, M) <= 10_000:
        total = sum(math.comb(M - 1, i) for i in range(top + 1))
        return float(Fraction(total, 1 << (M - 1)))
    # log-domain accumulation for huge instances
    logs = [
        math.lgamma(M) - math.lgamma(i + 1) - math.lgamma(M - i)
        for i in range(top + 1)
    ]
    mx = max(logs)
    s = sum(math.exp(x - mx) for x in logs)
    return math.exp(mx + math.log(s) - (M - 1) * math.log(2.0))


def cover_window(lam: float) -> float:
    """Large-N limit of P(N, 2N(1 + lam N^{-1/2})): the Gaussian tail integral."""
    # integral of the standard normal density over [lam*sqrt(2), inf)
    return 0.5 * erfc(float(lam))


# ---------------------------------------------------------------------------
# Binary perceptron moments
# ---------------------------------------------------------------------------


def annealed_exponent(alpha: float) -> float:
    """First-moment rate: (1/N) ln E[Z] = (1 - alpha) ln 2."""
    return (1.0 - alpha) * math.log(2.0)


def _overlap_entropy(q: float) -> float:
    """Binary entropy of the overlap, -(1+q)/2 ln (1+q)/2 - (1-q)/2 ln (1-q)/2."""

    def xlogx(x: float) -> float:
        return 0.0 if x <= 0.0 else x * math.log(x)

    return -xlogx((1.0 + q) / 2.0) - xlogx((1.0 - q) / 2.0)


def second_moment_value(alpha: float, q: float) -> float:
    """G2(q): second-moment exponent of the binary perceptron at overlap q."""
    geom = 0.5 - math.acos(q) / (2.0 * math.pi)
    if geom <= 0.0:
        return -math.inf
    return math.log(2.0) + _overlap_entropy(q) + alpha * math.log(geom)


def second_moment_exponent(alpha: float) -> tuple[float, float]:
    """Maximize G2 over q in (-1, 1); returns (q*, G2_max)."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    qs = np.arange(-0.9999, 0.99995, 1e-4)
    vals = np.array([second_moment_value(alpha, q) for q in qs])
    i = int(np.argmax(vals))
    lo = qs[max(0, i - 1)]
    hi = qs[min(len(qs) - 1, i + 1)]
    # golden-section refinement of the bracketing interval
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = second_moment_value(alpha, c), second_moment_value(alpha, d)
    for _ in range(120):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = second_moment_value(alpha, c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = second_moment_value(alpha, d)
    q_star = (a + b) / 2.0
    return q_star, second_moment_value(alpha, q_star)


# ---------------------------------------------------------------------------
# RS quenched entropy of the binary perceptron
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleResult:
    q: float
    q_hat: float
    value: float


_GH_ORDER = 96


def _gh_nodes(order: int = _GH_ORDER) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(order)
    # \int Dz f(z) = (1/sqrt(pi)) sum w_i f(sqrt(2) x_i)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def _log_h(x: np.ndarray) -> np.ndarray:
    """ln of the upper Gaussian tail H(x) = int_x^inf Dy."""
    return log_ndtr(-x)


def rs_entropy_value(alpha: float, q: float, q_hat: float, order: int = _GH_ORDER) -> float:
    z, w = _gh_nodes(order)
    x = np.abs(z) * math.sqrt(max(q_hat, 0.0))
    # log(2 cosh x) without overflow
    term_spin = float(np.dot(w, x + np.log1p(np.exp(-2.0 * x))))
    c = math.sqrt(q / (1.0 - q)) if 0.0 < q < 1.0 else 0.0
    term_constraint = float(np.dot(w, _log_h(z * c)))
    return -0.5 * q_hat * (1.0 - q) + term_spin + alpha * term_constraint


def _saddle_maps(alpha: float, order: int = _GH_ORDER):
    z, w = _gh_nodes(order)

    def q_of_qhat(q_hat: float) -> float:
        return float(np.dot(w, np.tanh(z * math.sqrt(max(q_hat, 0.0))) ** 2))

    def qhat_of_q(q: float) -> float:
        q = min(max(q, 1e-12), 1.0 - 1e-12)
        c = math.sqrt(q / (1.0 - q))
        x = z * c
        # phi(x)/H(x) evaluated in the log domain for tail stability
        ratio = np.exp(-0.5 * x * x - 0.5 * math.log(2.0 * math.pi) - _log_h(x))
        integral = float(np.dot(w, z * ratio))
        return alpha * integral / (c * (1.0 - q) ** 2)

    return q_of_qhat, qhat_of_q


def rs_entropy_perceptron(
    alpha: float,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    order: int = _GH_ORDER,
    q0_grid: tuple[float, ...] = (0.05, 0.3, 0.6, 0.9, 0.99),
) -> SaddleResult:
    """Saddle point of the RS entropy functional, by alternating 1-D updates."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0.0:
        return SaddleResult(q=0.0, q_hat=0.0, value=math.log(2.0))
    q_of_qhat, qhat_of_q = _saddle_maps(alpha, order)
    solutions = []
    for q0 in q0_grid:
        q = q0
        converged = False
        for _ in range(max_iter):
            q_hat = qhat_of_q(q)
            q_new = q_of_qhat(q_hat)
            if abs(q_new - q) < tol:
                q = q_new
                converged = True
                break
            q = 0.5 * q + 0.5 * q_new
        if not converged:
            continue
        q_hat = qhat_of_q(q)
        # residuals of both stationarity conditions
        if abs(q_of_qhat(q_hat) - q) > 100 * tol:
            continue
        if not (0.0 <= q < 1.0 - 1e-9) or not math.isfinite(q_hat):
            # frozen q -> 1 runaway, not a saddle of the finite functional
            continue
        value = rs_entropy_value(alpha, q, q_hat, order)
        if not math.isfinite(value):
            continue
        solutions.append(SaddleResult(q, q_hat, value))
    if not solutions:
        raise NumericFailure(
            f"RS saddle search failed to converge at alpha={alpha} "
            f"(tol={tol}, max_iter={max_iter})"
        )
    values = [s.value for s in solutions]
    if max(values) - min(values) > 1e-6:
        raise NumericFailure(
            f"RS saddle initializations disagree at alpha={alpha}: {values}"
        )
    return solutions[0]


def perceptron_threshold(tol: float = 1e-5) -> float:
    """Ratio alpha_s where the RS entropy of the binary perceptron vanishes."""
    lo, hi = 0.5, 1.0
    if rs_entropy_perceptron(lo).value <= 0 or rs_entropy_perceptron(hi).value >= 0:
        raise NumericFailure("threshold bracket [0.5, 1.0] invalid")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rs_entropy_perceptron(mid).value > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Heuristic-search success probability and the contradiction line
# ---------------------------------------------------------------------------


def p_success_uc(alpha: float) -> float:
    """Limiting success probability of the UC heuristic on random 3-SAT.

    Derived from the unit-clause queue: units arrive at rate
    lambda(t) = (3 alpha / 2) t (1 - t) per assignment, one is served per
    step, and a contradiction occurs when a new unit collides with an
    opposite one.  The failure exponent integrates the collision hazard
    lambda^2 / (4 (1 - lambda) (1 - t)) and closes to
    arctan(1/r)/(2r) - 3 alpha / 16 with r = sqrt(8/(3 alpha) - 1).
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0.0:
        return 1.0
    if alpha >= 8.0 / 3.0:
        return 0.0
    r = math.sqrt(8.0 / (3.0 * alpha) - 1.0)
    return math.exp(-math.atan(1.0 / r) / (2.0 * r) + 3.0 * alpha / 16.0)


def contradiction_line(p: float) -> float:
    """2+p-SAT ratio alpha = 1/(1-p) above which UP generates contradictions."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must be in [0, 1)")
    return 1.0 / (1.0 - p)


# ---------------------------------------------------------------------------
# XORSAT clustering threshold
# ---------------------------------------------------------------------------


def _max_fixed_point_gap(alpha: float, k: int) -> float:
    """max_x [1 - exp(-alpha k x^{k-1}) - x]; >= 0 iff a solution exists in (0,1]."""
    xs = np.concatenate(
        [np.logspace(-12, -2, 600), np.linspace(0.01, 1.0, 4000)]
    )
    gap = 1.0 - np.exp(-alpha * k * xs ** (k - 1)) - xs
    return float(gap.max())


def xorsat_clustering_threshold(k: int, tol: float = 1e-6) -> float:
    """Smallest alpha where x = 1 - exp(-alpha k x^{k-1}) has a root in (0, 1]."""
    if k < 2:
        raise ValueError("k must be >= 2")
    lo, hi = 1e-6, 4.0
    while _max_fixed_point_gap(hi, k) < 0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _max_fixed_point_gap(mid, k) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)

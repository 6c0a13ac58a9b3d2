"""Order convergence as verifiable finite certificates.

A certificate witnesses convergence of a sequence by four self-adjoint
component sequences squeezed between their limits and a shared scalar
dominator envelope 2 eps_n 1, together with an analytic c/n tail bound that
discharges the part of the statement a finite prefix cannot see. The builder
turns norm convergence into such a witness; the verifier re-checks every
condition and reports the first failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    AlgebraElement,
    ToleranceConfig,
    _tol,
    adjoint,
    eigh_hermitian,
    frobenius_norm,
    imag_part,
    operator_norm,
    real_part,
)
from .errors import EnvelopeViolation, SignatureMismatch

__all__ = [
    "DominatorEnvelope",
    "OrderLimitCertificate",
    "LimitReport",
    "build_certificate",
    "verify_certificate",
    "limit_calculus_check",
    "LOWER_BOUND",
    "UPPER_BOUND",
    "SUM_DECOMPOSITION",
    "ENVELOPE_MONOTONICITY",
    "TAIL",
]

# failing_condition tags, in the priority order the verifier reports them
LOWER_BOUND = "lower-bound"
UPPER_BOUND = "upper-bound"
SUM_DECOMPOSITION = "sum-decomposition"
ENVELOPE_MONOTONICITY = "envelope-monotonicity"
TAIL = "tail"

_I_POWERS = (1j, -1.0 + 0j, -1j, 1.0 + 0j)  # i^k for k = 1..4


@dataclass(frozen=True)
class DominatorEnvelope:
    """Scalar dominator prefix eps_n plus the declared c/n tail bound."""

    eps: tuple[float, ...]
    tail_rate: float


@dataclass(frozen=True)
class OrderLimitCertificate:
    """Finite-prefix witness of order convergence of ``terms`` to ``limit``.

    components[k][j] is the k-th self-adjoint component sequence at prefix
    position j; the dominator is 2 eps_j 1 shared across components.
    """

    indices: tuple[int, ...]
    terms: tuple[AlgebraElement, ...]
    limit: AlgebraElement
    components: tuple[tuple[AlgebraElement, ...], ...]
    component_limits: tuple[AlgebraElement, ...]
    envelope: DominatorEnvelope


@dataclass(frozen=True)
class LimitReport:
    accepted: bool
    worst_residual: float
    failing_condition: str | None = None


def build_certificate(
    seq: Sequence[AlgebraElement],
    limit: AlgebraElement,
    tail_rate: float,
    tol: ToleranceConfig | None = None,
    indices: Sequence[int] | None = None,
) -> OrderLimitCertificate:
    """Convert norm convergence at rate tail_rate/n into an order certificate.

    Raises EnvelopeViolation when some prefix term exceeds the declared
    bound. ``indices`` defaults to 1..N; explicit ascending naturals are
    accepted for subsequences such as geometric ladders.
    """
    t = _tol(tol)
    if len(seq) == 0:
        raise ValueError("sequence must be non-empty")
    if tail_rate < 0:
        raise ValueError("tail_rate must be non-negative")
    if indices is None:
        indices = tuple(range(1, len(seq) + 1))
    else:
        indices = tuple(int(i) for i in indices)
        if len(indices) != len(seq):
            raise ValueError("indices length must match sequence length")
        if any(i < 1 for i in indices) or any(
            a >= b for a, b in zip(indices, indices[1:])
        ):
            raise ValueError("indices must be ascending naturals")
    sig = limit.signature
    gaps = [operator_norm(a - limit, t) for a in seq]
    for n, g in zip(indices, gaps):
        if g > tail_rate / n + t.pos_slack:
            raise EnvelopeViolation(
                f"term at index {n} lies {g:.3e} from the limit, over {tail_rate}/{n}"
            )
    eps = []
    running = 0.0
    for g in reversed(gaps):
        running = max(running, g)
        eps.append(running)
    eps.reverse()

    one = AlgebraElement.identity(sig)
    re_terms = [real_part(a) for a in seq]
    im_terms = [imag_part(a) for a in seq]
    comp1 = tuple(im + e * one for im, e in zip(im_terms, eps))
    comp2 = tuple(e * one for e in eps)
    comp3 = comp2
    comp4 = tuple(re + e * one for re, e in zip(re_terms, eps))
    zero = AlgebraElement.zeros(sig)
    return OrderLimitCertificate(
        indices=indices,
        terms=tuple(seq),
        limit=limit,
        components=(comp1, comp2, comp3, comp4),
        component_limits=(imag_part(limit), zero, zero, real_part(limit)),
        envelope=DominatorEnvelope(eps=tuple(eps), tail_rate=float(tail_rate)),
    )


def _check_shape(c: OrderLimitCertificate):
    n = len(c.indices)
    if n == 0 or len(c.terms) != n or len(c.envelope.eps) != n:
        raise ValueError("certificate prefix lengths disagree")
    if len(c.components) != 4 or len(c.component_limits) != 4:
        raise ValueError("certificate needs exactly four component sequences")
    if any(len(comp) != n for comp in c.components):
        raise ValueError("component sequence length disagrees with prefix")


def verify_certificate(
    c: OrderLimitCertificate, tol: ToleranceConfig | None = None
) -> LimitReport:
    """Re-check every certificate condition; failure is a report, not an exception.

    Measured residuals per condition, reported against the first failure in
    priority order: lower-bound, upper-bound, sum-decomposition,
    envelope-monotonicity, tail.
    """
    t = _tol(tol)
    _check_shape(c)
    eps = c.envelope.eps
    one = AlgebraElement.identity(c.limit.signature)
    residuals = {
        LOWER_BOUND: 0.0,
        UPPER_BOUND: 0.0,
        SUM_DECOMPOSITION: 0.0,
        ENVELOPE_MONOTONICITY: 0.0,
        TAIL: 0.0,
    }
    failing = {tag: False for tag in residuals}

    for k in range(4):
        comp_limit = c.component_limits[k]
        for j in range(len(c.indices)):
            d = c.components[k][j] - comp_limit
            defect = frobenius_norm(d - adjoint(d))
            scale = 1.0 + frobenius_norm(d)
            if defect > t.pos_slack * scale:
                residuals[LOWER_BOUND] = max(residuals[LOWER_BOUND], defect)
                failing[LOWER_BOUND] = True
                continue
            eig = eigh_hermitian(real_part(d), t)
            lo, hi = eig.min_eigenvalue, max(float(w[-1]) for w in eig.eigenvalues)
            norm_d = max(abs(lo), abs(hi))
            low_resid = max(0.0, -lo)
            residuals[LOWER_BOUND] = max(residuals[LOWER_BOUND], low_resid)
            if low_resid > t.pos_slack * (1.0 + norm_d):
                failing[LOWER_BOUND] = True
            bound = 2.0 * eps[j]
            up_resid = max(0.0, hi - bound)
            residuals[UPPER_BOUND] = max(residuals[UPPER_BOUND], up_resid)
            if up_resid > t.pos_slack * (1.0 + norm_d + bound):
                failing[UPPER_BOUND] = True

    for j, a in enumerate(c.terms):
        total = AlgebraElement.zeros(c.limit.signature)
        for k in range(4):
            total = total + _I_POWERS[k] * c.components[k][j]
        r = operator_norm(total - a, t)
        residuals[SUM_DECOMPOSITION] = max(residuals[SUM_DECOMPOSITION], r)
        if r > t.pos_slack * (1.0 + operator_norm(a, t)):
            failing[SUM_DECOMPOSITION] = True
    total = AlgebraElement.zeros(c.limit.signature)
    for k in range(4):
        total = total + _I_POWERS[k] * c.component_limits[k]
    r = operator_norm(total - c.limit, t)
    residuals[SUM_DECOMPOSITION] = max(residuals[SUM_DECOMPOSITION], r)
    if r > t.pos_slack * (1.0 + operator_norm(c.limit, t)):
        failing[SUM_DECOMPOSITION] = True

    for j in range(len(eps)):
        drop = max(0.0, -eps[j])
        rise = max(0.0, eps[j + 1] - eps[j]) if j + 1 < len(eps) else 0.0
        r = max(drop, rise)
        residuals[ENVELOPE_MONOTONICITY] = max(residuals[ENVELOPE_MONOTONICITY], r)
        if r > t.pos_slack:
            failing[ENVELOPE_MONOTONICITY] = True

    last = c.indices[-1]
    tail_resid = max(0.0, eps[-1] - c.envelope.tail_rate / last)
    residuals[TAIL] = max(residuals[TAIL], tail_resid)
    if tail_resid > t.pos_slack or c.envelope.tail_rate < 0:
        failing[TAIL] = True

    worst = max(residuals.values())
    for tag in (LOWER_BOUND, UPPER_BOUND, SUM_DECOMPOSITION, ENVELOPE_MONOTONICITY, TAIL):
        if failing[tag]:
            return LimitReport(accepted=False, worst_residual=worst, failing_condition=tag)
    return LimitReport(accepted=True, worst_residual=worst, failing_condition=None)


def _common_positions(c1: OrderLimitCertificate, c2: OrderLimitCertificate):
    pos2 = {n: j for j, n in enumerate(c2.indices)}
    pairs = [(j, pos2[n]) for j, n in enumerate(c1.indices) if n in pos2]
    if not pairs:
        raise ValueError("certificates share no indices")
    return pairs


def limit_calculus_check(
    c1: OrderLimitCertificate,
    c2: OrderLimitCertificate,
    x: AlgebraElement,
    y: AlgebraElement,
    tol: ToleranceConfig | None = None,
) -> LimitReport:
    """Check the limit calculus on a certified pair: sum, two-sided module
    action, product, order preservation on aligned indices, and the norm
    upper bound. Derived certificates are built with analytic tail rates and
    re-verified; the combined report carries the first failing condition.
    """
    t = _tol(tol)
    sig = c1.limit.signature
    if c2.limit.signature != sig or x.signature != sig or y.signature != sig:
        raise SignatureMismatch("limit calculus needs a single ambient algebra")
    pairs = _common_positions(c1, c2)
    idx = [c1.indices[j1] for j1, _ in pairs]
    r1, r2 = c1.envelope.tail_rate, c2.envelope.tail_rate

    worst = 0.0
    failing: str | None = None

    def absorb(report: LimitReport):
        nonlocal worst, failing
        worst = max(worst, report.worst_residual)
        if not report.accepted and failing is None:
            failing = report.failing_condition

    def derived(seq, limit, rate):
        try:
            cert = build_certificate(seq, limit, rate, t, indices=idx)
        except EnvelopeViolation:
            return LimitReport(accepted=False, worst_residual=float("inf"), failing_condition=TAIL)
        return verify_certificate(cert, t)

    # (i) sum
    absorb(derived(
        [c1.terms[j1] + c2.terms[j2] for j1, j2 in pairs],
        c1.limit + c2.limit,
        r1 + r2,
    ))
    # (ii) two-sided module action on the first sequence
    nx, ny = operator_norm(x, t), operator_norm(y, t)
    absorb(derived(
        [x * c1.terms[j1] * y for j1, _ in pairs],
        x * c1.limit * y,
        r1 * nx * ny,
    ))
    # (iii) product
    bound_b = max(
        max(operator_norm(c2.terms[j2], t) for _, j2 in pairs),
        operator_norm(c2.limit, t),
    )
    absorb(derived(
        [c1.terms[j1] * c2.terms[j2] for j1, j2 in pairs],
        c1.limit * c2.limit,
        r1 * bound_b + r2 * operator_norm(c1.limit, t),
    ))
    # (iv) order preservation where the termwise hypothesis holds
    hypothesis = True
    for j1, j2 in pairs:
        d = c2.terms[j2] - c1.terms[j1]
        if frobenius_norm(d - adjoint(d)) > t.pos_slack * (1.0 + frobenius_norm(d)):
            hypothesis = False
            break
        eig = eigh_hermitian(real_part(d), t)
        if eig.min_eigenvalue < -t.pos_slack * (1.0 + eig.max_abs_eigenvalue):
            hypothesis = False
            break
    if hypothesis:
        d = c2.limit - c1.limit
        defect = frobenius_norm(d - adjoint(d))
        eig = eigh_hermitian(real_part(d), t)
        resid = max(0.0, -eig.min_eigenvalue, defect)
        worst = max(worst, resid)
        if resid > t.pos_slack * (1.0 + eig.max_abs_eigenvalue) and failing is None:
            failing = LOWER_BOUND
    # (v) norm bound from the prefix
    for c in (c1, c2):
        prefix_max = max(operator_norm(a, t) for a in c.terms)
        overshoot = max(
            0.0, operator_norm(c.limit, t) - prefix_max - 8.0 * c.envelope.eps[0]
        )
        worst = max(worst, overshoot)
        if overshoot > t.pos_slack * (1.0 + prefix_max) and failing is None:
            failing = UPPER_BOUND

    return LimitReport(accepted=failing is None, worst_residual=worst, failing_condition=failing)

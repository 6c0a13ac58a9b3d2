"""Polar decomposition and the spectral-cut construction.

Two routes to the same partial isometry: a direct route through the
eigendecomposition of x*x, and a regularized route through the resolvent
ladder u_n = x (1/n + |x|)^{-1} along geometric indices, snapped onto an
exact partial isometry. The direct route serves as the independent oracle
for the ladder. The spectral cut produces a nonzero projection p and a
positive a with a |x*| = p by truncating the spectrum of |x*| below a cut
point; its three branches cover projections, invertible elements, and
singular elements with a spectral gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AlgebraElement,
    Projection,
    ToleranceConfig,
    _tol,
    adjoint,
    eigh_hermitian,
    loewner_leq,
    operator_norm,
    positive_sqrt,
    pseudo_inverse_on_range,
    range_projection,
)
from .errors import BadCut, SlowConvergence, ZeroElement
from .spectral import BorelSubset, measure_of, spectral_measure

__all__ = [
    "PolarResult",
    "SpectralCut",
    "polar_direct",
    "polar_regularized",
    "verify_polar",
    "spectral_cut",
    "resolvent_gap_inequality",
    "DEFAULT_LADDER_MAX",
]

DEFAULT_LADDER_MAX = 2**20


@dataclass(frozen=True)
class PolarResult:
    """Partial isometry u with x = |x*| u = u |x|.

    diagnostics holds (n, ||u_n - u||) ladder pairs when the regularized
    route produced the result.
    """

    u: AlgebraElement
    absx: AlgebraElement
    absxstar: AlgebraElement
    diagnostics: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class SpectralCut:
    """Projection p and positive a with a, p, |x*| commuting and a |x*| = p."""

    p: Projection
    a: AlgebraElement
    mu: float | None = None


def polar_direct(
    x: AlgebraElement, tol: ToleranceConfig | None = None
) -> PolarResult:
    """Polar decomposition through the eigendecomposition of x*x.

    u = x pinv(|x|) vanishes on ker |x|; the zero element yields u = 0.
    """
    t = _tol(tol)
    absx = positive_sqrt(adjoint(x) * x, t)
    absxstar = positive_sqrt(x * adjoint(x), t)
    u = x * pseudo_inverse_on_range(absx, t)
    return PolarResult(u=u, absx=absx, absxstar=absxstar)


def _ladder(n_max: int) -> list[int]:
    ns, n = [], 1
    while n < n_max:
        ns.append(n)
        n *= 2
    ns.append(n_max)
    return ns


def polar_regularized(
    x: AlgebraElement,
    n_max: int = DEFAULT_LADDER_MAX,
    tol: ToleranceConfig | None = None,
) -> PolarResult:
    """Polar decomposition through the resolvent ladder x (1/n + |x|)^{-1}.

    Runs geometric indices up to n_max, stops early once successive terms
    stabilize below rank_cutoff, and snaps the final term onto an exact
    partial isometry with one direct-route projection (disclosed through the
    diagnostics). Raises SlowConvergence when the final gap exceeds the
    analytic bound (1/n) / (1/n + sigma_min).
    """
    t = _tol(tol)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    gram = adjoint(x) * x
    eig = eigh_hermitian(gram, t)
    cutoff = t.rank_cutoff * max(1.0, eig.max_abs_eigenvalue)
    sigma = [np.sqrt(np.maximum(w, 0.0)) for w in eig.eigenvalues]
    kept = [s[s * s > cutoff] for s in sigma]
    sigma_min = min((float(s.min()) for s in kept if s.size), default=None)
    absx = eig.assemble(lambda w: np.sqrt(np.maximum(w, 0.0)))
    absxstar = positive_sqrt(x * adjoint(x), t)

    terms: list[tuple[int, AlgebraElement]] = []
    prev = None
    for n in _ladder(n_max):
        resolvent = eig.assemble(lambda w: 1.0 / (1.0 / n + np.sqrt(np.maximum(w, 0.0))))
        u_n = x * resolvent
        terms.append((n, u_n))
        if prev is not None and operator_norm(u_n - prev, t) < t.rank_cutoff:
            break
        prev = u_n

    last_n, last_u = terms[-1]
    u = polar_direct(last_u, t).u
    diagnostics = tuple((n, operator_norm(u_n - u, t)) for n, u_n in terms)
    if sigma_min is not None:
        bound = (1.0 / last_n) / (1.0 / last_n + sigma_min)
        if diagnostics[-1][1] > bound + 10.0 * t.pos_slack:
            raise SlowConvergence(
                f"ladder gap {diagnostics[-1][1]:.3e} above bound {bound:.3e} at n={last_n}"
            )
    return PolarResult(u=u, absx=absx, absxstar=absxstar, diagnostics=diagnostics)


def verify_polar(
    x: AlgebraElement, u: AlgebraElement, tol: ToleranceConfig | None = None
) -> bool:
    """Uniqueness gate: accept u only when every polar identity holds.

    Partial isometry, both factorizations x = |x*| u and x = u |x|, and both
    range-projection matches u*u = rp(|x|), u u* = rp(|x*|).
    """
    t = _tol(tol)
    absx = positive_sqrt(adjoint(x) * x, t)
    absxstar = positive_sqrt(x * adjoint(x), t)
    ustar = adjoint(u)
    thr = 10.0 * t.pos_slack * (1.0 + operator_norm(x, t))
    checks = [
        u * ustar * u - u,
        x - absxstar * u,
        x - u * absx,
        ustar * u - range_projection(absx, t).element,
        u * ustar - range_projection(absxstar, t).element,
    ]
    return all(operator_norm(c, t) <= thr for c in checks)


def spectral_cut(
    x: AlgebraElement,
    mu: float | None = None,
    tol: ToleranceConfig | None = None,
) -> SpectralCut:
    """Cut the spectrum of |x*| below mu to produce p != 0 and positive a
    with a |x*| = (a x x* a)^{1/2} = p.

    Branches: |x*| a projection -> (a, p) = (1, x x*); |x*| invertible ->
    (p, a) = (1, (x x*)^{-1/2}); otherwise remove the spectrum inside
    [0, mu], defaulting mu to half the smallest nonzero spectrum point.
    """
    t = _tol(tol)
    norm_x = operator_norm(x, t)
    if norm_x <= t.pos_slack:
        raise ZeroElement("spectral cut needs a nonzero element")
    if mu is not None and not 0.0 < mu < norm_x:
        raise BadCut(f"cut point must lie strictly between 0 and {norm_x:.6g}")
    gram_star = x * adjoint(x)
    absxstar = positive_sqrt(gram_star, t)
    sig = x.signature
    one = AlgebraElement.identity(sig)

    if operator_norm(absxstar * absxstar - absxstar, t) <= t.pos_slack * (1.0 + norm_x):
        return SpectralCut(p=Projection(gram_star, t), a=one, mu=None)

    eig = eigh_hermitian(absxstar, t)
    cutoff = t.rank_cutoff * max(1.0, eig.max_abs_eigenvalue)
    if eig.min_eigenvalue > cutoff:
        return SpectralCut(p=Projection(one, t), a=pseudo_inverse_on_range(absxstar, t), mu=None)

    m = spectral_measure(absxstar, t)
    points = sorted(m.domain_spectrum.points, key=lambda p: p.real)
    if mu is None:
        nonzero = [p.real for p in points if p.real > cutoff]
        mu = nonzero[0] / 2.0
    inside = [p for p in points if p.real <= mu]
    p_el = one - measure_of(m, BorelSubset.of(inside)).element
    corner = p_el * gram_star * p_el
    a = positive_sqrt(pseudo_inverse_on_range(corner, t), t)
    return SpectralCut(p=Projection(p_el, t), a=a, mu=float(mu))


def resolvent_gap_inequality(
    x: AlgebraElement, n: int, m: int, tol: ToleranceConfig | None = None
) -> bool:
    """Check the squared resolvent-gap bound in the Loewner order.

    With R_j = (1/j + |x|)^{-1}, D = R_n - R_m and S = x D + D x*, verifies
    0 <= S^2 and S^2 <= 2 (x D^2 x* + D x* x D).
    """
    t = _tol(tol)
    if n < 1 or m < 1:
        raise ValueError("resolvent indices must be positive")
    gram = adjoint(x) * x
    eig = eigh_hermitian(gram, t)

    def resolvent(j: int) -> AlgebraElement:
        return eig.assemble(lambda w: 1.0 / (1.0 / j + np.sqrt(np.maximum(w, 0.0))))

    delta = resolvent(n) - resolvent(m)
    s = x * delta + delta * adjoint(x)
    s2 = s * s
    rhs = 2.0 * (x * delta * delta * adjoint(x) + delta * gram * delta)
    zero = AlgebraElement.zeros(x.signature)
    return loewner_leq(zero, s2, t) and loewner_leq(s2, rhs, t)

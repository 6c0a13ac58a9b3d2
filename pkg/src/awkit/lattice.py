"""Projection lattice and commutative-subalgebra machinery.

Subalgebras are stored as orthonormal bases under the trace inner product.
Maximal commutative subalgebras (MASAs) arise from jointly diagonalizing
commuting normal generators and refining each degenerate eigenspace with a
seeded random orthonormal basis; monotone closures are computed by the
face-supremum construction and iterated to a fixed point. At finite
dimension the closure of a unital closed commutative subalgebra is itself,
and the closure correspondence between two MASAs is the identity on
projections; both facts are asserted rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    AlgebraElement,
    Projection,
    ToleranceConfig,
    _tol,
    adjoint,
    eigh_hermitian,
    frobenius_norm,
    imag_part,
    operator_norm,
    range_projection,
    real_part,
    simultaneous_eigh,
)
from .errors import NotCommuting, NotContained, NotNormal, NotPositive

__all__ = [
    "Subalgebra",
    "ClosureCorrespondence",
    "sup_projections",
    "max_annihilator",
    "generate_masa",
    "relative_commutant",
    "minimal_projections",
    "monotone_closure",
    "closure_correspondence",
    "principal_angles",
    "spans_equal",
    "SPAN_ANGLE_TOL",
]

# basis-free subalgebra equality threshold on principal angles
SPAN_ANGLE_TOL = 1e-8

# face enumeration walks subsets of minimal projections
MAX_ENUMERATED_FACES = 20


def _vec(x: AlgebraElement) -> np.ndarray:
    return np.concatenate([b.ravel() for b in x.blocks])


def _unvec(v: np.ndarray, signature: Sequence[int]) -> AlgebraElement:
    blocks, pos = [], 0
    for n in signature:
        blocks.append(v[pos : pos + n * n].reshape(n, n))
        pos += n * n
    return AlgebraElement(blocks)


def _orthonormal_rows(rows: np.ndarray, rel_cut: float) -> np.ndarray:
    """Orthonormal basis of the row space, via SVD with a relative rank cut."""
    if rows.size == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return vh[:0]
    return vh[s > rel_cut * s[0]]


@dataclass(frozen=True)
class Subalgebra:
    """A unital, *-closed, multiplication-closed subspace of the ambient algebra.

    ``basis`` is orthonormal under the trace inner product; rows of the
    vectorized basis span the subalgebra.
    """

    signature: tuple[int, ...]
    basis: tuple[AlgebraElement, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _basis_matrix(self) -> np.ndarray:
        return np.array([_vec(b) for b in self.basis])

    def project(self, x: AlgebraElement) -> AlgebraElement:
        m = self._basis_matrix()
        coeff = m.conj() @ _vec(x)
        return _unvec(coeff @ m, self.signature)

    def membership_residual(self, x: AlgebraElement) -> float:
        return frobenius_norm(x - self.project(x))

    def contains(self, x: AlgebraElement, tol: ToleranceConfig | None = None) -> bool:
        t = _tol(tol)
        return self.membership_residual(x) <= t.pos_slack * (1.0 + frobenius_norm(x))

    def contains_subalgebra(
        self, other: "Subalgebra", tol: ToleranceConfig | None = None
    ) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def is_commutative(self, tol: ToleranceConfig | None = None) -> bool:
        t = _tol(tol)
        for i, a in enumerate(self.basis):
            for b in self.basis[i + 1 :]:
                if frobenius_norm(a * b - b * a) > t.pos_slack * 2.0:
                    return False
        return True

    def is_masa(self, tol: ToleranceConfig | None = None) -> bool:
        """Maximal commutative at finite dimension: commutative with dimension
        equal to the total block dimension."""
        return self.dim == sum(self.signature) and self.is_commutative(tol)

    @classmethod
    def from_basis_unchecked(
        cls, signature: Sequence[int], basis: Sequence[AlgebraElement]
    ) -> "Subalgebra":
        return cls(tuple(signature), tuple(basis))

    @classmethod
    def from_generators(
        cls,
        generators: Sequence[AlgebraElement],
        tol: ToleranceConfig | None = None,
    ) -> "Subalgebra":
        """Smallest unital *-closed multiplication-closed subspace containing
        the generators."""
        t = _tol(tol)
        if not generators:
            raise ValueError("at least one generator required")
        sig = generators[0].signature
        pool = [AlgebraElement.identity(sig)]
        for g in generators:
            pool.append(g)
            pool.append(adjoint(g))
        rows = _orthonormal_rows(np.array([_vec(p) for p in pool]), t.rank_cutoff)
        while True:
            elems = [_unvec(r, sig) for r in rows]
            prods = [_vec(a * b) for a in elems for b in elems]
            new_rows = _orthonormal_rows(
                np.vstack([rows, np.array(prods)]), t.rank_cutoff
            )
            if new_rows.shape[0] == rows.shape[0]:
                return cls(tuple(sig), tuple(elems))
            rows = new_rows


@dataclass(frozen=True)
class ClosureCorrespondence:
    """Pairing of closure projections computed inside two different MASAs."""

    pairs: tuple[tuple[Projection, Projection], ...]


def principal_angles(s1: Subalgebra, s2: Subalgebra) -> np.ndarray:
    """Principal angles between basis spans under the trace inner product.

    Computed through the projection residual (sine form), which stays
    accurate for angles far below sqrt(machine epsilon).
    """
    q1 = s1._basis_matrix().T  # columns orthonormal
    q2 = s2._basis_matrix().T
    resid = q2 - q1 @ (q1.conj().T @ q2)
    sines = np.linalg.svd(resid, compute_uv=False)
    return np.arcsin(np.clip(np.sort(sines), 0.0, 1.0))


def spans_equal(s1: Subalgebra, s2: Subalgebra, angle_tol: float = SPAN_ANGLE_TOL) -> bool:
    if s1.dim != s2.dim:
        return False
    angles = principal_angles(s1, s2)
    return angles.size == 0 or float(angles[-1]) <= angle_tol


def sup_projections(
    ps: Sequence[Projection], tol: ToleranceConfig | None = None
) -> Projection:
    """Least projection dominating every member: the range projection of the sum."""
    if not ps:
        raise ValueError("sup_projections needs a non-empty family")
    total = ps[0].element
    for p in ps[1:]:
        total = total + p.element
    return range_projection(total, tol)


def max_annihilator(
    elements: Sequence[AlgebraElement], tol: ToleranceConfig | None = None
) -> Projection:
    """Largest projection q with q s = 0 for every positive s in the family."""
    t = _tol(tol)
    if not elements:
        raise ValueError("max_annihilator needs a non-empty family")
    for i, s in enumerate(elements):
        if frobenius_norm(s - adjoint(s)) > t.pos_slack * (1.0 + frobenius_norm(s)):
            raise NotPositive(f"element {i} is not self-adjoint")
        eig = eigh_hermitian(real_part(s), t)
        if eig.min_eigenvalue < -t.pos_slack * (1.0 + eig.max_abs_eigenvalue):
            raise NotPositive(f"element {i} is not positive")
    total = elements[0]
    for s in elements[1:]:
        total = total + s
    rp = range_projection(total, t)
    return Projection(AlgebraElement.identity(total.signature) - rp.element, t)


def _require_commuting_normal(generators, t):
    for i, g in enumerate(generators):
        gstar = adjoint(g)
        scale = operator_norm(g, t)
        if operator_norm(g * gstar - gstar * g, t) > t.pos_slack * (1.0 + scale * scale):
            raise NotNormal(f"generator {i} does not commute with its adjoint")
        for j, h in enumerate(generators[i + 1 :], start=i + 1):
            bound = t.pos_slack * (1.0 + scale * operator_norm(h, t))
            if operator_norm(g * h - h * g, t) > bound:
                raise NotCommuting(f"generators {i} and {j} do not commute")


def generate_masa(
    seed_commuting: Sequence[AlgebraElement],
    refinement_seed: int,
    tol: ToleranceConfig | None = None,
) -> Subalgebra:
    """Maximal commutative subalgebra containing the commuting normal seeds.

    Jointly diagonalizes the seeds blockwise, then completes every joint
    eigenspace with a seeded random orthonormal basis; the result is the
    diagonal algebra of the refined basis, spanned by its rank-one
    projections.
    """
    t = _tol(tol)
    if not seed_commuting:
        raise ValueError("at least one seed element required")
    _require_commuting_normal(seed_commuting, t)
    sig = seed_commuting[0].signature
    rng = np.random.default_rng(refinement_seed)
    basis_elements = []
    for k, n in enumerate(sig):
        mats = []
        for g in seed_commuting:
            mats.append(real_part(g).blocks[k])
            mats.append(imag_part(g).blocks[k])
        basis, groups = simultaneous_eigh(mats, t)
        for idx in groups:
            if len(idx) > 1:
                g = rng.standard_normal((len(idx), len(idx))) + 1j * rng.standard_normal(
                    (len(idx), len(idx))
                )
                q, r = np.linalg.qr(g)
                d = np.diagonal(r)
                basis[:, idx] = basis[:, idx] @ (q * (d / np.abs(d)))
        for col in range(n):
            v = basis[:, col : col + 1]
            m = v @ v.conj().T
            blocks = [
                0.5 * (m + m.conj().T) if j == k else np.zeros((d, d), dtype=complex)
                for j, d in enumerate(sig)
            ]
            basis_elements.append(AlgebraElement(blocks))
    out = Subalgebra.from_basis_unchecked(sig, basis_elements)
    if not out.is_masa(t):
        raise RuntimeError("refined diagonal algebra failed the MASA postcondition")
    return out


def relative_commutant(
    s: Subalgebra, tol: ToleranceConfig | None = None
) -> Subalgebra:
    """Elements of the ambient algebra commuting with everything in s.

    Solved blockwise as the null space of x -> [x, b] over the basis.
    """
    t = _tol(tol)
    sig = s.signature
    basis_elements = []
    for k, n in enumerate(sig):
        eye = np.eye(n, dtype=complex)
        constraints = []
        for b in s.basis:
            bk = b.blocks[k]
            if np.linalg.norm(bk) <= t.rank_cutoff:
                continue
            # row-major vec: vec(b x - x b) = (kron(b, I) - kron(I, b^T)) vec(x)
            constraints.append(np.kron(bk, eye) - np.kron(eye, bk.T))
        if constraints:
            stacked = np.vstack(constraints)
            _, sv, vh = np.linalg.svd(stacked)
            rank = int(np.sum(sv > t.rank_cutoff * max(1.0, sv[0])))
            null = vh[rank:].conj()
        else:
            null = np.eye(n * n, dtype=complex)
        for row in null:
            blocks = [
                row.reshape(n, n) if j == k else np.zeros((d, d), dtype=complex)
                for j, d in enumerate(sig)
            ]
            basis_elements.append(AlgebraElement(blocks))
    rows = _orthonormal_rows(
        np.array([_vec(b) for b in basis_elements]), t.rank_cutoff
    )
    return Subalgebra.from_basis_unchecked(sig, [_unvec(r, sig) for r in rows])


def minimal_projections(
    s: Subalgebra, tol: ToleranceConfig | None = None
) -> list[Projection]:
    """Minimal projections of a commutative subalgebra, summing to the identity.

    Joint eigenspaces of the basis are grouped by their joint eigenvalue
    tuples across blocks; each tuple class yields one minimal projection.
    """
    t = _tol(tol)
    if not s.is_commutative(t):
        raise NotCommuting("minimal projections require a commutative subalgebra")
    sig = s.signature
    carriers = []  # (block, columns, value tuple)
    for k, n in enumerate(sig):
        mats = []
        for b in s.basis:
            mats.append(real_part(b).blocks[k])
            mats.append(imag_part(b).blocks[k])
        basis, groups = simultaneous_eigh(mats, t)
        for idx in groups:
            v = basis[:, idx]
            tup = np.array(
                [np.mean(np.diagonal(v.conj().T @ b.blocks[k] @ v)) for b in s.basis]
            )
            carriers.append((k, v, tup))
    # single-link clustering of the value tuples
    m = len(carriers)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if np.linalg.norm(carriers[i][2] - carriers[j][2]) <= t.cluster_tol * (
                1.0 + np.linalg.norm(carriers[i][2])
            ):
                parent[find(i)] = find(j)
    clusters: dict[int, list[int]] = {}
    for i in range(m):
        clusters.setdefault(find(i), []).append(i)

    projections = []
    for members in clusters.values():
        blocks = [np.zeros((n, n), dtype=complex) for n in sig]
        for i in members:
            k, v, _ = carriers[i]
            mat = v @ v.conj().T
            blocks[k] = blocks[k] + 0.5 * (mat + mat.conj().T)
        projections.append(Projection(AlgebraElement(blocks), t))
    if len(projections) != s.dim:
        raise RuntimeError(
            f"found {len(projections)} minimal projections in a {s.dim}-dimensional algebra"
        )
    projections.sort(
        key=lambda p: tuple(-float(np.trace(b).real) for b in p.element.blocks)
    )
    return projections


def _support_masks(minimal: Sequence[Projection], masa_minimal: Sequence[Projection], t):
    """Bitmask of MASA rank-one projections carrying each minimal projection."""
    masks = []
    for e in minimal:
        mask = 0
        recover = AlgebraElement.zeros(e.element.signature)
        for j, f in enumerate(masa_minimal):
            overlap = sum(
                float(np.trace(a @ b).real)
                for a, b in zip(e.element.blocks, f.element.blocks)
            )
            if overlap > 0.5:
                mask |= 1 << j
                recover = recover + f.element
        if frobenius_norm(recover - e.element) > t.pos_slack * (
            1.0 + frobenius_norm(e.element)
        ):
            raise NotContained(
                "a minimal projection is not a sum of the MASA's rank-one projections"
            )
        masks.append(mask)
    return masks


def _closure_step(current: Subalgebra, masa: Subalgebra, t) -> Subalgebra:
    """One closure pass: adjoin, for every projection p of the MASA, the
    MASA-supremum of the face {x in current, 0 <= x <= 1, x <= p}.

    The supremum of a face equals the sum of the minimal projections under
    p, so distinct suprema are enumerated through unions of support sets
    rather than through all projections of the MASA; every projection of the
    MASA realizes one of these unions and conversely.
    """
    minimal = minimal_projections(current, t)
    masa_minimal = minimal_projections(masa, t)
    if len(minimal) > MAX_ENUMERATED_FACES:
        raise ValueError(
            f"face enumeration capped at {MAX_ENUMERATED_FACES} minimal projections"
        )
    masks = _support_masks(minimal, masa_minimal, t)
    m = len(minimal)
    seen = set()
    extra = []
    for j_mask in range(1 << m):
        union = 0
        for i in range(m):
            if j_mask >> i & 1:
                union |= masks[i]
        dominated = 0
        for i in range(m):
            if masks[i] & ~union == 0:
                dominated |= 1 << i
        if dominated in seen:
            continue
        seen.add(dominated)
        total = AlgebraElement.zeros(current.signature)
        for i in range(m):
            if dominated >> i & 1:
                total = total + minimal[i].element
        extra.append(total)
    gens = [p.element for p in minimal] + extra
    return Subalgebra.from_generators(gens, t)


def monotone_closure(
    b: Subalgebra, masa: Subalgebra, tol: ToleranceConfig | None = None
) -> Subalgebra:
    """Monotone closure of a commutative subalgebra inside a MASA containing it.

    Iterates the face-supremum pass to a fixed point. At finite dimension
    the closure of a unital closed subalgebra is the subalgebra itself; this
    is asserted on the result.
    """
    t = _tol(tol)
    if not b.is_commutative(t):
        raise NotCommuting("closure requires a commutative subalgebra")
    if not masa.is_masa(t):
        raise ValueError("closure must be taken inside a maximal commutative subalgebra")
    if not masa.contains_subalgebra(b, t):
        raise NotContained("subalgebra does not lie inside the MASA")
    current = b
    for _ in range(sum(b.signature) + 1):
        nxt = _closure_step(current, masa, t)
        if spans_equal(nxt, current):
            if not spans_equal(current, b):
                raise RuntimeError(
                    "closure of a unital closed subalgebra moved at finite dimension"
                )
            return nxt
        current = nxt
    raise RuntimeError("monotone closure failed to reach a fixed point")


def closure_correspondence(
    b: Subalgebra,
    masa1: Subalgebra,
    masa2: Subalgebra,
    tol: ToleranceConfig | None = None,
) -> ClosureCorrespondence:
    """Pair every projection of the closure in the first MASA with the
    supremum of its face computed inside the second MASA.

    At finite dimension the pairing is the identity map, asserted within
    pos_slack on every pair.
    """
    t = _tol(tol)
    c1 = monotone_closure(b, masa1, t)
    monotone_closure(b, masa2, t)  # validates the second containment too
    face_gens = minimal_projections(b, t)
    minimal = minimal_projections(c1, t)
    m = len(minimal)
    if m > MAX_ENUMERATED_FACES:
        raise ValueError(
            f"projection enumeration capped at {MAX_ENUMERATED_FACES} minimal projections"
        )
    zero = AlgebraElement.zeros(b.signature)
    pairs = []
    for j_mask in range(1 << m):
        p = zero
        for i in range(m):
            if j_mask >> i & 1:
                p = p + minimal[i].element
        face = [
            e
            for e in face_gens
            if frobenius_norm(e.element - e.element * p)
            <= t.pos_slack * (1.0 + frobenius_norm(e.element))
        ]
        if face:
            partner = sup_projections([range_projection(e.element, t) for e in face], t)
        else:
            partner = Projection(zero, t)
        if operator_norm(p - partner.element, t) > t.pos_slack * 2.0:
            raise RuntimeError("closure correspondence is not the identity map")
        pairs.append((Projection(p, t), partner))
    return ClosureCorrespondence(pairs=tuple(pairs))

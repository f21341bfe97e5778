"""Finite cyclic groups, invariant Hermitian forms, and unitarization.

A matrix B of exact finite order generates a finite cyclic group H.
Averaging h* h over H produces a positive-definite Hermitian form Q with
h* Q h = Q for every h, i.e. H sits inside the unitary group of Q; the
two facts every downstream step needs are that H is contained in U(Q)
and that Q is the identity whenever H is already unitary.  Conjugating
by Q^(1/2) then moves H into the standard unitary group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import census
from .bsrep import Rep, conjugate
from .errors import (
    DegenerateGroup,
    NotARootOfUnity,
    NotFiniteOrder,
    NotNormalizing,
    NotPositiveDefinite,
)
from .numerics import as_matrix, eigvals, herm_power, hs_norm, snap_root_of_unity

__all__ = [
    "FiniteCyclicGroup",
    "HermitianForm",
    "detect_finite_order",
    "generated_group",
    "averaged_form",
    "karcher_form",
    "conjugate_into_unitary",
    "normality_exponent",
]

#: Materializing a cyclic group stores all its elements; beyond this
#: order that is no longer a desk-scale computation.
MAX_MATERIALIZED_ORDER = 100_000

_DISTINCT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class FiniteCyclicGroup:
    """<B> with its exact order and the materialized powers B^0..B^(order-1)."""

    generator: np.ndarray
    order: int
    elements: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class HermitianForm:
    """Positive-definite Hermitian matrix with determinant one."""

    Q: np.ndarray

    def __post_init__(self):
        q = as_matrix(self.Q)
        if hs_norm(q - q.conj().T) > 1e-10:
            raise ValueError("form is not Hermitian within tolerance")
        q = 0.5 * (q + q.conj().T)
        w = np.linalg.eigvalsh(q)
        if w[0] <= 0.0:
            raise NotPositiveDefinite(f"form eigenvalue {w[0]:.3e} <= 0")
        if abs(np.linalg.det(q).real - 1.0) > 1e-6:
            raise ValueError("form is not determinant-normalized")
        object.__setattr__(self, "Q", q)


def detect_finite_order(b, max_order: int, tol: float = 1e-6) -> int:
    """Exact order of the cyclic group generated by b, via its spectrum.

    Every eigenvalue is snapped to a root of unity of order <= max_order;
    the candidate order is the lcm of the snapped orders, backstopped by
    the power check ||B^order - I|| <= n * tol * order.  Raises
    NotFiniteOrder when an eigenvalue fails to snap or the power check
    fails (both signal input away from a minimal vector).
    """
    b = as_matrix(b)
    n = b.shape[0]
    try:
        snapped = [snap_root_of_unity(lam, max_order, tol) for lam in eigvals(b)]
    except NotARootOfUnity as exc:
        raise NotFiniteOrder(f"eigenvalue does not snap: {exc}") from exc
    order = math.lcm(*(r.N for r in snapped))
    defect = hs_norm(np.linalg.matrix_power(b, order) - np.eye(n))
    if defect > n * tol * order:
        raise NotFiniteOrder(
            f"power check failed: ||B^{order} - I|| = {defect:.3e}"
        )
    return order


def generated_group(b, order: int) -> FiniteCyclicGroup:
    """Materialize {B^j : 0 <= j < order} and validate pairwise distinctness."""
    b = as_matrix(b)
    n = b.shape[0]
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > MAX_MATERIALIZED_ORDER:
        raise ValueError(f"order {order} exceeds materialization cap")
    elements = [np.eye(n, dtype=np.complex128)]
    for _ in range(order - 1):
        elements.append(elements[-1] @ b)
    if order > 1:
        if order <= 512:
            stack = np.stack(elements).reshape(order, -1)
            for i in range(order - 1):
                d = np.linalg.norm(stack[i + 1 :] - stack[i], axis=1)
                if d.min() <= _DISTINCT_TOL:
                    raise DegenerateGroup(
                        f"powers {i} and {i + 1 + int(d.argmin())} coincide"
                    )
        else:
            # B^i == B^j iff B^(j-i) == I, so distinctness reduces to the
            # generator having order exactly `order`.
            eye = np.eye(n)
            acc = b.copy()
            for j in range(1, order):
                if hs_norm(acc - eye) <= _DISTINCT_TOL:
                    raise DegenerateGroup(f"B^{j} is the identity, order < {order}")
                acc = acc @ b
    return FiniteCyclicGroup(b, order, tuple(elements))


def averaged_form(group: FiniteCyclicGroup) -> HermitianForm:
    """Invariant form Q = mean of h* h over the group, determinant-normalized.

    For every h in the group, h* Q h = Q (the sum is a bijective
    reindexing), so the group lies in the unitary group of Q; when the
    group is already unitary every summand is the identity and Q = I.
    """
    stack = np.stack(group.elements)
    n = stack.shape[1]
    q0 = np.einsum("kji,kjl->il", stack.conj(), stack) / group.order
    q0 = 0.5 * (q0 + q0.conj().T)
    det = np.linalg.det(q0).real
    if det <= 0:
        raise NotPositiveDefinite("averaged form has non-positive determinant")
    return HermitianForm(q0 / det ** (1.0 / n))


def _herm_log(p: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
    if w[0] <= 0.0:
        raise NotPositiveDefinite("log of non-positive-definite matrix")
    return (v * np.log(w)) @ v.conj().T


def karcher_form(
    group: FiniteCyclicGroup, *, tol: float = 1e-12, max_iter: int = 200
) -> HermitianForm:
    """Geodesic-barycenter variant of the invariant form.

    The group orbit of the standard form consists of the matrices
    (h h*)^(-1); their barycenter in the affine-invariant metric on
    positive-definite matrices is computed by the usual fixed-point
    iteration.  It satisfies the same two invariance properties as
    averaged_form but generally differs from it; kept for
    cross-validation.
    """
    points = [np.linalg.inv(h @ h.conj().T) for h in group.elements]
    n = points[0].shape[0]
    x = np.eye(n, dtype=np.complex128)
    for _ in range(max_iter):
        w, v = np.linalg.eigh(x)
        if w[0] <= 0.0:
            raise NotPositiveDefinite("Karcher iterate lost positivity")
        rsq = (v * np.sqrt(w)) @ v.conj().T
        rsq_i = (v / np.sqrt(w)) @ v.conj().T
        mean_log = sum(_herm_log(rsq_i @ pt @ rsq_i) for pt in points) / len(points)
        if hs_norm(mean_log) <= tol:
            break
        wl, vl = np.linalg.eigh(0.5 * (mean_log + mean_log.conj().T))
        x = rsq @ ((vl * np.exp(wl)) @ vl.conj().T) @ rsq
    det = np.linalg.det(x).real
    return HermitianForm(x / det ** (1.0 / n))


def conjugate_into_unitary(rep: Rep, form: HermitianForm) -> Rep:
    """Conjugate by Q^(1/2); the invariance h* Q h = Q makes B unitary.

    (Q^(1/2) h Q^(-1/2))* (Q^(1/2) h Q^(-1/2)) = Q^(-1/2) (h* Q h) Q^(-1/2) = I.
    """
    return conjugate(rep, herm_power(form.Q, 0.5))


def normality_exponent(
    rep: Rep, tol: float = 1e-6, *, order: int | None = None
) -> int:
    """Exponent j with A B A^-1 = B^j, certifying A normalizes <B>.

    Searches j in [0, order) for the minimum of ||A B A^-1 - B^j|| and
    requires it below tol; raises NotNormalizing otherwise.  When order
    is not supplied it is detected against the a-priori bound for the
    representation's parameters and dimension.
    """
    if order is None:
        bound = census.order_bound(rep.group.p, rep.group.q, rep.n)
        order = detect_finite_order(rep.B, bound, tol)
    a, b = rep.A, rep.B
    n = rep.n
    try:
        c = a @ b @ np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise NotNormalizing("A is singular") from exc
    best_j, best_d = 0, np.inf
    power = np.eye(n, dtype=np.complex128)
    for j in range(order):
        d = hs_norm(c - power)
        if d < best_d:
            best_j, best_d = j, d
        power = power @ b
    if best_d > tol:
        raise NotNormalizing(
            f"min_j ||A B A^-1 - B^j|| = {best_d:.3e} over j < {order}"
        )
    return best_j

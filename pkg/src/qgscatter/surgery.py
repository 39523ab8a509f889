"""Exact S-matrix updates for cutting, attaching and connecting tails.

All operations act on an :class:`~qgscatter.scattering.SMatrix` at its fixed
momentum ``z`` and never touch the underlying graph. Removed labels drop out
of the row/column order; an attached tail is appended at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import TailLabel
from .scattering import SMatrix

DENOM_TOL = 1e-12


class ResonantDenominatorError(ZeroDivisionError):
    """The update formula's denominator vanishes (no finite limit is defined)."""


class UntailedVertexError(ValueError):
    pass


class GateFormError(ValueError):
    pass


@dataclass(frozen=True)
class BlockPartition:
    """``S`` permuted so the ``removed`` labels come last: ``[[T, U], [V, W]]``."""

    kept: tuple[int, ...]
    removed: tuple[int, ...]
    T: np.ndarray
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray


def partition(S: SMatrix, removed: Sequence) -> BlockPartition:
    rem = [S.index(lab) for lab in removed]
    if len(set(rem)) != len(rem):
        raise ValueError("duplicate labels in removal set")
    kept = [i for i in range(len(S)) if i not in rem]
    M = S.matrix
    return BlockPartition(tuple(kept), tuple(rem),
                          M[np.ix_(kept, kept)], M[np.ix_(kept, rem)],
                          M[np.ix_(rem, kept)], M[np.ix_(rem, rem)])


def _reduced(S: SMatrix, kept: Sequence[int], matrix: np.ndarray) -> SMatrix:
    return SMatrix(S.z, tuple(S.labels[i] for i in kept), matrix, S.n_vertices)


def _check_pivots(M: np.ndarray, what: str):
    if M.size == 0:
        return
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= DENOM_TOL:
        raise ResonantDenominatorError(f"{what} is singular (smallest singular value {s[-1]:.3e})")


def cut_tail_stump(S: SMatrix, label, length: int) -> SMatrix:
    """Cut tail ``label`` leaving ``length`` vertices of it attached to the graph."""
    if length < 0:
        raise ValueError("stump length must be non-negative")
    c = S.index(label)
    w = S.z ** (2 * (length + 1))
    M = S.matrix
    denom = 1 + w * M[c, c]
    if abs(denom) <= DENOM_TOL:
        raise ResonantDenominatorError(f"resonant cut: |1 + z^{2 * (length + 1)} s_cc| = {abs(denom):.3e}")
    kept = [i for i in range(len(S)) if i != c]
    out = M[np.ix_(kept, kept)] - w * np.outer(M[kept, c], M[c, kept]) / denom
    return _reduced(S, kept, out)


def cut_tail(S: SMatrix, label) -> SMatrix:
    return cut_tail_stump(S, label, 0)


def cut_tails_block(S: SMatrix, removed: Sequence) -> SMatrix:
    """``T - z^2 U (I + z^2 W)^{-1} V`` with the ``removed`` tails in ``W``."""
    p = partition(S, removed)
    z2 = S.z * S.z
    D = np.eye(len(p.removed)) + z2 * p.W
    _check_pivots(D, "I + z^2 W")
    out = p.T - z2 * p.U @ np.linalg.solve(D, p.V) if p.removed else p.T
    return _reduced(S, p.kept, out)


def attach_tail(S: SMatrix, label) -> SMatrix:
    """Attach one more tail at the vertex that already carries tail ``label``."""
    try:
        v = S.index(label)
    except KeyError:
        raise UntailedVertexError(
            f"no tail {label!r}; a tail can only be attached where one already exists "
            "(rebuild the graph to add a tail at an untailed vertex)") from None
    z2 = S.z * S.z
    M = S.matrix
    s_vv = M[v, v]
    denom = 1 - z2 * (2 + s_vv)
    if abs(denom) <= DENOM_TOL:
        raise ResonantDenominatorError(f"resonant attach: |1 - z^2 (2 + s_vv)| = {abs(denom):.3e}")
    m = len(S)
    out = np.empty((m + 1, m + 1), dtype=complex)
    out[:m, :m] = M + z2 * np.outer(M[:, v], M[v, :]) / denom
    out[:m, m] = out[:m, v] = (1 - z2) * M[:, v] / denom
    out[m, :m] = out[v, :m] = (1 - z2) * M[v, :] / denom
    out[v, m] = out[m, v] = (1 - z2) * (1 + s_vv) / denom
    out[v, v] = out[m, m] = (z2 + s_vv) / denom
    vertex = S.labels[v].vertex
    ordinal = 1 + max(lab.ordinal for lab in S.labels if lab.vertex == vertex)
    return SMatrix(S.z, S.labels + (TailLabel(vertex, ordinal),), out, S.n_vertices)


def attach_tail_at_vertex(S: SMatrix, vertex: int) -> SMatrix:
    for lab in S.labels:
        if lab.vertex == vertex:
            return attach_tail(S, lab)
    raise UntailedVertexError(
        f"vertex {vertex} has no tail; a tail can only be attached where one already exists "
        "(rebuild the graph to add a tail at an untailed vertex)")


def _pairing_matrix(k: int) -> np.ndarray:
    # block-diagonal Pauli X over consecutive (a, b) pairs
    X = np.zeros((k, k))
    for i in range(0, k, 2):
        X[i, i + 1] = X[i + 1, i] = 1.0
    return X


def connect_pairs(S: SMatrix, pairs: Sequence[tuple]) -> SMatrix:
    """Join each ``(a, b)`` pair of tails into an edge: ``T - z U (z W - X)^{-1} V``."""
    order = [lab for pair in pairs for lab in pair]
    p = partition(S, order)
    if not p.removed:
        return S
    z = S.z
    D = z * p.W - _pairing_matrix(len(p.removed))
    _check_pivots(D, "z W - X")
    out = p.T - z * p.U @ np.linalg.solve(D, p.V)
    return _reduced(S, p.kept, out)


def connect_tails(S: SMatrix, label1, label2) -> SMatrix:
    if S.index(label1) == S.index(label2):
        raise ValueError("cannot connect a tail to itself")
    return connect_pairs(S, [(label1, label2)])


def connect_tails_explicit(S: SMatrix, label1, label2) -> SMatrix:
    """Elementwise form of the two-tail connection (cross-check for the block form)."""
    a, b = S.index(label1), S.index(label2)
    if a == b:
        raise ValueError("cannot connect a tail to itself")
    z = S.z
    M = S.matrix
    s11, s12, s21, s22 = M[a, a], M[a, b], M[b, a], M[b, b]
    denom = 1 - (s12 + s21) * z - (s11 * s22 - s12 * s21) * z * z
    if abs(denom) <= DENOM_TOL:
        raise ResonantDenominatorError(f"explicit connect denominator {abs(denom):.3e}")
    kept = [i for i in range(len(S)) if i not in (a, b)]
    u1, u2 = M[kept, a], M[kept, b]   # s_{tau, tau1}, s_{tau, tau2}
    v1, v2 = M[a, kept], M[b, kept]   # s_{tau1, tau'}, s_{tau2, tau'}
    num = (z * (np.outer(u1, v2) + np.outer(u2, v1))
           - z * z * (s12 * np.outer(u1, v2) + s21 * np.outer(u2, v1))
           + z * z * (s22 * np.outer(u1, v1) + s11 * np.outer(u2, v2)))
    return _reduced(S, kept, M[np.ix_(kept, kept)] + num / denom)


def direct_sum(S1: SMatrix, S2: SMatrix) -> SMatrix:
    """S-matrix of the disjoint union; the second graph's vertices are shifted."""
    if abs(S1.z - S2.z) > 1e-14:
        raise ValueError("S-matrices are at different momenta")
    if S1.n_vertices is None:
        raise ValueError("direct sum needs the first graph's vertex count")
    off = S1.n_vertices
    labels = S1.labels + tuple(TailLabel(lab.vertex + off, lab.ordinal) for lab in S2.labels)
    m1, m2 = len(S1), len(S2)
    M = np.zeros((m1 + m2, m1 + m2), dtype=complex)
    M[:m1, :m1] = S1.matrix
    M[m1:, m1:] = S2.matrix
    n = None if S2.n_vertices is None else off + S2.n_vertices
    return SMatrix(S1.z, labels, M, n, S1.singular or S2.singular)


def gate_blocks(S: SMatrix, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """``(S_io, S_oi)`` of a gate-form S-matrix (first half incoming, second outgoing)."""
    m = len(S)
    if m % 2:
        raise GateFormError(f"gate needs an even number of tails, got {m}")
    d = m // 2
    M = S.matrix
    diag = max(np.abs(M[:d, :d]).max(initial=0.0), np.abs(M[d:, d:]).max(initial=0.0))
    if diag >= tol:
        raise GateFormError(f"S-matrix is not block anti-diagonal (diagonal block entry {diag:.3e})")
    return M[:d, d:], M[d:, :d]


def compose_gates(S1: SMatrix, S2: SMatrix, tol: float = 1e-9) -> SMatrix:
    """Wire the outgoing tails of gate 1 into the incoming tails of gate 2.

    The result is in gate form with outgoing block ``z S2_oi S1_oi``.
    """
    gate_blocks(S1, tol)
    gate_blocks(S2, tol)
    if len(S1) != len(S2):
        raise GateFormError(f"gate dimension mismatch: {len(S1) // 2} vs {len(S2) // 2}")
    d = len(S1) // 2
    joined = direct_sum(S1, S2)
    pairs = [(joined.labels[d + i], joined.labels[2 * d + i]) for i in range(d)]
    return connect_pairs(joined, pairs)


def unitary_update(S, k: int, G) -> np.ndarray:
    """``T - U (G + W)^{-1} V`` for the last ``k`` rows/columns in ``W``."""
    M = S.matrix if isinstance(S, SMatrix) else np.asarray(S)
    n = M.shape[0] - k
    T, U, V, W = M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]
    D = np.asarray(G) + W
    _check_pivots(D, "G + W")
    return T - U @ np.linalg.solve(D, V)

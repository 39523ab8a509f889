"""S-matrix and propagating states at a fixed unit-circle momentum.

Everything is expressed in ``z = e^{ik}``. The graph part ``psi`` of the
propagating state incoming on tail ``tau`` solves

    A(z) psi = (1 - z^2) e_{v(tau)},    A(z) = I + z H + z^2 Q,

and the S-matrix is ``s[t, t'] = (1 - z^2) <t| A(z)^{-1} |t'> - delta``.
When ``A(z)`` is singular on the unit circle (bound states of the second kind
with ``|E| < 2``) the inverse is replaced by ``(A + K)^{-1}`` with ``K`` the
orthogonal projector on the kernel; the right-hand sides are orthogonal to
the kernel so this picks the unique solution with no kernel component.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import TailedGraph, TailLabel, build_hamiltonian, build_tail_operators, resolve_label
from .numeric import DEFAULT_TOL, ToleranceConfig, kernel_basis, solve_linear


class EdgeMomentumError(ValueError):
    """Raised for ``z = +-1`` where reflection and transmission are undefined."""


class NoTailsError(ValueError):
    pass


class NotAdjacentError(ValueError):
    pass


@dataclass(frozen=True)
class Momentum:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if abs(abs(z) - 1.0) >= 1e-12:
            raise ValueError(f"momentum must lie on the unit circle, |z| = {abs(z)!r}")
        object.__setattr__(self, "z", z)

    @classmethod
    def from_k(cls, k: float) -> "Momentum":
        return cls(cmath.exp(1j * k))

    @classmethod
    def coerce(cls, value) -> "Momentum":
        if isinstance(value, Momentum):
            return value
        return cls(complex(value))

    @property
    def k(self) -> float:
        return cmath.phase(self.z)

    @property
    def energy(self) -> float:
        return -2.0 * math.cos(self.k)

    def conjugate(self) -> "Momentum":
        return Momentum(self.z.conjugate())

    def is_edge(self, margin: float = 1e-12) -> bool:
        return abs(self.z - 1) < margin or abs(self.z + 1) < margin


def _z(value) -> complex:
    return Momentum.coerce(value).z


def assemble_A(g: TailedGraph, z: complex) -> np.ndarray:
    """The pencil ``I + z H + z^2 Q`` over the vertex basis."""
    H = build_hamiltonian(g)
    _, Q = build_tail_operators(g)
    return np.eye(g.n_vertices) + z * H + z * z * Q


def pencil_scale(g: TailedGraph, z: complex) -> float:
    """``1 + |z| ||H|| + |z|^2 ||Q||``, the natural size of ``A(z)``."""
    H = build_hamiltonian(g)
    _, Q = build_tail_operators(g)
    return 1 + abs(z) * np.linalg.norm(H, 2) + abs(z) ** 2 * np.linalg.norm(Q, 2)


def pencil_kernel(g: TailedGraph, z: complex, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``ker A(z)`` with the rank threshold set by :func:`pencil_scale`."""
    return kernel_basis(assemble_A(g, z), tol, pencil_scale(g, z))


def kernel_projector(g: TailedGraph, z0, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto ``ker A(z0)``; zero when ``A(z0)`` is invertible."""
    B = pencil_kernel(g, _z(z0), tol)
    return B @ B.conj().T


def attachment_matrix(g: TailedGraph) -> np.ndarray:
    E = np.zeros((g.n_vertices, g.n_tails))
    for j, lab in enumerate(g.labels):
        E[lab.vertex, j] = 1.0
    return E


def _graph_parts(g: TailedGraph, z: complex, tol: ToleranceConfig) -> tuple[np.ndarray, bool]:
    """Columns are the graph parts ``psi_tau`` for every incoming tail."""
    A = assemble_A(g, z)
    K = kernel_projector(g, z, tol)
    singular = bool(np.any(K))
    E = attachment_matrix(g)
    X = solve_linear(A + K if singular else A, E, tol)
    return (1 - z * z) * X, singular


def _check_admissible(g: TailedGraph, z: complex):
    if g.n_tails == 0:
        raise NoTailsError("graph has no tails; the S-matrix is empty")
    if abs(z - 1) < 1e-12 or abs(z + 1) < 1e-12:
        raise EdgeMomentumError(
            "z = +-1 (k = 0 or pi) is an edge momentum where reflection/transmission are undefined; "
            "use edge_states() instead")


@dataclass(frozen=True)
class SMatrix:
    z: complex
    labels: tuple[TailLabel, ...]
    matrix: np.ndarray
    n_vertices: int | None = None
    singular: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.labels), len(self.labels)):
            raise ValueError(f"matrix shape {m.shape} does not match {len(self.labels)} labels")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", tuple(TailLabel(*lab) for lab in self.labels))

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        return resolve_label(self.labels, label)

    def __getitem__(self, key):
        row, col = key
        return self.matrix[self.index(row), self.index(col)]

    def reflection(self, label) -> complex:
        i = self.index(label)
        return self.matrix[i, i]

    def permuted(self, order: Sequence[int]) -> "SMatrix":
        order = list(order)
        return SMatrix(self.z, tuple(self.labels[i] for i in order),
                       self.matrix[np.ix_(order, order)], self.n_vertices, self.singular)

    def aligned_to(self, other: "SMatrix") -> "SMatrix":
        """Reorder so tails pair up with ``other``'s by vertex, in ordinal order.

        Tails on the same vertex are interchangeable, so after surgery the
        surviving ordinals need not match those of a freshly built graph.
        """
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(self.labels):
            groups.setdefault(lab.vertex, []).append(i)
        order = []
        for lab in other.labels:
            bucket = groups.get(lab.vertex)
            if not bucket:
                raise ValueError(f"no tail on vertex {lab.vertex} to align with")
            order.append(bucket.pop(0))
        if any(groups.values()):
            raise ValueError("tail sets differ")
        out = self.permuted(order)
        return SMatrix(out.z, other.labels, out.matrix, out.n_vertices, out.singular)


def s_matrix(g: TailedGraph, z, tol: ToleranceConfig = DEFAULT_TOL) -> SMatrix:
    z = _z(z)
    _check_admissible(g, z)
    psi, singular = _graph_parts(g, z, tol)
    E = attachment_matrix(g)
    S = E.T @ psi - np.eye(g.n_tails)
    return SMatrix(z, g.labels, S, g.n_vertices, singular)


@dataclass(frozen=True)
class PropagatingState:
    """Energy eigenstate incoming on tail ``incoming``.

    Tail amplitudes are generated on demand from the S-matrix column:
    ``z^{-n} + s[t, t] z^n`` on the incoming tail and ``s[t', t] z^n`` on
    every other tail.
    """

    z: complex
    incoming: TailLabel
    labels: tuple[TailLabel, ...]
    graph_part: np.ndarray
    s_column: np.ndarray

    @property
    def energy(self) -> float:
        return -2.0 * self.z.real

    def tail_amplitude(self, label, n: int) -> complex:
        j = resolve_label(self.labels, label)
        lab = self.labels[j]
        if n == 0:
            return complex(self.graph_part[lab.vertex])
        out = self.s_column[j] * self.z**n
        if lab == self.incoming:
            out += self.z ** (-n)
        return complex(out)

    def amplitude(self, site) -> complex:
        """Amplitude at a graph vertex (``int``) or tail site (``(label, n)``)."""
        if isinstance(site, (int, np.integer)):
            return complex(self.graph_part[site])
        label, n = site
        return self.tail_amplitude(label, n)


def propagating_states(g: TailedGraph, z, tol: ToleranceConfig = DEFAULT_TOL) -> list[PropagatingState]:
    """All propagating states at ``z``, one per incoming tail, sharing one solve."""
    z = _z(z)
    _check_admissible(g, z)
    psi, _ = _graph_parts(g, z, tol)
    S = attachment_matrix(g).T @ psi - np.eye(g.n_tails)
    return [PropagatingState(z, lab, g.labels, psi[:, j].copy(), S[:, j].copy())
            for j, lab in enumerate(g.labels)]


def propagating_state(g: TailedGraph, z, label, tol: ToleranceConfig = DEFAULT_TOL) -> PropagatingState:
    return propagating_states(g, z, tol)[g.label_index(label)]


@dataclass(frozen=True)
class EdgeState:
    epsilon: int
    vector: np.ndarray
    classification: str  # "extended" or "second-kind bound"


def edge_states(g: TailedGraph, epsilon: int, tol: ToleranceConfig = DEFAULT_TOL) -> list[EdgeState]:
    """Solutions of ``(I + eps H + Q) psi = 0``, i.e. ``A(eps) psi = 0``.

    ``epsilon = +1`` is ``z = 1`` (k = 0) and ``epsilon = -1`` is ``z = -1``
    (k = pi).
    """
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    basis = pencil_kernel(g, float(epsilon), tol)
    _, Q = build_tail_operators(g)
    out = []
    for v in basis.T:
        v = np.real_if_close(v)
        kind = "extended" if np.linalg.norm(Q @ v, np.inf) > tol.residual_tol else "second-kind bound"
        out.append(EdgeState(epsilon, v, kind))
    return out


def probability_current(psi, phi, v1, v2, graph: TailedGraph | None = None) -> complex:
    """``i (conj(psi[v2]) phi[v1] - conj(psi[v1]) phi[v2])``.

    ``psi`` and ``phi`` are anything indexable by site (arrays over graph
    vertices, or :class:`PropagatingState` objects, whose sites may also be
    tail sites). When ``graph`` is given and both sites are graph vertices,
    they must be adjacent.
    """
    if graph is not None and isinstance(v1, (int, np.integer)) and isinstance(v2, (int, np.integer)):
        if not graph.adjacent(v1, v2):
            raise NotAdjacentError(f"vertices {v1} and {v2} are not adjacent")
    a = _amp(psi, v1), _amp(psi, v2)
    b = _amp(phi, v1), _amp(phi, v2)
    return 1j * (np.conj(a[1]) * b[0] - np.conj(a[0]) * b[1])


def _amp(state, site) -> complex:
    if isinstance(state, PropagatingState):
        return state.amplitude(site)
    return complex(state[site])


def tail_root_currents(psi: PropagatingState, phi: PropagatingState) -> np.ndarray:
    """Currents from each attachment vertex onto the first site of its tail."""
    return np.array([probability_current(psi, phi, (lab, 0), (lab, 1)) for lab in psi.labels])


def check_unitarity(S) -> float:
    """``||S^dagger S - I||_inf`` (max absolute row sum)."""
    M = S.matrix if isinstance(S, SMatrix) else np.asarray(S)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M.conj().T @ M - np.eye(M.shape[0]), np.inf))


def check_time_reversal(g: TailedGraph, z, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``||S(z*) - S(z)^dagger||_inf``."""
    z = _z(z)
    S = s_matrix(g, z, tol).matrix
    Sc = s_matrix(g, z.conjugate(), tol).matrix
    return float(np.linalg.norm(Sc - S.conj().T, np.inf))

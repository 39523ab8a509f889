"""Bound states of a tailed graph.

First kind: real ``z_b`` in ``(-1, 1)`` with ``A(z_b) psi = 0`` and nonzero
amplitude on at least one attachment vertex; the state decays as
``alpha_tau z_b^n`` along each tail and has energy ``-(z_b + 1/z_b)``.

Second kind: eigenvectors of ``H`` vanishing on every attachment vertex; they
live entirely on the finite graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import TailedGraph, TailLabel, build_hamiltonian, build_tail_operators, resolve_label
from .numeric import (
    DEFAULT_TOL,
    ToleranceConfig,
    det_cheb_coeffs,
    real_roots_in_interval,
    symmetric_eigh,
)
from .scattering import assemble_A, attachment_matrix, pencil_kernel

FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class BoundState:
    kind: str
    energy: float
    graph_part: np.ndarray
    labels: tuple[TailLabel, ...]
    z_b: Optional[float] = None
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norm_factor: float = 1.0

    @property
    def N(self) -> float:
        return float(np.sqrt(self.norm_factor))

    def amplitude(self, site) -> float:
        """Normalized amplitude at a graph vertex or at tail site ``(label, n)``."""
        if isinstance(site, (int, np.integer)):
            return self.N * float(self.graph_part[site])
        label, n = site
        j = resolve_label(self.labels, label)
        if n == 0:
            return self.N * float(self.graph_part[self.labels[j].vertex])
        if self.kind == SECOND:
            return 0.0
        return self.N * float(self.alpha[j]) * self.z_b**n

    def full_norm(self) -> float:
        """Squared norm over graph plus tails (geometric tail sums)."""
        psi2 = float(self.graph_part @ self.graph_part)
        if self.kind == SECOND:
            return self.norm_factor * psi2
        zb2 = self.z_b**2
        return self.norm_factor * (psi2 + float(self.alpha @ self.alpha) * zb2 / (1 - zb2))


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Make the first largest-magnitude component real and positive."""
    mag = np.abs(v)
    i = int(np.argmax(mag >= mag.max() * (1 - 1e-9)))
    out = v * (np.conj(v[i]) / mag[i])
    return np.real_if_close(out, tol=1e6)


def _refine_root(g: TailedGraph, x: float, tol: ToleranceConfig, max_iter: int = 60) -> float:
    # Rayleigh quotient iteration for the symmetric quadratic pencil
    H = build_hamiltonian(g)
    _, Q = build_tail_operators(g)
    for _ in range(max_iter):
        _, _, vh = np.linalg.svd(assemble_A(g, x))
        v = vh[-1]
        h, q = v @ H @ v, v @ Q @ v
        if abs(q) < 1e-14:
            if h == 0:
                break
            new = -1.0 / h
        else:
            disc = h * h - 4 * q
            if disc < 0:
                break
            r = np.sqrt(disc)
            cands = np.array([(-h + r) / (2 * q), (-h - r) / (2 * q)])
            new = float(cands[np.argmin(np.abs(cands - x))])
        step, x = new - x, new
        if abs(step) <= tol.root_tol * max(1.0, abs(x)):
            break
    return float(x)


def _split_kernel(B: np.ndarray, E: np.ndarray, tol: ToleranceConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split a kernel basis into (first-kind part, part vanishing at attachments)."""
    d = B.shape[1]
    M = E.T @ B
    if M.size == 0:
        return B[:, :0], B
    _, s, vh = np.linalg.svd(M)
    s_full = np.concatenate([s, np.zeros(d - s.size)])
    tailed = s_full > tol.residual_tol
    return B @ vh[tailed].T, B @ vh[~tailed].T


def find_first_kind(g: TailedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> list[BoundState]:
    if g.n_tails == 0:
        return []
    n = g.n_vertices
    coeffs = det_cheb_coeffs(lambda x: assemble_A(g, x), 2 * n)
    roots = real_roots_in_interval(coeffs, (-1.0, 1.0), tol, basis="chebyshev")

    _, Q = build_tail_operators(g)
    E = attachment_matrix(g)
    seen: list[float] = []
    states = []
    for x0, _mult in roots:
        x = _refine_root(g, x0, tol)
        if not (-1 + tol.rank_tol < x < 1 - tol.rank_tol) or x == 0:
            continue
        if any(abs(x - y) < 1e-9 for y in seen):
            continue
        B = pencil_kernel(g, x, tol).real
        if B.shape[1] == 0:
            continue
        seen.append(x)
        first, _ = _split_kernel(B, E, tol)
        for psi in first.T:
            psi = fix_phase(psi / np.linalg.norm(psi))
            alpha = E.T @ psi
            norm_factor = (1 - x * x) / float(psi @ (psi - x * x * (Q @ psi)))
            states.append(BoundState(FIRST, -(x + 1 / x), psi, g.labels, x, alpha, norm_factor))
    states.sort(key=lambda b: b.energy)
    return states


def group_eigenvalues(w: np.ndarray, gap: float = 1e-8) -> list[np.ndarray]:
    groups = [[0]] if w.size else []
    for i in range(1, w.size):
        if w[i] - w[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(grp) for grp in groups]


def find_second_kind(g: TailedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> list[BoundState]:
    w, V = symmetric_eigh(build_hamiltonian(g))
    tailed = g.tailed_vertices()
    states = []
    for idx in group_eigenvalues(w):
        Vg = V[:, idx]
        M = Vg[tailed]
        if M.size == 0:
            basis = Vg
        else:
            _, s, vh = np.linalg.svd(M)
            s_full = np.concatenate([s, np.zeros(len(idx) - s.size)])
            basis = Vg @ vh[s_full <= tol.residual_tol].T
        energy = float(np.mean(w[idx]))
        for psi in basis.T:
            psi = fix_phase(psi / np.linalg.norm(psi))
            states.append(BoundState(SECOND, energy, psi, g.labels, None, np.zeros(g.n_tails), 1.0))
    return states


def find_bound_states(g: TailedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> list[BoundState]:
    return find_first_kind(g, tol) + find_second_kind(g, tol)


def bound_spectrum(g: TailedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> list[tuple[float, str, int]]:
    """Merged ``(energy, kind, degeneracy)`` report sorted by energy."""
    out: list[list] = []
    for b in sorted(find_bound_states(g, tol), key=lambda b: (b.energy, b.kind)):
        if out and out[-1][1] == b.kind and abs(out[-1][0] - b.energy) <= 1e-8:
            out[-1][2] += 1
        else:
            out.append([b.energy, b.kind, 1])
    return [tuple(row) for row in out]

"""Numerical checks of the eigenbasis of a tailed graph.

* completeness: bound states plus ``(1/2pi) int_0^pi sum_tau |k,tau><k,tau| dk``
  resolve the identity on any pair of sites;
* the scattering identity ``sum_nu s[nu, tau](z) |z*, nu> = |z, tau>``;
* orthogonality of first-kind bound states and propagating states.

Sites are graph vertices (``int``) or tail sites ``(label, n)`` with ``n >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bound import SECOND, BoundState, find_first_kind, find_second_kind
from .graph import TailedGraph, resolve_label
from .numeric import DEFAULT_TOL, ToleranceConfig
from .scattering import _graph_parts, _z, attachment_matrix, s_matrix, _check_admissible


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 2048
    order: int = 16
    margin: float = 1e-4

    def __post_init__(self):
        if self.nodes < 64:
            raise ValueError("need at least 64 quadrature nodes")
        if not 0 < self.margin < 0.1:
            raise ValueError("margin must lie in (0, 0.1)")


def singular_momenta(g: TailedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> list[float]:
    """``k`` in ``(0, pi)`` where a second-kind state makes ``A(e^{ik})`` singular."""
    ks = set()
    for b in find_second_kind(g, tol):
        if abs(b.energy) < 2:
            ks.add(round(float(np.arccos(-b.energy / 2)), 14))
    return sorted(ks)


def quadrature_rule(breaks: list[float], cfg: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[0, pi]``.

    Each break point gets a guard panel of half-width ``margin`` so no main
    panel comes closer than ``margin``; nodes are interior, so the break
    points themselves are never evaluated.
    """
    x, w = np.polynomial.legendre.leggauss(cfg.order)
    pts = sorted({0.0, np.pi, *breaks})
    guards, mains = [], []
    for i, p in enumerate(pts):
        lo = max(0.0, p - cfg.margin)
        hi = min(np.pi, p + cfg.margin)
        guards.append((lo, hi))
    for (_, a), (b, _) in zip(guards[:-1], guards[1:]):
        mains.append((a, b))
    budget = max(cfg.nodes // cfg.order - len(guards), len(mains))
    total = sum(b - a for a, b in mains)
    panels = list(guards)
    for a, b in mains:
        count = max(1, int(round(budget * (b - a) / total)))
        edges = np.linspace(a, b, count + 1)
        panels.extend(zip(edges[:-1], edges[1:]))
    nodes, weights = [], []
    for a, b in sorted(panels):
        half = 0.5 * (b - a)
        nodes.append(a + half * (x + 1))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _site_rows(site, psi: np.ndarray, S: np.ndarray, z: complex, labels) -> np.ndarray:
    """Amplitudes ``<site|z, tau>`` for every incoming tail ``tau``."""
    if isinstance(site, (int, np.integer)):
        return psi[site]
    label, n = site
    j = resolve_label(labels, label)
    if n == 0:
        return psi[labels[j].vertex]
    row = S[j] * z**n
    row = row.copy()
    row[j] += z ** (-n)
    return row


def _canonical(site, labels):
    if isinstance(site, (int, np.integer)):
        return ("v", int(site))
    label, n = site
    j = resolve_label(labels, label)
    if n == 0:
        return ("v", labels[j].vertex)
    return ("t", j, int(n))


def completeness_residual(g: TailedGraph, site_a, site_b, cfg: QuadratureConfig = QuadratureConfig(),
                          include_first_kind: bool = True, include_second_kind: bool = True,
                          tol: ToleranceConfig = DEFAULT_TOL) -> complex:
    """Spectral resolution of ``<a|b>`` minus ``delta_ab``."""
    labels = g.labels
    total = 0j
    if include_first_kind:
        for b in find_first_kind(g, tol):
            total += b.amplitude(site_a) * b.amplitude(site_b)
    if include_second_kind:
        for b in find_second_kind(g, tol):
            total += b.amplitude(site_a) * b.amplitude(site_b)

    ks, ws = quadrature_rule(singular_momenta(g, tol), cfg)
    E = attachment_matrix(g)
    integral = 0j
    for k, w in zip(ks, ws):
        z = np.exp(1j * k)
        psi, _ = _graph_parts(g, z, tol)
        S = E.T @ psi - np.eye(g.n_tails)
        ra = _site_rows(site_a, psi, S, z, labels)
        rb = _site_rows(site_b, psi, S, z, labels)
        integral += w * np.sum(ra * np.conj(rb))
    total += integral / (2 * np.pi)
    delta = 1.0 if _canonical(site_a, labels) == _canonical(site_b, labels) else 0.0
    return complex(total - delta)


def scattering_identity_residual(g: TailedGraph, z, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Max deviation of ``sum_nu s[nu, tau](z) |z*, nu> - |z, tau>`` over graph and tail sites ``n = 1, 2``."""
    z = _z(z)
    _check_admissible(g, z)
    zc = z.conjugate()
    psi, _ = _graph_parts(g, z, tol)
    psi_c, _ = _graph_parts(g, zc, tol)
    S = s_matrix(g, z, tol).matrix
    Sc = s_matrix(g, zc, tol).matrix
    I = np.eye(g.n_tails)
    res = np.abs(psi_c @ S - psi).max()
    for n in (1, 2):
        lhs = (Sc * zc**n + I * zc ** (-n)) @ S
        rhs = S * z**n + I * z ** (-n)
        res = max(res, np.abs(lhs - rhs).max())
    return float(res)


def overlap_bound_propagating(g: TailedGraph, b: BoundState, z, label,
                              tol: ToleranceConfig = DEFAULT_TOL) -> complex:
    """Full-graph inner product ``<b|z, tau>`` with tail sums in closed form."""
    if b.kind == SECOND or b.z_b is None:
        raise ValueError("expected a first-kind bound state")
    z = _z(z)
    zb = b.z_b
    if abs(zb * z) >= 1:
        raise ValueError("divergent tail series")
    j = g.label_index(label)
    psi, _ = _graph_parts(g, z, tol)
    S = attachment_matrix(g).T @ psi - np.eye(g.n_tails)
    graph = np.conj(b.graph_part) @ psi[:, j]
    out_sum = zb * z / (1 - zb * z)          # sum_{n>=1} z_b^n z^n
    in_sum = zb / z / (1 - zb / z)           # sum_{n>=1} z_b^n z^-n
    tails = np.conj(b.alpha) @ S[:, j] * out_sum + np.conj(b.alpha[j]) * in_sum
    return complex(b.N * (graph + tails))

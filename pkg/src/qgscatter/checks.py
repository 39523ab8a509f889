"""Invariant checks run by ``qgscatter verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import surgery
from .bound import find_first_kind, find_second_kind
from .graph import TailedGraph, build_hamiltonian, build_tail_operators
from .numeric import DEFAULT_TOL, ToleranceConfig
from .scattering import (
    assemble_A,
    attachment_matrix,
    check_time_reversal,
    check_unitarity,
    kernel_projector,
    propagating_states,
    s_matrix,
    tail_root_currents,
)
from .spectral import (
    QuadratureConfig,
    completeness_residual,
    overlap_bound_propagating,
    scattering_identity_residual,
    singular_momenta,
)


@dataclass
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value < self.threshold)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<56s} {self.value:.3e} < {self.threshold:.0e}"


def sample_momenta(g: TailedGraph, count: int = 16, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Deterministic momenta in both half-circles, away from edges and singular points."""
    ks = np.linspace(0.05, np.pi - 0.05, count) + 0.0123
    bad = singular_momenta(g, tol)
    ks = np.array([k for k in ks if all(abs(k - b) > 1e-3 for b in bad)])
    return np.exp(1j * np.concatenate([ks, -ks[::2]]))


def run_checks(g: TailedGraph, level: str = "basic", tol: ToleranceConfig = DEFAULT_TOL) -> list[Check]:
    rt = tol.residual_tol
    H = build_hamiltonian(g)
    R, Q = build_tail_operators(g)
    out = [
        Check("hamiltonian exactly symmetric", float(np.abs(H - H.T).max()), 1e-300),
        Check("Q + R = I", float(np.abs(Q + R - np.eye(g.n_vertices)).max()), rt),
    ]
    zs = sample_momenta(g, tol=tol)
    firsts = find_first_kind(g, tol)
    seconds = find_second_kind(g, tol)

    if g.n_tails:
        unit = tr = defining = ident = current = 0.0
        E = attachment_matrix(g)
        for z in zs:
            S = s_matrix(g, z, tol)
            unit = max(unit, check_unitarity(S))
            tr = max(tr, check_time_reversal(g, z, tol))
            ident = max(ident, scattering_identity_residual(g, z, tol))
            states = propagating_states(g, z, tol)
            A = assemble_A(g, z)
            for j, st in enumerate(states):
                defining = max(defining, np.abs(A @ st.graph_part - (1 - z * z) * E[:, j]).max())
            current = max(current, abs(tail_root_currents(states[0], states[-1]).sum()))
        out += [
            Check("unitarity |S^+S - I|", unit, rt),
            Check("time reversal |S(z*) - S(z)^+|", tr, rt),
            Check("defining residual |A psi - (1-z^2)e|", defining, rt),
            Check("scattering identity", ident, rt),
            Check("current conservation", current, rt),
        ]
        out += _surgery_checks(g, zs[:4], tol)

    for b in firsts:
        A = assemble_A(g, b.z_b)
        out += [
            Check(f"first kind z_b={b.z_b:.6f}: A(z_b) psi = 0", float(np.abs(A @ b.graph_part).max()), rt),
            Check(f"first kind z_b={b.z_b:.6f}: full norm - 1", abs(b.full_norm() - 1), rt),
            Check(f"first kind z_b={b.z_b:.6f}: 2 - |E|", 2 - abs(b.energy), -1e-12),
        ]
    tailed = g.tailed_vertices()
    for b in seconds:
        res = np.abs(H @ b.graph_part - b.energy * b.graph_part).max()
        att = np.abs(b.graph_part[tailed]).max() if tailed else 0.0
        out.append(Check(f"second kind E={b.energy:.6f}: eigen + zero at tails", float(max(res, att)), rt))
        if g.n_tails:
            worst = max(abs(np.conj(b.graph_part) @ st.graph_part)
                        for z in zs[:4] for st in propagating_states(g, z, tol))
            out.append(Check(f"second kind E={b.energy:.6f}: orthogonal to propagating", float(worst), rt))

    if level == "full":
        out += _full_checks(g, firsts, tol)
    return out


def _surgery_checks(g: TailedGraph, zs, tol: ToleranceConfig) -> list[Check]:
    roundtrip = recompute = connect = 0.0
    for z in zs:
        S = s_matrix(g, z, tol)
        for lab in g.labels:
            grown = surgery.attach_tail(S, lab)
            back = surgery.cut_tail(grown, grown.labels[-1])
            roundtrip = max(roundtrip, np.abs(back.matrix - S.matrix).max())
            pruned = g.without_tail(lab)
            if pruned.n_tails:
                cut = surgery.cut_tail(S, lab).aligned_to(s_matrix(pruned, z, tol))
                recompute = max(recompute, np.abs(cut.matrix - s_matrix(pruned, z, tol).matrix).max())
        if g.n_tails >= 2:
            a, b = g.labels[0], g.labels[-1]
            block = surgery.connect_tails(S, a, b)
            expl = surgery.connect_tails_explicit(S, a, b)
            connect = max(connect, np.abs(block.matrix - expl.matrix).max() if len(block) else 0.0)
            joined = g.connected_tails(a, b)
            if joined.n_tails:
                direct = s_matrix(joined, z, tol)
                recompute = max(recompute, np.abs(block.aligned_to(direct).matrix - direct.matrix).max())
    out = [
        Check("attach then cut = identity", float(roundtrip), 1e-10),
        Check("surgery vs recompute", float(recompute), tol.residual_tol),
    ]
    if g.n_tails >= 2:
        out.append(Check("connect: block vs elementwise", float(connect), 1e-10))
    return out


def _full_checks(g: TailedGraph, firsts, tol: ToleranceConfig) -> list[Check]:
    out = []
    for k0 in singular_momenta(g, tol):
        z0 = np.exp(1j * k0)
        A = assemble_A(g, z0)
        K = kernel_projector(g, z0, tol)
        P = np.zeros((g.n_vertices, g.n_vertices))
        P[g.tailed_vertices(), g.tailed_vertices()] = 1.0
        ann = max(np.abs(A @ K).max(), np.abs(K @ A).max(), np.abs(K @ P).max())
        out.append(Check(f"kernel projector at k={k0:.6f} (rank {round(np.trace(K).real)})", float(ann), 1e-10))
        if g.n_tails:
            out.append(Check(f"unitarity at singular k={k0:.6f}", check_unitarity(s_matrix(g, z0, tol)), tol.residual_tol))
            out.append(Check(f"scattering identity at singular k={k0:.6f}",
                             scattering_identity_residual(g, z0, tol), tol.residual_tol))
    for b in firsts:
        worst = max(abs(overlap_bound_propagating(g, b, np.exp(1j * k), lab, tol))
                    for k in (0.37, 1.1, 2.3, -0.8) for lab in g.labels)
        out.append(Check(f"first kind z_b={b.z_b:.6f}: orthogonal to propagating", float(worst), tol.residual_tol))
    if g.n_tails:
        cfg = QuadratureConfig(1024)
        sites = [0, (g.labels[0], 1)]
        worst = max(abs(completeness_residual(g, a, b, cfg, tol=tol)) for a in sites for b in sites)
        out.append(Check("completeness (M=1024)", float(worst), 1e-6))
    return out

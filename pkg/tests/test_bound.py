import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qgscatter.bound import (
    FIRST,
    SECOND,
    bound_spectrum,
    find_bound_states,
    find_first_kind,
    find_second_kind,
    fix_phase,
)
from qgscatter.fixtures import G2, G3, G4, G5, G6, G7, random_corpus
from qgscatter.graph import TailedGraph, build_hamiltonian, build_tail_operators
from qgscatter.numeric import det_cheb_coeffs, real_roots_in_interval
from qgscatter.scattering import assemble_A, kernel_projector

from strategies import tailed_graphs

GOLDEN = (np.sqrt(5) - 1) / 2


def truncated_energies(g, length=120, cutoff=2.05):
    """Eigenvalues beyond ``cutoff`` after replacing every tail by a finite path."""
    h = g
    while h.n_tails:
        h = h.with_stump(h.labels[0], length)
    w = np.linalg.eigvalsh(build_hamiltonian(h))
    return np.sort(w[np.abs(w) > cutoff])


def brute_force_roots(g, points=100_000):
    """Sign changes of det A(x) on a dense grid of (-1, 1), refined by bisection."""
    x = np.linspace(-1, 1, points + 2)[1:-1]
    H = build_hamiltonian(g)
    _, Q = build_tail_operators(g)
    I = np.eye(g.n_vertices)
    det = lambda t: np.linalg.det(I + np.multiply.outer(t, H) + np.multiply.outer(t * t, Q))
    d = det(x)
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    lo, hi = x[idx], x[idx + 1]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        same = np.sign(det(mid)) == np.sign(det(lo))
        lo, hi = np.where(same, mid, lo), np.where(same, hi, mid)
    roots = list(0.5 * (lo + hi))
    # exact zeros on the grid
    roots += list(x[d == 0])
    return np.sort(roots)


def test_g7_first_kind():
    (b,) = find_first_kind(G7)
    assert b.kind == FIRST
    assert b.z_b == pytest.approx(GOLDEN, abs=1e-12)
    assert b.energy == pytest.approx(-np.sqrt(5), abs=1e-12)
    assert b.full_norm() == pytest.approx(1, abs=1e-12)
    assert np.abs(assemble_A(G7, b.z_b) @ b.graph_part).max() < 1e-12
    assert b.alpha[0] > 0


@pytest.mark.parametrize("g", [G2, G4, G5, G6])
def test_no_first_kind(g):
    assert find_first_kind(g) == []


def test_g3_has_a_negative_root():
    # single vertex with three tails: 1 - 2x^2 = 0
    zs = sorted(b.z_b for b in find_first_kind(G3))
    np.testing.assert_allclose(zs, [-1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-14)
    neg = min(find_first_kind(G3), key=lambda b: b.z_b)
    assert neg.energy == pytest.approx(3 / np.sqrt(2), abs=1e-12)
    # alternating decay along the tails
    assert neg.amplitude(("0:1", 1)) * neg.amplitude(("0:1", 2)) < 0


def test_tailless_graph():
    g = TailedGraph(2, ((0, 1),))
    assert find_first_kind(g) == []
    assert len(find_second_kind(g)) == 2


@pytest.mark.parametrize("g, E", [(G6, 0.0), (G7, 1.0)])
def test_second_kind_examples(g, E):
    (b,) = find_second_kind(g)
    assert b.kind == SECOND
    assert b.energy == pytest.approx(E, abs=1e-12)
    np.testing.assert_allclose(b.graph_part, np.array([0, 1, -1]) / np.sqrt(2), atol=1e-12)
    assert b.amplitude(("0:0", 3)) == 0.0
    # singular momentum on the unit circle where 1 + z E + z^2 = 0
    z0 = (-E + 1j * np.sqrt(4 - E * E)) / 2
    assert np.trace(kernel_projector(g, z0)).real == pytest.approx(1)


def test_g4_no_second_kind():
    assert find_second_kind(G4) == []


def test_bound_spectrum_examples():
    report = bound_spectrum(G7)
    assert [(k, d) for _, k, d in report] == [(FIRST, 1), (SECOND, 1)]
    assert report[0][0] == pytest.approx(-np.sqrt(5)) and report[1][0] == pytest.approx(1)
    assert bound_spectrum(G2) == []
    assert [(round(e, 12), k, d) for e, k, d in bound_spectrum(G6)] == [(0.0, SECOND, 1)]


def test_degenerate_second_kind():
    # K4 with a tail at 0: the E = 1 eigenspace (dim 3) meets psi_0 = 0 in dim 2
    edges = tuple((u, v) for u in range(4) for v in range(u + 1, 4))
    g = TailedGraph(4, edges, ((0, 1),))
    seconds = find_second_kind(g)
    assert len(seconds) == 2
    G = np.array([b.graph_part for b in seconds])
    np.testing.assert_allclose(G @ G.T, np.eye(2), atol=1e-12)
    assert bound_spectrum(g)[-1][1:] == (SECOND, 2)


def test_fix_phase():
    real = np.array([0.1, -0.5, 0.5, 0.2])
    v = fix_phase(np.exp(0.7j) * real)
    assert np.isrealobj(v)
    # ties go to the first largest component
    np.testing.assert_allclose(v, -real, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(tailed_graphs(max_vertices=7, max_tails=4, simple=False))
def test_bound_state_invariants(g):
    H = build_hamiltonian(g)
    for b in find_first_kind(g):
        assert abs(b.energy) > 2 + 1e-12
        assert -1 < b.z_b < 1 and b.z_b != 0
        assert np.abs(assemble_A(g, b.z_b) @ b.graph_part).max() < 1e-9
        assert np.abs(b.alpha).max() > 1e-9
        assert b.full_norm() == pytest.approx(1, abs=1e-9)
    for b in find_second_kind(g):
        assert np.abs(H @ b.graph_part - b.energy * b.graph_part).max() < 1e-9
        assert np.abs(b.graph_part[g.tailed_vertices()]).max(initial=0) < 1e-9


@settings(max_examples=25, deadline=None)
@given(tailed_graphs(max_vertices=6, max_tails=3))
def test_roots_match_brute_force(g):
    coeffs = det_cheb_coeffs(lambda x: assemble_A(g, x), 2 * g.n_vertices)
    found = [x for x, m in real_roots_in_interval(coeffs, basis="chebyshev") if m % 2 == 1]
    brute = brute_force_roots(g)
    assume(len(brute) == 0 or np.abs(np.abs(brute) - 1).min() > 1e-4)
    assert len(found) == len(brute)
    np.testing.assert_allclose(found, brute, atol=1e-8)


def test_roots_match_brute_force_corpus():
    for g in random_corpus(seed=9, count=30, max_vertices=6, max_tails=3):
        coeffs = det_cheb_coeffs(lambda x: assemble_A(g, x), 2 * g.n_vertices)
        found = [x for x, m in real_roots_in_interval(coeffs, basis="chebyshev") if m % 2 == 1]
        np.testing.assert_allclose(found, brute_force_roots(g), atol=1e-8)


@pytest.mark.parametrize("seed", range(12))
def test_energies_match_truncated_tails(seed):
    g = random_corpus(seed=100 + seed, count=1, max_vertices=7, max_tails=4)[0]
    mine = sorted(b.energy for b in find_bound_states(g) if abs(b.energy) > 2.05)
    oracle = truncated_energies(g)
    assert len(mine) == len(oracle)
    np.testing.assert_allclose(mine, oracle, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.data())
def test_tree_roots_come_in_pairs(n, data):
    # bipartite graphs: A(-z) = D A(z) D with D = diag(+-1), so roots pair up as +-z_b
    edges = tuple((data.draw(st.integers(0, v - 1)), v) for v in range(1, n))
    counts = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    tails = tuple((v, c) for v, c in enumerate(counts) if c)
    assume(tails)
    g = TailedGraph(n, edges, tails)
    zs = np.sort([b.z_b for b in find_first_kind(g)])
    np.testing.assert_allclose(zs, -zs[::-1], atol=1e-10)

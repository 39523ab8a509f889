"""Dense linear algebra and polynomial root helpers.

Thin wrappers around LAPACK (via numpy/scipy) with the tolerance conventions
used throughout the package, plus determinant interpolation and real-root
isolation for the bound-state search.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P


@dataclass(frozen=True)
class ToleranceConfig:
    rank_tol: float = 1e-10
    root_tol: float = 1e-12
    residual_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_tol", "root_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rank_tol < np.finfo(float).eps:
            raise ValueError("rank_tol below machine epsilon")

    def with_residual(self, residual_tol: float) -> "ToleranceConfig":
        return replace(self, residual_tol=residual_tol)


DEFAULT_TOL = ToleranceConfig()


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, pivot: float, scale: float):
        super().__init__(f"matrix is numerically singular (smallest pivot {pivot:.3e}, norm {scale:.3e})")
        self.pivot = pivot
        self.scale = scale


class InterpolationError(np.linalg.LinAlgError):
    pass


def solve_linear(M, b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Solve ``M x = b`` by partially pivoted LU.

    Raises :class:`SingularMatrixError` when the smallest pivot falls below
    ``rank_tol * ||M||``. ``b`` may be a vector or a matrix of right-hand sides.
    """
    M = np.asarray(M, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = np.linalg.norm(M, np.inf)
    if M.size == 0:
        return b.copy()
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=True)
    pivot = np.abs(np.diag(lu)).min()
    if scale == 0 or pivot <= tol.rank_tol * scale:
        raise SingularMatrixError(float(pivot), float(scale))
    return sla.lu_solve((lu, piv), b)


def kernel_basis(M, tol: ToleranceConfig = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the right null space, one vector per column.

    Singular values ``sigma <= rank_tol * max(sigma_max, scale)`` count as
    zero. ``scale`` matters when ``M`` is a nearly vanishing member of a
    family of matrices (e.g. a 1x1 pencil at its root), where ``sigma_max``
    itself is noise. Returns an ``(n, 0)`` array when the matrix has full
    rank; a zero matrix has the whole space as its kernel.
    """
    M = np.asarray(M)
    n = M.shape[1]
    _, s, vh = np.linalg.svd(M)
    ref = max(s[0] if s.size else 0.0, scale)
    if ref == 0.0:
        return np.eye(n, dtype=vh.dtype)
    # rows beyond len(s) (wide matrices) are kernel directions too
    s_full = np.concatenate([s, np.zeros(n - s.size)])
    null = s_full <= tol.rank_tol * ref
    return vh[null].conj().T


def symmetric_eigh(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric matrix."""
    return np.linalg.eigh(np.asarray(M, dtype=float))


def chebyshev_nodes(count: int) -> np.ndarray:
    j = np.arange(count)
    return np.cos((2 * j + 1) * np.pi / (2 * count))


def det_cheb_coeffs(pencil: Callable[[complex], np.ndarray], degree_bound: int) -> np.ndarray:
    """Chebyshev-basis coefficients of ``z -> det(pencil(z))`` on ``[-1, 1]``."""
    nodes = chebyshev_nodes(degree_bound + 1)
    values = np.array([np.linalg.det(pencil(x)) for x in nodes])
    V = C.chebvander(nodes, degree_bound)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > 1e8:
        raise InterpolationError(f"interpolation matrix ill-conditioned (cond={cond:.3e})")
    coeffs = np.linalg.solve(V, values)
    if np.iscomplexobj(coeffs):
        scale = max(np.abs(coeffs).max(), 1.0)
        if np.abs(coeffs.imag).max() >= 1e-8 * scale:
            raise InterpolationError("determinant polynomial has non-real coefficients")
        coeffs = coeffs.real
    return coeffs


def det_poly_coeffs(pencil: Callable[[complex], np.ndarray], degree_bound: int) -> np.ndarray:
    """Power-basis coefficients (lowest order first) of ``det(pencil(z))``.

    The determinant is sampled at ``degree_bound + 1`` Chebyshev nodes and
    interpolated; the result has length ``degree_bound + 1``.
    """
    return C.cheb2poly(det_cheb_coeffs(pencil, degree_bound))


def _trim(coeffs: np.ndarray, rel: float = 1e-13) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    scale = np.abs(coeffs).max() if coeffs.size else 0.0
    if scale == 0:
        return np.zeros(1)
    nz = np.nonzero(np.abs(coeffs) > rel * scale)[0]
    return coeffs[: nz[-1] + 1]


_BASES = {
    "power": (P.polyval, P.polyder, P.polyroots),
    "chebyshev": (C.chebval, C.chebder, C.chebroots),
}


def real_roots_in_interval(coeffs, interval=(-1.0, 1.0), tol: ToleranceConfig = DEFAULT_TOL,
                           basis: str = "power") -> list[tuple[float, int]]:
    """Real roots of a polynomial in the open interval ``(a, b)``.

    Candidates come from companion-matrix eigenvalues; each candidate is
    bracketed and bisected when the polynomial changes sign across it and
    then Newton-polished on ``p / p'`` (which keeps quadratic convergence at
    multiple roots). Roots closer than ``10 * root_tol`` are merged.
    Multiplicity is the order of the first non-vanishing derivative.

    ``basis`` is ``"power"`` (lowest order first) or ``"chebyshev"``.
    """
    a, b = interval
    val, der, roots = _BASES[basis]
    c = _trim(coeffs)
    if c.size <= 1:
        return []

    cand = roots(c)
    width = b - a
    # a double root splits by ~sqrt(eps) into the complex plane
    imag_tol = 1e-6 * max(1.0, width)
    cand = np.sort(cand[np.abs(cand.imag) <= imag_tol].real)
    pad = 1e-7 * width
    cand = cand[(cand > a - pad) & (cand < b + pad)]

    # roots on an endpoint polish to within rounding of it; keep them out
    edge = 10 * tol.root_tol * max(1.0, abs(a), abs(b))
    polished = [x for x in (_polish(x0, c, val, der, tol.root_tol) for x0 in cand) if a + edge < x < b - edge]

    # multiple roots are only located to ~sqrt(eps), so copies of one are
    # merged over a wider window than simple roots
    merged: list[list[tuple[float, int]]] = []
    for x in sorted(polished):
        m = _multiplicity(x, c, val, der)
        if merged:
            y, my = merged[-1][-1]
            close = abs(x - y) <= 10 * tol.root_tol * max(1.0, abs(x))
            both_multiple = m > 1 and my > 1 and abs(x - y) <= 1e-6 * width
            if close or both_multiple:
                merged[-1].append((x, m))
                continue
        merged.append([(x, m)])

    ends = [(e, _root_order(e, c, val, der)) for e in (a, b)]
    out = []
    for group in merged:
        x = float(np.mean([x for x, _ in group]))
        m = _multiplicity(x, c, val, der)
        # a multiple root sitting on an endpoint stalls ~eps^(1/m) inside
        if m > 1 and any(order >= m and abs(x - e) <= 1e-3 * width for e, order in ends):
            continue
        out.append((x, m))
    return out


def _root_order(x: float, c, val, der) -> int:
    """Multiplicity of ``x`` as a root, 0 if it is not one."""
    if abs(val(x, c)) > 1e-10 * np.abs(c).sum():
        return 0
    return _multiplicity(x, c, val, der)


def _polish(x0: float, c, val, der, root_tol: float) -> float:
    x = float(x0)
    lo, hi = x - 1e-6, x + 1e-6
    plo, phi = val(lo, c), val(hi, c)
    if np.sign(plo) * np.sign(phi) < 0:
        while hi - lo > root_tol:
            mid = 0.5 * (lo + hi)
            pm = val(mid, c)
            if pm == 0:
                lo = hi = mid
                break
            if np.sign(pm) == np.sign(plo):
                lo, plo = mid, pm
            else:
                hi = mid
        x = 0.5 * (lo + hi)
    # Newton on p/p' (Schroeder) keeps quadratic convergence at multiple roots
    d1, d2 = der(c), der(c, 2)
    for _ in range(50):
        f, f1, f2 = val(x, c), val(x, d1), val(x, d2)
        denom = f1 * f1 - f * f2
        if f == 0 or denom == 0:
            break
        step = f * f1 / denom
        x -= step
        if abs(step) <= root_tol * max(1.0, abs(x)):
            break
    return x


def _multiplicity(x: float, c, val, der) -> int:
    scale = np.abs(c).sum()
    mult = 1
    d = der(c)
    while d.size:
        # a vanishing derivative of order `mult` means a higher-order root
        v = abs(val(x, d))
        if v > 1e-6 * np.abs(d).sum() and v > 1e-10 * scale:
            break
        mult += 1
        if d.size == 1:
            break
        d = der(d)
    return mult

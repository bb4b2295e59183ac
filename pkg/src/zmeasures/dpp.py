"""Finite-window determinantal point process machinery."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .combinatorics import PointSet, YoungDiagram, x_config
from .errors import DomainError, ParameterError, SpectrumError


def lattice_window(n: int) -> list[float]:
    """The 2n half-integers with |x| < n."""
    return [k + 0.5 for k in range(-n, n)]


@dataclass
class WindowMatrix:
    points: tuple[float, ...]
    entries: np.ndarray
    cond: float | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.points = tuple(float(p) for p in self.points)
        self.entries = np.asarray(self.entries, dtype=float)
        n = len(self.points)
        if self.entries.shape != (n, n):
            raise DomainError("matrix shape does not match the window")
        if any(self.points[i] >= self.points[i + 1] for i in range(n - 1)):
            raise DomainError("window points must be strictly increasing")
        self._index = {p: i for i, p in enumerate(self.points)}

    def index(self, pts) -> list[int]:
        out = []
        for p in pts:
            p = float(p)
            if p not in self._index:
                raise DomainError(f"point {p} lies outside the window")
            out.append(self._index[p])
        return out

    def sub(self, pts) -> np.ndarray:
        idx = self.index(pts)
        return self.entries[np.ix_(idx, idx)]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.entries, self.entries.T, rtol=0, atol=1e-12))


def _floats(points) -> list[float]:
    if isinstance(points, PointSet):
        return points.floats()
    return [float(p) for p in points]


def corr_det(K: WindowMatrix, points) -> float:
    pts = _floats(points)
    if not pts:
        return 1.0
    return float(np.linalg.det(K.sub(pts)))


def k_from_l(L: WindowMatrix) -> WindowMatrix:
    """K = L (1 + L)^{-1}."""
    A = np.eye(len(L.points)) + L.entries
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > 1e14:
        raise SpectrumError("1 + L is numerically singular")
    K = np.linalg.solve(A.T, L.entries.T).T
    return WindowMatrix(L.points, K, cond)


def l_from_k(K: WindowMatrix) -> WindowMatrix:
    """L = K (1 - K)^{-1}."""
    A = np.eye(len(K.points)) - K.entries
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > 1e14:
        raise SpectrumError("1 - K is numerically singular")
    return WindowMatrix(K.points, np.linalg.solve(A.T, K.entries.T).T, cond)


def circ_blocks(K: WindowMatrix) -> tuple[WindowMatrix, WindowMatrix]:
    """(K°, °K): K° keeps positive rows and replaces negative rows by delta - K;
    °K = 1 - K°."""
    neg = np.array([p < 0 for p in K.points])
    Kc = K.entries.copy()
    Kc[neg] = -Kc[neg]
    Kc[neg, np.flatnonzero(neg)] += 1.0
    return WindowMatrix(K.points, Kc), WindowMatrix(K.points, np.eye(len(K.points)) - Kc)


def measure_from_l(L: WindowMatrix, lam: YoungDiagram, boundary_tol: float = 1e-10) -> float:
    """det L_X / det(1 + L) with X the Frobenius configuration of lam."""
    X = x_config(lam).floats()
    lo, hi = L.points[0], L.points[-1]
    if X and (min(X) < lo or max(X) > hi):
        raise DomainError("configuration exceeds the window")
    edge = np.abs(L.entries[[0, -1]]).max() if len(L.points) else 0.0
    if edge > boundary_tol:
        raise DomainError(f"window too small: boundary rows of L reach {edge:.3g}")
    sign, logdet = np.linalg.slogdet(np.eye(len(L.points)) + L.entries)
    num = np.linalg.det(L.sub(X)) if X else 1.0
    return float(num * sign * np.exp(-logdet))


def projection_residual(K: WindowMatrix, radius: float | None = None, interior: float = 0.5) -> float:
    """Spectral norm of (K^2 - K) restricted to the points with |x| < radius.

    Without a radius the interior is the central fraction ``interior`` of
    the window.  Slowly decaying kernels need a fixed radius: their rows near
    a proportional interior edge lose a fixed share of mass to the cut.
    """
    M = K.entries @ K.entries - K.entries
    if radius is None:
        radius = interior * max(abs(K.points[0]), abs(K.points[-1]))
    idx = [i for i, p in enumerate(K.points) if abs(p) < radius]
    if not idx:
        return 0.0
    return float(np.linalg.norm(M[np.ix_(idx, idx)], 2))


# --------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class SampleBatch:
    seed: int
    draws: tuple[PointSet, ...]
    window: tuple[float, ...]
    clip: float


def _spectrum(K: np.ndarray, clip_tol: float) -> tuple[np.ndarray, np.ndarray, float]:
    sym = 0.5 * (K + K.T)
    vals, vecs = np.linalg.eigh(sym)
    clipped = np.clip(vals, 0.0, 1.0)
    clip = float(np.abs(vals - clipped).max()) if len(vals) else 0.0
    if clip > clip_tol:
        raise SpectrumError(f"kernel spectrum leaves [0, 1] by {clip:.3g}")
    return clipped, vecs, clip


def _draw(vals: np.ndarray, vecs: np.ndarray, rng: np.random.Generator) -> list[int]:
    V = vecs[:, rng.random(len(vals)) < vals]
    out = []
    while V.shape[1]:
        prob = (V**2).sum(axis=1)
        prob /= prob.sum()
        i = int(rng.choice(len(prob), p=prob))
        out.append(i)
        j = int(np.argmax(np.abs(V[i])))
        Vj = V[:, j]
        V = np.delete(V, j, axis=1)
        V -= np.outer(Vj, V[i] / Vj[i])
        if V.shape[1]:
            V, _ = np.linalg.qr(V)
    return sorted(out)


def sample_dpp(K: WindowMatrix, seed: int, count: int, clip_tol: float = 1e-6) -> SampleBatch:
    """Exact samples of the determinantal process with a symmetric kernel.

    Each draw uses its own stream spawned from ``SeedSequence(seed)``.
    """
    if count < 0:
        raise ParameterError("count must be nonnegative")
    vals, vecs, clip = _spectrum(K.entries, clip_tol)
    streams = np.random.SeedSequence(seed).spawn(count)
    pts = np.asarray(K.points)
    draws = []
    for ss in streams:
        idx = _draw(vals, vecs, np.random.default_rng(ss))
        draws.append(PointSet.of(pts[idx].tolist()))
    return SampleBatch(seed, tuple(draws), K.points, clip)

"""Tangential/normal parts of the product structure and the induced splitting.

For an orthonormal tangent frame ``E`` and normal frame ``Xi`` the blocks of
``[E Xi]^T F [E Xi]`` are the operators ``T`` (tangent to tangent), ``N``
(tangent to normal), ``t`` (normal to tangent) and ``omega`` (normal to
normal). ``T^2`` is symmetric with spectrum in ``[0, 1]``; its eigenspaces
give the anti-invariant (eigenvalue 0), invariant (eigenvalue 1) and slant
distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT
from .errors import AsymmetryError, DimensionJumpError, NonConstantLambdaError, SkewprodError
from .geometry import FramePack, ProductAmbient

ANTI = "anti-invariant"
SLANT = "slant"
INV = "invariant"


@dataclass(frozen=True)
class OperatorPack:
    T: np.ndarray      # d x d
    N: np.ndarray      # (n-d) x d
    t: np.ndarray      # d x (n-d)
    omega: np.ndarray  # (n-d) x (n-d)


def decompose(frame: FramePack, ambient: ProductAmbient) -> OperatorPack:
    E, Xi = frame.tangent_frame, frame.normal_frame
    FE, FXi = ambient.apply(E), ambient.apply(Xi)
    return OperatorPack(T=E.T @ FE, N=Xi.T @ FE, t=E.T @ FXi, omega=Xi.T @ FXi)


def product_residuals(pack: OperatorPack) -> dict[str, float]:
    """Max-entry residuals of the four block relations implied by ``F^2 = I``."""
    T, N, t, w = pack.T, pack.N, pack.t, pack.omega
    d, k = T.shape[0], w.shape[0]

    def res(m):
        return float(np.max(np.abs(m))) if m.size else 0.0

    return {
        "T2_plus_tN": res(T @ T + t @ N - np.eye(d)),
        "omega2_plus_Nt": res(w @ w + N @ t - np.eye(k)),
        "NT_plus_omegaN": res(N @ T + w @ N),
        "Tt_plus_tomega": res(T @ t + t @ w),
    }


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray   # ascending, clamped
    eigenvectors: np.ndarray  # d x d, columns in the tangent frame
    raw: np.ndarray           # before clamping
    point: np.ndarray | None = None


def t2_spectrum(pack: OperatorPack, cluster_tol: float = DEFAULT.cluster_tol,
                symmetry_tol: float = 1e-10, point=None) -> Spectrum:
    T = pack.T
    asym = float(np.max(np.abs(T - T.T))) if T.size else 0.0
    if asym > symmetry_tol:
        raise AsymmetryError(f"T is not symmetric (max deviation {asym:.3e})")
    T2 = T @ T
    raw, vecs = np.linalg.eigh(0.5 * (T2 + T2.T))
    lam = raw.copy()
    lam[np.abs(lam) <= cluster_tol] = 0.0
    lam[np.abs(lam - 1.0) <= cluster_tol] = 1.0
    lam = np.clip(lam, 0.0, 1.0)
    return Spectrum(lam, vecs, raw, None if point is None else np.asarray(point, dtype=float))


# splitting ------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    label: str
    lam: float
    dim: int
    basis: np.ndarray  # d x dim, orthonormal columns in the tangent frame
    spread: float = 0.0

    @property
    def theta(self) -> float:
        """Slant angle in radians, ``arccos(sqrt(lam))``."""
        return math.acos(math.sqrt(min(max(self.lam, 0.0), 1.0)))

    @property
    def cos_theta(self) -> float:
        return math.sqrt(self.lam)


SPECIAL_CASES = {
    "a": "invariant",
    "b": "anti-invariant",
    "c": "semi-invariant",
    "d": "slant",
    "e": "semi-slant",
    "f": "hemi-slant",
    "g": "bi-slant",
}


@dataclass(frozen=True)
class DistributionSplit:
    blocks: tuple[Block, ...]
    point: np.ndarray | None = None
    n_points: int = 1
    special_cases: tuple[str, ...] = field(default=())

    @property
    def order_k(self) -> int:
        return sum(1 for b in self.blocks if b.label == SLANT)

    def block(self, label: str) -> Block | None:
        found = [b for b in self.blocks if b.label == label]
        if len(found) > 1:
            raise SkewprodError(f"{len(found)} {label} blocks; order-1 operations need exactly one")
        return found[0] if found else None

    def dim(self, label: str) -> int:
        return sum(b.dim for b in self.blocks if b.label == label)

    @property
    def dims(self) -> tuple[int, int, int]:
        """Dimensions of the anti-invariant, slant and invariant parts."""
        return self.dim(ANTI), self.dim(SLANT), self.dim(INV)

    @property
    def proper_flag(self) -> bool:
        return self.dim(ANTI) > 0 and self.dim(INV) > 0

    @property
    def skew_semi_invariant_order1(self) -> bool:
        return self.order_k == 1

    @property
    def proper_order1(self) -> bool:
        return self.order_k == 1 and self.proper_flag

    def slant(self) -> Block:
        return self.block(SLANT)


def _special_cases(d_perp: int, k: int, d_inv: int) -> tuple[str, ...]:
    cases = []
    if k == 0:
        if d_perp == 0:
            cases.append("a")
        if d_inv == 0:
            cases.append("b")
        cases.append("c")
    if k == 1:
        if d_perp == 0 and d_inv == 0:
            cases.append("d")
        elif d_perp == 0:
            cases.append("e")
        elif d_inv == 0:
            cases.append("f")
    if k == 2 and d_perp == 0 and d_inv == 0:
        cases.append("g")
    return tuple(cases)


def _canonical_signs(basis: np.ndarray) -> np.ndarray:
    out = basis.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def clusters(spec: Spectrum, cluster_tol: float = DEFAULT.cluster_tol) -> list[Block]:
    """Group sorted eigenvalues wherever consecutive gaps exceed ``cluster_tol``."""
    lam = spec.eigenvalues
    groups, start = [], 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or lam[i] - lam[i - 1] > cluster_tol:
            groups.append((start, i))
            start = i
    blocks = []
    for a, b in groups:
        value = float(np.mean(lam[a:b]))
        if lam[a] == 0.0 and lam[b - 1] == 0.0:
            label, value = ANTI, 0.0
        elif lam[a] == 1.0 and lam[b - 1] == 1.0:
            label, value = INV, 1.0
        else:
            label = SLANT
        blocks.append(Block(label, value, b - a, _canonical_signs(spec.eigenvectors[:, a:b])))
    return blocks


def split_at(spec: Spectrum, cluster_tol: float = DEFAULT.cluster_tol) -> DistributionSplit:
    """The splitting at a single point (no constancy requirement)."""
    blocks = tuple(clusters(spec, cluster_tol))
    d_perp = sum(b.dim for b in blocks if b.label == ANTI)
    d_inv = sum(b.dim for b in blocks if b.label == INV)
    k = sum(1 for b in blocks if b.label == SLANT)
    return DistributionSplit(blocks, spec.point, 1, _special_cases(d_perp, k, d_inv))


def _signature(blocks):
    return tuple((b.label, b.dim) for b in blocks)


def classify(spectra: Sequence[Spectrum], cluster_tol: float = DEFAULT.cluster_tol,
             constancy_tol: float = DEFAULT.constancy_tol) -> DistributionSplit:
    """Classify the tangent bundle from the ``T^2`` spectra at several sample points.

    Multiplicities must agree at every point and each slant eigenvalue must be
    constant within ``constancy_tol``. Bases are taken at the lexicographically
    smallest sample point so the result does not depend on sample order.
    """
    if len(spectra) < 2:
        raise ValueError("classify needs spectra at two or more points")
    per_point = [clusters(s, cluster_tol) for s in spectra]
    sig0 = _signature(per_point[0])
    for s, blocks in zip(spectra, per_point):
        if _signature(blocks) != sig0:
            raise DimensionJumpError(
                f"eigenvalue multiplicities change between points: {sig0} vs {_signature(blocks)}"
                + (f" at {s.point.tolist()}" if s.point is not None else "")
            )
    lam_table = np.array([[b.lam for b in blocks] for blocks in per_point])
    spread = lam_table.max(axis=0) - lam_table.min(axis=0)
    worst = float(spread.max()) if spread.size else 0.0
    if worst > constancy_tol:
        raise NonConstantLambdaError(
            f"slant eigenvalue varies by {worst:.3e} across samples (generic, not skew semi-invariant)",
            worst,
        )
    if all(s.point is not None for s in spectra):
        ref = min(range(len(spectra)), key=lambda i: tuple(spectra[i].point))
    else:
        ref = 0
    blocks = tuple(
        Block(b.label, b.lam, b.dim, b.basis, float(sp)) for b, sp in zip(per_point[ref], spread)
    )
    d_perp = sum(b.dim for b in blocks if b.label == ANTI)
    d_inv = sum(b.dim for b in blocks if b.label == INV)
    k = sum(1 for b in blocks if b.label == SLANT)
    return DistributionSplit(blocks, spectra[ref].point, len(spectra), _special_cases(d_perp, k, d_inv))


def block_projector(frame: FramePack, block: Block) -> np.ndarray:
    """Ambient orthogonal projector onto the block (n x n)."""
    B = frame.tangent_frame @ block.basis
    return B @ B.T

"""Second fundamental form, shape operators and mean curvature.

In a flat ambient, ``h(d_i, d_j)`` is the normal part of the second partial
``d_i d_j phi``. Moving to the orthonormal frame ``e = J R^{-1}`` only needs
``R^{-1}`` on both slots: derivatives of ``R^{-1}`` multiply ``J`` and are
therefore tangential, so they never reach the normal projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import FramePack
from .operators import Block, DistributionSplit


@dataclass(frozen=True)
class ExtrinsicPack:
    h: np.ndarray       # d x d x (n-d): g(h(e_i, e_j), xi_a)
    A: np.ndarray       # (n-d) x d x d: A[a][j, i] = g(A_{xi_a} e_i, e_j)
    H: np.ndarray       # (n-d,): mean curvature in the normal frame
    frame: FramePack

    @property
    def norm_sq(self) -> float:
        return float(np.sum(self.h * self.h))

    @property
    def H_ambient(self) -> np.ndarray:
        return self.frame.normal_frame @ self.H

    def h_ambient(self, U: np.ndarray, W: np.ndarray) -> np.ndarray:
        """``h(U, W)`` as an ambient vector, for ambient tangent vectors ``U, W``."""
        E = self.frame.tangent_frame
        coeff = np.einsum("i,j,ija->a", E.T @ U, E.T @ W, self.h)
        return self.frame.normal_frame @ coeff

    def shape_operator(self, xi: np.ndarray, U: np.ndarray) -> np.ndarray:
        """``A_xi U`` as an ambient tangent vector, for ambient normal ``xi``."""
        E, Xi = self.frame.tangent_frame, self.frame.normal_frame
        c = Xi.T @ xi
        mat = np.einsum("a,aji->ji", c, self.A)
        return E @ (mat @ (E.T @ U))


def second_fundamental_form(frame: FramePack) -> ExtrinsicPack:
    d = frame.coeffs.shape[0]
    Rinv = np.linalg.solve(frame.coeffs, np.eye(d))
    # second partials along orthonormal directions: (n, d, d)
    D2 = np.einsum("ki,nkl,lj->nij", Rinv, frame.second_partials, Rinv)
    h = np.einsum("na,nij->ija", frame.normal_frame, D2)
    h = 0.5 * (h + h.transpose(1, 0, 2))
    A = np.transpose(h, (2, 1, 0)).copy()
    H = np.einsum("iia->a", h) / d
    return ExtrinsicPack(h, A, H, frame)


def _basis(split_or_block, label):
    if isinstance(label, Block):
        return label.basis
    return split_or_block.block(label).basis


def mixed_tg_residual(ext: ExtrinsicPack, split: DistributionSplit, block_a, block_b) -> float:
    """Largest ``|h(Z, X)|`` over basis vectors of two blocks taken at the same point."""
    Za, Xb = _basis(split, block_a), _basis(split, block_b)
    if Za.size == 0 or Xb.size == 0:
        return 0.0
    vals = np.einsum("ip,jq,ija->pqa", Za, Xb, ext.h)
    return float(np.max(np.linalg.norm(vals, axis=-1)))


def gauss_weingarten_check(ext: ExtrinsicPack) -> float:
    """Largest ``|g(h(e_i,e_j),xi_a) - g(A_{xi_a} e_i, e_j)|``."""
    h, A = ext.h, ext.A
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - np.transpose(A, (2, 1, 0)))))


def h_symmetry(ext: ExtrinsicPack, raw: bool = True) -> float:
    """Symmetry defect of ``h``; with ``raw`` the check runs on the unsymmetrised contraction."""
    if raw:
        f = ext.frame
        d = f.coeffs.shape[0]
        Rinv = np.linalg.solve(f.coeffs, np.eye(d))
        D2 = np.einsum("ki,nkl,lj->nij", Rinv, f.second_partials, Rinv)
        h = np.einsum("na,nij->ija", f.normal_frame, D2)
    else:
        h = ext.h
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - h.transpose(1, 0, 2))))


def sectional_curvature(ext: ExtrinsicPack, i: int = 0, j: int = 1) -> float:
    """Curvature of the plane ``e_i ^ e_j`` from the Gauss equation in a flat ambient."""
    h = ext.h
    return float(h[i, i] @ h[j, j] - h[i, j] @ h[i, j])

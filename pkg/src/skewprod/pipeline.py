"""Per-point analysis and differentiated distribution fields.

Vector fields tangent to a distribution are handled through the ambient
orthogonal projector ``P_B`` onto that distribution. For fields ``B`` in one
block and ``C`` orthogonal to it, ``g(D_A B, C) = C^T (D_A P_B) B`` for any
extension of ``B``, so connection terms between mutually orthogonal blocks
only need the derivative of ``P_B``. That derivative is taken by central
differences in parameter space, re-running the eigen-decomposition at each
stencil point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionJumpError, MultiplicityDriftError
from .extrinsic import ExtrinsicPack, second_fundamental_form
from .geometry import FramePack, Immersion, frame_from_jets, gram_schmidt
from .operators import (
    ANTI, INV, SLANT, Block, DistributionSplit, OperatorPack, Spectrum, clusters, decompose,
    split_at, t2_spectrum,
)


@dataclass
class PointData:
    point: np.ndarray
    frame: FramePack
    ops: OperatorPack
    spectrum: Spectrum
    split: DistributionSplit
    ext: ExtrinsicPack
    dP: dict = field(default_factory=dict)  # label -> (d, n, n) parameter derivatives of P_block

    def basis(self, label: str) -> np.ndarray:
        """Ambient orthonormal basis (n x dim) of the block with ``label``."""
        b = self.split.block(label)
        if b is None:
            return np.zeros((self.frame.jacobian.shape[0], 0))
        return self.frame.tangent_frame @ b.basis

    def projector(self, label: str) -> np.ndarray:
        B = self.basis(label)
        return B @ B.T


def _matching(blocks: list[Block], target: Block) -> Block | None:
    same = [b for b in blocks if b.label == target.label]
    if not same:
        return None
    return min(same, key=lambda b: abs(b.lam - target.lam))


class Analyzer:
    """Evaluates the geometric pipeline for one immersion with shared tolerances."""

    def __init__(self, imm: Immersion, tol: Tolerances = DEFAULT):
        self.imm = imm
        self.tol = tol
        self.steps = tol.fd_step_rel * imm.widths

    def analyze(self, points) -> list[PointData]:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        _, jac, hess = self.imm.jets(pts)
        out = []
        for k in range(len(pts)):
            frame = frame_from_jets(pts[k], jac[k], hess[k], self.tol.rank_tol)
            ops = decompose(frame, self.imm.ambient)
            spec = t2_spectrum(ops, self.tol.cluster_tol, point=pts[k])
            out.append(PointData(pts[k], frame, ops, spec, split_at(spec, self.tol.cluster_tol),
                                 second_fundamental_form(frame)))
        return out

    def check_signature(self, data: list[PointData], split: DistributionSplit):
        want = tuple((b.label, b.dim) for b in split.blocks)
        for pd in data:
            got = tuple((b.label, b.dim) for b in pd.split.blocks)
            if got != want:
                raise DimensionJumpError(f"splitting {got} at {pd.point.tolist()} differs from {want}")

    def differentiate(self, data: list[PointData], labels=(ANTI, SLANT, INV)):
        """Fill ``pd.dP[label]`` with central-difference derivatives of the block projectors."""
        todo = [(k, lab) for k, pd in enumerate(data) for lab in labels
                if lab not in pd.dP and pd.split.block(lab) is not None]
        if not todo:
            return
        need = sorted({k for k, _ in todo})
        d = self.imm.d
        stencil = []
        for k in need:
            for i in range(d):
                for s in (1.0, -1.0):
                    q = data[k].point.copy()
                    q[i] += s * self.steps[i]
                    stencil.append(q)
        stencil = np.array(stencil)
        _, jac, _ = self.imm.jets(stencil)
        signs = np.array(self.imm.ambient.signs, dtype=float)
        row = 0
        for k in need:
            pd = data[k]
            targets = {lab: pd.split.block(lab) for lab in labels if pd.split.block(lab) is not None}
            proj = {lab: np.zeros((d, 2) + (self.imm.n, self.imm.n)) for lab in targets}
            for i in range(d):
                for s_idx in range(2):
                    E, _ = gram_schmidt(jac[row], self.tol.rank_tol)
                    row += 1
                    T = E.T @ (signs[:, None] * E)
                    spec = t2_spectrum(OperatorPack(T, np.zeros((0, T.shape[0])), np.zeros((T.shape[0], 0)),
                                                    np.zeros((0, 0))), self.tol.cluster_tol)
                    local = clusters(spec, self.tol.cluster_tol)
                    for lab, target in targets.items():
                        b = _matching(local, target)
                        if b is None or b.dim != target.dim:
                            raise MultiplicityDriftError(
                                f"{lab} block changes multiplicity within the stencil at {pd.point.tolist()}")
                        B = E @ b.basis
                        proj[lab][i, s_idx] = B @ B.T
            for lab in targets:
                pd.dP[lab] = (proj[lab][:, 0] - proj[lab][:, 1]) / (2.0 * self.steps)[:, None, None]

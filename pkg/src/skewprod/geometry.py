"""Flat product ambient, parametrized immersions and orthonormal frames."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ComponentError, FrameDegenerateError, InputError, RankDeficientError, SkewprodError
from .expr import RESERVED, ExprNode, eval_jet, parameters, parse_expression, to_source

RANK_TOL = 1e-9


@dataclass(frozen=True)
class ProductAmbient:
    """``R^n`` with the Euclidean metric and ``F = diag(signs)``."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise InputError("signs must be +1 or -1")
        if 1 not in signs or -1 not in signs:
            raise InputError("signs must contain both +1 and -1 (F would be +-identity)")
        object.__setattr__(self, "signs", signs)

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def F(self) -> np.ndarray:
        return np.diag(np.array(self.signs, dtype=float))

    def apply(self, v: np.ndarray) -> np.ndarray:
        """``F v`` for a vector or for the columns of a matrix."""
        s = np.array(self.signs, dtype=float)
        return s[:, None] * v if v.ndim == 2 else s * v


def _check_params(params):
    if len(set(params)) != len(params):
        raise InputError("parameter names must be distinct")
    bad = [p for p in params if p in RESERVED]
    if bad:
        raise InputError(f"parameter name {bad[0]!r} is reserved")


@dataclass(frozen=True)
class Immersion:
    params: tuple[str, ...]
    components: tuple[ExprNode, ...]
    domain: tuple[tuple[float, float], ...]
    ambient: ProductAmbient
    name: str = "immersion"

    def __post_init__(self):
        _check_params(self.params)
        if len(self.components) != self.ambient.n:
            raise InputError(f"{len(self.components)} components for ambient dimension {self.ambient.n}")
        if len(self.domain) != self.d:
            raise InputError("one domain interval per parameter is required")
        for lo, hi in self.domain:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InputError(f"invalid domain interval [{lo}, {hi}]")
        if self.d >= self.ambient.n:
            raise InputError("need fewer parameters than ambient dimensions")
        for i, comp in enumerate(self.components):
            extra = parameters(comp) - set(self.params)
            if extra:
                raise InputError(f"component {i} uses unknown parameter {sorted(extra)[0]!r}")

    @classmethod
    def from_strings(cls, params, components, domain, signs, name="immersion") -> "Immersion":
        _check_params(params)
        nodes = []
        for i, src in enumerate(components):
            try:
                nodes.append(parse_expression(src, params))
            except SkewprodError as exc:
                raise ComponentError(i, exc) from exc
        return cls(tuple(params), tuple(nodes), tuple(tuple(map(float, b)) for b in domain),
                   ProductAmbient(tuple(signs)), name)

    @property
    def d(self) -> int:
        return len(self.params)

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def widths(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.domain])

    def sources(self) -> list[str]:
        return [to_source(c) for c in self.components]

    def jets(self, points):
        """Values ``(..., n)``, Jacobians ``(..., n, d)`` and Hessians ``(..., n, d, d)``."""
        pts = np.asarray(points, dtype=float)
        binding = {name: pts[..., i] for i, name in enumerate(self.params)}
        jets = [eval_jet(c, binding, self.params) for c in self.components]
        values = np.stack([j.value for j in jets], axis=-1)
        jac = np.stack([j.grad for j in jets], axis=-2)
        hess = np.stack([j.hess for j in jets], axis=-3)
        return values, jac, hess


@dataclass(frozen=True)
class FramePack:
    point: np.ndarray
    jacobian: np.ndarray        # n x d
    g_induced: np.ndarray       # d x d
    tangent_frame: np.ndarray   # n x d, orthonormal columns
    normal_frame: np.ndarray    # n x (n-d), orthonormal columns
    coeffs: np.ndarray          # d x d upper triangular, jacobian = tangent_frame @ coeffs
    second_partials: np.ndarray = field(repr=False)  # n x d x d

    @property
    def tangent_projector(self) -> np.ndarray:
        return self.tangent_frame @ self.tangent_frame.T

    def param_coords(self, vectors: np.ndarray) -> np.ndarray:
        """Parameter-space components of tangent vectors (columns of ``vectors``)."""
        return np.linalg.solve(self.coeffs, self.tangent_frame.T @ vectors)


def _check_rank(jac: np.ndarray, rank_tol: float):
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv[-1] < rank_tol:
        raise RankDeficientError(f"Jacobian singular value {sv[-1]:.3e} below {rank_tol:g}")


def jacobian(imm: Immersion, p) -> np.ndarray:
    return imm.jets(p)[1]


def induced_metric(imm: Immersion, p, rank_tol: float = RANK_TOL) -> np.ndarray:
    jac = jacobian(imm, p)
    _check_rank(jac, rank_tol)
    return jac.T @ jac


def gram_schmidt(jac: np.ndarray, rank_tol: float = RANK_TOL):
    """Modified Gram-Schmidt on the columns of ``jac``; returns ``(E, R)`` with ``jac = E R``."""
    n, d = jac.shape
    E = np.zeros((n, d))
    R = np.zeros((d, d))
    for j in range(d):
        v = jac[:, j].copy()
        for i in range(j):
            R[i, j] = E[:, i] @ v
            v -= R[i, j] * E[:, i]
        R[j, j] = np.linalg.norm(v)
        if R[j, j] < rank_tol:
            raise RankDeficientError(f"column {j} is dependent on earlier columns")
        E[:, j] = v / R[j, j]
    return E, R


def normal_completion(E: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal complement of ``span(E)`` from pivoted Gram-Schmidt on the standard basis.

    At each step the standard basis vector with the largest remaining residual
    (lowest index on ties) is taken; the result is ordered by basis index.
    """
    n, d = E.shape
    residual = np.eye(n) - E @ E.T
    free = np.ones(n, dtype=bool)
    picked = []
    for _ in range(n - d):
        norms = np.where(free, np.linalg.norm(residual, axis=0), -1.0)
        k = int(np.argmax(norms))
        if norms[k] < rank_tol:
            raise FrameDegenerateError(f"normal residual {norms[k]:.3e} below {rank_tol:g}")
        q = residual[:, k] / norms[k]
        # second pass keeps the normal frame orthogonal to the tangent frame at 1e-16
        q -= E @ (E.T @ q)
        for _, prev in picked:
            q -= prev * (prev @ q)
        q /= np.linalg.norm(q)
        picked.append((k, q))
        free[k] = False
        residual -= np.outer(q, q @ residual)
    picked.sort(key=lambda kq: kq[0])
    return np.column_stack([q for _, q in picked]) if picked else np.zeros((n, 0))


def frame_from_jets(point, jac, hess, rank_tol: float = RANK_TOL) -> FramePack:
    _check_rank(jac, rank_tol)
    E, R = gram_schmidt(jac, rank_tol)
    Xi = normal_completion(E, rank_tol)
    return FramePack(np.asarray(point, dtype=float), jac, jac.T @ jac, E, Xi, R, hess)


def frames(imm: Immersion, p, rank_tol: float = RANK_TOL) -> FramePack:
    _, jac, hess = imm.jets(p)
    return frame_from_jets(p, jac, hess, rank_tol)


def frames_many(imm: Immersion, points, rank_tol: float = RANK_TOL) -> list[FramePack]:
    """Frames at each row of ``points``; one batched pass through the expression trees."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _, jac, hess = imm.jets(pts)
    return [frame_from_jets(pts[k], jac[k], hess[k], rank_tol) for k in range(len(pts))]


def sample_points(imm: Immersion, grid=3, random: int = 16, seed: int = 0, cap: int = 243) -> np.ndarray:
    """Interior sample points: a cell-centred grid plus seeded uniform points.

    ``grid`` is an int (same count for every parameter) or a per-parameter
    sequence. When the grid would exceed ``cap`` points, trailing parameters
    are reduced to a single midpoint until it fits.
    """
    d = imm.d
    counts = [int(grid)] * d if np.isscalar(grid) else [int(c) for c in grid]
    if len(counts) != d:
        raise InputError("grid needs one count per parameter")
    for i in reversed(range(d)):
        if int(np.prod(counts)) <= cap:
            break
        counts[i] = 1
    axes = []
    for (lo, hi), c in zip(imm.domain, counts):
        if c <= 0:
            axes.append(np.array([]))
        else:
            axes.append(lo + (np.arange(c) + 0.5) / c * (hi - lo))
    pts = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")] if all(len(a) for a in axes) else []
    grid_pts = np.column_stack(pts) if pts else np.zeros((0, d))
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in imm.domain])
    hi = np.array([b[1] for b in imm.domain])
    # keep random points a little away from the box boundary for FD stencils
    margin = 0.01 * (hi - lo)
    rand_pts = lo + margin + rng.random((int(random), d)) * (hi - lo - 2 * margin)
    return np.vstack([grid_pts, rand_pts])

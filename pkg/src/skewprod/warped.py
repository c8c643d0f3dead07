"""Warped-product structure checks and the identity suite.

Letters follow one convention throughout: ``V, W`` span the anti-invariant
block, ``U, Z`` the slant block and ``X, Y`` the invariant block; ``sigma`` is
the log of the warping function. Every identity is evaluated on all
combinations of orthonormal basis vectors of the blocks involved, at every
sample point, and reported as its worst residual.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import InputError, NotProperError, NotWarpedError, PartitionMismatchError
from .expr import ExprNode, eval_jet, parameters, parse_expression
from .extrinsic import mixed_tg_residual
from .geometry import Immersion
from .operators import ANTI, INV, SLANT, DistributionSplit
from .pipeline import Analyzer, PointData

ROLE = {"perp": ANTI, "slant": SLANT, "inv": INV}


# warped structure ----------------------------------------------------------


@dataclass(frozen=True)
class WarpedSpec:
    base_params: tuple[str, ...]
    fiber_params: tuple[str, ...]
    warp_expr: ExprNode
    warp_source: str = ""

    @classmethod
    def from_strings(cls, imm: Immersion, base, fiber, warp: str) -> "WarpedSpec":
        base, fiber = tuple(base), tuple(fiber)
        if set(base) & set(fiber):
            raise InputError("base and fiber parameters overlap")
        if set(base) | set(fiber) != set(imm.params) or len(base) + len(fiber) != imm.d:
            raise InputError("base and fiber parameters must partition the immersion parameters")
        node = parse_expression(warp, imm.params)
        stray = parameters(node) - set(base)
        if stray:
            raise InputError(f"warping function depends on fiber parameter {sorted(stray)[0]!r}")
        return cls(base, fiber, node, warp)

    def sigma_grad(self, imm: Immersion, points) -> tuple[np.ndarray, np.ndarray]:
        """``f`` and the parameter gradient of ``sigma = ln f`` at ``points`` (batched)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        jet = eval_jet(self.warp_expr, {p: pts[:, i] for i, p in enumerate(imm.params)}, imm.params)
        f = jet.value
        if np.any(f <= 0):
            bad = int(np.argmax(f <= 0))
            raise InputError(f"warping function is not positive at {pts[bad].tolist()}")
        return f, jet.grad / f[:, None]


# identity reporting ------------------------------------------------------------


@dataclass
class IdentityResult:
    id: str
    residual: float
    point: list | None
    tolerance: float
    status: str  # pass | fail | skipped | not-triggered
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skipped", "not-triggered")

    def to_dict(self) -> dict:
        return {"id": self.id, "residual": self.residual, "point": self.point,
                "tolerance": self.tolerance, "status": self.status, "detail": self.detail}

    @classmethod
    def from_dict(cls, d) -> "IdentityResult":
        return cls(d["id"], d["residual"], d["point"], d["tolerance"], d["status"], d.get("detail", ""))


def result(id_, residual, point, tolerance, detail="") -> IdentityResult:
    ok = bool(np.isfinite(residual)) and residual <= tolerance
    pt = None if point is None else [float(v) for v in point]
    return IdentityResult(id_, float(residual), pt, float(tolerance), "pass" if ok else "fail", detail)


@dataclass
class IdentityReport:
    entries: dict = field(default_factory=dict)

    def add(self, r: IdentityResult):
        if r.id in self.entries:
            raise ValueError(f"identity {r.id!r} reported twice")
        self.entries[r.id] = r

    def extend(self, results):
        for r in results:
            self.add(r)

    def __getitem__(self, key) -> IdentityResult:
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.entries.values())

    def to_list(self) -> list:
        return [r.to_dict() for r in self.entries.values()]


# evaluation context ----------------------------------------------------------


class Context:
    """Operators at one sample point, acting on ambient vectors."""

    def __init__(self, pd: PointData, signs, dsigma=None):
        self.pd = pd
        self.E = pd.frame.tangent_frame
        self.signs = np.asarray(signs, dtype=float)
        slant = pd.split.block(SLANT) if pd.split.order_k == 1 else None
        self.lam = slant.lam if slant is not None else float("nan")
        self.dsigma = dsigma  # parameter-space gradient of sigma

    def basis(self, role: str) -> list[np.ndarray]:
        B = self.pd.basis(ROLE[role])
        return [B[:, j] for j in range(B.shape[1])]

    def F(self, v):
        return self.signs * v

    def tan(self, v):
        return self.E @ (self.E.T @ v)

    def Tt(self, v):
        return self.tan(self.F(v))

    def Nn(self, v):
        Fv = self.F(v)
        return Fv - self.tan(Fv)

    def h(self, U, W):
        return self.pd.ext.h_ambient(U, W)

    def A(self, xi, U):
        return self.pd.ext.shape_operator(xi, U)

    @staticmethod
    def g(a, b):
        return float(a @ b)

    def coords(self, v):
        return self.pd.frame.param_coords(v)

    def deriv(self, A_vec, role):
        """Directional derivative of the block projector along tangent vector ``A_vec``."""
        a = self.coords(A_vec)
        return np.einsum("i,ijk->jk", a, self.pd.dP[ROLE[role]])

    def conn(self, A_vec, role, B, C):
        """``g(nabla_A B, C)`` for ``B`` in block ``role`` and ``C`` orthogonal to that block."""
        return float(C @ self.deriv(A_vec, role) @ B)

    def ds(self, v):
        """Derivative of ``sigma`` along tangent vector ``v``."""
        if self.dsigma is None:
            raise NotWarpedError("no warping function")
        return float(self.dsigma @ self.coords(v))

    @property
    def csc2(self):
        return 1.0 / (1.0 - self.lam)

    @property
    def sec2(self):
        return 1.0 / self.lam

    @property
    def sin2(self):
        return 1.0 - self.lam


@dataclass(frozen=True)
class Identity:
    id: str
    roles: tuple[str, ...]
    fn: Callable  # (ctx, *vectors) -> (lhs, rhs), scalars or vectors
    fd: bool = False
    statement: str = ""

    def residuals(self, ctx: Context):
        for vecs in itertools.product(*(ctx.basis(r) for r in self.roles)):
            lhs, rhs = self.fn(ctx, *vecs)
            yield float(np.linalg.norm(np.atleast_1d(np.asarray(lhs) - np.asarray(rhs))))


def evaluate_identity(identity: Identity, contexts: Sequence[Context], tolerance: float) -> IdentityResult:
    worst, where = -1.0, None
    for ctx in contexts:
        for r in identity.residuals(ctx):
            r = r if np.isfinite(r) else math.inf
            if r > worst:
                worst, where = r, ctx.pd.point
    if where is None:
        return IdentityResult(identity.id, 0.0, None, tolerance, "pass", "no admissible vectors")
    return result(identity.id, worst, where, tolerance, identity.statement)


# connection identities (any proper order-1 submanifold) --------------------------


def _c(id_, roles, fn, statement):
    return Identity(id_, roles, fn, True, statement)


CONNECTION_IDENTITIES = (
    _c("conn_perp_perp_inv", ("perp", "perp", "inv"),
       lambda c, V, W, X: (c.conn(V, "perp", W, X), -c.g(c.A(c.F(W), V), c.F(X))),
       "g(nabla_V W, X) = -g(A_{FW} V, FX)"),
    _c("conn_perp_slant_inv", ("perp", "slant", "inv"),
       lambda c, V, Z, X: (c.conn(V, "slant", Z, X),
                           -c.csc2 * (c.g(c.A(c.Nn(c.Tt(Z)), V), X) + c.g(c.A(c.Nn(Z), V), c.F(X)))),
       "g(nabla_V Z, X) = -csc^2(theta) {g(A_{NTZ} V, X) + g(A_{NZ} V, FX)}"),
    _c("conn_slant_perp_inv", ("slant", "perp", "inv"),
       lambda c, Z, V, X: (c.conn(Z, "perp", V, X), -c.g(c.A(c.F(V), Z), c.F(X))),
       "g(nabla_Z V, X) = -g(A_{FV} Z, FX)"),
    _c("conn_slant_slant_inv", ("slant", "slant", "inv"),
       lambda c, U, Z, X: (c.conn(U, "slant", Z, X),
                           -c.csc2 * (c.g(c.A(c.Nn(c.Tt(Z)), U), X) + c.g(c.A(c.Nn(Z), U), c.F(X)))),
       "g(nabla_U Z, X) = -csc^2(theta) {g(A_{NTZ} U, X) + g(A_{NZ} U, FX)}"),
    _c("conn_inv_inv_slant", ("inv", "inv", "slant"),
       lambda c, X, Y, Z: (c.conn(X, "inv", Y, Z),
                           c.csc2 * (c.g(c.A(c.Nn(c.Tt(Z)), X), Y) + c.g(c.A(c.Nn(Z), X), c.F(Y)))),
       "g(nabla_X Y, Z) = csc^2(theta) {g(A_{NTZ} X, Y) + g(A_{NZ} X, FY)}"),
    _c("conn_inv_inv_perp", ("inv", "inv", "perp"),
       lambda c, X, Y, V: (c.conn(X, "inv", Y, V), c.g(c.A(c.F(V), X), c.F(Y))),
       "g(nabla_X Y, V) = g(A_{FV} X, FY)"),
    _c("conn_perp_inv_slant", ("perp", "inv", "slant"),
       lambda c, V, X, Z: (c.conn(V, "inv", X, Z),
                           c.csc2 * (c.g(c.A(c.Nn(c.Tt(Z)), V), X) + c.g(c.A(c.Nn(Z), V), c.F(X)))),
       "g(nabla_V X, Z) = csc^2(theta) {g(A_{NTZ} V, X) + g(A_{NZ} V, FX)}"),
    _c("conn_slant_slant_perp", ("slant", "slant", "perp"),
       lambda c, U, Z, V: (c.conn(U, "slant", Z, V),
                           c.sec2 * (c.g(c.A(c.F(V), U), c.Tt(Z)) + c.g(c.A(c.Nn(c.Tt(Z)), U), V))),
       "g(nabla_U Z, V) = sec^2(theta) {g(A_{FV} U, TZ) + g(A_{NTZ} U, V)}"),
    _c("conn_inv_perp_slant", ("inv", "perp", "slant"),
       lambda c, X, V, Z: (c.conn(X, "perp", V, Z),
                           c.sec2 * (c.g(c.A(c.F(V), X), c.Tt(Z)) + c.g(c.A(c.Nn(c.Tt(Z)), X), V))),
       "g(nabla_X V, Z) = sec^2(theta) {g(A_{FV} X, TZ) + g(A_{NTZ} X, V)}"),
)


# identities that need the warped structure ------------------------------------


def _a(id_, roles, fn, statement):
    return Identity(id_, roles, fn, False, statement)


WARPED_SFF_IDENTITIES = (
    _a("mixed_sff_perp_normal", ("inv", "perp", "perp"),
       lambda c, X, V, W: (c.g(c.h(X, V), c.F(W)), 0.0),
       "g(h(X, V), FW) = 0"),
    _a("mixed_sff_slant_normal", ("inv", "perp", "slant"),
       lambda c, X, V, Z: (c.g(c.h(X, V), c.Nn(Z)), 0.0),
       "g(h(X, V), NZ) = 0"),
    _a("inv_sff_perp_normal", ("inv", "inv", "perp"),
       lambda c, X, Y, V: (c.g(c.h(X, c.F(Y)), c.F(V)), -c.ds(V) * c.g(X, Y)),
       "g(h(X, FY), FV) = -V(ln f) g(X, Y)"),
    _a("inv_sff_slant_normal", ("inv", "inv", "slant"),
       lambda c, X, Y, Z: (c.g(c.h(X, Y), c.Nn(Z)), c.ds(c.Tt(Z)) * c.g(X, Y)),
       "g(h(X, Y), NZ) = TZ(ln f) g(X, Y)"),
)

# inv_sff_slant_normal as stated above drops the term coming from
# g(nabla_X FY, Z) = -Z(ln f) g(X, FY), which is nonzero whenever FY has a
# component along X. This is the identity with that term restored.
INV_SFF_SLANT_FULL = _a(
    "inv_sff_slant_normal_full", ("inv", "inv", "slant"),
    lambda c, X, Y, Z: (c.g(c.h(X, Y), c.Nn(Z)),
                        c.ds(c.Tt(Z)) * c.g(X, Y) - c.ds(Z) * c.g(X, c.F(Y))),
    "g(h(X, Y), NZ) = TZ(ln f) g(X, Y) - Z(ln f) g(X, FY)")

CHARACTERIZATION_IDENTITIES = (
    _a("warp_shape_perp", ("perp", "inv"),
       lambda c, V, X: (c.A(c.F(V), c.F(X)), -c.ds(V) * X),
       "A_{FV} FX = -V(sigma) X"),
    _a("warp_shape_slant", ("slant", "inv"),
       lambda c, Z, X: (c.A(c.Nn(Z), c.F(X)) + c.A(c.Nn(c.Tt(Z)), X), -c.ds(Z) * c.sin2 * X),
       "A_{NZ} FX + A_{NTZ} X = -Z(sigma) sin^2(theta) X"),
)


# helpers --------------------------------------------------------------------------


def _require_proper(split: DistributionSplit):
    if not split.proper_order1:
        raise NotProperError(
            f"needs a proper skew semi-invariant submanifold of order 1 (dims {split.dims}, k={split.order_k})")


def _data(an: Analyzer, samples, data):
    return data if data is not None else an.analyze(samples)


def contexts(imm: Immersion, split: DistributionSplit, samples, spec: WarpedSpec | None = None,
             tol: Tolerances = DEFAULT, data=None, differentiate=True, analyzer=None) -> list[Context]:
    """Evaluation contexts at the samples, with projector derivatives when requested."""
    an = analyzer or Analyzer(imm, tol)
    data = _data(an, samples, data)
    an.check_signature(data, split)
    if differentiate:
        an.differentiate(data)
    dsig = None
    if spec is not None:
        _, dsig = spec.sigma_grad(imm, [pd.point for pd in data])
    return [Context(pd, imm.ambient.signs, None if dsig is None else dsig[k]) for k, pd in enumerate(data)]


# operations -----------------------------------------------------------------------


def check_partition(imm: Immersion, spec: WarpedSpec, split: DistributionSplit, data: list[PointData],
                    tol: float = 1e-6):
    d_perp, d_slant, d_inv = split.dims
    if len(spec.fiber_params) != d_inv or len(spec.base_params) != d_perp + d_slant:
        raise PartitionMismatchError(
            f"base/fiber sizes {len(spec.base_params)}/{len(spec.fiber_params)} do not match "
            f"splitting dims {split.dims}")
    fiber_idx = [imm.params.index(p) for p in spec.fiber_params]
    for pd in data:
        P = pd.projector(INV)
        for i in fiber_idx:
            col = pd.frame.jacobian[:, i]
            off = np.linalg.norm(col - P @ col) / np.linalg.norm(col)
            if off > tol:
                raise PartitionMismatchError(
                    f"coordinate field {imm.params[i]!r} leaves the invariant block ({off:.2e}) "
                    f"at {pd.point.tolist()}")


def check_metric_split(imm: Immersion, spec: WarpedSpec, samples, split: DistributionSplit | None = None,
                       tol: Tolerances = DEFAULT, data=None) -> tuple[float, float]:
    """Residuals of ``g = g_base + f^2 g_fiber``.

    The first residual is the largest derivative of a base-block metric entry
    along a fiber parameter, together with any base/fiber cross term. The
    second compares the fiber block at each sample with ``f^2`` times the
    fiber block at the reference base point (same fiber coordinates) divided
    by ``f^2`` there.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if split is not None:
        an = Analyzer(imm, tol)
        check_partition(imm, spec, split, _data(an, pts, data), tol=1e-6)
    b = [imm.params.index(p) for p in spec.base_params]
    fb = [imm.params.index(p) for p in spec.fiber_params]
    _, jac, hess = imm.jets(pts)
    # dG[k, a, b, c] = d_c (phi_a . phi_b)
    dG = np.einsum("knac,knb->kabc", hess, jac) + np.einsum("kna,knbc->kabc", jac, hess)
    G = np.einsum("kna,knb->kab", jac, jac)
    r1 = 0.0
    if b and fb:
        r1 = max(float(np.max(np.abs(dG[:, b][:, :, b][:, :, :, fb]))),
                 float(np.max(np.abs(G[:, b][:, :, fb]))))
    ref = min(range(len(pts)), key=lambda i: tuple(pts[i]))
    moved = pts.copy()
    moved[:, b] = pts[ref, b]
    _, jac_m, _ = imm.jets(moved)
    G_m = np.einsum("kna,knb->kab", jac_m, jac_m)
    f, _ = spec.sigma_grad(imm, pts)
    f_m, _ = spec.sigma_grad(imm, moved)
    G2 = G_m[:, fb][:, :, fb] / (f_m**2)[:, None, None]
    diff = G[:, fb][:, :, fb] - (f**2)[:, None, None] * G2
    r2 = float(np.max(np.abs(diff))) if diff.size else 0.0
    return r1, r2


def check_warped_connection(imm: Immersion, spec: WarpedSpec, samples) -> tuple[float, list]:
    """Worst ``|tan(D_{d_a} d_alpha) - d_a(sigma) d_alpha| / (|d_a| |d_alpha|)``.

    Coordinate fields of the base and fiber parameters are the lifts of
    fields on the factors, and their covariant derivative is the tangential
    part of the mixed second partial, available exactly from the jets.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    _, jac, hess = imm.jets(pts)
    _, dsig = spec.sigma_grad(imm, pts)
    b = [imm.params.index(p) for p in spec.base_params]
    fb = [imm.params.index(p) for p in spec.fiber_params]
    worst, where = 0.0, pts[0]
    for k in range(len(pts)):
        J = jac[k]
        Q, _ = np.linalg.qr(J)
        for a in b:
            for al in fb:
                mixed = hess[k][:, a, al]
                nab = Q @ (Q.T @ mixed)
                res = np.linalg.norm(nab - dsig[k, a] * J[:, al])
                res /= np.linalg.norm(J[:, a]) * np.linalg.norm(J[:, al])
                if res > worst:
                    worst, where = float(res), pts[k]
    return worst, where.tolist()


def connection_identities(imm: Immersion, split: DistributionSplit, samples, tol: Tolerances = DEFAULT,
                          ctxs=None, identities=CONNECTION_IDENTITIES) -> list[IdentityResult]:
    """Covariant-derivative identities between the three blocks."""
    _require_proper(split)
    ctxs = ctxs if ctxs is not None else contexts(imm, split, samples, tol=tol)
    return [evaluate_identity(idn, ctxs, tol.fd_identity) for idn in identities]


def warped_sff_identities(imm: Immersion, split: DistributionSplit, spec: WarpedSpec, samples,
                          tol: Tolerances = DEFAULT, ctxs=None, include_full=True) -> list[IdentityResult]:
    """Second-fundamental-form identities that hold on warped products."""
    _require_proper(split)
    ctxs = ctxs if ctxs is not None else contexts(imm, split, samples, spec, tol, differentiate=False)
    ids = WARPED_SFF_IDENTITIES + ((INV_SFF_SLANT_FULL,) if include_full else ())
    return [evaluate_identity(idn, ctxs, tol.algebraic) for idn in ids]


def warping_characterization(imm: Immersion, split: DistributionSplit, spec: WarpedSpec, samples,
                             tol: Tolerances = DEFAULT, ctxs=None) -> tuple[list[IdentityResult], dict]:
    """Shape-operator conditions characterising local warped products.

    The hypothesis (no mixed second fundamental form between the slant and
    invariant blocks) is reported alongside; violating it is a warning only.
    """
    _require_proper(split)
    ctxs = ctxs if ctxs is not None else contexts(imm, split, samples, spec, tol, differentiate=False)
    mixed = max(mixed_tg_residual(c.pd.ext, c.pd.split, SLANT, INV) for c in ctxs)
    hyp = {"mixed_slant_invariant": mixed, "mixed_tol": tol.mixed_tol,
           "hypothesis_holds": bool(mixed <= tol.mixed_tol)}
    res = [evaluate_identity(idn, ctxs, tol.algebraic) for idn in CHARACTERIZATION_IDENTITIES]
    if not hyp["hypothesis_holds"]:
        for r in res:
            r.detail += f" [warning: mixed slant/invariant |h| = {mixed:.2e} exceeds {tol.mixed_tol:g}]"
    return res, hyp


def integrability_check(imm: Immersion, split: DistributionSplit, block: str, samples,
                        tol: Tolerances = DEFAULT, ctxs=None) -> tuple[float, list | None]:
    """Worst ``|(P_tan - P_block)[X, Y]|`` over basis pairs of ``block``."""
    b = split.block(block)
    if b is None or b.dim < 2:
        return 0.0, None
    if ctxs is None:
        an = Analyzer(imm, tol)
        data = an.analyze(samples)
        an.check_signature(data, split)
        an.differentiate(data, labels=(block,))
        ctxs = [Context(pd, imm.ambient.signs) for pd in data]
    worst, where = 0.0, None
    for c in ctxs:
        B = c.pd.basis(block)
        P = c.pd.projector(block)
        Pt = c.pd.frame.tangent_projector
        dP = c.pd.dP[block]
        for i in range(B.shape[1]):
            for j in range(i + 1, B.shape[1]):
                X, Y = B[:, i], B[:, j]
                DX = np.einsum("i,ijk->jk", c.coords(X), dP)
                DY = np.einsum("i,ijk->jk", c.coords(Y), dP)
                br = (Pt - P) @ (DX @ Y - DY @ X)
                r = float(np.linalg.norm(br))
                if where is None or r > worst:
                    worst, where = r, c.pd.point.tolist()
    return worst, where


# curvature inequality --------------------------------------------------------------


@dataclass
class InequalityRow:
    point: list
    lhs: float
    rhs: float
    margin: float
    mean_curvature_fiber: float
    umbilicity: float
    equality: dict | None = None

    def to_dict(self):
        return {"point": self.point, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "mean_curvature_fiber": self.mean_curvature_fiber, "umbilicity": self.umbilicity,
                "equality": self.equality}

    @classmethod
    def from_dict(cls, d) -> "InequalityRow":
        return cls(d["point"], d["lhs"], d["rhs"], d["margin"], d["mean_curvature_fiber"], d["umbilicity"],
                   d["equality"])


def _fiber_second_fundamental_form(c: Context):
    """``h_T(X_i, X_j)`` of the invariant leaves inside the submanifold, as ambient vectors."""
    B = c.pd.basis(INV)
    P = c.pd.projector(INV)
    Pt = c.pd.frame.tangent_projector
    dP = c.pd.dP[INV]
    m = B.shape[1]
    out = np.zeros((m, m, B.shape[0]))
    for i in range(m):
        D = np.einsum("i,ijk->jk", c.coords(B[:, i]), dP)
        for j in range(m):
            out[i, j] = (Pt - P) @ (D @ B[:, j])
    return out


def chen_inequality(imm: Immersion, split: DistributionSplit, spec: WarpedSpec | None, samples,
                    tol: Tolerances = DEFAULT, ctxs=None) -> list[InequalityRow]:
    """Squared norm of ``h`` against ``m (|grad_perp sigma|^2 + cot^2(theta) |grad_slant sigma|^2)``.

    When the margin falls below ``eq_tol`` the equality-case consequences are
    evaluated: ``h`` vanishes on the base blocks and between base and
    invariant blocks, and the invariant leaves are not minimal.
    """
    if spec is None:
        raise NotWarpedError("the curvature inequality needs a warping function")
    _require_proper(split)
    ctxs = ctxs if ctxs is not None else contexts(imm, split, samples, spec, tol)
    rows = []
    for c in ctxs:
        pd = c.pd
        m = pd.split.block(INV).dim
        lam = c.lam
        J = pd.frame.jacobian
        grad = J @ np.linalg.solve(pd.frame.g_induced, c.dsigma)
        g_perp = pd.projector(ANTI) @ grad
        g_slant = pd.projector(SLANT) @ grad
        rhs = m * (g_perp @ g_perp + lam / (1.0 - lam) * (g_slant @ g_slant))
        lhs = pd.ext.norm_sq
        margin = lhs - rhs
        hT = _fiber_second_fundamental_form(c)
        HT = np.einsum("iin->n", hT) / m
        umb = hT + np.einsum("ij,n->ijn", np.eye(m), g_perp + g_slant)
        row = InequalityRow([float(v) for v in pd.point], float(lhs), float(rhs), float(margin),
                            float(np.linalg.norm(HT)), float(np.max(np.linalg.norm(umb, axis=-1))))
        if margin < tol.eq_tol:
            base = c.basis("perp") + c.basis("slant")
            fib = c.basis("inv")
            r41 = max((np.linalg.norm(c.h(a, b)) for a in base for b in base), default=0.0)
            r42 = max((np.linalg.norm(c.h(x, a)) for x in fib for a in base), default=0.0)
            thresh = math.sqrt(tol.eq_tol)
            row.equality = {
                "base_geodesic": float(r41),
                "mixed_geodesic": float(r42),
                "tolerance": thresh,
                "fiber_not_minimal": bool(row.mean_curvature_fiber > tol.num_tol),
                "holds": bool(r41 <= thresh and r42 <= thresh and row.mean_curvature_fiber > tol.num_tol),
            }
        rows.append(row)
    return rows

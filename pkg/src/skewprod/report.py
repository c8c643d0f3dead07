"""Run orchestration, the JSON report and its text rendering."""

from __future__ import annotations

import json
import math
import platform
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import Tolerances
from .errors import DomainError, InputError, SkewprodError
from .extrinsic import gauss_weingarten_check, h_symmetry
from .geometry import sample_points
from .manifest import Manifest
from .operators import INV, SPECIAL_CASES, classify, product_residuals
from .pipeline import Analyzer
from .warped import (
    CHARACTERIZATION_IDENTITIES, CONNECTION_IDENTITIES, INV_SFF_SLANT_FULL, WARPED_SFF_IDENTITIES, Context,
    IdentityResult, InequalityRow, check_metric_split, check_partition, check_warped_connection,
    chen_inequality, connection_identities, integrability_check, result, warped_sff_identities,
    warping_characterization,
)

OPERATOR_IDS = ("T2_plus_tN", "omega2_plus_Nt", "NT_plus_omegaN", "Tt_plus_tomega")

IDS_BY_CHECK = {
    "classify": OPERATOR_IDS + ("gauss_weingarten", "h_symmetry"),
    "identities": tuple(i.id for i in CONNECTION_IDENTITIES + WARPED_SFF_IDENTITIES) + (INV_SFF_SLANT_FULL.id,),
    "warped": ("metric_split_base", "metric_split_fiber", "warped_levi_civita")
              + tuple(i.id for i in CHARACTERIZATION_IDENTITIES),
    "integrability": ("integrability_inv",),
    "inequality": ("chen_margin", "equality_base_geodesic", "equality_mixed_geodesic",
                   "equality_fiber_non_minimal"),
}
ALL_IDS = tuple(i for ids in IDS_BY_CHECK.values() for i in ids)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# report -----------------------------------------------------------------------


@dataclass
class Report:
    tool: dict
    manifest: dict
    seed: int
    sampling: dict
    tolerances: dict
    checks: list
    classification: dict | None = None
    identities: list = field(default_factory=list)    # IdentityResult, in ALL_IDS order
    hypotheses: dict = field(default_factory=dict)
    inequality: list = field(default_factory=list)    # InequalityRow
    errors: list = field(default_factory=list)
    passed: bool = False
    timings: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if any(e.get("input", False) for e in self.errors):
            return EXIT_INPUT
        return EXIT_PASS if self.passed else EXIT_FAIL

    def identity(self, id_) -> IdentityResult:
        return next(r for r in self.identities if r.id == id_)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "manifest": self.manifest,
            "seed": self.seed,
            "sampling": self.sampling,
            "tolerances": self.tolerances,
            "checks": self.checks,
            "classification": self.classification,
            "identities": [r.to_dict() for r in self.identities],
            "hypotheses": self.hypotheses,
            "inequality": [r.to_dict() for r in self.inequality],
            "errors": self.errors,
            "passed": self.passed,
            "timings": self.timings,
        }

    @classmethod
    def from_dict(cls, d) -> "Report":
        return cls(d["tool"], d["manifest"], d["seed"], d["sampling"], d["tolerances"], d["checks"],
                   d["classification"], [IdentityResult.from_dict(r) for r in d["identities"]],
                   d["hypotheses"], [InequalityRow.from_dict(r) for r in d["inequality"]], d["errors"],
                   d["passed"], d["timings"])


# JSON with fixed formatting --------------------------------------------------------


def _number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _emit(obj, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{_emit(str(k), indent, 0)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in seq):
            return "[" + ", ".join(_emit(v, indent, 0) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _emit(v, indent, level + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with insertion-ordered keys and floats at 17 significant digits."""
    if isinstance(obj, Report):
        obj = obj.to_dict()
    return _emit(obj, indent, 0) + "\n"


# orchestration ----------------------------------------------------------------------


def _versions() -> dict:
    return {"name": "skewprod", "version": __version__, "python": platform.python_version(),
            "numpy": np.__version__}


def _error(exc: BaseException, stage: str) -> dict:
    d = exc.to_dict() if isinstance(exc, SkewprodError) else {"kind": type(exc).__name__, "message": str(exc)}
    d["stage"] = stage
    d["input"] = isinstance(exc, (InputError, DomainError))
    return d


def _skipped(id_, why) -> IdentityResult:
    return IdentityResult(id_, 0.0, None, 0.0, "skipped", why)


def _classification(split) -> dict:
    blocks = []
    for b in split.blocks:
        blocks.append({"label": b.label, "dim": b.dim, "lambda": b.lam, "cos_theta": b.cos_theta,
                       "theta_rad": b.theta, "theta_deg": math.degrees(b.theta), "spread": b.spread})
    return {
        "dims": list(split.dims),
        "order": split.order_k,
        "proper": split.proper_flag,
        "skew_semi_invariant_order1": split.skew_semi_invariant_order1,
        "proper_order1": split.proper_order1,
        "special_cases": [{"case": c, "name": SPECIAL_CASES[c]} for c in split.special_cases],
        "blocks": blocks,
        "reference_point": [float(v) for v in split.point],
        "n_points": split.n_points,
    }


def _max_at(values, points):
    k = int(np.argmax(values))
    return float(values[k]), points[k]


def run(manifest: Manifest, samples: int | None = None, seed: int | None = None, tol_factor: float = 1.0,
        checks=None) -> Report:
    """Sample the immersion, run the requested checks and collect everything in a report."""
    imm, spec = manifest.immersion, manifest.warped
    tol: Tolerances = manifest.tolerances.scaled(tol_factor) if tol_factor != 1.0 else manifest.tolerances
    seed = manifest.sampling.seed if seed is None else int(seed)
    n_random = manifest.sampling.random if samples is None else int(samples)
    checks = list(manifest.checks if checks is None else checks)
    if "classify" not in checks:
        checks.insert(0, "classify")
    rep = Report(_versions(),
                 {"name": manifest.name, "params": list(imm.params), "components": imm.sources(),
                  "domain": [list(b) for b in imm.domain], "signs": list(imm.ambient.signs),
                  "warped": None if spec is None else {"base_params": list(spec.base_params),
                                                        "fiber_params": list(spec.fiber_params),
                                                        "warp": spec.warp_source}},
                 seed, {}, {**tol.to_dict(), "tol_factor": float(tol_factor)}, checks)
    found: dict[str, IdentityResult] = {}
    clock = time.perf_counter

    def finish():
        for c, ids in IDS_BY_CHECK.items():
            for i in ids:
                if i not in found:
                    found[i] = _skipped(i, "not requested" if c not in checks else "not evaluated")
        rep.identities = [found[i] for i in ALL_IDS]
        rep.passed = not rep.errors and all(r.passed for r in rep.identities)
        return rep

    t0 = clock()
    try:
        pts = sample_points(imm, manifest.sampling.grid, n_random, seed)
        rep.sampling = {"grid": manifest.sampling.grid if isinstance(manifest.sampling.grid, int)
                        else list(manifest.sampling.grid), "random": n_random, "points": len(pts)}
        an = Analyzer(imm, tol)
        data = an.analyze(pts)
    except SkewprodError as exc:
        rep.errors.append(_error(exc, "sampling"))
        return finish()
    rep.timings["analyze"] = clock() - t0

    # operator relations and the second fundamental form hold for any immersion
    t0 = clock()
    prod = [product_residuals(pd.ops) for pd in data]
    for key in OPERATOR_IDS:
        r, p = _max_at(np.array([d[key] for d in prod]), pts)
        found[key] = result(key, r, p, tol.operator_identity)
    r, p = _max_at(np.array([gauss_weingarten_check(pd.ext) for pd in data]), pts)
    found["gauss_weingarten"] = result("gauss_weingarten", r, p, tol.algebraic)
    r, p = _max_at(np.array([h_symmetry(pd.ext) for pd in data]), pts)
    found["h_symmetry"] = result("h_symmetry", r, p, tol.algebraic)
    try:
        split = classify([pd.spectrum for pd in data], tol.cluster_tol, tol.constancy_tol)
    except SkewprodError as exc:
        rep.errors.append(_error(exc, "classify"))
        return finish()
    rep.classification = _classification(split)
    rep.timings["classify"] = clock() - t0

    wants = set(checks)
    need_proper = wants & {"identities", "warped", "inequality"}
    if need_proper and not split.proper_order1:
        rep.errors.append({"kind": "not-proper", "stage": "classify", "input": False,
                           "message": f"checks {sorted(need_proper)} need a proper order-1 splitting, "
                                      f"got dims {split.dims} with {split.order_k} slant blocks"})
        need_proper = set()

    t0 = clock()
    ctxs = None
    try:
        labels = ()
        if need_proper & {"identities", "inequality"}:
            labels = tuple(b.label for b in split.blocks)
        elif "integrability" in wants and split.dim(INV) >= 2:
            labels = (INV,)
        if labels:
            an.check_signature(data, split)
            an.differentiate(data, labels)
        if need_proper or labels:
            dsig = None
            if spec is not None:
                _, dsig = spec.sigma_grad(imm, pts)
            ctxs = [Context(pd, imm.ambient.signs, None if dsig is None else dsig[k]) for k, pd in enumerate(data)]
    except SkewprodError as exc:
        rep.errors.append(_error(exc, "differentiate"))
        return finish()
    rep.timings["differentiate"] = clock() - t0

    def stage(name, fn):
        t = clock()
        try:
            fn()
        except SkewprodError as exc:
            rep.errors.append(_error(exc, name))
        rep.timings[name] = clock() - t

    def do_identities():
        for r in connection_identities(imm, split, pts, tol, ctxs=ctxs):
            found[r.id] = r
        if spec is None:
            for idn in WARPED_SFF_IDENTITIES + (INV_SFF_SLANT_FULL,):
                found[idn.id] = _skipped(idn.id, "needs a warping function")
        else:
            for r in warped_sff_identities(imm, split, spec, pts, tol, ctxs=ctxs):
                found[r.id] = r

    def do_warped():
        check_partition(imm, spec, split, data)
        r1, r2 = check_metric_split(imm, spec, pts, data=data)
        found["metric_split_base"] = result("metric_split_base", r1, None, tol.metric_split,
                                            "base block independent of fiber parameters")
        found["metric_split_fiber"] = result("metric_split_fiber", r2, None, tol.metric_split,
                                             "fiber block equals f^2 times a fixed metric")
        r, p = check_warped_connection(imm, spec, pts)
        found["warped_levi_civita"] = result("warped_levi_civita", r, p, tol.warped_connection,
                                             "nabla_U V = U(ln f) V for base U, fiber V")
        res, hyp = warping_characterization(imm, split, spec, pts, tol, ctxs=ctxs)
        for r in res:
            found[r.id] = r
        rep.hypotheses["warping_characterization"] = hyp

    def do_integrability():
        if split.dim(INV) < 2 or split.block(INV) is None:
            found["integrability_inv"] = IdentityResult("integrability_inv", 0.0, None, tol.integrability,
                                                        "not-triggered", "invariant block has dimension < 2")
            return
        r, p = integrability_check(imm, split, INV, pts, tol, ctxs=ctxs)
        found["integrability_inv"] = result("integrability_inv", r, p, tol.integrability,
                                            "bracket of invariant fields stays invariant")

    def do_inequality():
        rows = chen_inequality(imm, split, spec, pts, tol, ctxs=ctxs)
        rep.inequality = rows
        margins = np.array([row.margin for row in rows])
        k = int(np.argmin(margins))
        found["chen_margin"] = result("chen_margin", max(0.0, -float(margins[k])), rows[k].point, tol.num_tol,
                                      f"min margin {margins[k]:.6g}")
        eq = [row for row in rows if row.equality is not None]
        if not eq:
            for i in IDS_BY_CHECK["inequality"][1:]:
                found[i] = IdentityResult(i, 0.0, None, math.sqrt(tol.eq_tol), "not-triggered",
                                          f"margin >= {tol.eq_tol:g} at every sample")
            return
        for i, key in (("equality_base_geodesic", "base_geodesic"), ("equality_mixed_geodesic", "mixed_geodesic")):
            worst = max(eq, key=lambda row: row.equality[key])
            found[i] = result(i, worst.equality[key], worst.point, worst.equality["tolerance"])
        weakest = min(eq, key=lambda row: row.mean_curvature_fiber)
        ok = weakest.mean_curvature_fiber > tol.num_tol
        found["equality_fiber_non_minimal"] = IdentityResult(
            "equality_fiber_non_minimal", weakest.mean_curvature_fiber, weakest.point, tol.num_tol,
            "pass" if ok else "fail", "mean curvature of the invariant leaves must exceed the tolerance")

    if "identities" in need_proper:
        stage("identities", do_identities)
    if "warped" in need_proper:
        stage("warped", do_warped)
    if "integrability" in wants:
        stage("integrability", do_integrability)
    if "inequality" in need_proper:
        stage("inequality", do_inequality)
    return finish()


# text rendering ------------------------------------------------------------------------


def render(rep: Report) -> str:
    out = [f"skewprod {rep.tool.get('version', '?')}  manifest: {rep.manifest.get('name')}  "
           f"seed: {rep.seed}  points: {rep.sampling.get('points', 0)}"]
    c = rep.classification
    if c:
        out.append("")
        out.append(f"dims (anti-invariant, slant, invariant) = {tuple(c['dims'])}  order {c['order']}  "
                   f"proper {c['proper']}")
        for b in c["blocks"]:
            extra = f"  theta = {b['theta_deg']:.6f} deg  cos = {b['cos_theta']:.9f}" if b["label"] == "slant" else ""
            out.append(f"  {b['label']:<15} dim {b['dim']}  lambda = {b['lambda']:.12g}{extra}")
        if c["special_cases"]:
            out.append("  special cases: " + ", ".join(f"({s['case']}) {s['name']}" for s in c["special_cases"]))
    out.append("")
    out.append(f"{'identity':<28} {'residual':>12} {'tolerance':>10}  status")
    for r in rep.identities:
        res = "-" if r.status in ("skipped", "not-triggered") else f"{r.residual:.3e}"
        tol = "-" if r.status == "skipped" else f"{r.tolerance:.0e}"
        out.append(f"{r.id:<28} {res:>12} {tol:>10}  {r.status}")
    if rep.inequality:
        worst = min(rep.inequality, key=lambda row: row.margin)
        out.append("")
        out.append(f"curvature inequality: min margin {worst.margin:.6g} at {[round(v, 6) for v in worst.point]} "
                   f"(lhs {worst.lhs:.6g}, rhs {worst.rhs:.6g})")
    for e in rep.errors:
        out.append(f"error [{e.get('stage')}] {e.get('kind')}: {e.get('message')}")
    out.append("")
    out.append("PASS" if rep.passed else "FAIL")
    return "\n".join(out) + "\n"

"""Seeded generators and named fixtures for tests and experiments.

Random expressions are built so they can be evaluated anywhere in
``[-1, 1]^d``: logarithms and square roots only see arguments bounded away
from zero, divisions go through ``2 + cos(.)`` and ``tan`` only sees
``0.3 * sin(.)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .expr import parse_expression, to_source
from .geometry import Immersion



# random expressions ---------------------------------------------------------


def _const(rng) -> str:
    c = round(float(rng.uniform(-2, 2)), 3)
    return f"({c})" if c < 0 else repr(c)


def random_expression(rng: np.random.Generator, params, depth: int = 3, top: bool = True) -> str:
    """Source text of a random expression over ``params``; the root is never a bare leaf."""
    if depth <= 0 or (not top and rng.random() < 0.2):
        return str(rng.choice(params)) if rng.random() < 0.75 else _const(rng)
    a = random_expression(rng, params, depth - 1, False)
    kind = int(rng.integers(0, 12))
    if kind <= 2:
        b = random_expression(rng, params, depth - 1, False)
        return f"({a}) {'+-*'[kind]} ({b})"
    if kind == 3:
        b = random_expression(rng, params, depth - 1, False)
        return f"({a}) / (2 + cos({b}))"
    if kind == 4:
        return f"sin({a})"
    if kind == 5:
        return f"cos({a})"
    if kind == 6:
        return f"exp(0.5 * sin({a}))"
    if kind == 7:
        return f"log(1 + ({a})^2)"
    if kind == 8:
        return f"sqrt(2 + sin({a}))"
    if kind == 9:
        return f"tan(0.3 * sin({a}))"
    if kind == 10:
        return f"({a})^{int(rng.integers(0, 4))}"
    return f"(2 + cos({a}))^-{int(rng.integers(1, 3))}"


def random_expressions(count: int, seed: int = 0, params=("x", "y", "z"), depth: int = 4) -> list[str]:
    rng = np.random.default_rng(seed)
    return [random_expression(rng, list(params), depth) for _ in range(count)]


# random immersions ------------------------------------------------------------


def _linear_combo(coeffs, terms) -> str:
    parts = [f"({c:.6f})*({t})" for c, t in zip(coeffs, terms) if abs(c) > 1e-12]
    return " + ".join(parts) if parts else "0"


def random_immersion(rng: np.random.Generator, d: int | None = None, n: int | None = None,
                     name: str = "random") -> Immersion:
    """A graph over the parameter box, rotated by a random orthogonal matrix.

    The graph form guarantees full rank; the rotation puts the tangent spaces
    in general position with respect to the product structure.
    """
    d = int(rng.integers(2, 4)) if d is None else d
    n = int(rng.integers(d + 1, d + 4)) if n is None else n
    params = ["x", "y", "z", "w"][:d]
    terms = list(params) + [f"0.5 * ({random_expression(rng, params, 2)})" for _ in range(n - d)]
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    components = [_linear_combo(Q[i], terms) for i in range(n)]
    signs = [1] * n
    while len(set(signs)) < 2:
        signs = [int(s) for s in rng.choice([-1, 1], size=n)]
    return Immersion.from_strings(params, components, [(-1.0, 1.0)] * d, signs, name)


def random_immersions(count: int, seed: int = 0) -> list[Immersion]:
    rng = np.random.default_rng(seed)
    return [random_immersion(rng, name=f"random-{i}") for i in range(count)]


# named fixtures -----------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    immersion: Immersion
    base: tuple[str, ...] = ()
    fiber: tuple[str, ...] = ()
    warp: str | None = None

    def manifest_dict(self, grid=2, random=4, seed=0, checks=None) -> dict:
        imm = self.immersion
        doc = {"name": imm.name,
               "ambient": {"n": imm.ambient.n, "signs": list(imm.ambient.signs)},
               "immersion": {"params": list(imm.params), "components": imm.sources(),
                             "domain": [list(b) for b in imm.domain]},
               "sampling": {"grid": grid, "random": random, "seed": seed}}
        if self.warp is not None:
            doc["warped"] = {"base_params": list(self.base), "fiber_params": list(self.fiber), "warp": self.warp}
        if checks is not None:
            doc["checks"] = list(checks)
        return doc


def load_manifest_data(name: str = "example43.json") -> dict:
    return json.loads(resources.files("skewprod").joinpath("data", name).read_text())


def example43() -> Fixture:
    """The bundled reference immersion into ``R^10`` with its warped structure."""
    m = load_manifest_data()
    imm = Immersion.from_strings(m["immersion"]["params"], m["immersion"]["components"],
                                 m["immersion"]["domain"], m["ambient"]["signs"], "example43")
    w = m["warped"]
    return Fixture(imm, tuple(w["base_params"]), tuple(w["fiber_params"]), w["warp"])


def _fiber_family(rho_u: str, rho_v: str, z_plus="z", z_minus="-z", name="family",
                  domain=((0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (0.0, 6.0), (0.0, 6.0))) -> Immersion:
    components = ["x+y", "x-y", f"({rho_u})*cos(u)", f"({rho_u})*sin(u)", z_plus,
                  z_minus, "x", "2/sqrt(3)*y", f"({rho_v})*cos(v)", f"({rho_v})*sin(v)"]
    return Immersion.from_strings(["x", "y", "z", "u", "v"], components, domain, [1] * 5 + [-1] * 5, name)


def warped_curved() -> Fixture:
    """Warped product whose warping function depends on both base directions.

    ``rho = sqrt(x^2 - z^2)`` has ``rho_x^2 - rho_z^2 = 1``, which keeps the
    slant eigenvalue at 1/25 while the base metric is no longer flat.
    """
    rho = "sqrt(x^2 - z^2)"
    imm = _fiber_family(rho, rho, name="warped-curved",
                        domain=((1.0, 2.0), (-1.0, 1.0), (-0.5, 0.5), (0.0, 6.0), (0.0, 6.0)))
    return Fixture(imm, ("x", "y", "z"), ("u", "v"), rho)


def wrong_warp() -> Fixture:
    """The reference immersion paired with the warping function ``x^2``."""
    fx = example43()
    return Fixture(fx.immersion, fx.base, fx.fiber, "x^2")


def perturbed_fiber() -> Fixture:
    """Fiber metric ``x^2 du^2 + (x+1)^2 dv^2``: not conformal to a fixed metric."""
    imm = _fiber_family("x", "x + 1", name="perturbed-fiber")
    return Fixture(imm, ("x", "y", "z"), ("u", "v"), "x")


def trivial_product() -> Fixture:
    """A Riemannian product (``f = 1``) with slant eigenvalue 1/9."""
    components = ["x+y", "x-y", "cos(u)", "sin(u)", "z", "-z", "x", "y", "cos(v)", "sin(v)"]
    imm = Immersion.from_strings(["x", "y", "z", "u", "v"], components,
                                 [(0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (0.0, 6.0), (0.0, 6.0)],
                                 [1] * 5 + [-1] * 5, "trivial-product")
    return Fixture(imm, ("x", "y", "z"), ("u", "v"), "1")


def sphere(r: float = 2.0) -> Immersion:
    comps = [f"{r}*sin(s)*cos(t)", f"{r}*sin(s)*sin(t)", f"{r}*cos(s)"]
    return Immersion.from_strings(["s", "t"], comps, [(0.4, 2.7), (0.0, 6.0)], [1, 1, -1], f"sphere-{r}")


def contact(bend: str = "(x - y)^2/2") -> Immersion:
    """Hypersurface ``p1 - p3 = k(p2 - p4)`` in ``R^4`` with ``k`` given by ``bend``.

    Its unit normal has equal length on both eigenspaces of ``F``, so the
    spectrum is ``{0, 1, 1}`` everywhere. The invariant plane field is spanned by
    ``k' d1 + d2`` and ``k' d3 + d4``; their bracket is ``k'' (d1 + d3)``, which
    leaves the plane unless ``k`` is affine.
    """
    return Immersion.from_strings(["x", "y", "z"], [f"z + {bend}", "x", "z", "y"],
                                  [(-0.5, 0.5)] * 3, [1, 1, -1, -1], "contact")


def anti_invariant_surface() -> Immersion:
    """Every tangent vector is sent into the normal space."""
    return Immersion.from_strings(["x", "y"], ["x", "sin(y)", "x", "sin(y)"],
                                  [(-1.0, 1.0), (-1.0, 1.0)], [1, 1, -1, -1], "anti-invariant")


def negative_eigenspace_surface() -> Immersion:
    """A surface inside the ``-1`` eigenspace of the product structure (invariant)."""
    return Immersion.from_strings(["x", "y"], ["0", "x", "y + x^2"], [(-1.0, 1.0)] * 2, [1, -1, -1],
                                  "negative-eigenspace")


def varying_slant_graph() -> Immersion:
    """Graph ``(x, y, x^2/2)`` with slant eigenvalue ``((1-x^2)/(1+x^2))^2`` along ``d_x``."""
    return Immersion.from_strings(["x", "y"], ["x", "y", "x^2/2"], [(0.1, 0.9), (-1.0, 1.0)],
                                  [1, 1, -1], "varying-slant")


def separated_product() -> Immersion:
    """``(psi1(u), psi2(v))`` with each factor a curve in its own pair of coordinates."""
    return Immersion.from_strings(["u", "v"], ["cos(u)", "sin(u)", "v", "v^2"],
                                  [(0.0, 3.0), (-1.0, 1.0)], [1, 1, -1, -1], "separated")


def scaled(imm: Immersion, c: float) -> Immersion:
    comps = [f"{c!r}*({s})" for s in imm.sources()]
    return Immersion.from_strings(imm.params, comps, imm.domain, imm.ambient.signs, f"{imm.name}-x{c}")


def permuted(imm: Immersion, order) -> Immersion:
    """Same surface with the parameters listed in ``order`` (a permutation of indices)."""
    params = [imm.params[i] for i in order]
    domain = [imm.domain[i] for i in order]
    return Immersion.from_strings(params, imm.sources(), domain, imm.ambient.signs, imm.name)


def affine_reparam(imm: Immersion, scale, shift) -> Immersion:
    """Substitute ``p -> scale * p + shift`` in every component and map the box accordingly."""
    new = [f"q{i}" for i in range(imm.d)]
    subs = {p: f"(({scale[i]!r})*{new[i]} + ({shift[i]!r}))" for i, p in enumerate(imm.params)}
    ident = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
    comps = [to_source(parse_expression(ident.sub(lambda m: subs.get(m.group(0), m.group(0)), src), new))
             for src in imm.sources()]
    domain = []
    for i, (lo, hi) in enumerate(imm.domain):
        a, b = (lo - shift[i]) / scale[i], (hi - shift[i]) / scale[i]
        domain.append((min(a, b), max(a, b)))
    return Immersion.from_strings(new, comps, domain, imm.ambient.signs, imm.name)


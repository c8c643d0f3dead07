import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, database=None)
settings.load_profile("repro")

sys.path.insert(0, str(Path(__file__).parent))

from skewprod import corpus  # noqa: E402
from skewprod.geometry import sample_points  # noqa: E402
from skewprod.operators import classify  # noqa: E402
from skewprod.pipeline import Analyzer  # noqa: E402
from skewprod.warped import WarpedSpec, contexts  # noqa: E402

MANIFEST = Path(__file__).resolve().parents[1] / "src" / "skewprod" / "data" / "example43.json"


class Setup:
    """Everything the warped checks need for one fixture, computed once."""

    def __init__(self, fx, grid=3, random=16, seed=0, constancy_tol=1e-6):
        self.fixture = fx
        self.imm = fx.immersion
        self.points = sample_points(self.imm, grid=grid, random=random, seed=seed)
        self.analyzer = Analyzer(self.imm)
        self.data = self.analyzer.analyze(self.points)
        self.split = classify([pd.spectrum for pd in self.data], constancy_tol=constancy_tol)
        self.spec = (WarpedSpec.from_strings(self.imm, fx.base, fx.fiber, fx.warp)
                     if fx.warp is not None else None)
        self._ctxs = None

    @property
    def ctxs(self):
        if self._ctxs is None:
            self._ctxs = contexts(self.imm, self.split, self.points, self.spec, data=self.data,
                                  analyzer=self.analyzer)
        return self._ctxs


@pytest.fixture(scope="session")
def manifest_path():
    return MANIFEST


@pytest.fixture(scope="session")
def ex43():
    return Setup(corpus.example43())


@pytest.fixture(scope="session")
def curved():
    return Setup(corpus.warped_curved(), grid=2, random=8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


_VERDICTS: dict[int, str] = {}


def record_verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    _VERDICTS[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[n])

"""Numerical tolerances shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # structural decisions (never scaled by --tol)
    rank_tol: float = 1e-9
    cluster_tol: float = 1e-8
    constancy_tol: float = 1e-6
    fd_step_rel: float = 1e-5
    eq_tol: float = 1e-6
    mixed_tol: float = 1e-8
    # pass/fail thresholds for checks
    algebraic: float = 1e-9      # identities built from exact packs only
    operator_identity: float = 1e-10
    fd_identity: float = 1e-4    # identities with differentiated frame fields
    warped_connection: float = 1e-5
    metric_split: float = 1e-10
    integrability: float = 1e-5
    num_tol: float = 1e-9        # allowed negative margin in the curvature inequality

    CHECK_FIELDS = ("algebraic", "operator_identity", "fd_identity", "warped_connection",
                    "metric_split", "integrability", "num_tol")

    def scaled(self, factor: float) -> "Tolerances":
        """Multiply every pass/fail threshold by ``factor``."""
        return replace(self, **{k: getattr(self, k) * factor for k in self.CHECK_FIELDS})

    def updated(self, overrides: dict) -> "Tolerances":
        names = {f.name for f in fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise KeyError(f"unknown tolerance {sorted(unknown)[0]!r}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()

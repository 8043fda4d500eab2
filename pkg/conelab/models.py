"""
Pydantic models for suite configuration, reports and experiment rows.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from conelab.algebras import make_algebra


class SuiteName(str, Enum):
    """CLI subcommands."""
    IDENTITIES = "identities"
    GEOMETRY = "geometry"
    MINIMALITY = "minimality"
    LIFT = "lift"
    EXPLORE = "explore"


# ============= Tolerance registry =============

DEFAULT_TOLERANCES: Dict[str, float] = {
    # jordan-core
    "commutativity": 1e-12,
    "jordan_identity": 1e-10,
    "unit": 1e-13,
    "idempotent_system": 1e-8,
    "spectral_reconstruction": 1e-8,
    "gauge_invariance": 1e-12,
    "gauge_triangle": 1e-10,
    "jb_norm_axioms": 1e-10,
    "invertibility": 1e-9,
    "fundamental_formula": 1e-9,
    # operator-space
    "v_identities": 1e-9,
    "cartan_relations": 1e-9,
    "str_membership": 1e-9,
    "velocity_identity": 1e-7,
    "dagger_brackets": 1e-9,
    "aut_spectrum": 1e-8,
    "orthogonality": 1e-9,
    # cone-geometry
    "geodesic_ode": 1e-6,
    "exp_log": 1e-8,
    "transport_ode": 1e-7,
    "transport_isometry": 1e-8,
    "curvature_routes": 1e-10,
    "flat_curvature": 1e-10,
    "thompson_symmetry": 1e-9,
    "thompson_invariance": 1e-8,
    "triangle_inequality": 1e-12,
    "symmetric_space": 1e-8,
    "killing_flow": 1e-8,
    "finsler_invariance": 1e-8,
    "curvature_transport": 1e-8,
    "geodesic_convexity": 1e-8,
    # group-geometry
    "group_spray_routes": 1e-10,
    "group_geodesic_ode": 1e-6,
    "group_transport": 1e-7,
    "totally_geodesic": 1e-7,
    "transport_rk4_order": 0.5,
    "metric_positivity": 1e-12,
    "metric_compatibility": 2e-6,
    # minimality
    "geodesic_minimality": 1e-7,
    "group_minimality": 1e-6,
    # lifts
    "lift_horizontality": 1e-6,
    "lift_automorphism": 1e-6,
    "lift_projection": 1e-7,
    "lift_isometry": 1e-5,
    "geodesic_lift": 1e-6,
    "quotient_sandwich": 1e-5,
    "quotient_norm": 1e-6,
}


class SuiteConfig(BaseModel):
    """Validated CLI configuration for one suite run."""

    model_config = ConfigDict(frozen=True)

    suite: SuiteName
    algebra: str = "sym:2"
    trials: int = Field(default=100, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    out: Optional[str] = None
    data: Optional[str] = None
    scale: float = Field(default=1.0, ge=0.0)

    @field_validator("algebra")
    @classmethod
    def _known_algebra(cls, value: str) -> str:
        make_algebra(value)
        return value

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = sorted(set(value) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise ValueError(f"Unknown tolerance name(s): {', '.join(unknown)}")
        for name, tol in value.items():
            if not (math.isfinite(tol) and tol >= 0.0):
                raise ValueError(f"Tolerance {name} must be finite and non-negative, got {tol}")
        return value

    def tolerance(self, name: str) -> float:
        """Override if given, else the registry default."""
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])


# ============= Reports =============

class CheckRecord(BaseModel):
    """One property check aggregated over its trials."""
    name: str
    trials: int = 0
    max_residual: float = 0.0
    threshold: float
    passed: bool = True


class SuiteReport(BaseModel):
    """All checks of a suite run plus the echoed configuration."""
    suite: SuiteName
    config: SuiteConfig
    records: List[CheckRecord] = Field(default_factory=list)
    wall_time: float = Field(default=0.0, exclude=True)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def record(self, name: str, residuals: List[float]) -> CheckRecord:
        """Aggregate residuals into a CheckRecord; NaN residuals fail."""
        threshold = self.config.tolerance(name)
        worst = max(residuals) if residuals else 0.0
        if any(math.isnan(r) for r in residuals):
            worst = float("nan")
        entry = CheckRecord(
            name=name,
            trials=len(residuals),
            max_residual=worst,
            threshold=threshold,
            passed=not math.isnan(worst) and worst <= threshold,
        )
        self.records.append(entry)
        return entry


# ============= Experiment rows =============

class MarginRow(BaseModel):
    """Minimality margin: competitor length minus geodesic length."""
    trial: int
    norm: str
    length_geodesic: float
    length_competitor: float
    margin: float


class LiftRow(BaseModel):
    """Residuals of one lift at one grid time."""
    trial: int
    t: float
    horizontality_residual: float
    automorphism_residual: float
    speed_estimate: float


class ExploreRow(BaseModel):
    """Length of one G(Omega) competitor joining 1 and e^D."""
    competitor: int
    length: float
    margin: float


class ErrorResponse(BaseModel):
    """Error document printed on stderr for configuration errors."""
    status: str = "error"
    error: str
    message: str
    details: Optional[Any] = None

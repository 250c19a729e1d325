# src/experiments/config.py
"""
Experiment configuration.

Config files are flat text, one ``section.key = value`` per line, ``#``
starting a comment. Values are read as JSON literals when they parse
(numbers, lists, true/false) and as bare strings otherwise. The nested
mapping is validated by the pydantic models below; see docs/CONFIG.md.

Precedence for the output directory: config key > --out flag >
ACCRETIVE_OUT_DIR > "reports". The seed follows config > --seed > 0.
"""

import json
import math
import os
import pathlib
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

OUT_DIR_ENV = "ACCRETIVE_OUT_DIR"
DEFAULT_OUT_DIR = "reports"

ScenarioTag = Literal[
    "semigroup_convergence",
    "euler_vs_duhamel",
    "duhamel_residual",
    "picard_lipschitz",
    "picard_ebm",
    "uniqueness_gap",
    "majorant_table",
    "criterion_matrix",
]


class ConfigError(Exception):
    """The config text does not parse or does not validate; ``errors`` lists every problem."""

    def __init__(self, errors: List[str]) -> None:
        super().__init__("invalid config:\n  " + "\n  ".join(errors))
        self.errors = errors


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class OperatorSection(_Section):
    kind: Literal["zero", "linear_scalar", "linear_matrix", "abs", "plaplace"] = Field(
        "linear_scalar", description="Operator variant")
    a: float = Field(1.0, ge=0, description="Coefficient of linear_scalar")
    matrix: Optional[List[List[float]]] = Field(None, description="Rows of M for linear_matrix")
    p: float = Field(3.0, gt=1, description="Exponent of the p-Laplacian")
    dim: int = Field(16, ge=2, description="Spatial nodes of the p-Laplacian")


class PerturbationSection(_Section):
    kind: Literal["none", "affine", "coalbedo", "time_modulated"] = Field("none", description="Right-hand side F")
    coefficient: float = Field(0.0, description="a in F(t, u) = a*u + b, or in F(t, u) = phi(t)*a*u")
    offset: List[float] = Field(default_factory=lambda: [0.0], description="b in F(t, u) = a*u + b")
    phi: List[float] = Field(default_factory=lambda: [1.0],
                             description="Values of phi on equal pieces of [0, T] for time_modulated")

    @field_validator("phi")
    @classmethod
    def _nonnegative_phi(cls, value: List[float]) -> List[float]:
        if not value or any(not v >= 0 for v in value):
            raise ValueError("phi needs nonnegative entries")
        return value


class ProblemSection(_Section):
    u0: List[float] = Field(default_factory=lambda: [0.0], description="Initial state")
    forcing: List[float] = Field(default_factory=lambda: [1.0], description="Constant forcing f")


class GridSection(_Section):
    T: float = Field(1.0, gt=0, description="Horizon")
    n: int = Field(100, ge=1, description="Time steps")
    substeps: int = Field(400, ge=1, description="Riemann cells or resolvent substeps")
    n_list: List[int] = Field(default_factory=lambda: [50, 100, 200], description="Step counts for order studies")


class ToleranceSection(_Section):
    pass_tol: float = Field(1e-3, gt=0, description="Acceptance tolerance of comparison rows")
    solver: float = Field(1e-10, gt=0, description="Resolvent residual tolerance")
    picard: float = Field(1e-8, gt=0, description="Picard stopping tolerance")
    closed_form: float = Field(5e-3, gt=0, description="Absolute tolerance against closed-form solutions")


class SemigroupSection(_Section):
    t: float = Field(1.0, ge=0, description="Evaluation time")
    x: List[float] = Field(default_factory=lambda: [1.0], description="Initial state")
    n_list: List[int] = Field(default_factory=lambda: [16, 64, 256, 1024, 4096], description="Resolvent counts")
    tolerance: float = Field(1e-4, gt=0, description="Adaptive doubling tolerance")


class PicardSection(_Section):
    max_iter: int = Field(60, ge=1, description="Update budget")
    gamma: float = Field(2.0, gt=0, description="Bielecki weight")
    p: float = Field(2.0, gt=1, description="Integrability exponent of phi for the Bielecki factor")
    scheme: Literal["duhamel", "euler"] = Field("duhamel", description="Sweep scheme")


class OutputSection(_Section):
    dir: Optional[str] = Field(None, description="Report directory (overrides --out and the environment)")


class EBMScenario(_Section):
    """Energy balance model: weighted p-Laplacian plus S0 * beta(u)."""
    d: int = Field(64, ge=2, description="Spatial nodes")
    p: float = Field(3.0, gt=1, description="p-Laplacian exponent")
    S0: float = Field(1.0, ge=0, description="Insolation constant")
    beta_ice: float = Field(0.3, gt=0, description="Co-albedo on ice")
    beta_water: float = Field(0.8, gt=0, description="Co-albedo on water")
    delta: float = Field(0.1, gt=0, description="Ramp width, below e^-1")
    T: float = Field(1.0, gt=0, description="Horizon")
    n: int = Field(200, ge=1, description="Time steps")
    profile: Literal["bump", "affine"] = Field("bump", description="Initial profile family")
    amplitude: float = Field(0.2, description="Profile amplitude")
    offset: float = Field(-0.05, description="Profile offset")
    tol: float = Field(1e-8, gt=0, description="Picard tolerance")
    max_iter: int = Field(60, ge=1, description="Picard update budget")
    scheme: Literal["duhamel", "euler"] = Field("euler", description="Picard sweep scheme")
    direction: int = Field(0, ge=0, description="Coordinate perturbed in the uniqueness experiment")

    @field_validator("delta")
    @classmethod
    def _delta_below_inv_e(cls, value: float) -> float:
        if not value < math.exp(-1.0):
            raise ValueError("delta must lie in (0, e^-1)")
        return value

    @model_validator(mode="after")
    def _ordered_coalbedo(self) -> "EBMScenario":
        if not self.beta_water > self.beta_ice:
            raise ValueError("beta_water must exceed beta_ice")
        if self.direction >= self.d:
            raise ValueError("direction must index a spatial node")
        return self


class ExperimentConfig(_Section):
    scenario: ScenarioTag = Field(..., description="Scenario tag")
    seed: Optional[int] = Field(None, description="Random seed (overrides --seed)")
    operator: OperatorSection = Field(default_factory=OperatorSection)
    perturbation: PerturbationSection = Field(default_factory=PerturbationSection)
    problem: ProblemSection = Field(default_factory=ProblemSection)
    grid: GridSection = Field(default_factory=GridSection)
    tolerances: ToleranceSection = Field(default_factory=ToleranceSection)
    semigroup: SemigroupSection = Field(default_factory=SemigroupSection)
    picard: PicardSection = Field(default_factory=PicardSection)
    output: OutputSection = Field(default_factory=OutputSection)
    ebm: EBMScenario = Field(default_factory=EBMScenario)
    eps_list: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4], description="Initial-data gaps")

    @field_validator("eps_list")
    @classmethod
    def _positive_eps(cls, value: List[float]) -> List[float]:
        if not value or any(eps <= 0 for eps in value):
            raise ValueError("eps_list needs positive entries")
        return value


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_flat_config(text: str) -> Dict[str, Any]:
    """
    Parse ``section.key = value`` lines into a nested mapping.

    Raises:
        ConfigError: a line without '=' or a key assigned twice
    """
    tree: Dict[str, Any] = {}
    problems = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            problems.append(f"line {number}: expected 'key = value', got {content!r}")
            continue
        key, raw = (part.strip() for part in content.split("=", 1))
        parts = key.split(".")
        node = tree
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                problems.append(f"line {number}: {key} nests under a scalar")
                break
        else:
            if parts[-1] in node:
                problems.append(f"line {number}: duplicate key {key}")
            node[parts[-1]] = _parse_value(raw)
    if problems:
        raise ConfigError(problems)
    return tree


def _validation_messages(exc: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()]


def load_config(path: Union[str, pathlib.Path]) -> ExperimentConfig:
    """Read and validate an experiment config file."""
    text = pathlib.Path(path).read_text(encoding="utf-8")
    try:
        return ExperimentConfig.model_validate(parse_flat_config(text))
    except ValidationError as exc:
        raise ConfigError(_validation_messages(exc)) from exc


def load_ebm_config(path: Union[str, pathlib.Path]) -> ExperimentConfig:
    """
    Read an EBM config into a ``picard_ebm`` experiment config.

    Model keys may sit at top level or under ``ebm.``; ``output.dir`` and
    ``seed`` are kept so they take precedence over the command-line flags.
    """
    tree = parse_flat_config(pathlib.Path(path).read_text(encoding="utf-8"))
    nested = tree.get("ebm", tree)
    model = {k: v for k, v in nested.items() if k not in ("output", "seed", "scenario")}
    output = tree.get("output", nested.get("output", {}))
    seed = tree.get("seed", nested.get("seed"))
    try:
        return ExperimentConfig.model_validate(
            {"scenario": "picard_ebm", "seed": seed, "output": output, "ebm": model})
    except ValidationError as exc:
        raise ConfigError(_validation_messages(exc)) from exc


def load_ebm_scenario(path: Union[str, pathlib.Path]) -> EBMScenario:
    """Read an EBM config; keys may sit at top level or under ``ebm.``."""
    return load_ebm_config(path).ebm


def resolve_out_dir(config_dir: Optional[str], flag: Optional[str]) -> str:
    return config_dir or flag or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR


def resolve_seed(config_seed: Optional[int], flag: Optional[int]) -> int:
    if config_seed is not None:
        return config_seed
    return flag if flag is not None else 0

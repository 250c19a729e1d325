# src/experiments/ebm.py
"""
Energy balance model assembly and runs.

The model couples the degenerate weighted p-Laplacian (p = 3) with the
insolation forcing F(t, u) = S0 * beta(u), beta the co-albedo profile.
Runs happen in the sup norm, in which the componentwise forcing satisfies
||F(u) - F(v)|| <= S0 * C_beta * theta(||u - v||).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from src.accretive.banach import NormKind, TimeGrid, Trajectory
from src.accretive.coalbedo import CoAlbedo, coalbedo_eval
from src.accretive.errors import AccretiveError
from src.accretive.majorant import PhiFunction, ScalarCurve, ThetaFunction, solve_scalar_ie, uniqueness_majorant
from src.accretive.operators import WeightedPLaplace1D
from src.accretive.picard import (
    PicardDiagnostics,
    PointwiseScalar,
    SeparableModulus,
    SweepScheme,
    apply_G,
    frozen_forcing_euler,
    majorant_domination,
    picard_iterate,
    two_solution_gap,
)

from .config import EBMScenario
from .report_writer import ReportRow

logger = logging.getLogger(__name__)

SUP = NormKind.sup()


@dataclass
class EBMModel:
    spec: WeightedPLaplace1D
    coalbedo: CoAlbedo
    forcing: PointwiseScalar
    grid: TimeGrid
    u0: np.ndarray


@dataclass
class EBMResult:
    trajectory: Trajectory
    diagnostics: PicardDiagnostics
    majorant: ScalarCurve
    rows: List[ReportRow]
    metadata: Dict[str, Any] = field(default_factory=dict)


def initial_profile(scenario: EBMScenario, nodes: np.ndarray) -> np.ndarray:
    """offset + amplitude*(1 - x^2) for ``bump``, offset + amplitude*x for ``affine``."""
    if scenario.profile == "bump":
        return scenario.offset + scenario.amplitude * (1.0 - nodes ** 2)
    return scenario.offset + scenario.amplitude * nodes


def build_model(scenario: EBMScenario) -> EBMModel:
    spec = WeightedPLaplace1D(p=scenario.p, dim=scenario.d)
    beta = CoAlbedo(scenario.beta_ice, scenario.beta_water, scenario.delta, scenario.S0 or 1.0)
    S0 = scenario.S0
    forcing = PointwiseScalar(
        lambda u: S0 * coalbedo_eval(beta, u),
        SeparableModulus(S0 * beta.constant, ThetaFunction.log_osgood()),
    )
    grid = TimeGrid(scenario.T, scenario.n)
    return EBMModel(spec, beta, forcing, grid, initial_profile(scenario, spec.nodes))


def sweep_gap_limit(model: EBMModel, u: Trajectory) -> float:
    """
    Upper limit for the node gap between the Euler and Duhamel sweeps of ``u``.

    Both sweeps start from the same J^k u0, and each moves at most
    lambda * sum_{i<k} ||F(t_i, u_i)|| away from it because J_lambda is
    nonexpansive and fixes 0. The gap is therefore at most twice that sum.
    It does not shrink with lambda: the additive formula is not the limit of
    the scheme for a nonlinear operator.
    """
    forcing = model.forcing.on_trajectory(u)[:-1]
    return 2.0 * model.grid.step * float(np.sum(np.max(np.abs(forcing), axis=1))) + 1e-10


def run_ebm(scenario: EBMScenario, tol_scale: float = 1.0, name: str = "picard_ebm") -> EBMResult:
    """
    Picard fixed point of the EBM with its majorant check.

    Rows: fixed-point defect, sweep count, monotone R_n(T), domination of
    every iterate by the majorant U' = S0*beta_i + S0*C_beta*theta(U) from
    U(0) = ||u0||, and the gap to the other sweep scheme.

    Under the Euler sweep the frozen-forcing Euler run is the sweep itself,
    so ``euler_sweep_defect`` only restates the fixed-point defect. The
    Duhamel sweep of the same fixed point is reported as ``duhamel_sweep_gap``
    against the limit from ``sweep_gap_limit``.
    """
    model = build_model(scenario)
    scheme = SweepScheme(scenario.scheme)
    u, diagnostics = picard_iterate(
        model.spec, model.u0, model.forcing, model.grid,
        tol=scenario.tol, max_iter=scenario.max_iter, norm_kind=SUP, scheme=scheme,
    )
    rows = [
        ReportRow.bound(name, "fixed_point_defect", diagnostics.defect, 1e-6 * tol_scale),
        ReportRow.bound(name, "sweeps", float(diagnostics.iterations), float(scenario.max_iter)),
        ReportRow.flag(name, "R_n_nonincreasing", diagnostics.is_monotone()),
    ]

    sup_f0 = scenario.S0 * scenario.beta_ice
    grid = model.grid
    phi = PhiFunction.constant(scenario.S0 * model.coalbedo.constant, grid)
    offset = PhiFunction.constant(sup_f0, grid)
    U0 = float(np.max(np.abs(model.u0)))
    majorant = solve_scalar_ie(phi, ThetaFunction.log_osgood(), U0, grid, offset=offset)
    domination = majorant_domination(diagnostics.trace, majorant)
    rows.append(ReportRow.flag(name, "majorant_domination", domination.holds,
                               measured=domination.worst_margin, reference=0.0))

    euler = frozen_forcing_euler(model.spec, model.u0, model.forcing, u)
    euler_gap = float(np.max((euler - u).node_norms()))
    other = SweepScheme.DUHAMEL if scheme is SweepScheme.EULER else SweepScheme.EULER
    swept = apply_G(model.spec, model.u0, model.forcing, u, scheme=other)
    sweep_gap = float(np.max((swept - u).node_norms()))
    sweep_limit = sweep_gap_limit(model, u) + diagnostics.defect
    if scheme is SweepScheme.EULER:
        rows.append(ReportRow.bound(name, "euler_sweep_defect", euler_gap, 1e-4 * tol_scale))
        rows.append(ReportRow.bound(name, "duhamel_sweep_gap", sweep_gap, sweep_limit))
    else:
        rows.append(ReportRow.bound(name, "frozen_forcing_euler_gap", euler_gap, sweep_limit))

    metadata = {"sup_F_t0": sup_f0, "U0": U0, "scheme": scheme.value,
                "differences": [float(r) for r in diagnostics.differences],
                "sweep_gap": sweep_gap, "sweep_gap_limit": sweep_limit}
    logger.info(f"[NOTICE] EBM fixed point after {diagnostics.iterations} updates, defect {diagnostics.defect:.3e}")
    return EBMResult(u, diagnostics, majorant, rows, metadata)


def uniqueness_experiment(scenario: EBMScenario, eps_list: Sequence[float],
                          name: str = "uniqueness_gap") -> List[ReportRow]:
    """
    Continuous dependence on the initial data.

    For each eps the first-coordinate-perturbed datum u0 + eps*e_j is run to
    its fixed point; the running-sup gap must stay below 1.05 times the
    majorant from U0 = eps, and gaps must shrink with eps at every node.
    """
    model = build_model(scenario)
    grid = model.grid
    phi = PhiFunction.constant(scenario.S0 * model.coalbedo.constant, grid)
    theta = ThetaFunction.log_osgood()
    options = dict(tol=scenario.tol, max_iter=scenario.max_iter, norm_kind=SUP,
                   scheme=SweepScheme(scenario.scheme))
    rows: List[ReportRow] = []
    gaps: Dict[float, np.ndarray] = {}
    for eps in sorted(eps_list, reverse=True):
        label = f"eps={eps:g}"
        try:
            perturbed = model.u0.copy()
            perturbed[scenario.direction] += eps
            gap = two_solution_gap(model.spec, model.forcing, model.u0, perturbed, grid, **options)
            oracle = uniqueness_majorant(theta, phi, eps, grid) if eps > 0 else ScalarCurve.zeros(grid)
        except AccretiveError as exc:
            logger.error(f"[ERRORED] uniqueness {label}: {exc}")
            rows.append(ReportRow.errored(name, label, exc))
            continue
        gaps[eps] = gap.values
        ratio = float(np.max(gap.values / np.maximum(oracle.values, 1e-300)))
        rows.append(ReportRow.bound(name, f"{label} gap/majorant", ratio, 1.05))

    ordered = sorted(gaps)
    for small, large in zip(ordered, ordered[1:]):
        shrinks = bool(np.all(gaps[small] < gaps[large]))
        rows.append(ReportRow.flag(name, f"gap({small:g}) < gap({large:g})", shrinks))
    return rows

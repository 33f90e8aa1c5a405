"""End-to-end execution of an attack plan against the estimator.

Builds clean measurements from a ground-truth state, applies the plan's
injections, deletes its jammed rows, runs detection and removal, and
classifies the outcome against the plan's declared attack type: hidden
plans must leave the residual test silent while shifting the estimate;
detectable plans must shift the estimate with at least one injected
measurement surviving removal and the final residual test passing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .attack import AttackPlan
from .errors import PlanMismatch, RemovalFailed, UnobservableSystem
from .estimator import DetectorConfig, EstimationReport, detect_and_remove
from .grid import MeasurementSystem, build_matrix, remove_measurements

ESTIMATE_CHANGE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class VerificationVerdict:
    attack_type: object
    observability_ok: bool
    stealthy: bool
    estimate_changed: bool
    survived_injection: bool
    removal_failed: bool
    matches_declared_type: bool
    final_shift: Optional[np.ndarray]
    report: Optional[EstimationReport]

    @property
    def success(self) -> bool:
        return self.matches_declared_type


def _failure(plan: AttackPlan, removal_failed: bool = False, observable: bool = False):
    return VerificationVerdict(
        attack_type=plan.attack_type,
        observability_ok=observable,
        stealthy=False,
        estimate_changed=False,
        survived_injection=False,
        removal_failed=removal_failed,
        matches_declared_type=False,
        final_shift=None,
        report=None,
    )


def default_shift_scale(sys: MeasurementSystem) -> float:
    """Injection magnitude well above detector noise: ten noise sigmas."""
    return 10.0 * float(np.sqrt(max(sys.noise_variance)))


def execute(
    sys: MeasurementSystem,
    truth: np.ndarray,
    plan: AttackPlan,
    cfg: Optional[DetectorConfig] = None,
    alpha: Optional[float] = None,
    noise_rng: Optional[np.random.Generator] = None,
) -> VerificationVerdict:
    """Run the plan and judge it against its declared attack type.

    ``alpha`` scales the injected state shift; ``noise_rng`` optionally adds
    measurement noise to the clean base vector (verification is noiseless
    by default).
    """
    known = set(sys.index_of)
    referenced = set(plan.cut.edges) | plan.injected | plan.jammed
    if not referenced <= known:
        raise PlanMismatch(f"plan references unknown measurements {sorted(referenced - known)}")
    truth = np.asarray(truth, dtype=float)
    if truth.shape != (sys.n + 1,):
        raise ValueError(f"truth must have length {sys.n + 1}")
    if truth[-1] != 0.0:
        raise ValueError("truth must pin the reference angle at zero")
    if alpha is None:
        alpha = default_shift_scale(sys)

    H = build_matrix(sys)
    z = H @ truth
    if noise_rng is not None:
        z = z + noise_rng.normal(0.0, np.sqrt(np.asarray(sys.noise_variance)))
    shift = alpha * np.asarray(plan.injection_state_shift, dtype=float)
    if len(shift) != sys.n + 1:
        raise PlanMismatch("state shift length does not match the system")
    a = H @ shift
    inject_mask = np.zeros(sys.m, dtype=bool)
    for mid in plan.injected:
        inject_mask[sys.index_of[mid]] = True
    z_attacked = z + np.where(inject_mask, a, 0.0)

    keep = [k for k, meas in enumerate(sys.measurements) if meas.id not in plan.jammed]
    reduced = remove_measurements(sys, plan.jammed)
    z_reduced = z_attacked[keep]
    try:
        report = detect_and_remove(reduced, z_reduced, cfg)
    except UnobservableSystem:
        return _failure(plan, observable=False)
    except RemovalFailed:
        return _failure(plan, removal_failed=True, observable=True)

    final_shift = report.final_estimate - truth
    estimate_changed = bool(np.max(np.abs(final_shift[:-1])) > ESTIMATE_CHANGE_TOL)
    stealthy = not report.detected
    survived = bool(plan.injected - report.removed) if plan.injected else False
    if plan.attack_type.hidden:
        success = stealthy and estimate_changed
    else:
        # final residual test passed, otherwise RemovalFailed was raised
        success = estimate_changed and survived
    return VerificationVerdict(
        attack_type=plan.attack_type,
        observability_ok=report.observable_after_removal,
        stealthy=stealthy,
        estimate_changed=estimate_changed,
        survived_injection=survived,
        removal_failed=False,
        matches_declared_type=success,
        final_shift=final_shift,
        report=report,
    )

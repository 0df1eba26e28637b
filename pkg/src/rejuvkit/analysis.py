"""Analytic metrics: steady-state availability, MTTF, mean completion time.

Availability weights the embedded chain's stationary vector by mean
sojourn times.  MTTF solves expected visit counts of the absorbing
(no-repair) variant.  Completion time solves the pair of
Laplace-Stieltjes fixed-point equations for the two failure-attribution
cases and extracts the mean as minus the derivative at zero.

Completion-time model, per case
-------------------------------
The execution runs at rate ``r1`` until the migration trigger (work
``a1``, wall time ``a1/r1``) and at rate ``r2`` afterwards, finishing at
``T0 = a1/r1 + (x - a1)/r2`` if no failure strikes first.  Failures
before the trigger follow the idle-phase failure law; at the trigger
epoch the surviving probability mass splits into three branches (backup
rebooted in time / backup fixed in time / everything else) each with its
own post-trigger failure law.  A failure at epoch ``h`` discards all
work: the clock accrues ``h`` plus a restart overhead plus a fresh
aging-onset wait, and the whole execution repeats.  This makes the LST
linear in itself, solved here in closed form per evaluation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution
from .model import (
    ModelConsistencyError,
    ModelParams,
    absorbing_blocks,
    sojourn_times,
    transition_matrix,
)
from .numerics import DEFAULT_TOL, absorbing_visits, dtmc_stationary, stieltjes

__all__ = [
    "WorkloadSpec",
    "MetricsReport",
    "CompletionDivergenceError",
    "steady_state",
    "availability",
    "mttf",
    "completion_lst_primary",
    "completion_lst_backup",
    "completion_time",
    "metrics_report",
]

_FD_STEP = 1e-4  # base step for the Richardson derivative at s = 0


class CompletionDivergenceError(ArithmeticError):
    """The restart loop does not terminate (B(s) >= 1) or masses are infeasible."""


@dataclass(frozen=True)
class WorkloadSpec:
    """Inputs of the completion-time analysis.

    ``x`` is the total work in work units (one unit per hour at the
    healthy-state rate).  ``b1``/``b2`` weight the two failure-attribution
    cases; the backup case analyses the remaining ``x - x1`` units with
    its trigger at epoch ``t1``.  ``None`` fields resolve to defaults at
    evaluation time: ``x1 = x/2``, ``t1 = a4``, restart overheads = the
    fixing laws.  ``backup_restart_via_primary`` keeps the printed
    routing of the backup case's restart terms through the primary-case
    transform; set it False to make the backup case restart into itself.
    """

    x: float
    x1: float | None = None
    r1: float = 1.0
    r2: float = 1.0
    b1: float = 1.0
    b2: float = 0.0
    t1: float | None = None
    restart_overhead_primary: Distribution | None = None
    restart_overhead_backup: Distribution | None = None
    backup_restart_via_primary: bool = True

    def validate(self) -> list[str]:
        problems = []
        if not (self.x > 0.0 and math.isfinite(self.x)):
            problems.append(f"x must be positive, got {self.x}")
        if self.x1 is not None and not 0.0 <= self.x1 <= self.x:
            problems.append(f"x1 must lie in [0, x], got {self.x1}")
        if not 0.0 < self.r1 <= 1.0:
            problems.append(f"r1 must lie in (0, 1], got {self.r1}")
        if self.r2 != 1.0:
            problems.append(f"r2 is fixed at 1, got {self.r2}")
        if self.b1 < 0.0 or self.b2 < 0.0 or abs(self.b1 + self.b2 - 1.0) > 1e-12:
            problems.append(f"b1 + b2 must equal 1, got {self.b1} + {self.b2}")
        if self.t1 is not None and self.t1 < 0.0:
            problems.append(f"t1 must be >= 0, got {self.t1}")
        return problems

    def require_valid(self):
        problems = self.validate()
        if problems:
            raise ValueError("invalid workload: " + "; ".join(problems))


@dataclass(frozen=True)
class MetricsReport:
    availability: float
    mttf: float
    completion_time: float | None
    pi: np.ndarray
    visits: np.ndarray


def steady_state(p: ModelParams, tol: float = DEFAULT_TOL):
    """(stationary vector, sojourn hours, time-weighted probabilities pi)."""
    P = transition_matrix(p, tol)
    h = sojourn_times(p, tol)
    v = dtmc_stationary(P)
    weighted = v * h
    pi = weighted / weighted.sum()
    return v, h, pi


def availability(p: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Long-run fraction of time in the ten up states."""
    _, _, pi = steady_state(p, tol)
    return float(1.0 - pi[10] - pi[11])


def mttf(p: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Mean time to first failure with repair disabled."""
    M, _, alpha = absorbing_blocks(p, tol)
    V = absorbing_visits(M, alpha)
    h = sojourn_times(p, tol)
    return float(V @ h[:10])


# --- completion time -------------------------------------------------------


@dataclass(frozen=True)
class _Case:
    """One failure-attribution case of the completion-time equations."""

    tau: float  # wall clock until the migration trigger
    delta: float  # wall clock of the post-trigger phase
    aging: Distribution  # fresh onset wait paid per restart
    pre_fail: Distribution
    post: tuple  # ((mass, law) for the three post-trigger branches)
    overhead: Distribution
    pre_mass: float

    @property
    def t0(self):
        return self.tau + self.delta


def _resolve(p: ModelParams, w: WorkloadSpec):
    p.require_valid()
    w.require_valid()
    x1 = w.x / 2.0 if w.x1 is None else w.x1
    if w.t1 is None:
        if isinstance(p.a4, Distribution):
            raise ValueError("t1 must be given explicitly when a4 is a distribution")
        t1 = float(p.a4)
    else:
        t1 = w.t1
    a1 = p.a1
    if isinstance(a1, Distribution):
        raise ValueError("completion analysis needs a plain trigger delay a1")
    if a1 > w.x:
        raise ValueError(f"trigger work a1={a1} exceeds the work requirement x={w.x}")
    if t1 > w.x - x1:
        raise ValueError(f"t1={t1} exceeds the remaining work x - x1 = {w.x - x1}")
    g1 = w.restart_overhead_primary or p.fixing_primary
    g2 = w.restart_overhead_backup or p.fixing_backup

    def build(trig_work, rem_work, aging, pre_fail, gate_reboot, gate_fix, laws, overhead):
        tau = trig_work / w.r1
        delta = rem_work / w.r2
        pre_mass = pre_fail.cdf(tau)
        m_reboot = p.c2 * gate_reboot.cdf(tau)
        m_fix = p.c3 * gate_fix.cdf(tau)
        m_rest = 1.0 - pre_mass - m_reboot - m_fix
        if m_rest < -1e-12:
            raise CompletionDivergenceError(
                "post-trigger branch mass is negative "
                f"({m_rest:.3e}): the trigger epoch {tau:.3g} h is too deep into the "
                "failure laws for this workload configuration"
            )
        post = ((m_reboot, laws[0]), (m_fix, laws[1]), (max(m_rest, 0.0), laws[2]))
        return _Case(tau, delta, aging, pre_fail, post, overhead, pre_mass)

    primary = build(
        a1,
        w.x - a1,
        p.aging_primary,
        p.fail_idle_primary,
        p.reboot_backup,
        p.fixing_backup,
        (p.fail_fixing_primary, p.fail_reboot_primary, p.fail_migrating_primary),
        g1,
    )
    backup = build(
        t1,
        (w.x - x1) - t1,
        p.aging_backup,
        p.fail_idle_backup,
        p.reboot_primary,
        p.fixing_primary,
        (p.fail_fixing_backup, p.fail_reboot_backup, p.fail_migrating_backup),
        g2,
    )
    return primary, backup


def _window_lst(d: Distribution, s: float, hi: float, tol: float, cache: dict) -> float:
    """Incomplete transform over [0, hi]: integral of exp(-s h) dF(h)."""
    key = (id(d), s, hi)
    if key not in cache:
        cache[key] = stieltjes(lambda h: math.exp(-s * h), d, tol, lower=0.0, upper=hi)
    return cache[key]


def _window_moment(d: Distribution, hi: float, tol: float) -> float:
    """Integral of h dF(h) over [0, hi]."""
    return stieltjes(lambda h: h, d, tol, lower=0.0, upper=hi)


def _ab(case: _Case, s: float, tol: float, cache: dict):
    """Completion mass A(s) and restart mass B(s) of one case."""
    surv = sum(m * (1.0 - law.cdf(case.delta)) for m, law in case.post)
    A = math.exp(-s * case.t0) * surv
    J = _window_lst(case.pre_fail, s, case.tau, tol, cache)
    J += math.exp(-s * case.tau) * sum(
        m * _window_lst(law, s, case.delta, tol, cache) for m, law in case.post
    )
    B = case.overhead.lst(s) * case.aging.lst(s) * J
    return A, B


def _ab_derivative(case: _Case, tol: float, cache: dict):
    """(A(0), B(0), A'(0), B'(0)) with the derivatives taken analytically."""
    A0, B0 = _ab(case, 0.0, tol, cache)
    dA = -case.t0 * A0
    J0 = B0  # overhead.lst(0) * aging.lst(0) == 1
    dJ = -_window_moment(case.pre_fail, case.tau, tol)
    for m, law in case.post:
        w0 = _window_lst(law, 0.0, case.delta, tol, cache)
        dJ += m * (-case.tau * w0 - _window_moment(law, case.delta, tol))
    dB = (case.overhead.lst_derivative(0.0) + case.aging.lst_derivative(0.0)) * J0 + dJ
    return A0, B0, dA, dB


def _solve_pair(p: ModelParams, w: WorkloadSpec, s: float, tol: float, cache: dict):
    """Joint solve of the two case transforms at one point s."""
    primary, backup = _resolve(p, w)
    A1, B1 = _ab(primary, s, tol, cache)
    A2, B2 = _ab(backup, s, tol, cache)
    if B1 >= 1.0 or (not w.backup_restart_via_primary and B2 >= 1.0):
        raise CompletionDivergenceError(
            f"restart mass B(s={s}) >= 1: the execution never completes under "
            "this workload/failure configuration"
        )
    if w.backup_restart_via_primary:
        coeff = np.array([[1.0 - B1, 0.0], [-B2, 1.0]])
    else:
        coeff = np.array([[1.0 - B1, 0.0], [0.0, 1.0 - B2]])
    phi = np.linalg.solve(coeff, np.array([A1, A2]))
    return float(phi[0]), float(phi[1])


def completion_lst_primary(
    p: ModelParams, w: WorkloadSpec, s: float, tol: float = DEFAULT_TOL
) -> float:
    """Transform of the primary-case completion time at s >= 0."""
    return _solve_pair(p, w, s, tol, {})[0]


def completion_lst_backup(
    p: ModelParams, w: WorkloadSpec, s: float, tol: float = DEFAULT_TOL
) -> float:
    """Transform of the backup-case completion time at s >= 0."""
    return _solve_pair(p, w, s, tol, {})[1]


def _check_total_probability(phi1, phi2):
    if abs(phi1 - 1.0) > 1e-9 or abs(phi2 - 1.0) > 1e-9:
        raise ModelConsistencyError(
            f"completion transforms at s=0 must equal 1, got {phi1!r}, {phi2!r}"
        )


def _min_lst_rate(p: ModelParams, w: WorkloadSpec) -> float:
    """Smallest exponential phase rate among the full-line transforms used."""
    from .distributions import Erlang, Exponential, Hypoexponential

    primary, backup = _resolve(p, w)
    rates = []
    for d in (primary.aging, primary.overhead, backup.aging, backup.overhead):
        if isinstance(d, Exponential):
            rates.append(d.rate)
        elif isinstance(d, Erlang):
            rates.append(d.rate)
        elif isinstance(d, Hypoexponential):
            rates.append(min(d.rate1, d.rate2))
    return min(rates) if rates else math.inf


def _mean_richardson(p, w, which, tol):
    cache = {}
    h0 = min(_FD_STEP, 0.4 * _min_lst_rate(p, w))

    def phi(s):
        pair = _solve_pair(p, w, s, tol, cache)
        return pair[which]

    def central(h):
        return (-phi(2 * h) + 8.0 * phi(h) - 8.0 * phi(-h) + phi(-2 * h)) / (12.0 * h)

    d1 = central(h0)
    d2 = central(h0 / 2.0)
    return -(16.0 * d2 - d1) / 15.0


def _mean_analytic(p, w, tol):
    cache = {}
    primary, backup = _resolve(p, w)
    A1, B1, dA1, dB1 = _ab_derivative(primary, tol, cache)
    A2, B2, dA2, dB2 = _ab_derivative(backup, tol, cache)
    _check_total_probability(A1 + B1, A2 + B2)
    if B1 >= 1.0:
        raise CompletionDivergenceError("restart mass B1(0) >= 1")
    e1 = -(dA1 + dB1) / (1.0 - B1)
    if w.backup_restart_via_primary:
        e2 = -dA2 - dB2 + B2 * e1
    else:
        if B2 >= 1.0:
            raise CompletionDivergenceError("restart mass B2(0) >= 1")
        e2 = -(dA2 + dB2) / (1.0 - B2)
    return e1, e2


def completion_time(
    p: ModelParams,
    w: WorkloadSpec,
    tol: float = DEFAULT_TOL,
    method: str = "richardson",
) -> float:
    """Mean completion time: minus the transform derivative at zero.

    ``method="richardson"`` (default) uses fourth-order central
    differences with one Richardson extrapolation step;
    ``method="analytic"`` differentiates the assembled transform in
    closed form (used as a cross-check of the numerical route).
    """
    phi1, phi2 = _solve_pair(p, w, 0.0, tol, {})
    _check_total_probability(phi1, phi2)
    if method == "richardson":
        e1 = _mean_richardson(p, w, 0, tol)
        e2 = _mean_richardson(p, w, 1, tol)
    elif method == "analytic":
        e1, e2 = _mean_analytic(p, w, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    mean = w.b1 * e1 + w.b2 * e2
    primary, backup = _resolve(p, w)
    floor = w.b1 * primary.t0 + w.b2 * backup.t0
    if mean < floor - 1e-6 * max(1.0, floor):
        raise ModelConsistencyError(
            f"completion mean {mean} fell below the failure-free floor {floor}"
        )
    return float(mean)


def metrics_report(
    p: ModelParams, w: WorkloadSpec | None = None, tol: float = DEFAULT_TOL
) -> MetricsReport:
    """All analytic metrics from one model build."""
    P = transition_matrix(p, tol)
    h = sojourn_times(p, tol)
    v = dtmc_stationary(P)
    weighted = v * h
    pi = weighted / weighted.sum()
    avail = float(1.0 - pi[10] - pi[11])

    M = P[:10, :10]
    alpha = np.zeros(10)
    alpha[0] = 1.0
    V = absorbing_visits(M, alpha)
    life = float(V @ h[:10])

    completed = completion_time(p, w, tol) if w is not None else None
    return MetricsReport(avail, life, completed, pi, V)

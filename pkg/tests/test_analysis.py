import math

import numpy as np
import pytest

from rejuvkit import (
    CompletionDivergenceError,
    Deterministic,
    Exponential,
    WorkloadSpec,
    availability,
    completion_lst_backup,
    completion_lst_primary,
    completion_time,
    mttf,
    scale_time,
    steady_state,
)
from rejuvkit.analysis import metrics_report
from rejuvkit.ctmc import CtmcNotApplicable, availability_ctmc, mttf_ctmc
from tests.conftest import make_params

NEVER = Deterministic(1e9)  # a failure law that cannot fire in any window


def exp_trigger_params(mean=30.0, **kw):
    trig = Exponential(1.0 / mean)
    defaults = dict(
        failure=Exponential(0.0010432),
        a1=trig, a2=trig, a3=trig, a4=trig, a5=trig, a6=trig,
        c=(1.0, 0.0, 0.0),
    )
    defaults.update(kw)
    return make_params(**defaults)


# --- availability ----------------------------------------------------------


def test_availability_partitions_with_pi():
    _, _, pi = steady_state(make_params())
    a = availability(make_params())
    assert a + pi[10] + pi[11] == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < a < 1.0


def test_instant_repair_gives_full_availability():
    p = make_params(fixing=Deterministic(0.0))
    assert availability(p) == pytest.approx(1.0, abs=1e-12)


def test_availability_matches_ctmc():
    p = exp_trigger_params()
    assert availability(p) == pytest.approx(availability_ctmc(p), abs=1e-6)


def test_ctmc_not_applicable_cases():
    with pytest.raises(CtmcNotApplicable, match="branch"):
        availability_ctmc(make_params(failure=Exponential(1.0)))
    with pytest.raises(CtmcNotApplicable, match="trigger"):
        availability_ctmc(make_params(failure=Exponential(1.0), c=(1.0, 0.0, 0.0)))
    with pytest.raises(CtmcNotApplicable, match="exponential"):
        availability_ctmc(exp_trigger_params(failure=Deterministic(3.0)))


def test_ctmc_generator_rows_sum_to_zero():
    from rejuvkit.ctmc import generator

    Q = generator(exp_trigger_params())
    assert np.abs(Q.sum(axis=1)).max() <= 1e-12


# --- mttf ------------------------------------------------------------------


def test_mttf_matches_ctmc_first_passage():
    p = exp_trigger_params()
    smp = mttf(p)
    oracle = mttf_ctmc(p)
    assert abs(smp - oracle) / oracle <= 1e-3


def test_mttf_two_step_closed_form():
    # trigger far beyond any failure: absorption after one aging cycle,
    # MTTF = mean aging + mean failure exactly
    lam_u, lam_f = 0.001, 0.01
    p = make_params(
        trigger=1e7, aging=Exponential(lam_u), failure=Exponential(lam_f), c=(1.0, 0.0, 0.0)
    )
    assert mttf(p) == pytest.approx(1.0 / lam_u + 1.0 / lam_f, rel=1e-8)


def test_mttf_absorption_unreachable_raises():
    # certain triggers/migration always outrun the far point-mass failures:
    # the no-repair chain cycles forever and the visit solve is singular
    p = make_params(failure=NEVER, migration=Deterministic(0.01), c=(1.0, 0.0, 0.0))
    with pytest.raises(ArithmeticError, match="absorption|singular"):
        mttf(p)


# --- completion time -------------------------------------------------------


def test_transforms_equal_one_at_zero():
    p = make_params()
    w = WorkloadSpec(x=590.6201, r1=0.566316)
    assert completion_lst_primary(p, w, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert completion_lst_backup(p, w, 0.0) == pytest.approx(1.0, abs=1e-9)


def test_no_failure_limit_is_exact():
    p = make_params(failure=NEVER)
    w = WorkloadSpec(x=200.0, r1=0.8)
    expected = p.a1 / 0.8 + (200.0 - p.a1) / 1.0
    assert completion_time(p, w, method="analytic") == pytest.approx(expected, abs=1e-10)
    assert completion_time(p, w, method="richardson") == pytest.approx(expected, abs=1e-8)
    # transform itself degenerates to a pure delay
    for s in (0.0, 1e-4, 1e-3):
        assert completion_lst_primary(p, w, s) == pytest.approx(math.exp(-s * expected), abs=1e-12)


def test_preemptive_repeat_renewal_oracle():
    # immediate trigger, full-rate execution, exponential failure: the mean
    # satisfies the classical renewal closed form (e^(lx)-1)(1/l + overhead)
    lam, x = 0.01, 100.0
    repair_mean, aging_mean = 2.0, 50.0
    p = make_params(
        trigger=0.0,
        failure=Exponential(lam),
        aging=Exponential(1.0 / aging_mean),
        fixing=Exponential(1.0 / repair_mean),
    )
    w = WorkloadSpec(x=x, r1=1.0)
    closed = (math.exp(lam * x) - 1.0) * (1.0 / lam + repair_mean + aging_mean)
    assert completion_time(p, w, method="analytic") == pytest.approx(closed, rel=1e-8)
    assert completion_time(p, w, method="richardson") == pytest.approx(closed, rel=1e-4)


def test_role_exchange_symmetry():
    p = make_params(trigger=20.0)
    w = WorkloadSpec(x=500.0, x1=0.0, r1=0.7, t1=20.0, b1=0.5, b2=0.5)
    for s in (0.0, 1e-4, 5e-4):
        phi1 = completion_lst_primary(p, w, s)
        phi2 = completion_lst_backup(p, w, s)
        assert phi1 == pytest.approx(phi2, abs=1e-10)


def test_no_remaining_backup_work_contributes_nothing():
    p = make_params(trigger=20.0)
    w = WorkloadSpec(x=300.0, x1=300.0, t1=0.0, b1=0.0, b2=1.0, r1=0.9)
    assert completion_time(p, w, method="analytic") == pytest.approx(0.0, abs=1e-12)
    for s in (0.0, 1e-3):
        assert completion_lst_backup(p, w, s) == pytest.approx(1.0, abs=1e-12)


def test_backup_restart_routing_flag():
    p = make_params(trigger=25.0)
    base = dict(x=400.0, x1=100.0, r1=0.8, t1=25.0, b1=0.0, b2=1.0)
    printed = completion_time(p, WorkloadSpec(**base), method="analytic")
    self_routed = completion_time(
        p, WorkloadSpec(**base, backup_restart_via_primary=False), method="analytic"
    )
    assert printed != pytest.approx(self_routed, rel=1e-6)
    # both conserve probability
    for flag in (True, False):
        w = WorkloadSpec(**base, backup_restart_via_primary=flag)
        assert completion_lst_backup(p, w, 0.0) == pytest.approx(1.0, abs=1e-9)


def test_richardson_agrees_with_analytic():
    p = make_params(trigger=15.0, failure=Exponential(0.01), aging=Exponential(0.02))
    w = WorkloadSpec(x=80.0, r1=0.9)
    fd = completion_time(p, w, method="richardson")
    closed = completion_time(p, w, method="analytic")
    assert fd == pytest.approx(closed, rel=1e-5)


def test_completion_non_increasing_in_aging_rate():
    p = make_params(trigger=30.0)
    values = [
        completion_time(p, WorkloadSpec(x=500.0, r1=r1), method="analytic")
        for r1 in (0.2, 0.4, 0.6, 0.8, 1.0)
    ]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_divergent_restart_loop_raises():
    # deterministic failure strictly inside every attempt window: the
    # execution can never finish
    p = make_params(trigger=0.0, failure=Deterministic(1.0))
    with pytest.raises(CompletionDivergenceError):
        completion_time(p, WorkloadSpec(x=100.0, r1=1.0))


def test_negative_branch_mass_raises():
    p = make_params(trigger=2000.0, c=(0.2, 0.5, 0.3))
    with pytest.raises(CompletionDivergenceError, match="mass"):
        completion_time(p, WorkloadSpec(x=3000.0, r1=1.0, t1=0.0))


def test_workload_validation():
    assert WorkloadSpec(x=100.0).validate() == []
    assert any("r2" in s for s in WorkloadSpec(x=100.0, r2=0.9).validate())
    assert any("b1 + b2" in s for s in WorkloadSpec(x=100.0, b1=0.6, b2=0.6).validate())
    assert any("x1" in s for s in WorkloadSpec(x=100.0, x1=150.0).validate())
    assert any("r1" in s for s in WorkloadSpec(x=100.0, r1=0.0).validate())
    with pytest.raises(ValueError, match="t1"):
        completion_time(make_params(), WorkloadSpec(x=100.0, x1=80.0, t1=50.0))
    with pytest.raises(ValueError, match="exceeds the work"):
        completion_time(make_params(trigger=200.0), WorkloadSpec(x=100.0))


def test_completion_floor_guard():
    p = make_params()
    w = WorkloadSpec(x=590.0, r1=0.6)
    value = completion_time(p, w)
    floor = p.a1 / 0.6 + (590.0 - p.a1)
    assert value >= floor


# --- cross-metric invariants ------------------------------------------------


def test_metrics_report_carries_everything():
    r = metrics_report(make_params(), WorkloadSpec(x=590.6201, r1=0.566316))
    assert r.pi.shape == (12,)
    assert r.visits.shape == (10,)
    assert r.pi.sum() == pytest.approx(1.0, abs=1e-12)
    assert r.visits[0] >= 1.0
    assert r.completion_time > 590.6201


def test_time_unit_invariance():
    p = make_params()
    w = WorkloadSpec(x=400.0, r1=0.7)
    a0, m0 = availability(p), mttf(p)
    e0 = completion_time(p, w, method="analytic")
    for k in (0.5, 2.0, 24.0):
        q = scale_time(p, k)
        wq = WorkloadSpec(
            x=400.0 / k,
            r1=0.7,
            restart_overhead_primary=Exponential(q.fixing_primary.rate),
            restart_overhead_backup=Exponential(q.fixing_backup.rate),
        )
        assert availability(q) == pytest.approx(a0, abs=1e-10)
        assert mttf(q) * k == pytest.approx(m0, rel=1e-8)
        assert completion_time(q, wq, method="analytic") * k == pytest.approx(e0, rel=1e-8)

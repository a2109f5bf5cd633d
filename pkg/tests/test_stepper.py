import numpy as np
import pytest

from kompakton import (CompactonSpec, FieldState, GridSpec, ParameterError,
                       RunStatus, Scheme, StepFailureError, StepperConfig,
                       TimeRule, TimeSpec, jacobian, residual, run,
                       sample_initial, step)

SPEC = CompactonSpec(2, 1.0, 20.0, 1.0)
GRID = GridSpec(40.0, 800)  # dx = 0.05
CFG = StepperConfig()


def _states(values_old, values_new, dt=0.1):
    return FieldState(0.0, values_old), FieldState(dt, values_new)


@pytest.mark.parametrize("scheme", list(Scheme))
@pytest.mark.parametrize("rule", list(TimeRule))
def test_residual_zero_field(scheme, rule):
    cfg = StepperConfig(rule=rule)
    old, new = _states(np.zeros(64), np.zeros(64))
    out = residual(scheme, cfg, old, new, 0.1, SPEC, GridSpec(6.4, 64))
    np.testing.assert_array_equal(out, 0.0)


@pytest.mark.parametrize("rule", list(TimeRule))
def test_residual_constant_field_without_drift(rule):
    spec = CompactonSpec(2, 1.0, 3.2, 0.0)  # c0 = 0
    cfg = StepperConfig(rule=rule)
    const = np.full(64, 0.7)
    old, new = _states(const, const.copy())
    out = residual(Scheme.PADE8, cfg, old, new, 0.1, spec, GridSpec(6.4, 64))
    np.testing.assert_allclose(out, 0.0, atol=1e-13)


def test_residual_of_exact_translate_is_truncation_sized():
    state = sample_initial(SPEC, GRID)
    candidate = FieldState(0.1, state.values.copy())  # stopped compacton
    out = residual(Scheme.DE_FRUTOS, CFG, state, candidate, 0.1, SPEC, GRID)
    peak = np.max(np.abs(out))
    assert 1e-8 < peak < 1e-2


def test_jacobian_at_zero_state_is_mass_over_dt():
    grid = GridSpec(6.4, 64)
    spec = CompactonSpec(2, 1.0, 3.2, 0.0)
    old, new = _states(np.zeros(64), np.zeros(64), dt=0.25)
    mat = jacobian(Scheme.PADE6, CFG, old, new, 0.25, spec, grid)
    from kompakton import operator_A
    expected = np.repeat(operator_A(Scheme.PADE6).weights[:, None], 64, axis=1) / 0.25
    np.testing.assert_allclose(mat.diagonals, expected, rtol=1e-14)


def test_jacobian_bandwidth():
    grid = GridSpec(6.4, 64)
    rng = np.random.default_rng(11)
    old, new = _states(rng.normal(size=64), rng.normal(size=64))
    dense = jacobian(Scheme.DE_FRUTOS, CFG, old, new, 0.1, SPEC, grid).to_dense()
    rows = np.arange(64)
    for offset in range(3, 62):
        assert np.all(dense[rows, (rows + offset) % 64] == 0.0)


@pytest.mark.parametrize("rule", list(TimeRule))
@pytest.mark.parametrize("p", [2, "5/3"])
def test_jacobian_matches_finite_differences(rule, p):
    grid = GridSpec(6.4, 32)
    spec = CompactonSpec(p, 1.0, 3.2, 0.7)
    cfg = StepperConfig(rule=rule)
    rng = np.random.default_rng(3)
    sign = np.where(rng.random(32) > 0.3, 1.0, -1.0)
    old = FieldState(0.0, (0.25 + rng.random(32)) * sign)
    new = FieldState(0.05, (0.25 + rng.random(32)) * sign[::-1])
    dense = jacobian(Scheme.PADE8, cfg, old, new, 0.05, spec, grid).to_dense()
    h = 1e-6
    for j in range(32):
        bump = np.zeros(32)
        bump[j] = h
        plus = residual(Scheme.PADE8, cfg, old, FieldState(0.05, new.values + bump),
                        0.05, spec, grid)
        minus = residual(Scheme.PADE8, cfg, old, FieldState(0.05, new.values - bump),
                         0.05, spec, grid)
        fd = (plus - minus) / (2.0 * h)
        scale = max(np.max(np.abs(dense[:, j])), 1e-30)
        assert np.max(np.abs(dense[:, j] - fd)) / scale < 1e-5


def test_step_zero_field_is_exact():
    zero = FieldState(0.0, np.zeros(64))
    out, report = step(Scheme.ISMAIL, CFG, zero, 0.1, SPEC, GridSpec(6.4, 64))
    np.testing.assert_array_equal(out.values, 0.0)
    assert out.t == pytest.approx(0.1)
    assert report.iterations <= 1
    assert report.converged


def test_step_keeps_stopped_compacton_peak():
    state = sample_initial(SPEC, GRID)
    out, report = step(Scheme.DE_FRUTOS, CFG, state, 0.1, SPEC, GRID)
    assert report.converged
    assert abs(out.values.max() - 4.0 / 3.0) < 1e-3


def test_step_mass_is_conserved():
    state = sample_initial(SPEC, GRID)
    total = state.values.sum()
    for _ in range(10):
        state, report = step(Scheme.PADE6, CFG, state, 0.1, SPEC, GRID)
        assert report.converged
    drift = abs(state.values.sum() - total)
    assert drift < 10 * CFG.newton_abs_tol * GRID.num_nodes * 10


def test_step_rejects_non_finite_state():
    bad = FieldState(0.0, np.full(64, np.nan))
    with pytest.raises(StepFailureError) as err:
        step(Scheme.ISMAIL, CFG, bad, 0.1, SPEC, GridSpec(6.4, 64))
    assert err.value.reason == "non-finite"


def test_step_failure_carries_report():
    state = sample_initial(SPEC, GRID)
    cfg = StepperConfig(newton_max_iters=1, newton_abs_tol=1e-14)
    with pytest.raises(StepFailureError) as err:
        step(Scheme.DE_FRUTOS, cfg, state, 50.0, SPEC, GRID)
    assert err.value.report is not None
    assert not err.value.report.converged


def test_trapezoidal_and_midpoint_agree_to_second_order():
    spec = CompactonSpec(2, 1.0, 30.0, 1.0)
    grid = GridSpec(60.0, 600)
    diffs = []
    for dt in (0.2, 0.1):
        ends = {}
        for rule in TimeRule:
            cfg = StepperConfig(rule=rule)
            traj = run(Scheme.DE_FRUTOS, cfg, spec, grid,
                       TimeSpec(dt, 10.0, (10.0,)))
            assert traj.status is RunStatus.COMPLETED
            ends[rule] = traj.states[-1].values
        diffs.append(np.max(np.abs(ends[TimeRule.TRAPEZOIDAL]
                                   - ends[TimeRule.MIDPOINT])))
    assert diffs[1] < diffs[0] / 2.5  # at least ~second-order shrinkage


def test_run_zero_duration():
    traj = run(Scheme.ISMAIL, CFG, SPEC, GRID, TimeSpec(0.1, 0.0, (0.0,)))
    assert traj.status is RunStatus.COMPLETED
    assert len(traj.states) == 1
    assert traj.states[0].t == 0.0
    assert traj.invariants.times.size == 1


def test_run_snapshot_cadence_and_invariants():
    traj = run(Scheme.DE_FRUTOS, CFG, SPEC, GRID,
               TimeSpec(0.1, 2.0, (0.0, 1.0, 2.0)))
    assert [s.t for s in traj.states] == pytest.approx([0.0, 1.0, 2.0])
    assert traj.invariants.values.shape == (3, 4)
    assert len(traj.reports) == 20
    assert traj.end_time == pytest.approx(2.0)


def test_run_flags_amplitude_blowup():
    cfg = StepperConfig(blowup_threshold=1e-6)
    traj = run(Scheme.DE_FRUTOS, cfg, SPEC, GRID, TimeSpec(0.1, 2.0, (0.0, 2.0)))
    assert traj.status is RunStatus.BLOWUP
    assert traj.blown_up
    assert traj.failure_detail
    assert traj.end_time < 2.0


def test_run_rejects_non_integer_step_count():
    from kompakton import ConfigurationError
    with pytest.raises(ConfigurationError):
        run(Scheme.ISMAIL, CFG, SPEC, GRID, TimeSpec(0.3, 1.0, (0.0,)))


def test_config_validation():
    with pytest.raises(ParameterError):
        StepperConfig(newton_abs_tol=0.0)
    with pytest.raises(ParameterError):
        StepperConfig(newton_max_iters=0)
    with pytest.raises(ParameterError):
        StepperConfig(blowup_threshold=-1.0)
    assert TimeRule.from_name("trapezoidal") is TimeRule.TRAPEZOIDAL
    with pytest.raises(ParameterError):
        TimeRule.from_name("rk4")

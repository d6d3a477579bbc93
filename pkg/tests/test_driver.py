import numpy as np
import pytest

from mpvc.driver import DriverConfig, StopReason, solve_mpvc
from mpvc.errors import ParameterError
from mpvc.model import max_vio
from mpvc.problems import academic
from mpvc.regularize import Scheme


def test_config_validation():
    with pytest.raises(ParameterError):
        DriverConfig(scheme=Scheme.GLOBAL, t0=1.0, t_min=2.0)
    with pytest.raises(ParameterError):
        DriverConfig(scheme=Scheme.GLOBAL, sigma=1.5)
    with pytest.raises(ParameterError):
        DriverConfig(scheme=Scheme.GLOBAL, tol=0.0)


def test_academic_global_from_far_start():
    prob = academic()
    res = solve_mpvc(prob, DriverConfig(scheme=Scheme.GLOBAL), np.array([10.0, 10.0]))
    assert res.trace.reason is StopReason.FEASIBILITY
    np.testing.assert_allclose(res.x, [0.0, 5.0], atol=1e-3)
    assert res.f == pytest.approx(10.0, abs=5e-3)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_already_feasible_start_is_immediate(scheme):
    prob = academic()
    x0 = np.array([0.0, 5.0])
    res = solve_mpvc(prob, DriverConfig(scheme=scheme), x0)
    assert res.trace.outer_iterations <= 2
    assert res.trace.reason is StopReason.FEASIBILITY
    np.testing.assert_allclose(res.x, x0)
    assert res.f == pytest.approx(10.0)


def test_trace_geometry_and_iteration_bound():
    prob = academic()
    res = solve_mpvc(prob, DriverConfig(scheme=Scheme.GLOBAL), np.array([7.0, 3.0]))
    rec = res.trace.records
    assert len(rec) <= 9
    assert rec[0].t == 1.0
    for a, b in zip(rec, rec[1:]):
        assert b.t == a.t * 0.1
        assert b.k == a.k + 1
    assert res.trace.reason in (StopReason.FEASIBILITY, StopReason.TMIN)
    assert max_vio(prob, res.x) <= 1e-6 or res.trace.reason is not StopReason.FEASIBILITY


def test_trace_serialization(tmp_path):
    prob = academic()
    res = solve_mpvc(prob, DriverConfig(scheme=Scheme.LSHAPED), np.array([6.0, 1.0]))
    path = tmp_path / "trace.csv"
    res.trace.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "k,t,f,maxVio,fullVio,innerIters,eps"
    assert len(lines) == 1 + res.trace.outer_iterations
    payload = res.trace.to_json()
    assert "records" in payload and "reason" in payload


def test_driver_deterministic():
    prob = academic()
    cfg = DriverConfig(scheme=Scheme.NONSMOOTH)
    r1 = solve_mpvc(prob, cfg, np.array([-3.0, 14.0]))
    r2 = solve_mpvc(prob, cfg, np.array([-3.0, 14.0]))
    assert np.array_equal(r1.x, r2.x)
    assert r1.trace.total_inner_iterations == r2.trace.total_inner_iterations

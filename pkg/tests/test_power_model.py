import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backscatter_sched.errors import ContractError
from backscatter_sched.power_model import (
    EnergyBudget,
    NarrowSchedule,
    ScenarioParams,
    SensingVariant,
    WideSchedule,
    causality_satisfied,
    energy_budget_narrow,
    energy_budget_wide,
)

E_S_DBM33 = 5.01187e-7


def field_like(**kw):
    base = dict(T=10, eta=1, P_R=1e-3, e_s=E_S_DBM33, f_s=1000, P_C=1e-7, P_D=1e-6)
    base.update(kw)
    return ScenarioParams(**base)


def test_harvest_only_boundary():
    s = NarrowSchedule(1e-9, 1e-9, 1 - 3e-9)
    b = energy_budget_narrow(s, field_like(e_s=E_S_DBM33))
    assert b.E_H == pytest.approx(1e-2, rel=1e-8)
    assert b.E_B == pytest.approx(0, abs=1e-14)
    assert b.E_S == pytest.approx(0, abs=1e-10)


def test_single_sensing_budget():
    s = NarrowSchedule(0.78, 0.11, 0.11, SensingVariant.SINGLE)
    b = energy_budget_narrow(s, field_like())
    assert b.E_H == pytest.approx(1.1e-3, rel=1e-12)
    assert b.E_S == pytest.approx(0.11 * 10 * E_S_DBM33 * 1000, rel=1e-12)
    assert b.E_S == pytest.approx(5.513e-4, rel=1e-4)
    assert b.E_B == pytest.approx(7.8e-7, rel=1e-12)
    assert b.E_D == pytest.approx(1e-5, rel=1e-12)


def test_double_sensing_doubles_sensing_energy():
    single = energy_budget_narrow(NarrowSchedule(0.78, 0.11, 0.11, SensingVariant.SINGLE), field_like())
    double = energy_budget_narrow(NarrowSchedule(0.67, 0.11, 0.11, SensingVariant.DOUBLE), field_like())
    assert double.E_S == 2 * single.E_S
    assert double.E_S == pytest.approx(1.1026e-3, rel=1e-4)
    assert double.E_H == single.E_H and double.E_D == single.E_D


def test_wide_no_sensing_boundary():
    b = energy_budget_wide(WideSchedule(1e-12, 0.5), field_like(P_R_w=2e-3))
    assert b.E_H == pytest.approx(1e-2, rel=1e-9)
    assert b.E_S == pytest.approx(0, abs=1e-12)


def test_wide_budget():
    b = energy_budget_wide(WideSchedule(0.11, 0.11), field_like(P_R_w=1e-2, M_w=40))
    assert b.E_H == pytest.approx(0.89 * 10 * 0.11 * 1e-2, rel=1e-12)
    assert b.E_H == pytest.approx(9.79e-3, rel=1e-12)
    assert b.E_S == pytest.approx(2.2052e-2, rel=1e-4)
    assert b.E_B == pytest.approx(8.9e-7, rel=1e-12)
    assert b.E_D == pytest.approx(1e-5, rel=1e-12)


def test_wide_full_harvest_boundary():
    p = field_like(P_R_w=3e-3)
    b = energy_budget_wide(WideSchedule(0.5, 1.0), p)
    assert b.E_H == pytest.approx(0.5 * p.T * p.eta * p.P_R_w, rel=1e-15)


def test_schedule_contracts():
    with pytest.raises(ContractError):
        NarrowSchedule(0.5, 0.2, 0.2)  # double sensing sums to 1.1
    with pytest.raises(ContractError):
        NarrowSchedule(0.5, 0.2, 0.2, SensingVariant.SINGLE)
    NarrowSchedule(0.6, 0.2, 0.2, SensingVariant.SINGLE)
    with pytest.raises(ContractError):
        WideSchedule(1.2, 0.5)
    with pytest.raises(ContractError):
        WideSchedule(0.5, -0.1)


def test_causality_examples():
    assert causality_satisfied(EnergyBudget(1.0, 0.5, 0.25, 0.25))
    assert not causality_satisfied(EnergyBudget(1.0, 0.5, 0.25, 0.25 + 1e-9))
    single = energy_budget_narrow(NarrowSchedule(0.78, 0.11, 0.11, SensingVariant.SINGLE), field_like())
    double = energy_budget_narrow(NarrowSchedule(0.67, 0.11, 0.11, SensingVariant.DOUBLE), field_like())
    # one sensing slot is affordable at these constants, two are not
    assert causality_satisfied(single)
    assert not causality_satisfied(double)
    assert double.E_S + double.E_D > double.E_H


schedules = st.tuples(st.floats(0.01, 0.3), st.floats(0.01, 0.3))


@settings(max_examples=60)
@given(schedules, st.floats(0.1, 100))
def test_budget_linear_in_T(km, T):
    kappa, mu = km
    s = NarrowSchedule(1 - 2 * kappa - mu, kappa, mu)
    p = field_like(T=T)
    a = energy_budget_narrow(s, p)
    b = energy_budget_narrow(s, p.replace(T=2 * T))
    for name in ("E_H", "E_S", "E_B", "E_D"):
        assert getattr(b, name) == 2 * getattr(a, name)
    w = WideSchedule(kappa, mu)
    a, b = energy_budget_wide(w, p), energy_budget_wide(w, p.replace(T=2 * T))
    for name in ("E_H", "E_S", "E_B", "E_D"):
        assert getattr(b, name) == 2 * getattr(a, name)


def test_monotone_terms():
    p = field_like(P_R_w=1e-2)
    mus = [0.05 * k for k in range(1, 15)]
    eh = [energy_budget_narrow(NarrowSchedule(0.98 - m, 0.01, m), p).E_H for m in mus]
    assert all(b > a for a, b in zip(eh, eh[1:]))
    gam = [0.05 * k for k in range(1, 19)]
    eh = [energy_budget_wide(WideSchedule(0.2, g), p).E_H for g in gam]
    assert all(b > a for a, b in zip(eh, eh[1:]))
    alph = [0.05 * k for k in range(1, 19)]
    ew = [energy_budget_wide(WideSchedule(a, 0.5), p) for a in alph]
    assert all(b.E_H < a.E_H and b.E_S > a.E_S for a, b in zip(ew, ew[1:]))

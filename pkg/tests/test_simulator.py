import math

import numpy as np
import pytest

from ccbo.errors import DomainError, UnknownFixtureError
from ccbo.fixtures import CSV_COLUMNS, load_fixture, parse_history_csv, rows_to_csv
from ccbo.simulator import SimConfig, feasible, max_attainable_size, particle_size, run_experiment
from ccbo.space import DesignPoint, default_space


def _pt(c, q, u, solvent):
    return DesignPoint({"concentration": c, "flow_rate": q, "voltage": u, "solvent": solvent})


def test_size_spot_value():
    # 2*sqrt(30*3.62)/log10(18) + 1 + 0.4 = 18.0038
    s = particle_size(_pt(3.62, 30.0, 18.0, "CHCl3"))
    assert s == pytest.approx(18.00, abs=0.01)


def test_size_zero_flow_limit():
    assert particle_size(_pt(1.0, 0.0, 12.0, "DMAc")) == pytest.approx(0.4)


def test_size_solvent_offset_exact():
    a = particle_size(_pt(2.0, 5.0, 14.0, "CHCl3"))
    b = particle_size(_pt(2.0, 5.0, 14.0, "DMAc"))
    assert a - b == pytest.approx(1.0, abs=1e-12)


def test_size_monotone_structure():
    cfg = SimConfig()
    for qs in ([1.0, 2.0, 10.0, 30.0],):
        sizes = [particle_size(_pt(1.0, q, 14.0, "DMAc"), cfg) for q in qs]
        assert all(x < y for x, y in zip(sizes, sizes[1:]))
    sizes_c = [particle_size(_pt(c, 5.0, 14.0, "DMAc"), cfg) for c in [0.1, 0.5, 2.0, 5.0]]
    assert all(x < y for x, y in zip(sizes_c, sizes_c[1:]))
    sizes_u = [particle_size(_pt(1.0, 5.0, u, "DMAc"), cfg) for u in [10.0, 12.0, 15.0, 18.0]]
    assert all(x > y for x, y in zip(sizes_u, sizes_u[1:]))


def test_size_voltage_domain():
    with pytest.raises(DomainError):
        particle_size(_pt(1.0, 5.0, 1.0, "DMAc"))


def test_feasibility_hand_values():
    assert feasible(_pt(1.0, 1.0, 12.0, "CHCl3")) is True          # ln 1 = 0, 1.4 > 0
    assert feasible(_pt(1.0, 0.2, 12.0, "CHCl3")) is False         # ln 0.2 + 1.4 = -0.209
    assert feasible(_pt(1.0, 20.0, 12.0, "DMAc")) is False         # -ln 20 + 1.4 = -1.596


def test_feasibility_thresholds():
    eps = 1e-9
    q_chcl3 = math.exp(-1.4)
    assert feasible(_pt(1.0, q_chcl3 + 1e-6, 12.0, "CHCl3"))
    assert not feasible(_pt(1.0, q_chcl3 - 1e-6, 12.0, "CHCl3"))
    q_dmac = math.exp(1.4)
    assert feasible(_pt(1.0, q_dmac - 1e-6, 12.0, "DMAc"))
    assert not feasible(_pt(1.0, q_dmac + 1e-6, 12.0, "DMAc"))
    assert eps > 0


def test_feasibility_ignores_concentration_and_voltage():
    for c in (0.05, 1.0, 5.0):
        for u in (10.0, 14.0, 18.0):
            assert feasible(_pt(c, 1.0, u, "CHCl3"))
            assert not feasible(_pt(c, 0.1, u, "CHCl3"))


def test_feasibility_flow_domain():
    with pytest.raises(DomainError):
        feasible(_pt(1.0, 0.0, 12.0, "CHCl3"))


def test_unknown_solvent_rejected():
    with pytest.raises(DomainError):
        particle_size(_pt(1.0, 1.0, 12.0, "THF"))


def test_run_experiment_start_point_infeasible():
    res = run_experiment(_pt(0.50, 0.10, 10.0, "CHCl3"))
    assert not res.feasible
    assert res.size > 0


def test_run_experiment_dmac_low_flow_feasible():
    for q in (0.02, 0.5, 2.0, 4.0):
        assert run_experiment(_pt(1.0, q, 12.0, "DMAc")).feasible


def test_run_experiment_deterministic():
    a = run_experiment(_pt(2.0, 3.0, 15.0, "CHCl3"))
    b = run_experiment(_pt(2.0, 3.0, 15.0, "CHCl3"))
    assert a == b


def test_run_experiment_validates_against_space():
    space = default_space()
    with pytest.raises(DomainError):
        run_experiment(_pt(99.0, 3.0, 15.0, "CHCl3"), space=space)


def test_config_overrides():
    cfg = SimConfig(size_log_base=math.e)
    s_nat = particle_size(_pt(5.0, 60.0, 10.0, "CHCl3"), cfg)
    assert s_nat == pytest.approx(2 * math.sqrt(300) / math.log(10.0) + 1.4, abs=1e-9)
    with pytest.raises(DomainError):
        SimConfig(size_log_base=1.0)


def test_config_round_trip():
    cfg = SimConfig(feas_offset=2.0)
    again = SimConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()


def test_max_attainable_size():
    # extreme corner: c=5, Q=60, U=10 with the CHCl3 offset
    assert max_attainable_size(default_space()) == pytest.approx(36.041, abs=0.01)


# -- bundled datasets -----------------------------------------------------------


def test_fixture_table2_start():
    rows = load_fixture("table2-start")
    assert len(rows) == 5
    s1 = rows[0]
    assert s1.label == "S-1"
    assert s1.point.as_dict() == {
        "concentration": 0.50, "flow_rate": 15.00, "voltage": 10.0, "solvent": "DMAc"
    }
    assert s1.size is None and s1.feasible is None


def test_fixture_lab_init_row():
    rows = {r.label: r for r in load_fixture("table1-lab-init")}
    assert len(rows) == 8
    r = rows["0-3"]
    assert r.size == pytest.approx(15.00)
    assert r.feasible is False
    assert r.point["flow_rate"] == pytest.approx(49.11)


def test_fixture_supp2_final_row():
    rows = {r.label: r for r in load_fixture("supp2-3um")}
    r = rows["4-2"]
    assert r.size == pytest.approx(3.29)
    assert r.feasible is True
    assert r.point["concentration"] == pytest.approx(4.02)


def test_fixture_unknown_name():
    with pytest.raises(UnknownFixtureError):
        load_fixture("nope")


def test_fixture_points_within_bounds():
    space = default_space()
    for name in ("table2-start", "table1-lab-init", "supp1-300nm", "supp2-3um"):
        for row in load_fixture(name):
            space.validate_point(row.point)


def test_csv_round_trip():
    rows = load_fixture("table1-lab-init")
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    parsed = parse_history_csv(text)
    assert len(parsed) == len(rows)
    for a, b in zip(parsed, rows):
        assert a.point.as_dict() == b.point.as_dict()
        assert a.size == b.size and a.feasible == b.feasible


def test_csv_parse_error_reports_row():
    text = "label,concentration,flow_rate,voltage,solvent,size,feasible\nx,bad,1,12,DMAc,1,1\n"
    with pytest.raises(DomainError, match="row 2"):
        parse_history_csv(text)


def test_csv_requires_outcomes_when_asked():
    text = rows_to_csv(load_fixture("table2-start"))
    with pytest.raises(DomainError, match="size and feasible"):
        parse_history_csv(text, require_outcomes=True)
    rows = parse_history_csv(text, require_outcomes=False)
    assert len(rows) == 5

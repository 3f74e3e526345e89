import numpy as np
import pytest

from sawei.benchmarks import (
    SYNTHETIC_IDS,
    load_tabular,
    make_synthetic,
)
from sawei.control import SchedulePolicy
from sawei.errors import EmptyTable, ParseError, UnknownFunction
from sawei.loop import RunConfig, run_bo


def test_unknown_function_rejected():
    with pytest.raises(UnknownFunction):
        make_synthetic("banana", 2, 1)


@pytest.mark.parametrize("fid", SYNTHETIC_IDS)
def test_optimum_value_is_zero(fid):
    obj = make_synthetic(fid, 3, 1)
    assert obj.evaluate_original(obj.x_opt) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("fid", SYNTHETIC_IDS)
def test_objective_nonnegative_on_samples(fid):
    obj = make_synthetic(fid, 2, 2)
    rng = np.random.default_rng(0)
    u = rng.uniform(size=(20000, 2))
    vals = np.array([obj.evaluate(p) for p in u])
    assert vals.min() >= -1e-9


def test_sphere_unit_shift():
    obj = make_synthetic("sphere", 4, 1)
    e1 = np.zeros(4)
    e1[0] = 1.0
    assert obj.evaluate_original(obj.x_opt + e1) == pytest.approx(1.0, abs=1e-12)


def test_instances_differ():
    a = make_synthetic("rastrigin", 3, 1)
    b = make_synthetic("rastrigin", 3, 2)
    assert not np.array_equal(a.x_opt, b.x_opt)


def test_rotation_orthogonal():
    for fid in ("sphere", "schwefel"):
        obj = make_synthetic(fid, 5, 3)
        q = obj.rotation
        assert np.max(np.abs(q.T @ q - np.eye(5))) <= 1e-10


def _write_table(path, rows, header="a,b,objective"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


def test_load_tabular_best_value(tmp_path):
    p = _write_table(tmp_path / "t.csv",
                     ["0,0,0.5", "0,1,0.2", "1,0,0.9"])
    obj = load_tabular(p)
    assert obj.f_opt == 0.2
    assert obj.space.is_discrete and len(obj.space.table) == 3
    assert obj.parameter_names == ("a", "b")


def test_load_tabular_duplicate_rows_rejected(tmp_path):
    p = _write_table(tmp_path / "dup.csv",
                     ["0,0,0.5", "0,0,0.7"])
    with pytest.raises(ParseError):
        load_tabular(p)


def test_load_tabular_schema_errors(tmp_path):
    with pytest.raises(ParseError):
        load_tabular(_write_table(tmp_path / "h.csv", ["1,2,3"], header="a,b,c"))
    with pytest.raises(ParseError):
        load_tabular(_write_table(tmp_path / "w.csv", ["1,2"], header="a,b,objective"))
    with pytest.raises(ParseError):
        load_tabular(tmp_path / "missing.csv")
    (tmp_path / "empty.csv").write_text("a,b,objective\n")
    with pytest.raises(EmptyTable):
        load_tabular(tmp_path / "empty.csv")


def test_load_tabular_json(tmp_path):
    p = tmp_path / "t.json"
    p.write_text('[{"x": 0.0, "objective": 1.5}, {"x": 1.0, "objective": 0.5}]')
    obj = load_tabular(p)
    assert obj.f_opt == 0.5


def test_exhaustive_tabular_run_reaches_optimum(tmp_path):
    rng = np.random.default_rng(5)
    rows = [f"{i},{rng.uniform():.6f},{rng.uniform():.6f}" for i in range(20)]
    p = _write_table(tmp_path / "grid.csv", rows, header="i,b,objective")
    obj = load_tabular(p)
    cfg = RunConfig(init_size=2, bo_budget=20,
                    schedule=SchedulePolicy("static", alpha=0.5), seed=0)
    trace = run_bo(obj, cfg)
    assert trace.rows[-1].regret == 0.0
    assert trace.rows[-1].log10_regret == -10000.0


def test_tabular_lookup_exact(tmp_path):
    p = _write_table(tmp_path / "t.csv", ["0,0,0.5", "0,1,0.2", "1,0,0.9"])
    obj = load_tabular(p)
    vals = sorted(obj.evaluate(row) for row in obj.space.table)
    assert vals == [0.2, 0.5, 0.9]

import pytest

from poisson_widths.config import RunConfig, parse_float_grid, parse_int_grid
from poisson_widths.sweep import SWEEP_FIELDS, grid_points, sweep


def _config(target, grid_q, grid_n="", grid_beta="0", threads=1):
    return RunConfig(
        "sweep",
        target=target,
        grid_q=parse_float_grid(grid_q),
        grid_beta=parse_float_grid(grid_beta),
        grid_n=parse_int_grid(grid_n) if grid_n else (),
        threads=threads,
    ).validate()


def test_grid_order():
    config = _config("width", "0.1,0.2", "1:2", "0,1")
    assert grid_points(config) == [
        (0.1, 0.0, 1), (0.1, 0.0, 2), (0.1, 1.0, 1), (0.1, 1.0, 2),
        (0.2, 0.0, 1), (0.2, 0.0, 2), (0.2, 1.0, 1), (0.2, 1.0, 2),
    ]


@pytest.mark.slow
def test_width_sweep_cardinality():
    rows = sweep(_config("width", "0.1:0.9:0.1", "1:16", "0,1", threads=4))
    assert len(rows) == 288
    assert all(row["error"] is None for row in rows)
    assert [tuple(row)[:3] for row in rows[:1]] == [("q", "beta", "n")]


def test_parallel_rows_keep_grid_order():
    serial = sweep(_config("theta", "0.2,0.5,0.8", "1:4", "0,0.7"))
    parallel = sweep(_config("theta", "0.2,0.5,0.8", "1:4", "0,0.7", threads=3))
    assert serial == parallel
    assert [(r["q"], r["beta"], r["n"]) for r in serial] == grid_points(_config("theta", "0.2,0.5,0.8", "1:4", "0,0.7"))


def test_row_columns():
    rows = sweep(_config("width", "0.3", "2"))
    assert tuple(rows[0]) == SWEEP_FIELDS["width"]
    assert rows[0]["certified"] is False


def test_threshold_sweep_strict():
    rows = sweep(_config("threshold", "0.4925:0.6:0.0125"))
    assert len(rows) == 9
    assert all(row["strict"] is True for row in rows)
    assert all(row["n_q"] > row["n_q_star"] for row in rows)


def test_gamma_sweep_marks_out_of_range():
    rows = sweep(_config("gamma", "0.1", "10,100"))
    inside, outside = rows
    assert inside["in_range"] is True
    assert inside["error"] is None
    assert outside["in_range"] is False
    assert outside["error"].startswith("RangeUnsupported")


def test_sweep_rows_record_errors():
    # n = 0 fails inside the row, the sweep carries on
    config = RunConfig("sweep", target="theta", grid_q=(0.5,), grid_n=(1,), threads=1)
    config.grid_n = (0, 1)
    rows = sweep(config)
    assert rows[0]["error"].startswith("ParameterError")
    assert rows[1]["error"] is None

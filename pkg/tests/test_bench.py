import csv
import io
from fractions import Fraction

import numpy as np
import pytest

from sparsejt import bench, equiv, to_dense
from sparsejt.bench import (CSV_HEADER, MODEL_HEADER, BenchConfig, gen_table_pair, in_band,
                            memory_model_rows, run_bench, write_model, write_records)
from sparsejt.cli import main
from sparsejt.dense import dense_mult


def product_sparsity(a, b):
    dense = dense_mult(to_dense(a), to_dense(b))
    return 1.0 - np.count_nonzero(dense.values) / dense.values.size


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(max_product_cells=0)
    with pytest.raises(ValueError):
        BenchConfig(reps=0)
    with pytest.raises(ValueError):
        BenchConfig(sparsity_bands=[(0.5, 1.0)])


def test_in_band():
    assert in_band(0.0, (0.0, 0.0)) and not in_band(0.1, (0.0, 0.0))
    assert in_band(0.75, (0.01, 0.75)) and not in_band(0.75, (0.75, 0.99))


def test_dense_band_pair():
    a, b = gen_table_pair(0, (0.0, 0.0), 10**4)
    assert set(a.labels) & set(b.labels)
    assert product_sparsity(a, b) == 0.0
    assert a.domain.union(b.domain).statespace_size() <= 10**4


@pytest.mark.parametrize("seed", range(5))
def test_sparse_band_pair(seed):
    a, b = gen_table_pair(seed, (0.75, 0.99), 10**4)
    assert 0.75 < product_sparsity(a, b) <= 0.99
    assert np.all((a.vals > 0) & (a.vals <= 1))


def test_same_seed_same_pair():
    a1, b1 = gen_table_pair(42, (0.01, 0.75), 10**3)
    a2, b2 = gen_table_pair(42, (0.01, 0.75), 10**3)
    assert equiv(a1, a2) and equiv(b1, b2)


def test_unsatisfiable_band():
    with pytest.raises(ValueError):
        gen_table_pair(0, (0.98, 0.99), 4, max_tries=20)


def test_run_bench_schema_and_model():
    records = run_bench(BenchConfig(max_product_cells=10**3, reps=1))
    fh = io.StringIO()
    write_records(records, fh)
    rows = list(csv.reader(io.StringIO(fh.getvalue())))
    assert rows[0] == CSV_HEADER == ["op", "impl", "dense_product_cells", "achieved_sparsity",
                                     "elapsed_seconds", "result_bytes"]
    assert len(rows) == 1 + 3 * 4
    for r in records:
        assert r.elapsed_seconds >= 0 and 0 <= r.achieved_sparsity <= 1
        if r.op == "mult" and r.impl == "dense":
            assert r.result_bytes == 8 * r.dense_product_cells


def test_sparse_bytes_below_dense_when_sparse():
    records = run_bench(BenchConfig(max_product_cells=10**5, sparsity_bands=[(0.75, 0.99)],
                                    reps=3, seed=1))
    mult = [r for r in records if r.op == "mult"]
    for sp, dn in zip(mult[::2], mult[1::2]):
        assert (sp.impl, dn.impl) == ("sparse", "dense")
        if sp.dense_product_cells >= 10**4:
            assert sp.result_bytes < dn.result_bytes


def test_timings_excluded_determinism():
    cfg = BenchConfig(max_product_cells=10**3, reps=2, seed=9)
    a, b = run_bench(cfg), run_bench(cfg)
    strip = lambda rs: [(r.op, r.impl, r.dense_product_cells, r.achieved_sparsity, r.result_bytes)
                        for r in rs]
    assert strip(a) == strip(b)


def test_cross_validation_failure_is_fatal(monkeypatch):
    monkeypatch.setattr(bench, "equiv", lambda *a, **k: False)
    with pytest.raises(bench.BenchValidationError):
        run_bench(BenchConfig(max_product_cells=100, reps=1))


def test_memory_model_rows_exact():
    rows = memory_model_rows()
    assert len(rows) == 8 * 3 * 4
    for r in rows:
        x, k = r["dense_cells"], r["k"]
        y = (1 - Fraction(str(r["sparsity"]))) * x
        assert r["dense_bytes"] == 8 * x
        assert r["sparse_bytes"] == y * (4 * k + 8)
    fh = io.StringIO()
    write_model(rows, fh)
    assert fh.getvalue().splitlines()[0] == ",".join(MODEL_HEADER)


def test_bench_cli(tmp_path):
    out, model = tmp_path / "r.csv", tmp_path / "m.csv"
    buf = io.StringIO()
    code = main(["bench", "--max-cells", "1000", "--band", "0:0", "--band", "0.75:0.99",
                 "--reps", "1", "--out", str(out), "--memory-model-out", str(model)], out=buf)
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 4
    assert len(model.read_text().splitlines()) == 1 + 96
    assert buf.getvalue().startswith("op,impl,n,median_seconds,median_bytes")

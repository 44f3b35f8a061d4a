import numpy as np
import pytest

from sparsejt import (CapacityError, DenseTable, Domain, DomainError, NormalizationError,
                      SparseTable, UnityTable, as_cpt, div, div_unity, equiv, from_dense,
                      get_cell_name, get_val, marg, mem_estimate, mult, mult_unity, normalize,
                      product_size, slice_table, sparsity, to_dense)
from sparsejt.table import (MarginalIndex, SeparatorIndex, table_max, table_min, table_sum,
                            which_max_cell, which_max_idx, which_min_cell, which_min_idx)

from conftest import XYZ, YZW


def cell_map(t):
    """{(state names in label order): value}."""
    return {
        tuple(t.domain.state(l, int(t.cells[i, j])) for i, l in enumerate(t.labels)): float(t.vals[j])
        for j in range(t.ncells)
    }


def test_from_dense_f(sf):
    assert sf.ncells == 4
    assert sf.cells.tolist() == [[1, 2, 2, 2], [1, 1, 2, 1], [1, 1, 1, 2]]
    assert sf.vals.tolist() == [5, 4, 7, 9]


def test_from_dense_g(sg):
    assert sg.vals.tolist() == [7, 6, 6, 9]
    assert to_dense(sg).values.tolist() == [7, 6, 0, 6, 0, 0, 9, 0]


def test_from_dense_all_zero():
    s = from_dense(DenseTable.zeros(XYZ))
    assert s.ncells == 0
    assert to_dense(s).values.tolist() == [0.0] * 8


def test_round_trip(dense_f):
    assert to_dense(from_dense(dense_f)) == dense_f


def test_constructor_rejects_bad_cells():
    d = Domain(["X"], [["a", "b"]])
    with pytest.raises(DomainError):
        SparseTable(d, [[3]], [1.0])
    with pytest.raises(DomainError):
        SparseTable(d, [[1, 1]], [1.0, 2.0])
    with pytest.raises(DomainError):
        SparseTable(d, [[1]], [0.0])
    with pytest.raises(DomainError):
        SparseTable(d, [[1, 2]], [1.0])


def test_cells_are_read_only(sf):
    with pytest.raises(ValueError):
        sf.vals[0] = 1.0


def test_mult_fixture(sf, sg):
    p = mult(sf, sg)
    assert p.labels == ("X", "Y", "Z", "W")
    assert cell_map(p) == {
        ("x1", "y1", "z1", "w1"): 35.0,
        ("x2", "y1", "z1", "w1"): 28.0,
        ("x2", "y2", "z1", "w1"): 42.0,
        ("x2", "y1", "z2", "w2"): 81.0,
    }
    assert equiv(p, sf * sg)


def test_mult_state_conflict(sf):
    other = from_dense(DenseTable(Domain(["Y"], [["y2", "y1"]]), [1, 1]))
    with pytest.raises(DomainError):
        mult(sf, other)


def test_mult_disjoint_is_outer_product(sf):
    w = from_dense(DenseTable(Domain(["W"], [["w1", "w2"]]), [2, 3]))
    p = mult(sf, w)
    assert p.ncells == 8
    assert sorted(p.vals.tolist()) == sorted([v * k for v in (5, 4, 7, 9) for k in (2, 3)])


def test_div_self(sf):
    q = div(sf, sf)
    assert q.ncells == 4 and np.all(q.vals == 1.0)


def test_div_by_marginal(sf):
    q = div(sf, marg(sf, ["X"]))
    got = cell_map(q)
    assert got[("x1", "y1", "z1")] == pytest.approx(5 / 9, abs=1e-15)
    assert got[("x2", "y1", "z1")] == pytest.approx(4 / 9, abs=1e-15)
    assert got[("x2", "y2", "z1")] == 1.0
    assert got[("x2", "y1", "z2")] == 1.0


def test_div_missing_key_drops_cell(sf):
    yz = Domain(["Y", "Z"], [["y1", "y2"], ["z1", "z2"]])
    b = SparseTable(yz, [[1], [1]], [1.0])
    q = div(sf, b)
    assert set(cell_map(q)) == {("x1", "y1", "z1"), ("x2", "y1", "z1")}


def test_div_requires_subset(sf, sg):
    with pytest.raises(DomainError):
        div(sf, sg)


def test_marg_fixtures(sf, sg):
    assert cell_map(marg(sf, ["X"])) == {("y1", "z1"): 9, ("y2", "z1"): 7, ("y1", "z2"): 9}
    assert cell_map(marg(sg, ["Y"])) == {("z2", "w2"): 9, ("z2", "w1"): 6, ("z1", "w1"): 13}


def test_marg_identity_and_full(sf):
    assert equiv(marg(sf, []), sf)
    total = marg(sf, ["X", "Y", "Z"])
    assert total.labels == () and total.vals.tolist() == [25.0]


def test_marg_unknown_label(sf):
    with pytest.raises(DomainError):
        marg(sf, ["Q"])


def test_slice(sf):
    c = as_cpt(sf, ["Z"])
    s = slice_table(c, {"Z": "z1"})
    assert s.labels == ("X", "Y", "Z")
    assert sorted(s.vals.tolist()) == sorted([0.3125, 0.25, 0.4375])
    assert equiv(slice_table(sf, {}), sf)
    assert cell_map(slice_table(sf, {"X": "x1"})) == {("x1", "y1", "z1"): 5.0}
    dropped = sf.slice({"X": "x1"}, drop_sliced=True)
    assert dropped.labels == ("Y", "Z") and dropped.ncells == 1
    with pytest.raises(DomainError):
        slice_table(sf, {"X": "x9"})


def test_as_cpt(sf, sg):
    c = as_cpt(sf, ["Z"])
    assert sorted(c.vals.tolist()) == sorted([0.3125, 0.25, 0.4375, 1.0])
    assert equiv(as_cpt(sf, []), normalize(sf))
    assert np.all(as_cpt(sg, ["Y", "Z"]).vals == 1.0)


def test_normalize(sf):
    n = normalize(sf)
    np.testing.assert_allclose(n.vals, [0.2, 0.16, 0.28, 0.36], rtol=0, atol=1e-15)
    assert equiv(normalize(n), n, atol=1e-15)
    one = SparseTable(Domain(["X"], [["a"]]), [[1]], [7.0])
    assert normalize(one).vals.tolist() == [1.0]
    with pytest.raises(NormalizationError):
        normalize(from_dense(DenseTable.zeros(XYZ)))


def test_mult_unity(sf):
    w = UnityTable(Domain(["W"], [["w1", "w2"]]))
    p = mult_unity(sf, w)
    assert p.ncells == 8
    assert equiv(p, mult(sf, from_dense(DenseTable(w.domain, [1, 1]))))
    assert equiv(sf * UnityTable(XYZ.subdomain(["Y", "Z"])), sf)
    empty = from_dense(DenseTable.zeros(XYZ))
    assert mult_unity(empty, w).ncells == 0


def test_div_unity(sf):
    r = div_unity(UnityTable(XYZ), sf)
    np.testing.assert_array_equal(r.vals, [1 / 5, 1 / 4, 1 / 7, 1 / 9])
    wide = div_unity(UnityTable(XYZ.union(YZW)), sf)
    assert wide.ncells == 8
    assert sorted(wide.vals.tolist()) == sorted([1 / v for v in (5, 4, 7, 9)] * 2)
    ones = from_dense(DenseTable(XYZ, [1.0] * 8))
    assert equiv(div_unity(UnityTable(XYZ), ones), ones)


def test_inspection(sf):
    assert table_sum(sf) == sf.sum() == 25.0
    assert get_cell_name(sf, 1) == {"X": "x2", "Y": "y1", "Z": "z1"}
    assert get_val(sf, ("x1", "y2", "z2")) == 0.0
    assert get_val(sf, {"X": "x2", "Y": "y1", "Z": "z2"}) == 9.0
    assert sparsity(sf) == 0.5
    assert table_max(sf) == 9.0 and table_min(sf) == 4.0
    assert which_max_cell(sf) == 3 and which_min_cell(sf) == 1
    assert which_max_idx(sf) == {"X": "x2", "Y": "y1", "Z": "z2"}
    assert which_min_idx(sf) == {"X": "x2", "Y": "y1", "Z": "z1"}
    with pytest.raises(IndexError):
        get_cell_name(sf, 4)


def test_which_max_tie_takes_first_column():
    t = SparseTable(Domain(["X"], [["a", "b", "c"]]), [[3, 1, 2]], [2.0, 2.0, 1.0])
    assert which_max_cell(t) == 0
    assert which_min_cell(t) == 2


def test_equiv_is_permutation_invariant(sf):
    perm = [3, 1, 0, 2]
    shuffled = SparseTable(sf.domain, sf.cells[:, perm], sf.vals[perm])
    assert equiv(sf, shuffled)
    rows = SparseTable(XYZ.subdomain(["Z", "X", "Y"]), sf.rows(["Z", "X", "Y"]), sf.vals)
    assert equiv(sf, rows)
    assert not equiv(sf, normalize(sf))


def test_mem_estimate():
    binary3 = Domain(["A", "B", "C"], [["0", "1"]] * 3)
    assert mem_estimate(binary3, 0, "dense") == 64
    assert mem_estimate(binary3, 4, "sparse") == 80
    assert mem_estimate(binary3, 0, "sparse") == 0
    huge = Domain([f"V{i}" for i in range(70)], [["0", "1"]] * 70)
    with pytest.raises(CapacityError):
        mem_estimate(huge, 0, "dense")
    with pytest.raises(ValueError):
        mem_estimate(binary3, 1, "other")


def test_separator_and_marginal_index(sf, sg):
    idx = SeparatorIndex(sf, ["Y", "Z"])
    assert idx.lookup == {(1, 1): [0, 1], (2, 1): [2], (1, 2): [3]}
    m = MarginalIndex(sf, ["Y", "Z"])
    assert {k: v for k, (_, v) in m.lookup.items()} == {(1, 1): 9, (2, 1): 7, (1, 2): 9}
    assert product_size(sf, sg) == 4


def test_wide_keys_fall_back_to_ranks():
    # 40 variables with 5 states overflow a 64-bit mixed-radix key.
    labels = [f"V{i}" for i in range(40)]
    d = Domain(labels, [[str(s) for s in range(5)]] * 40)
    rng = np.random.default_rng(1)
    cells = rng.integers(1, 6, size=(40, 30))
    cells[:, 15:] = cells[:, :15]
    a = SparseTable(d, cells[:, :15], rng.random(15) + 0.5)
    extra = Domain(["W"], [["w1", "w2"]])
    b = mult_unity(a, UnityTable(extra))
    p = mult(a, b)
    assert p.ncells == 30
    expected = SparseTable(d, a.cells, a.vals * a.vals)
    assert equiv(marg(p, ["W"]), SparseTable(d, a.cells, 2 * a.vals * a.vals), atol=1e-12)
    assert equiv(mult(a, a), expected)


def test_str_shows_state_names(sf):
    text = str(sf).splitlines()
    assert text[0] == "X Y Z val"
    assert text[1] == "x1 y1 z1 5"

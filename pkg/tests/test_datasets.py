import datetime as dt
import filecmp
import logging
import math
import os

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qwnn.datasets import (
    MoleculeRecord,
    TemperatureData,
    coulomb_matrix,
    coulomb_to_graph,
    element_one_hot,
    great_circle_km,
    import_ghcn,
    import_qm7_mat,
    knn_geo_graph,
    load_temperature,
    load_tu_dataset,
    molecule_samples,
    pad_batch,
    read_molecules,
    split_dataset,
    two_means_1d,
    write_molecules,
    write_temperature,
    write_tu_dataset,
)
from qwnn.exceptions import DataError
from qwnn.graph import build_graph
from qwnn.samples import GraphSample

import oracles

TOY = os.path.join(os.path.dirname(__file__), "..", "fixtures", "tu", "TOY")
TEMP = os.path.join(os.path.dirname(__file__), "..", "fixtures", "temperature")
MOL = os.path.join(os.path.dirname(__file__), "..", "fixtures", "molecules")


# ------------------------------------------------------------- geo graphs


def haversine(a, b, radius=6371.0088):
    lon1, lat1, lon2, lat2 = map(math.radians, (*a, *b))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * radius * math.asin(math.sqrt(h))


def test_great_circle_matches_scalar_formula():
    rng = np.random.default_rng(0)
    pts = np.c_[rng.uniform(-180, 180, 6), rng.uniform(-80, 80, 6)]
    d = great_circle_km(pts)
    for i in range(6):
        for j in range(6):
            assert d[i, j] == pytest.approx(haversine(pts[i], pts[j]), abs=1e-6)


def test_knn_collinear_is_path():
    g = knn_geo_graph([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], k=1)
    assert sorted(g.edges()) == [(0, 1), (1, 2)]


def test_knn_large_k_is_complete():
    pts = np.random.default_rng(1).uniform(-50, 50, (6, 2))
    g = knn_geo_graph(pts, k=5)
    assert len(g.edges()) == 15
    assert len(knn_geo_graph(pts, k=12).edges()) == 15


def test_knn_is_either_selects():
    rng = np.random.default_rng(2)
    pts = np.c_[rng.uniform(-120, -75, 30), rng.uniform(30, 47, 30)]
    k = 3
    d = [[haversine(p, q) for q in pts] for p in pts]
    expect = set()
    for i in range(30):
        near = sorted((j for j in range(30) if j != i), key=lambda j: (d[i][j], j))[:k]
        expect |= {(min(i, j), max(i, j)) for j in near}
    g = knn_geo_graph(pts, k)
    assert set(g.edges()) == expect
    assert g.d_max >= k


def test_knn_duplicate_coordinates_tie_break():
    g = knn_geo_graph([[0, 0], [5, 5], [5, 5], [5, 5]], k=1)
    # station 1's nearest is 2 (lowest index among the zero-distance ties)
    assert (1, 2) in g.edges() and (0, 1) in g.edges()


def test_knn_disconnected_warns(caplog):
    with caplog.at_level(logging.WARNING):
        g = knn_geo_graph([[0, 0], [0.1, 0], [50, 0], [50.1, 0]], k=1)
    assert not g.is_connected()
    assert "components" in caplog.text


def test_knn_validation():
    with pytest.raises(ValueError):
        knn_geo_graph([[0, 0], [1, 1]], k=0)
    with pytest.raises(ValueError):
        knn_geo_graph([0, 1, 2], k=1)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_knn_order_invariant(seed, k):
    rng = np.random.default_rng(seed)
    pts = np.c_[rng.uniform(-120, -75, 15), rng.uniform(30, 47, 15)]
    perm = rng.permutation(15)
    g = knn_geo_graph(pts, k)
    h = knn_geo_graph(pts[perm], k)
    # station perm[i] of the original sits at position i
    mapped = {tuple(sorted((int(perm[u]), int(perm[v])))) for u, v in h.edges()}
    assert mapped == set(g.edges())


def test_knn_fixture_connected():
    temps = load_temperature(os.path.join(TEMP, "stations.csv"), os.path.join(TEMP, "observations.csv"))
    g = knn_geo_graph(temps.coords, 8)
    assert g.is_connected() and g.d_max >= 8


# ------------------------------------------------------------- TU


def test_tu_toy_parse(caplog):
    with caplog.at_level(logging.WARNING):
        ds = load_tu_dataset(TOY)
    assert "remapping" in caplog.text  # graph labels are {-1, 1}
    assert ds.name == "TOY"
    assert ds.graph_label_values == [-1, 1]
    assert ds.labels.tolist() == [1, 0]
    g0, g1 = ds.samples
    assert g0.graph.neighbors == ((1, 2), (0, 2), (0, 1, 3), (2,))
    assert g1.graph.neighbors == ((1,), (0, 2), (1,))
    np.testing.assert_array_equal(g0.x, [[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]])
    np.testing.assert_array_equal(g1.x.argmax(axis=1), [0, 0, 1])
    assert ds.summary() == {"graphs": 2, "average_nodes": 3.5, "max_nodes": 4, "max_degree": 3,
                            "node_classes": 3, "graph_classes": 2}


def test_tu_round_trip_byte_identical(tmp_path):
    ds = load_tu_dataset(TOY)
    write_tu_dataset(ds, tmp_path)
    for f in os.listdir(TOY):
        assert filecmp.cmp(os.path.join(TOY, f), tmp_path / f, shallow=False), f


def test_tu_ringtree_summary():
    ds = load_tu_dataset(os.path.join(os.path.dirname(TOY), "RINGTREE"))
    s = ds.summary()
    assert s["graphs"] == 40 and s["graph_classes"] == 2
    assert all(x.x.sum() == x.n_nodes for x in ds.samples)


def _copy_toy(tmp_path, **replace):
    for f in os.listdir(TOY):
        text = open(os.path.join(TOY, f)).read()
        for key, value in replace.items():
            if f.endswith(key):
                text = value
        (tmp_path / f).write_text(text)
    return tmp_path


def test_tu_dangling_node_id(tmp_path):
    path = _copy_toy(tmp_path, **{"_A.txt": "1, 2\n2, 1\n1, 9\n"})
    with pytest.raises(DataError, match="dangling"):
        load_tu_dataset(path)


def test_tu_cross_graph_edge(tmp_path):
    path = _copy_toy(tmp_path, **{"_A.txt": "4, 5\n"})
    with pytest.raises(DataError, match="two graphs"):
        load_tu_dataset(path)


def test_tu_missing_file(tmp_path):
    _copy_toy(tmp_path)
    os.remove(tmp_path / "TOY_graph_labels.txt")
    with pytest.raises(DataError, match="missing"):
        load_tu_dataset(tmp_path)


def test_tu_label_gap_remapped(tmp_path, caplog):
    path = _copy_toy(tmp_path, **{"_node_labels.txt": "0\n5\n5\n7\n0\n0\n5\n"})
    with caplog.at_level(logging.WARNING):
        ds = load_tu_dataset(path)
    assert "node label" in caplog.text
    assert ds.node_label_values == [0, 5, 7]
    assert ds.samples[0].x.shape[1] == 3


# ------------------------------------------------------------- molecules


def test_coulomb_matrix_definition():
    z = [8, 1, 1]
    r = np.array([[0, 0, 0], [1.0, 0, 0], [0, 2.0, 0]])
    c = coulomb_matrix(z, r)
    assert c[0, 0] == pytest.approx(0.5 * 8**2.4)
    assert c[0, 1] == 8.0 and c[0, 2] == 4.0
    assert c[1, 2] == pytest.approx(1 / math.sqrt(5))
    m = MoleculeRecord(c, z)
    np.testing.assert_allclose(m.distances()[1, 2], math.sqrt(5))


def test_molecule_record_validation():
    c = coulomb_matrix([1, 1], [[0, 0, 0], [1, 0, 0]])
    bad = c.copy()
    bad[0, 1] = 2.0
    with pytest.raises(DataError, match="symmetric"):
        MoleculeRecord(bad, [1, 1])
    with pytest.raises(DataError, match="diagonal"):
        MoleculeRecord(c, [6, 6])
    coincident = c.copy()
    coincident[0, 1] = coincident[1, 0] = 0.0
    with pytest.raises(DataError, match="zero"):
        MoleculeRecord(coincident, [1, 1]).distances()


def test_two_means_example():
    labels, centers = two_means_1d([1.0, 1.1, 5.0])
    assert labels.tolist() == [0, 0, 1]
    np.testing.assert_allclose(centers, [1.05, 5.0])
    assert oracles.brute_two_means([1.0, 1.1, 5.0]) == 1.1


@given(st.lists(st.floats(0.5, 1.0), min_size=1, max_size=8), st.lists(st.floats(8.0, 9.0), min_size=1, max_size=8))
def test_two_means_matches_brute_force_on_separated_data(low, high):
    x = np.array(low + high)
    labels, _ = two_means_1d(x)
    cut = oracles.brute_two_means(x)
    np.testing.assert_array_equal(labels, (x > cut).astype(int))


@given(st.lists(st.floats(0.1, 100.0), min_size=2, max_size=12))
def test_two_means_is_threshold_split(values):
    x = np.array(values)
    assume(x.min() < x.max())
    labels, _ = two_means_1d(x)
    assert x[labels == 0].max() < x[labels == 1].min()


def _record(distances_points, z):
    return MoleculeRecord.from_geometry(z, distances_points)


def test_coulomb_graph_two_atoms():
    g = coulomb_to_graph(_record([[0, 0, 0], [3.0, 0, 0]], [1, 1]))
    assert g.edges() == [(0, 1)]


def test_coulomb_graph_three_atoms_short_pairs():
    # sides 1.0, 1.1 and a long third side; only the short pairs become bonds
    a = np.array([0.0, 0.0, 0.0])
    b = np.array([1.0, 0.0, 0.0])
    c = np.array([-1.1, 0.0, 0.0])  # |bc| = 2.1
    rec = _record([a, b, c], [6, 1, 1])
    d = rec.distances()
    assert sorted([d[0, 1], d[0, 2], d[1, 2]]) == pytest.approx([1.0, 1.1, 2.1])
    g = coulomb_to_graph(rec)
    assert sorted(g.edges()) == [(0, 1), (0, 2)]


def test_coulomb_graph_repair_adds_nearest_excluded_pair():
    # two tight pairs far apart: the short cluster is {01, 23}, repair adds the nearest cross pair
    pts = [[0, 0, 0], [1, 0, 0], [6, 0, 0], [7, 0, 0]]
    g, repairs = coulomb_to_graph(_record(pts, [1, 1, 1, 1]), return_repairs=True)
    assert repairs == 1
    assert sorted(g.edges()) == [(0, 1), (1, 2), (2, 3)]
    with pytest.raises(DataError):
        coulomb_to_graph(_record([[0, 0, 0]], [1]))


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 2.0, 3.7, 10.0]))
def test_coulomb_graph_scale_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    pts = rng.normal(size=(n, 3)) * 1.5
    z = rng.choice([1, 6, 7, 8], n)
    g = coulomb_to_graph(_record(pts, z))
    h = coulomb_to_graph(_record(pts * scale, z))
    assert sorted(g.edges()) == sorted(h.edges())
    assert g.is_connected()


def test_molecule_file_round_trip(tmp_path):
    assert len(read_molecules(os.path.join(MOL, "toy.txt"))) == 20
    path = tmp_path / "m.txt"
    write_molecules(path, [[8, 1]], [[[0.0, 0.0, 0.0], [0.96, 0.0, 0.0]]], [-12.5])
    text = path.read_text()
    back = read_molecules(path)
    assert back[0].energy == -12.5 and back[0].distances()[0, 1] == pytest.approx(0.96)
    write_molecules(path, [[8, 1]], [[[0.0, 0.0, 0.0], [0.96, 0.0, 0.0]]], [-12.5])
    assert path.read_text() == text == "2\n8 0.0 0.0 0.0\n1 0.96 0.0 0.0\n-12.5\n"


def test_molecule_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2\n1 0 0 0\n1 1 0\n-3.0\n")
    with pytest.raises(DataError):
        read_molecules(p)


def test_molecule_samples_features():
    recs = read_molecules(os.path.join(MOL, "toy.txt"))
    samples = molecule_samples(recs)
    assert all(s.graph.is_connected() for s in samples)
    assert samples[0].x.shape[1] == 5
    with pytest.raises(DataError):
        element_one_hot([2])


def test_import_qm7_mat(tmp_path):
    from scipy.io import savemat

    z = np.zeros((5, 4))
    r = np.zeros((5, 4, 3))
    for i in range(5):
        z[i, :3] = [8, 1, 1]
        r[i, :3] = [[0, 0, 0], [1.8, 0, 0], [-0.4, 1.7, 0]]
    savemat(tmp_path / "qm7.mat", {"Z": z, "R": r, "T": -np.arange(5.0)[None], "P": np.array([[0, 1, 2, 3, 4]]).reshape(5, 1)})
    n = import_qm7_mat(tmp_path / "qm7.mat", tmp_path / "out.txt", tmp_path / "folds.txt")
    assert n == 5
    recs = read_molecules(tmp_path / "out.txt")
    assert [r.n_atoms for r in recs] == [3] * 5
    assert np.loadtxt(tmp_path / "folds.txt", dtype=int).tolist() == [0, 1, 2, 3, 4]


# ------------------------------------------------------------- temperature


def test_temperature_fixture_drops_incomplete_day():
    temps = load_temperature(os.path.join(TEMP, "stations.csv"), os.path.join(TEMP, "observations.csv"))
    assert len(temps.station_ids) == 12
    assert len(temps.dates) == 44
    assert dt.date(2009, 3, 21) not in temps.dates
    g = knn_geo_graph(temps.coords, 8)
    samples = temps.samples(g)
    # the gap around the dropped day loses two consecutive pairs
    assert len(samples) == 42
    np.testing.assert_array_equal(samples[0].y[:, 0], temps.tmax[1])


def test_temperature_round_trip(tmp_path):
    data = TemperatureData(["A", "B"], np.array([[0.0, 1.0], [2.0, 3.0]]), [dt.date(2020, 1, 1), dt.date(2020, 1, 2)],
                           np.array([[1.5, 2.5], [3.5, 4.5]]))
    write_temperature(data, tmp_path / "s.csv", tmp_path / "o.csv")
    back = load_temperature(tmp_path / "s.csv", tmp_path / "o.csv")
    assert back.station_ids == ["A", "B"] and back.dates == data.dates
    np.testing.assert_array_equal(back.tmax, data.tmax)


def test_temperature_errors(tmp_path):
    (tmp_path / "s.csv").write_text("station_id,lon,lat\nA,0,0\n")
    (tmp_path / "o.csv").write_text("date,station_id,tmax\n2020-01-01,Z,3\n")
    with pytest.raises(DataError, match="unknown station"):
        load_temperature(tmp_path / "s.csv", tmp_path / "o.csv")
    (tmp_path / "o.csv").write_text("date,station,tmax\n")
    with pytest.raises(DataError, match="missing columns"):
        load_temperature(tmp_path / "s.csv", tmp_path / "o.csv")
    with pytest.raises(DataError, match="missing file"):
        load_temperature(tmp_path / "nope.csv", tmp_path / "o.csv")


def _dly_line(sid, year, month, values):
    # fixed width: value(5) mflag qflag sflag per day
    out = f"{sid:<11}{year:04d}{month:02d}TMAX"
    for v in values:
        raw = -9999 if v is None else (100 if v == "bad" else v)
        qflag = "X" if v == "bad" else " "
        out += f"{raw:>5d} {qflag} "
    return out


def test_import_ghcn(tmp_path):
    dly = tmp_path / "dly"
    dly.mkdir()
    days = [250, 261, None, 240] + [None] * 27
    other = [100, "bad", 120, 130] + [None] * 27
    (dly / "USW00000001.dly").write_text(_dly_line("USW00000001", 2009, 3, days) + "\n")
    (dly / "USW00000002.dly").write_text(_dly_line("USW00000002", 2009, 3, other) + "\n")
    inv = tmp_path / "stations.txt"
    inv.write_text("USW00000001  40.0000  -75.0000\nUSW00000002  41.0000  -76.0000\n")
    data = import_ghcn(dly, inv, tmp_path / "out")
    # day 2 has a quality flag at station 2, day 3 is missing at station 1
    assert data.dates == [dt.date(2009, 3, 1), dt.date(2009, 3, 4)]
    np.testing.assert_allclose(data.tmax, [[25.0, 10.0], [24.0, 13.0]])
    np.testing.assert_allclose(data.coords[0], [-75.0, 40.0])
    assert (tmp_path / "out" / "observations.csv").exists()


# ------------------------------------------------------------- splits and padding


def test_thirds_chronological():
    s = split_dataset(9, "thirds")
    assert s.train.tolist() == [0, 1, 2] and s.validation.tolist() == [3, 4, 5] and s.test.tolist() == [6, 7, 8]


def test_kfold_sizes_and_cover():
    folds = [split_dataset(10, "kfold", fold=f, k=5, seed=3).test for f in range(5)]
    assert all(len(f) == 2 for f in folds)
    assert sorted(np.concatenate(folds).tolist()) == list(range(10))
    s = split_dataset(10, "kfold", fold=1, k=5, seed=3)
    assert not set(s.train) & set(s.test) and not set(s.train) & set(s.validation)
    np.testing.assert_array_equal(s.validation, folds[2])


def test_kfold_errors_and_fixed_ids():
    with pytest.raises(DataError):
        split_dataset(3, "kfold", k=5)
    with pytest.raises(DataError):
        split_dataset(3, "unknown")
    s = split_dataset(6, "kfold", fold=0, fold_ids=[0, 1, 2, 0, 1, 2])
    assert s.test.tolist() == [0, 3] and s.validation.tolist() == [1, 4] and s.train.tolist() == [2, 5]


@given(st.lists(st.integers(0, 3), min_size=4, max_size=60), st.integers(0, 1000))
def test_stratified_preserves_ratios(labels, seed):
    labels = np.array(labels)
    s = split_dataset(len(labels), "stratified", labels=labels, seed=seed)
    all_idx = np.concatenate([s.train, s.validation, s.test])
    assert sorted(all_idx.tolist()) == list(range(len(labels)))
    for c in np.unique(labels):
        n_c = int((labels == c).sum())
        for part, frac in zip((s.train, s.validation, s.test), (0.8, 0.1, 0.1)):
            assert abs(int((labels[part] == c).sum()) - frac * n_c) <= 1


def test_pad_batch():
    g1 = build_graph([], 1)
    s = GraphSample(g1, np.array([[2.0]]), 1.0)
    (p,) = pad_batch([s], 3)
    assert p.n_nodes == 3 and p.graph.neighbors == ((), (), ())
    assert p.mask.tolist() == [True, False, False]
    np.testing.assert_array_equal(p.x[:, 0], [2, 0, 0])
    g = build_graph([(0, 1)], 2)
    same = GraphSample(g, np.ones((2, 1)), 0.0)
    assert pad_batch([same], 2)[0] is same
    with pytest.raises(DataError):
        pad_batch([same], 1)

import numpy as np
import pytest

import eulsolve as es


def test_three_cycle_solve():
    lap = es.build_laplacian([(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], 3)
    assert lap.eulerian
    dense = lap.to_dense()
    expect = np.array([[1, 0, -1], [-1, 1, 0], [0, -1, 1]], dtype=float)
    np.testing.assert_allclose(dense, expect)

    chain = es.build_chain(lap, seed=3)
    x, report = es.solve(lap, np.array([1.0, 0.0, -1.0]), chain)
    np.testing.assert_allclose(x, [1 / 3, 1 / 3, -2 / 3], atol=1e-8)
    assert not report["stagnated"]


def test_generated_instance_against_numpy():
    lap = es.gen("random_eulerian", 120, 800, seed=11)
    assert es.is_eulerian(lap)
    chain = es.build_chain(lap, seed=12)
    rng = np.random.default_rng(5)
    b = rng.standard_normal(120)
    b -= b.mean()
    x, report = es.solve(lap, b, chain, eps=1e-8)

    dense = lap.to_dense()
    xref = np.linalg.pinv(dense) @ b
    u = 0.5 * (dense + dense.T)
    err = x - xref
    rel = np.sqrt(err @ u @ err) / np.sqrt(xref @ u @ xref)
    assert rel <= 1e-8
    assert report["iterations"] > 0


def test_exact_schur_and_pbe():
    lap = es.gen("cycle", 3)
    sc = es.exact_schur(lap.to_dense(), [0])
    np.testing.assert_allclose(sc, [[1, -1], [-1, 1]], atol=1e-12)
    lk, ak = es.exact_pbe(lap, [0], 1)
    np.testing.assert_allclose(lk, [[1, 0, -1], [-1, 2, -1], [0, -2, 2]], atol=1e-12)
    value, kernel_ok = es.asym_measure(
        0.5 * (lap.to_dense().T - lap.to_dense()), es.undirectify(lap)
    )
    assert kernel_ok
    assert value == pytest.approx(1 / np.sqrt(3), abs=1e-9)


def test_find_rcdd_and_sparse_schur():
    lap = es.gen("random_eulerian", 80, 500, seed=21)
    f = es.find_rcdd(lap, alpha=0.25, seed=2)
    assert len(f) >= 80 / 20
    s = es.sparse_schur(lap, f, delta=0.5, seed=3)
    assert s.eulerian
    assert s.n == 80 - len(f)


def test_chain_roundtrip(tmp_path):
    lap = es.gen("debruijn", 64)
    chain = es.build_chain(lap, seed=9)
    chain.save(str(tmp_path / "chain"))
    back = es.load_chain(str(tmp_path / "chain"))
    assert back.depth == chain.depth
    assert back.level_sizes == chain.level_sizes
    rep = es.validate_chain(back, lap)
    assert rep["all_ok"]

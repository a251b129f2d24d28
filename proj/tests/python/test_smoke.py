import numpy as np
import pytest

import cpair


def test_uniform_chain_solve_commutes():
    A, B = cpair.generate("uniform_chain", N=32)
    assert A.shape == (32, 32) and A.dtype == np.complex128
    np.testing.assert_allclose(np.diag(B).real, np.arange(1, 33) / 32)
    r = cpair.solve(A, B)
    assert r["mode"] == "tridiag"
    V, a, b = r["V"], r["a_prime"], r["b_prime"]
    np.testing.assert_allclose(V.conj().T @ V, np.eye(32), atol=1e-9)
    Ap = V @ np.diag(a) @ V.conj().T
    Bp = V @ np.diag(b) @ V.conj().T
    assert cpair.commutator_norm(Ap, Bp) <= 1e-10 * 32
    assert abs(cpair.op_norm(A - Ap) - r["err_A"]) <= 1e-9
    assert abs(cpair.op_norm(B - Bp) - r["err_B"]) <= 1e-9


def test_real_input_and_block_mode():
    A, B = cpair.generate("spin_pair", S=4)
    r = cpair.solve(A.real.astype(np.float64) + 1j * A.imag, B, mode="block")
    assert r["mode"] == "block"
    assert r["commutator_residual"] <= 1e-10 * A.shape[0]
    d = np.diag(np.linspace(-1, 1, 6))
    r2 = cpair.solve(d, d)
    assert r2["commutator_residual"] <= 1e-12


def test_errors_map_to_python_exceptions():
    A, B = cpair.generate("random_pair", dim=16, seed=1)
    with pytest.raises(cpair.ValidationError):
        cpair.solve(A, B, mode="tridiag")
    with pytest.raises(ValueError):
        cpair.solve(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
    with pytest.raises(ValueError):
        cpair.solve(A, B[:8, :8])
    with pytest.raises(cpair.ValidationError):
        cpair.generate("no_such_kind")


def test_generate_is_deterministic():
    a = cpair.generate("random_pair", dim=16, seed=7)
    b = cpair.generate("random_pair", dim=16, seed=7)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert len(cpair.generate("spin_triple", S=2)) == 3


def test_verify_coarse_grid():
    rep = cpair.verify_lemma4(grid=1e-2)
    assert rep["pass"]
    first = rep["certificates"][0]
    assert abs(first["max_G"] - 25 / 12) <= 1e-4
    assert first["argmax"]["x"] == 0.0


def test_povm_and_filters():
    ops = cpair.generate("spin_pair", S=5)
    rep = cpair.povm_report(ops, samples=300, seed=1)
    assert rep["num_operators"] == 2
    assert rep["completeness_residual"] <= 1e-10
    assert rep["positivity_min_eig"] >= -1e-10
    assert len(rep["ms_error_exact"]) == 2
    assert cpair.partition_check(8, 2001) <= 1e-10
    assert cpair.smooth_filter(0.0, 0.0, 1.0, 0.5) == pytest.approx(0.5, abs=1e-12)
    assert cpair.c0() > 0


def test_scaling_and_lr():
    rep = cpair.scaling_study("uniform_chain", [16, 24, 32, 48])
    assert len(rep["rows"]) == 4
    assert rep["csv"].startswith("family,param,seed,")
    lr = cpair.check_lr(instances=1)
    assert lr["pass"] and lr["checks"] > 0

import numpy as np
import pytest

from hstarcat.numcore import (
    DEFAULT_TOL,
    NegativeEigenvalue,
    NotHermitian,
    NotProjection,
    Tolerance,
    cmatrix_from_json,
    cmatrix_to_json,
    hermitian_sqrt,
    split_projection,
    unitarity_defect,
)


def test_tolerance_bound():
    t = Tolerance(1e-9, 1e-6)
    assert t.bound() == pytest.approx(1e-9 + 1e-6)
    assert t.bound(100.0) == pytest.approx(1e-9 + 1e-4)
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)


def test_cmatrix_json_round_trip():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    back = cmatrix_from_json(cmatrix_to_json(m))
    assert np.allclose(back, m)
    assert cmatrix_from_json([]).shape == (0, 0)


def test_hermitian_sqrt():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    p = a @ a.conj().T  # PSD
    r = hermitian_sqrt(p)
    assert np.linalg.norm(r @ r - p) < 1e-10 * np.linalg.norm(p)
    assert np.linalg.norm(r - r.conj().T) < 1e-10
    with pytest.raises(NotHermitian):
        hermitian_sqrt(a)
    with pytest.raises(NegativeEigenvalue):
        hermitian_sqrt(-np.eye(3))


def test_split_projection():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    p = q[:, :2] @ q[:, :2].conj().T
    v = split_projection(p)
    assert v.shape == (6, 2)
    assert np.linalg.norm(v.conj().T @ v - np.eye(2)) < 1e-10
    assert np.linalg.norm(v @ v.conj().T - p) < 1e-10
    with pytest.raises(NotProjection):
        split_projection(0.5 * np.eye(3))


def test_split_projection_deterministic():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    p = q[:, :3] @ q[:, :3].T
    assert np.array_equal(split_projection(p), split_projection(p.copy()))


def test_unitarity_defect():
    rng = np.random.default_rng(4)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    assert unitarity_defect(q) < 1e-12
    assert unitarity_defect(2 * q) == pytest.approx(3 * 2, rel=1e-10)
    assert DEFAULT_TOL.bound() == pytest.approx(2e-9)

import numpy as np
import pytest

from hstarcat import hilb2
from hstarcat.hilb2 import DagFunctor, H2Morphism, TwoHilbertSpace


def _space():
    return TwoHilbertSpace(("x", "y", "z"), (1.0, 1.618, 2.414))


def test_trace_and_inner():
    sp = _space()
    o = sp.obj((2, 1, 0))
    f = H2Morphism.identity(o)
    assert f.trace() == pytest.approx(2 * 1.0 + 1 * 1.618)
    rng = np.random.default_rng(0)
    g = H2Morphism.random(o, o, rng)
    assert g.inner(g).real > 0
    assert g.inner(g).real == pytest.approx(g.norm() ** 2)


def test_yoneda_gram_identity():
    sp = _space()
    c = sp.obj((3, 2, 1))
    summands, cert = hilb2.yoneda_decompose(c)
    assert cert.ok
    assert [s[0] for s in summands] == ["x", "y", "z"]
    for _, _, m, gram in summands:
        assert np.linalg.norm(gram - np.eye(m)) < 1e-12


def test_unitary_adjoint_mate_grams():
    sp = _space()
    tgt = TwoHilbertSpace(("p", "q"), (0.5, 3.0))
    F = DagFunctor(sp, tgt, ((1, 0, 2), (0, 3, 1)))
    G, cert = hilb2.unitary_adjoint(F)
    assert cert.ok
    assert np.array_equal(np.asarray(G.matrix), np.asarray(F.matrix).T)
    assert hilb2.mate_scale(F, 0, 1) == pytest.approx(np.sqrt(3.0 / 1.0))


def test_round_trip_recovers_dims():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = int(rng.integers(1, 5))
        dims = tuple(float(d) for d in rng.uniform(0.1, 10.0, n))
        sp = TwoHilbertSpace(tuple(f"s{i}" for i in range(n)), dims)
        recovered, cert = hilb2.round_trip(sp)
        assert cert.ok
        assert recovered.dims == pytest.approx(dims)


def test_isometry_check_rejects_collapse():
    sp = TwoHilbertSpace(("a", "b"), (1.0, 1.0))
    tgt = TwoHilbertSpace(("c",), (1.0,))
    F = DagFunctor(sp, tgt, ((1, 1),))
    assert not hilb2.isometry_check(F).ok


def test_isometry_check_rejects_dim_gap():
    sp = TwoHilbertSpace(("a",), (1.0,))
    tgt = TwoHilbertSpace(("c",), (2.0,))
    F = DagFunctor(sp, tgt, ((1,),))
    assert not hilb2.isometry_check(F).ok


def test_functor_trace():
    sp = TwoHilbertSpace(("a",), (2.0,))
    tgt = TwoHilbertSpace(("c",), (3.0,))
    F = DagFunctor(sp, tgt, ((2,),))
    val = hilb2.functor_trace(F, {0: {0: np.eye(2)}})
    assert val == pytest.approx(2.0 * 3.0 * 2)


def test_shape_errors():
    sp = _space()
    o = sp.obj((1, 0, 0))
    p = sp.obj((0, 1, 0))
    with pytest.raises(hilb2.ShapeMismatch):
        H2Morphism.identity(o).compose(H2Morphism.identity(p))
    with pytest.raises(ValueError):
        TwoHilbertSpace(("a",), (-1.0,))

import numpy as np
import pytest

from hstarcat import bundled, deligne, intalg
from hstarcat.diagram import Engine
from hstarcat.fusion import SphericalWeight, udf_from_weight

PHI = (1 + np.sqrt(5)) / 2


def _eng(name, psis=None):
    data = bundled.load(name)
    psi = SphericalWeight(psis if psis else tuple(1.0 for _ in data.units))
    return Engine(data, udf_from_weight(data, psi))


def _regular_ladder(eng, a, b):
    return deligne.LadderObject(
        deligne.RegularRight(eng),
        deligne.RegularLeft(eng),
        eng.simple_obj(a),
        eng.simple_obj(b),
    )


def test_hom_dims_sum_over_middle():
    eng = _eng("hilb_z2")
    L = _regular_ladder(eng, "1", "1")
    # only the middle c = 1 contributes: Hom(1 -> 1<|1) x Hom(1|>1 -> 1)
    assert deligne.ladder_hom_dim(L, L) == 1
    eng = _eng("fibonacci")
    L = _regular_ladder(eng, "t", "t")
    # middles 1 and t contribute 1 each
    assert deligne.ladder_hom_dim(L, L) == 2


def test_identity_and_trace_formula():
    for name, psis, pairs in [
        ("fibonacci", (1.0,), [("1", "t"), ("t", "t")]),
        ("m2_hilb", (1.0, 2.0), [("12", "21"), ("11", "12")]),
    ]:
        eng = _eng(name, psis)
        for a, b in pairs:
            if eng.data.t(a) != eng.data.s(b):
                continue
            L = _regular_ladder(eng, a, b)
            ident = deligne.identity_ladder(L)
            d1 = eng.udf.d(eng.data.t(a))
            expected = eng.udf.d(a) * eng.udf.d(b) / d1
            assert deligne.ladder_trace(ident).real == pytest.approx(expected)


def test_ladder_traciality():
    eng = _eng("ising", (0.7,))
    rng = np.random.default_rng(0)
    L = _regular_ladder(eng, "s", "s")
    for _ in range(10):
        F = deligne.random_ladder(L, L, rng)
        G = deligne.random_ladder(L, L, rng)
        t1 = deligne.ladder_trace(deligne.ladder_compose(F, G))
        t2 = deligne.ladder_trace(deligne.ladder_compose(G, F))
        assert abs(t1 - t2) < 1e-9 * max(1.0, abs(t1))


def test_dagger_preserves_trace_form():
    eng = _eng("fibonacci")
    rng = np.random.default_rng(1)
    L = _regular_ladder(eng, "t", "t")
    F = deligne.random_ladder(L, L, rng)
    ip = deligne.ladder_trace(deligne.ladder_compose(deligne.ladder_dagger(F), F))
    assert ip.real > 0
    assert abs(ip.imag) < 1e-9 * ip.real


def test_realize_regular_is_functorial():
    eng = _eng("ising")
    rng = np.random.default_rng(2)
    L = _regular_ladder(eng, "s", "s")
    F = deligne.random_ladder(L, L, rng)
    G = deligne.random_ladder(L, L, rng)
    lhs = deligne.realize_regular(deligne.ladder_compose(F, G))
    rhs = eng.compose(deligne.realize_regular(F), deligne.realize_regular(G))
    assert eng.residual(lhs, rhs) < 1e-9


def test_right_action_isometry_regular():
    for name in ("hilb_z2", "fibonacci", "ising"):
        eng = _eng(name)
        mside = deligne.RegularRight(eng)
        cert = deligne.right_action_isometry(
            mside, eng, [eng.simple_obj(c) for c in eng.data.simples], samples=5
        )
        assert cert.ok, cert.residuals


def test_right_action_isometry_module_side():
    eng = _eng("ising")
    A = intalg.group_algebra(eng, ("1", "p"))
    mside = deligne.LeftModulesRight(A)
    mods = [deligne.free_left_module(A, c) for c in ("1", "s")]
    cert = deligne.right_action_isometry(mside, eng, mods, samples=5)
    assert cert.ok, cert.residuals


def test_shape_mismatch():
    eng = _eng("fibonacci")
    L1 = _regular_ladder(eng, "1", "1")
    L2 = _regular_ladder(eng, "t", "t")
    rng = np.random.default_rng(3)
    F = deligne.random_ladder(L1, L1, rng)
    G = deligne.random_ladder(L2, L2, rng)
    with pytest.raises(deligne.ShapeMismatch):
        deligne.ladder_compose(F, G)

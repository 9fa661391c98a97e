import numpy as np
import pytest

from hstarcat import bundled
from hstarcat.fusion import (
    FusionData,
    SchemaError,
    SphericalWeight,
    loop_eval,
    renorm_scalar,
    udf_from_weight,
    validate,
)

PHI = (1 + np.sqrt(5)) / 2


@pytest.mark.parametrize("name", bundled.NAMES)
def test_bundled_validate(name):
    cert = validate(bundled.load(name))
    assert cert.ok
    assert cert.residuals["pentagon"] < 1e-12
    assert cert.residuals["f_unitarity"] < 1e-12


def test_corrupt_fibonacci_fails_pentagon():
    data = bundled.load("fibonacci_corrupt", trust=True)
    cert = validate(data)
    assert not cert.ok
    assert cert.failed_axiom == "pentagon"
    # the corruption keeps F unitary on purpose
    assert cert.residuals["f_unitarity"] < 1e-12


def test_load_rejects_negative_control():
    with pytest.raises(SchemaError):
        bundled.load("fibonacci_corrupt")


def test_fpdims():
    fib = bundled.load("fibonacci")
    assert fib.fpdim("t") == pytest.approx(PHI)
    assert fib.fpdim_total() == pytest.approx(1 + PHI**2)
    ising = bundled.load("ising")
    assert ising.fpdim("s") == pytest.approx(np.sqrt(2))
    assert ising.fpdim_total() == pytest.approx(4.0)


def test_components():
    m2 = bundled.load("m2_hilb")
    comps = m2.components()
    assert len(comps) == 1  # connected by the off-diagonal simples
    z2 = bundled.load("hilb_z2")
    assert len(z2.components()) == 1


def test_udf_dims_formula():
    m2 = bundled.load("m2_hilb")
    psi = SphericalWeight((1.0, 4.0))
    udf = udf_from_weight(m2, psi)
    # d_c = sqrt(psi_s psi_t) FPdim(c)
    assert udf.d("11") == pytest.approx(1.0)
    assert udf.d("22") == pytest.approx(4.0)
    assert udf.d("12") == pytest.approx(2.0)
    assert udf.dim_left("12") == pytest.approx(2.0)
    assert udf.dim_right("12") == pytest.approx(0.5)


@pytest.mark.parametrize("name", bundled.NAMES)
def test_loops_match_dims(name):
    data = bundled.load(name)
    rng = np.random.default_rng(11)
    for _ in range(5):
        psi = SphericalWeight(tuple(rng.uniform(0.2, 3.0, len(data.units))))
        udf = udf_from_weight(data, psi)
        for c in data.simples:
            assert abs(loop_eval(udf, c, "L") - udf.d(c) / udf.d(data.s(c))) < 1e-9
            assert abs(loop_eval(udf, c, "R") - udf.d(c) / udf.d(data.t(c))) < 1e-9


def test_renorm_scalar_formula():
    fib = bundled.load("fibonacci")
    psi = SphericalWeight((1.3,))
    v, pre = renorm_scalar(fib, psi)
    expected = fib.fpdim_total() * 1.3**2 / 1.3  # FPdim * psi(id) / k^2, k = psi_1... v_1
    assert v["1"] == pytest.approx(expected)
    assert pre["1"] == pytest.approx(1.0 / expected)
    # m2 with non-uniform psi: v constant across units
    m2 = bundled.load("m2_hilb")
    v2, _ = renorm_scalar(m2, SphericalWeight((1.0, 2.0)))
    vals = list(v2.values())
    assert vals[0] == pytest.approx(vals[1])


def test_json_round_trip():
    for name in bundled.NAMES:
        data = bundled.load(name)
        back = FusionData.from_json(data.to_json())
        assert back.simples == data.simples
        assert back.N == data.N
        for k, m in data.F.items():
            assert np.allclose(back.F[k], m)


def test_schema_errors():
    with pytest.raises(SchemaError):
        FusionData(("a", "a"), ("a",), {"a": ("a", "a")}, {"a": "a"}, {}, {})
    with pytest.raises(SchemaError):
        FusionData(("a",), ("b",), {"a": ("a", "a")}, {"a": "a"}, {}, {})

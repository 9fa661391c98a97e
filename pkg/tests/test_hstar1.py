import numpy as np
import pytest

from hstarcat import hstar1
from hstarcat.hilb2 import TwoHilbertSpace


def test_trace_and_inner():
    A = hstar1.HStarAlgebra((2, 3), (1.0, 0.5))
    assert A.dim == 13
    u = A.unit()
    assert A.trace(u) == pytest.approx(2 * 1.0 + 3 * 0.5)
    rng = np.random.default_rng(0)
    a = A.random_element(rng)
    assert A.inner(a, a).real > 0


def test_verify_accepts_weights():
    cert = hstar1.verify_hstar_algebra((2, 3), weights=(1.0, 0.25))
    assert cert.ok
    assert cert.residuals["traciality"] < 1e-12


def test_verify_rejects_non_tracial_functional():
    # phi = diag(1, 2) on M_2 is positive but not tracial
    cert = hstar1.verify_hstar_algebra(
        (2,), functional=[np.diag([1.0, 2.0]).astype(complex)]
    )
    assert not cert.ok
    assert cert.failed_axiom == "traciality"


def test_verify_rejects_nonpositive_weight():
    cert = hstar1.verify_hstar_algebra((2,), weights=(-1.0,))
    assert not cert.ok
    assert cert.failed_axiom == "positivity"


def test_gns_module_trace_law():
    A = hstar1.HStarAlgebra((2, 3, 1), (1.0, 0.5, 2.5))
    mod = hstar1.gns(A)
    assert mod.dim == A.dim
    assert hstar1.module_trace_law_residual(mod, seed=5) < 1e-9


def test_simple_module_dims_equal_weights():
    A = hstar1.HStarAlgebra((2, 4), (1.5, 0.25))
    dims = [d for _, d in hstar1.simple_modules(A)]
    assert dims == pytest.approx([1.5, 0.25])


def test_rank_one_reconstruction():
    A = hstar1.HStarAlgebra((3,), (0.7,))
    mod = hstar1.HStarModuleRep(A, (2,))
    rng = np.random.default_rng(1)
    xi, eta, zeta = (mod.random_vector(rng) for _ in range(3))
    op = mod.rank_one(xi, eta)
    # rank-one acts as zeta -> xi <eta|zeta>_A
    lhs = [o @ z for o, z in zip(op, zeta)]
    rhs = [x @ m for x, m in zip(xi, mod.a_valued_inner(eta, zeta))]
    for a, b in zip(lhs, rhs):
        assert np.linalg.norm(a - b) < 1e-10


def test_linking_algebra():
    space = TwoHilbertSpace(("a", "b"), (1.0, 2.0))
    x = space.obj((1, 2))
    y = space.obj((0, 1))
    L = hstar1.linking_algebra([x, y])
    assert L.block_sizes == (1, 3)
    assert L.weights == (1.0, 2.0)
    with pytest.raises(ValueError):
        hstar1.linking_algebra([])
    other = TwoHilbertSpace(("a",), (1.0,))
    with pytest.raises(hstar1.MixedAmbientCategory):
        hstar1.linking_algebra([x, other.obj((1,))])


def test_json_round_trip():
    A = hstar1.HStarAlgebra((2, 3), (1.0, 0.5))
    assert hstar1.HStarAlgebra.from_json(A.to_json()) == A

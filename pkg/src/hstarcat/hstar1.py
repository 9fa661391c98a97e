"""H*-algebras in Hilb: multimatrix algebras with a faithful positive trace.

An element of the algebra A = (+)_i M_{n_i} is a list of per-block complex
matrices; the trace is Tr_A(a) = sum_i w_i tr(a_i) with strictly positive
weights w_i. The GNS inner product is <a|b> = Tr_A(a^* b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .certify import Certificate
from .numcore import DEFAULT_TOL, Tolerance


class NonPositiveWeight(ValueError):
    pass


class TracialityViolation(ValueError):
    pass


class PositivityViolation(ValueError):
    pass


class MixedAmbientCategory(ValueError):
    pass


@dataclass(frozen=True)
class HStarAlgebra:
    block_sizes: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(int(n) for n in self.block_sizes))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.block_sizes) != len(self.weights):
            raise ValueError("one weight per block required")
        if any(n <= 0 for n in self.block_sizes):
            raise ValueError("block sizes must be positive")
        if any(w <= 0 for w in self.weights):
            raise NonPositiveWeight("trace weights must be strictly positive")

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_sizes)

    def zero(self):
        return [np.zeros((n, n), dtype=complex) for n in self.block_sizes]

    def unit(self):
        return [np.eye(n, dtype=complex) for n in self.block_sizes]

    def random_element(self, rng: np.random.Generator):
        return [
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for n in self.block_sizes
        ]

    def trace(self, a) -> complex:
        return sum(w * np.trace(ai) for w, ai in zip(self.weights, a))

    def mul(self, a, b):
        return [ai @ bi for ai, bi in zip(a, b)]

    def star(self, a):
        return [ai.conj().T for ai in a]

    def inner(self, a, b) -> complex:
        """GNS inner product <a|b> = Tr_A(a^* b)."""
        return self.trace(self.mul(self.star(a), b))

    def to_json(self) -> dict:
        return {"blocks": list(self.block_sizes), "weights": list(self.weights)}

    @classmethod
    def from_json(cls, data: dict) -> "HStarAlgebra":
        return cls(tuple(data["blocks"]), tuple(data["weights"]))


def _functional_trace(block_sizes, functional, a) -> complex:
    return sum(np.trace(phi @ ai) for phi, ai in zip(functional, a))


def verify_hstar_algebra(
    block_sizes,
    weights=None,
    functional=None,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    samples: int = 20,
) -> Certificate:
    """Certify traciality and positivity of a trace on a multimatrix algebra.

    The trace is given either by per-block weights or by a raw functional
    (per-block density matrices phi_i, Tr(a) = sum tr(phi_i a_i)); a raw
    functional is projected onto weight form and rejected when the
    projection residual exceeds tolerance.
    """
    block_sizes = tuple(int(n) for n in block_sizes)
    if any(n <= 0 for n in block_sizes):
        raise ValueError("block sizes must be positive")
    rng = np.random.default_rng(seed)

    if functional is not None:
        functional = [np.asarray(phi, dtype=complex) for phi in functional]
        tr = lambda a: _functional_trace(block_sizes, functional, a)
    else:
        weights = tuple(float(w) for w in weights)
        tr = lambda a: sum(w * np.trace(ai) for w, ai in zip(weights, a))

    probe = HStarAlgebra(block_sizes, tuple(1.0 for _ in block_sizes))
    traciality = 0.0
    for _ in range(samples):
        a = probe.random_element(rng)
        b = probe.random_element(rng)
        traciality = max(traciality, abs(tr(probe.mul(a, b)) - tr(probe.mul(b, a))))
    if traciality > tol.bound():
        return Certificate(
            False,
            {"traciality": traciality},
            {"seed": seed},
            failed_axiom="traciality",
        )

    if functional is not None:
        # every tracial functional is blockwise a multiple of the matrix trace
        projected = []
        proj_residual = 0.0
        for n, phi in zip(block_sizes, functional):
            w = np.trace(phi).real / n
            projected.append(w)
            proj_residual = max(proj_residual, float(np.linalg.norm(phi - w * np.eye(n))))
        if proj_residual > tol.bound():
            return Certificate(
                False,
                {"traciality": traciality, "weight_projection": proj_residual},
                {"seed": seed},
                failed_axiom="traciality",
            )
        weights = tuple(projected)

    positivity = min(weights)
    if positivity <= tol.bound():
        return Certificate(
            False,
            {"traciality": traciality, "positivity_margin": positivity},
            {"seed": seed},
            failed_axiom="positivity",
        )
    return Certificate(
        True,
        {"traciality": traciality, "positivity_margin": positivity},
        {"seed": seed, "weights": weights},
    )


@dataclass(frozen=True)
class HStarModuleRep:
    """Right module H = (+)_i C^{m_i x n_i} over a multimatrix H*-algebra.

    Block i of the algebra acts by right matrix multiplication; the inner
    product is the standard <u|v> = sum_i tr(u_i^* v_i). The module trace
    on End(H_A) = (+)_i M_{m_i} determined by the rank-one trace law is
    Tr_H(f) = sum_i w_i tr(f_i).
    """

    algebra: HStarAlgebra
    mults: tuple

    def __post_init__(self):
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))
        if len(self.mults) != len(self.algebra.block_sizes):
            raise ValueError("one multiplicity per block required")

    @property
    def dim(self) -> int:
        return sum(m * n for m, n in zip(self.mults, self.algebra.block_sizes))

    def module_trace(self, f) -> complex:
        """Tr_H on End(H_A); f is a list of m_i x m_i blocks."""
        return sum(w * np.trace(fi) for w, fi in zip(self.algebra.weights, f))

    def random_vector(self, rng: np.random.Generator):
        return [
            rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
            for m, n in zip(self.mults, self.algebra.block_sizes)
        ]

    def inner(self, eta, xi) -> complex:
        return sum(np.trace(e.conj().T @ x) for e, x in zip(eta, xi))

    def a_valued_inner(self, eta, xi):
        """<eta|xi>_A, the composite <eta| o |xi> in End(A_A) = A.

        Characterized by Tr_A(x^* <eta|xi>_A) = <xi x | eta ... i.e. by
        adjointness of |xi>: a -> xi a against the GNS inner product.
        Blockwise this is eta_i^* xi_i / w_i.
        """
        return [
            e.conj().T @ x / w
            for e, x, w in zip(eta, xi, self.algebra.weights)
        ]

    def rank_one(self, xi, eta):
        """|xi><eta| in End(H_A): zeta -> xi <eta|zeta>_A."""
        return [
            x @ e.conj().T / w
            for x, e, w in zip(xi, eta, self.algebra.weights)
        ]


def gns(A: HStarAlgebra) -> HStarModuleRep:
    """A as a right module over itself: block i appears with multiplicity n_i."""
    return HStarModuleRep(A, A.block_sizes)


def _simple_quantum_dim(n: int, w: float) -> float:
    """Tr_H(id) for the row module C^{1xn} of (M_n, w tr), computed by
    expressing id_H through rank-one operators and applying the trace law.

    A Pimsner-Popa style frame for the A-valued inner product is the single
    vector u = sqrt(w) e_1: |u><u| = id_H, so Tr_H(id) = Tr_A(<u|u>_A).
    Computed numerically rather than assumed.
    """
    algebra = HStarAlgebra((n,), (w,))
    mod = HStarModuleRep(algebra, (1,))
    u = [np.zeros((1, n), dtype=complex)]
    u[0][0, 0] = np.sqrt(w)
    op = mod.rank_one(u, u)
    # frame property: |u><u| must be the identity of End(H_A)
    assert np.linalg.norm(op[0] - np.eye(1)) < 1e-12
    return float(algebra.trace(mod.a_valued_inner(u, u)).real)


def simple_modules(A: HStarAlgebra):
    """One simple right module per block, with its quantum dimension.

    The computed value comes out as d_i = w_i, independent of the inner
    product normalization on the row module: scaling <.|.>_H rescales
    <eta|xi>_A and |xi><eta| by reciprocal factors, leaving Tr_H(id) fixed.
    """
    out = []
    for i, (n, w) in enumerate(zip(A.block_sizes, A.weights)):
        mults = tuple(1 if j == i else 0 for j in range(len(A.block_sizes)))
        out.append((HStarModuleRep(A, mults), _simple_quantum_dim(n, w)))
    return out


def linking_algebra(objects) -> HStarAlgebra:
    """Linking algebra of a finite list of objects of one skeletal 2-Hilbert
    space: formal matrices of hom spaces with matrix-multiplication product
    and dagger-transpose star.

    Hom(a_j -> a_i) splits over simple labels s, so L(a_1..a_k) is the
    multimatrix algebra with one block per supported label s of size
    sum_i mult_i(s) and trace weight d_s.
    """
    if not objects:
        raise ValueError("need at least one object")
    space = objects[0].space
    for o in objects:
        if o.space is not space and o.space != space:
            raise MixedAmbientCategory("objects live in different 2-Hilbert spaces")
    sizes = []
    weights = []
    for idx, d in enumerate(space.dims):
        total = sum(o.mults[idx] for o in objects)
        if total > 0:
            sizes.append(total)
            weights.append(d)
    return HStarAlgebra(tuple(sizes), tuple(weights))


def module_trace_law_residual(
    mod: HStarModuleRep, tol: Tolerance = DEFAULT_TOL, seed: int = 0, samples: int = 20
) -> float:
    """Max residual of Tr_H(|xi><eta|) = Tr_A(<eta|xi>_A) over random vectors."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        xi = mod.random_vector(rng)
        eta = mod.random_vector(rng)
        lhs = mod.module_trace(mod.rank_one(xi, eta))
        rhs = mod.algebra.trace(mod.a_valued_inner(eta, xi))
        worst = max(worst, abs(lhs - rhs))
    return worst

"""Algebra objects inside a skeletal multifusion category.

Certification of the three H*-algebra axioms (Frobenius, separable,
standard), standardization to a special Q-system, pair algebras c (x) c*,
module categories C_A with the canonical trace psi(iota^dag f iota),
internal ends, bimodules with the relative tensor over a middle algebra,
and the delta = 0 dual-functor data on bimodules.

All diagrams are evaluated in the fusion-tree engine; every axiom is a
numeric residual, never a symbolic assumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .certify import Certificate
from .diagram import Engine, Mor
from .numcore import DEFAULT_TOL, Tolerance, split_projection

CONDITION_CUT = 1e12


class NotUnital(ValueError):
    pass


class NotAssociative(ValueError):
    pass


class SingularBubble(ValueError):
    pass


class AlgebraMismatch(ValueError):
    pass


def endo_power(eng: Engine, f: Mor, r: float, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """f^r for a positive invertible chargewise-Hermitian endomorphism.

    Rejects inputs whose condition number exceeds the separability cut.
    """
    if f.dom != f.cod:
        raise ValueError("power of a non-endomorphism")
    vals_all = []
    blocks = {}
    for c in eng.support(f.dom):
        b = eng.block(f, c)
        if b.size == 0:
            continue
        h = (b + b.conj().T) / 2
        if np.linalg.norm(b - h) > tol.bound(np.linalg.norm(b)):
            raise SingularBubble(f"non-hermitian block at charge {c}")
        vals, vecs = np.linalg.eigh(h)
        vals_all.extend(vals.tolist())
        if vals.min() <= 0:
            raise SingularBubble(f"non-positive eigenvalue {vals.min()} at {c}")
        blocks[c] = (vecs * vals**r) @ vecs.conj().T
    if vals_all and max(vals_all) / min(vals_all) > CONDITION_CUT:
        raise SingularBubble("condition number above separability cut")
    return eng.mor(f.dom, f.cod, blocks)


@dataclass
class AlgebraObject:
    eng: Engine
    obj: tuple  # multiplicity vector
    mu: Mor  # (A, A) -> (A)
    iota: Mor  # () -> (A)
    _powers: dict = field(default_factory=dict)

    @property
    def word(self):
        return (self.obj,)

    @property
    def mu_dag(self) -> Mor:
        return self.eng.dagger(self.mu)

    @property
    def bubble(self) -> Mor:
        return self.eng.compose(self.mu, self.mu_dag)

    def bubble_pow(self, r: float) -> Mor:
        if r not in self._powers:
            self._powers[r] = endo_power(self.eng, self.bubble, r)
        return self._powers[r]

    def identity(self) -> Mor:
        return self.eng.identity(self.word)


def trivial_algebra(eng: Engine, unit) -> AlgebraObject:
    """The tensor unit summand 1_i with its unique algebra structure."""
    obj = eng.simple_obj(unit)
    word = (obj,)
    mu = eng.mor(word + word, word, {unit: np.ones((1, 1))})
    iota = eng.mor((), word, {unit: np.ones((1, 1))})
    return AlgebraObject(eng, obj, mu, iota)


def group_algebra(eng: Engine, labels) -> AlgebraObject:
    """Convolution algebra on a set of invertible simples.

    Coefficient 1 on every fusion channel that lands back in the set;
    channels leaving the set are dropped, so a non-closed set produces a
    candidate that fails certification (a deliberate negative control).
    """
    data = eng.data
    obj = eng.obj({c: 1 for c in labels})
    word = (obj,)
    blocks = {}
    for c in eng.support(word + word):
        dom = eng.basis(word + word, c)
        cod = eng.basis(word, c)
        if not cod:
            continue
        m = np.zeros((len(cod), len(dom)), dtype=complex)
        tgt = eng.basis_index(word, c)[(c, 0, data.t(c), 0, 0)]
        for j, _ in enumerate(dom):
            m[tgt, j] = 1.0
        blocks[c] = m
    mu = eng.mor(word + word, word, blocks)
    iblocks = {}
    for u in data.units:
        if eng.mult(obj, u):
            iblocks[u] = np.ones((1, 1))
    iota = eng.mor((), word, iblocks)
    return AlgebraObject(eng, obj, mu, iota)


def pair_algebra(eng: Engine, O) -> AlgebraObject:
    """c (x) c* with mu = id (x) ev (x) id and iota = coev."""
    if isinstance(O, str):
        O = eng.simple_obj(O)
    Od = eng.dual_obj(O)
    W = (O, Od)
    A, u = eng.fuse(W)
    mu_raw = eng.whisker_left(
        (O,), eng.whisker_right(eng.ev_obj(O), (Od,))
    )  # (O, Od, O, Od) -> (O, Od)
    mu = eng.compose(u, eng.compose(mu_raw, eng.tensor(eng.dagger(u), eng.dagger(u))))
    iota = eng.compose(u, eng.coev_obj(O))
    return AlgebraObject(eng, A, mu, iota)


def verify_hstar(
    A: AlgebraObject, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> Certificate:
    """Certify unitality, associativity, and the H* axioms.

    Frobenius: (id (x) mu)(mu^dag (x) id) = mu^dag mu = (mu (x) id)(id (x) mu^dag).
    Separable: mu mu^dag invertible (condition number below the cut).
    Standard: the twisted-trace agreement, sampled on elementary tensors
    f: c -> A, g: c* -> A for every simple c.
    """
    eng = A.eng
    word = A.word
    ident = eng.identity(word)
    residuals = {}

    lu = eng.compose(A.mu, eng.whisker_right_obj(A.iota, A.obj))
    ru = eng.compose(A.mu, eng.whisker_left_obj(A.obj, A.iota))
    residuals["unitality"] = max(eng.residual(lu, ident), eng.residual(ru, ident))
    if residuals["unitality"] > tol.bound():
        return Certificate(False, residuals, failed_axiom="unitality")

    assoc_l = eng.compose(A.mu, eng.whisker_right_obj(A.mu, A.obj))
    assoc_r = eng.compose(A.mu, eng.whisker_left_obj(A.obj, A.mu))
    residuals["associativity"] = eng.residual(assoc_l, assoc_r)
    if residuals["associativity"] > tol.bound():
        return Certificate(False, residuals, failed_axiom="associativity")

    md = A.mu_dag
    frob_l = eng.compose(eng.whisker_left_obj(A.obj, A.mu), eng.whisker_right_obj(md, A.obj))
    frob_m = eng.compose(md, A.mu)
    frob_r = eng.compose(eng.whisker_right_obj(A.mu, A.obj), eng.whisker_left_obj(A.obj, md))
    residuals["frobenius"] = max(eng.residual(frob_l, frob_m), eng.residual(frob_r, frob_m))
    if residuals["frobenius"] > tol.bound():
        return Certificate(False, residuals, failed_axiom="H*1-frobenius")

    bubble = A.bubble
    vals = []
    for c in eng.support(word):
        b = eng.block(bubble, c)
        if b.size:
            vals.extend(np.linalg.eigvalsh((b + b.conj().T) / 2).tolist())
    min_eig = min(vals) if vals else 1.0
    cond = (max(vals) / min_eig) if vals and min_eig > 0 else float("inf")
    residuals["separability_min_eig"] = min_eig
    if min_eig <= tol.bound() or cond > CONDITION_CUT:
        return Certificate(
            False, residuals, {"condition": cond}, failed_axiom="H*2-separability"
        )

    pairing = eng.compose(eng.dagger(A.iota), A.mu)  # (A, A) -> ()
    worst = 0.0
    for c in eng.data.simples:
        cb = eng.data.dual[c]
        fs = eng.hom_basis((eng.simple_obj(c),), word)
        gs = eng.hom_basis((eng.simple_obj(cb),), word)
        for f in fs:
            for g in gs:
                t1 = eng.psi_of_unit_endo(
                    eng.compose(pairing, eng.compose(eng.tensor(f, g), eng.coev_simple(c)))
                )
                t2 = eng.psi_of_unit_endo(
                    eng.compose(pairing, eng.compose(eng.tensor(g, f), eng.coev_simple(cb)))
                )
                worst = max(worst, abs(t1 - t2))
    residuals["standardness"] = worst
    if worst > tol.bound():
        return Certificate(False, residuals, failed_axiom="H*3-standardness")
    return Certificate(True, residuals, {"condition": cond})


def standardize(A: AlgebraObject, tol: Tolerance = DEFAULT_TOL) -> AlgebraObject:
    """Equivalent standard special Q-system (A, x^{-1} mu, x iota)
    with x = (mu mu^dag)^{1/2}."""
    eng = A.eng
    x = A.bubble_pow(0.5)
    x_inv = A.bubble_pow(-0.5)
    return AlgebraObject(eng, A.obj, eng.compose(x_inv, A.mu), eng.compose(x, A.iota))


# --- modules ------------------------------------------------------------


@dataclass
class Module:
    """Right module over an algebra: object with action (m, A) -> (m)."""

    algebra: AlgebraObject
    obj: tuple
    rho: Mor

    @property
    def eng(self) -> Engine:
        return self.algebra.eng

    @property
    def word(self):
        return (self.obj,)


def free_module(A: AlgebraObject, O) -> Module:
    """c (x) A with action id (x) mu, fused to a single object."""
    eng = A.eng
    if isinstance(O, str):
        O = eng.simple_obj(O)
    m, u = eng.fuse((O, A.obj))
    rho = eng.compose(
        u,
        eng.compose(
            eng.whisker_left_obj(O, A.mu),
            eng.whisker_right_obj(eng.dagger(u), A.obj),
        ),
    )
    return Module(A, m, rho)


def verify_module(M: Module, tol: Tolerance = DEFAULT_TOL) -> float:
    eng = M.eng
    A = M.algebra
    assoc_l = eng.compose(M.rho, eng.whisker_right_obj(M.rho, A.obj))
    assoc_r = eng.compose(M.rho, eng.whisker_left_obj(M.obj, A.mu))
    unit = eng.compose(M.rho, eng.whisker_left_obj(M.obj, A.iota))
    return max(eng.residual(assoc_l, assoc_r), eng.residual(unit, eng.identity(M.word)))


def _solve(eng: Engine, dom_pair, constraints, tol: Tolerance = DEFAULT_TOL):
    """Basis of morphisms Hom(dom_pair) killed by the given linear maps."""
    mats = [eng.linear_matrix(fun, dom_pair, cp) for fun, cp in constraints]
    big = np.vstack(mats) if mats else np.zeros((0, eng.hom_dim(*dom_pair)))
    if big.shape[1] == 0:
        return []
    ns = null_space(big, rcond=1e-10)
    return [eng.from_vector(dom_pair[0], dom_pair[1], ns[:, k]) for k in range(ns.shape[1])]


def module_hom_basis(dom_word, M1: Module, M2: Module, tol: Tolerance = DEFAULT_TOL):
    """Basis of A-module maps dom_word -> M2.word, where dom_word carries
    the right action of M1 on its last tensor factor (dom_word must end
    with M1's object)."""
    eng = M1.eng
    A = M1.algebra
    prefix = dom_word[:-1]
    rho_dom = eng.whisker_left(prefix, M1.rho)

    def defect(f):
        return eng.sub(
            eng.compose(f, rho_dom),
            eng.compose(M2.rho, eng.whisker_right_obj(f, A.obj)),
        )

    return _solve(
        eng,
        (dom_word, M2.word),
        [(defect, (dom_word + (A.obj,), M2.word))],
        tol,
    )


def trace_alg_end(A: AlgebraObject, f: Mor) -> complex:
    """Tr^{C_A}_A(f) = psi(iota^dag f iota) on End(A_A)."""
    eng = A.eng
    return eng.psi_of_unit_endo(eng.compose(eng.dagger(A.iota), eng.compose(f, A.iota)))


def module_trace(M: Module, f: Mor) -> complex:
    """Module trace of f in End_A(M), via the dual closure of M dressed
    with bubble^{-1/2} on both released action strands."""
    eng = M.eng
    A = M.algebra
    m, md = M.obj, eng.dual_obj(M.obj)
    s1 = eng.whisker_right(eng.dagger(eng.ev_obj(m)), (A.obj,))  # (A) -> (md, m, A)
    s2 = eng.whisker_left((md,), M.rho)  # (md, m, A) -> (md, m)
    s3 = eng.whisker_left_obj(md, f)
    s4 = eng.whisker_left((md,), eng.dagger(M.rho))  # -> (md, m, A)
    s5 = eng.whisker_right(eng.ev_obj(m), (A.obj,))  # -> (A)
    half = A.bubble_pow(-0.5)
    g = eng.compose(half, eng.compose(s5, eng.compose(s4, eng.compose(s3, eng.compose(s2, eng.compose(s1, half))))))
    return trace_alg_end(A, g)


def free_retraction(M: Module) -> Mor:
    """Coisometry (m, A) -> (m): the action dressed with bubble^{-1/2}."""
    eng = M.eng
    return eng.compose(M.rho, eng.whisker_left_obj(M.obj, M.algebra.bubble_pow(-0.5)))


@dataclass
class ModuleCategory:
    algebra: AlgebraObject
    simples: list  # of Module
    dims: list  # module trace of the identity per simple

    def two_hilbert(self):
        from .hilb2 import TwoHilbertSpace

        labels = tuple(f"M{i}" for i in range(len(self.simples)))
        return TwoHilbertSpace(labels, tuple(self.dims))


def _split_module(F: Module, tol: Tolerance, seed: int, depth: int = 0):
    """Decompose a module into simple summands via its endomorphism algebra."""
    eng = F.eng
    comm = module_hom_basis(F.word, F, F, tol)
    if len(comm) == 1:
        return [F]
    if depth > 8:
        raise RuntimeError("module splitting did not terminate")
    rng = np.random.default_rng(seed + depth)
    for attempt in range(5):
        h = eng.zero(F.word, F.word)
        for e in comm:
            z = rng.standard_normal() + 1j * rng.standard_normal()
            h = eng.add(h, eng.add(eng.scale(z, e), eng.scale(np.conj(z), eng.dagger(e))))
        vals = []
        for c in eng.support(F.word):
            b = eng.block(h, c)
            if b.size:
                vals.extend(np.linalg.eigvalsh((b + b.conj().T) / 2).tolist())
        vals = sorted(vals)
        scale = max(abs(v) for v in vals) or 1.0
        clusters = []
        for v in vals:
            if clusters and v - clusters[-1][-1] < 1e-6 * scale:
                clusters[-1].append(v)
            else:
                clusters.append([v])
        if len(clusters) == 1:
            continue  # degenerate draw; re-randomize
        pieces = []
        for cl in clusters:
            lo, hi = cl[0] - 1e-6 * scale, cl[-1] + 1e-6 * scale
            blocks = {}
            mobj = [0] * len(eng.data.simples)
            vblocks = {}
            for c in eng.support(F.word):
                b = eng.block(h, c)
                if not b.size:
                    continue
                ev, evec = np.linalg.eigh((b + b.conj().T) / 2)
                sel = (ev >= lo) & (ev <= hi)
                V = evec[:, sel]
                if V.shape[1]:
                    mobj[eng.data.index[c]] = V.shape[1]
                    vblocks[c] = V
            mobj = tuple(mobj)
            Vm = eng.mor((mobj,), F.word, vblocks)
            rho = eng.compose(
                eng.dagger(Vm),
                eng.compose(F.rho, eng.whisker_right_obj(Vm, F.algebra.obj)),
            )
            pieces.append(Module(F.algebra, mobj, rho))
        out = []
        for piece in pieces:
            # residual eigenvalue collisions leave non-simple pieces
            out.extend(_split_module(piece, tol, seed, depth + 1))
        return out
    raise RuntimeError("could not split module after re-randomization")


def module_category(
    eng: Engine, A: AlgebraObject, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> ModuleCategory:
    """Enumerate simple right A-modules by splitting the free modules c (x) A."""
    simples = []
    for c in eng.data.simples:
        F = free_module(A, c)
        if not any(F.obj):
            continue
        for piece in _split_module(F, tol, seed):
            if not any(
                len(module_hom_basis(piece.word, piece, old, tol)) > 0 for old in simples
            ):
                simples.append(piece)
    dims = []
    for M in simples:
        d = module_trace(M, eng.identity(M.word)).real
        if d <= tol.bound():
            raise SingularBubble(f"non-positive module dimension {d}")
        dims.append(d)
    return ModuleCategory(A, simples, dims)


def internal_end(M: Module, tol: Tolerance = DEFAULT_TOL):
    """[m, m] as an H*-algebra: multiplicity of c is dim Hom_A(c |> m -> m),
    with structure coefficients from composition in orthonormalized bases.

    Returns (AlgebraObject, per-simple orthonormal bases).
    """
    eng = M.eng
    A = M.algebra
    data = eng.data
    bases = {}
    for c in data.simples:
        cw = (eng.simple_obj(c),) + M.word
        raw = module_hom_basis(cw, M, M, tol)
        if not raw:
            continue
        # Gram orthonormalize wrt <g|h> = d_c^{-1} Tr^{C_A}(g^dag h)
        cmod = _whiskered_module(M, eng.simple_obj(c))
        gram = np.array(
            [
                [
                    _hom_inner(eng, cmod, g, h) / eng.udf.d(c)
                    for h in raw
                ]
                for g in raw
            ]
        )
        w = np.linalg.inv(np.linalg.cholesky(gram).conj().T)
        bases[c] = [
            _mor_combo(eng, raw, w[:, j]) for j in range(len(raw))
        ]
    E = tuple(len(bases.get(c, ())) for c in data.simples)
    word = (E,)
    mu_blocks = {}
    for e in eng.support(word + word):
        dom = eng.basis(word + word, e)
        cod = eng.basis(word, e)
        if not dom or not cod:
            continue
        m = np.zeros((len(cod), len(dom)), dtype=complex)
        emod = _whiskered_module(M, eng.simple_obj(e))
        for j, (c, alpha, d, v, si) in enumerate(dom):
            (dd, beta, _, _, _) = eng.basis((E,), d)[si]
            tv = eng.mor(
                (eng.simple_obj(e),),
                (eng.simple_obj(c), eng.simple_obj(d)),
                {e: _unit_col(len(eng.basis((eng.simple_obj(c), eng.simple_obj(d)), e)), v)},
            )
            q = eng.compose(
                bases[c][alpha],
                eng.compose(
                    eng.whisker_left((eng.simple_obj(c),), bases[d][beta]),
                    eng.whisker_right(tv, M.word),
                ),
            )
            for i, (ee, gamma, _, _, _) in enumerate(cod):
                m[i, j] = _hom_inner(eng, emod, bases[e][gamma], q) / eng.udf.d(e)
        mu_blocks[e] = m
    mu = eng.mor(word + word, word, mu_blocks)
    iota_blocks = {}
    for u in data.units:
        if u not in bases:
            continue
        umod = _whiskered_module(M, eng.simple_obj(u))
        unitor = _strict_unitor(eng, eng.simple_obj(u), M.word)
        col = np.array(
            [[_hom_inner(eng, umod, bases[u][g], unitor) / eng.udf.d(u)]
             for g in range(len(bases[u]))]
        )
        iota_blocks[u] = col
    iota = eng.mor((), word, iota_blocks)
    return AlgebraObject(eng, E, mu, iota), bases


def _unit_col(n, v):
    m = np.zeros((n, 1), dtype=complex)
    m[v, 0] = 1.0
    return m


def _mor_combo(eng, mors, coeffs):
    out = eng.zero(mors[0].dom, mors[0].cod)
    for z, f in zip(coeffs, mors):
        out = eng.add(out, eng.scale(z, f))
    return out


def _whiskered_module(M: Module, O) -> Module:
    """c |> M as a module with fused underlying object."""
    eng = M.eng
    m, u = eng.fuse((O,) + M.word)
    rho = eng.compose(
        u,
        eng.compose(
            eng.whisker_left((O,), M.rho),
            eng.whisker_right_obj(eng.dagger(u), M.algebra.obj),
        ),
    )
    return Module(M.algebra, m, rho)


def _hom_inner(eng: Engine, dom_mod: Module, g: Mor, h: Mor) -> complex:
    """Tr^{C_A}_{dom}(g^dag h) through the fused domain module."""
    _, u = eng.fuse(g.dom)
    endo = eng.compose(u, eng.compose(eng.dagger(g), eng.compose(h, eng.dagger(u))))
    return module_trace(dom_mod, endo)


def _strict_unitor(eng: Engine, U, word) -> Mor:
    """(1_u, X) -> (X): identity on tree coefficients."""
    dom = (U,) + word
    blocks = {}
    u_label = next(c for c in eng.data.simples if eng.mult(U, c))
    for c in eng.support(dom):
        dgb = eng.basis(dom, c)
        cod_idx = eng.basis_index(word, c)
        m = np.zeros((len(eng.basis(word, c)), len(dgb)), dtype=complex)
        for j, (x, alpha, e, v, si) in enumerate(dgb):
            if x == u_label:
                m[si, j] = 1.0
        blocks[c] = m
    return eng.mor(dom, word, blocks)


def internal_end_comparison(A: AlgebraObject, tol: Tolerance = DEFAULT_TOL):
    """Unitarity defect of the canonical map A -> [A, A] on the free
    module A, measured simple-by-simple on generalized elements."""
    eng = A.eng
    FA = Module(A, A.obj, A.mu)
    defect = 0.0
    for c in eng.data.simples:
        xs = eng.hom_basis((eng.simple_obj(c),), A.word)
        if not xs:
            continue
        gram_c = np.array(
            [
                [eng.categorical_trace(eng.compose(eng.dagger(x), y)) / eng.udf.d(c) for y in xs]
                for x in xs
            ]
        )
        w = np.linalg.inv(np.linalg.cholesky(gram_c).conj().T)
        ons = [_mor_combo(eng, xs, w[:, j]) for j in range(len(xs))]
        cmod = _whiskered_module(FA, eng.simple_obj(c))
        phis = [eng.compose(A.mu, eng.whisker_right_obj(x, A.obj)) for x in ons]
        gram_e = np.array(
            [[_hom_inner(eng, cmod, p, q) / eng.udf.d(c) for q in phis] for p in phis]
        )
        defect = max(defect, float(np.linalg.norm(gram_e - np.eye(len(phis)))))
    return defect


# --- bimodules and the relative tensor ---------------------------------


class NotProjection(ValueError):
    pass


@dataclass
class Bimodule:
    """A-B bimodule: left action (A, m) -> (m), right action (m, B) -> (m)."""

    left: AlgebraObject
    right: AlgebraObject
    obj: tuple
    lam: Mor
    rho: Mor

    @property
    def eng(self) -> Engine:
        return self.left.eng

    @property
    def word(self):
        return (self.obj,)

    def right_module(self) -> Module:
        return Module(self.right, self.obj, self.rho)


def verify_bimodule(M: Bimodule, tol: Tolerance = DEFAULT_TOL) -> float:
    eng = M.eng
    A, B = M.left, M.right
    ident = eng.identity(M.word)
    res = [
        eng.residual(
            eng.compose(M.lam, eng.whisker_right_obj(A.mu, M.obj)),
            eng.compose(M.lam, eng.whisker_left_obj(A.obj, M.lam)),
        ),
        eng.residual(
            eng.compose(M.lam, eng.whisker_right_obj(A.iota, M.obj)), ident
        ),
        eng.residual(
            eng.compose(M.rho, eng.whisker_left_obj(M.obj, B.mu)),
            eng.compose(M.rho, eng.whisker_right_obj(M.rho, B.obj)),
        ),
        eng.residual(
            eng.compose(M.rho, eng.whisker_left_obj(M.obj, B.iota)), ident
        ),
        # middle associativity
        eng.residual(
            eng.compose(M.lam, eng.whisker_left_obj(A.obj, M.rho)),
            eng.compose(M.rho, eng.whisker_right_obj(M.lam, B.obj)),
        ),
    ]
    return max(res)


def _strict_right_unitor(eng: Engine, word, U) -> Mor:
    """(X, 1_u) -> (X): identity on tree coefficients."""
    dom = word + (U,)
    blocks = {}
    for c in eng.support(dom):
        dgb = eng.basis(dom, c)
        m = np.zeros((len(eng.basis(word, c)), len(dgb)), dtype=complex)
        gX, gXi, UX = eng.group_last(word, U, c)
        for col, (y, beta, d, u, ti) in enumerate(gX):
            if d == c:
                m[ti, col] = 1.0
        blocks[c] = m @ UX.conj().T
    return eng.mor(dom, word, blocks)


def algebra_bimodule(A: AlgebraObject) -> Bimodule:
    return Bimodule(A, A, A.obj, A.mu, A.mu)


def left_trivial_bimodule(M: Module, unit) -> Bimodule:
    """Right module promoted to a 1_u-B bimodule via the strict unitor."""
    eng = M.eng
    T = trivial_algebra(eng, unit)
    lam = _strict_unitor(eng, eng.simple_obj(unit), M.word)
    return Bimodule(T, M.algebra, M.obj, lam, M.rho)


def right_trivial_bimodule(A: AlgebraObject, M_obj, lam: Mor, unit) -> Bimodule:
    eng = A.eng
    T = trivial_algebra(eng, unit)
    rho = _strict_right_unitor(eng, (M_obj,), eng.simple_obj(unit))
    return Bimodule(A, T, M_obj, lam, rho)


def separability_projection(M: Bimodule, N: Bimodule) -> Mor:
    """p_{M,N} on (m, n): release the right B-action of M through
    bubble^{-1} into the left B-action of N."""
    if M.right is not N.left:
        if M.right.obj != N.left.obj:
            raise AlgebraMismatch("middle algebras differ")
    eng = M.eng
    B = M.right
    s1 = eng.whisker_right(eng.dagger(M.rho), N.word)  # (m, n) -> (m, B, n)
    s2 = eng.whisker_left(M.word, eng.whisker_right_obj(B.bubble_pow(-1.0), N.obj))
    s3 = eng.whisker_left(M.word, N.lam)  # (m, B, n) -> (m, n)
    return eng.compose(s3, eng.compose(s2, s1))


def relative_tensor(M: Bimodule, N: Bimodule, tol: Tolerance = DEFAULT_TOL):
    """M (x)_B N: split the separability projection.

    Returns (Bimodule over (M.left, N.right), isometry V: T -> (m, n), p).
    """
    eng = M.eng
    p = separability_projection(M, N)
    word = M.word + N.word
    scale = eng.l2_norm(p)
    if eng.residual(eng.compose(p, p), p) > tol.bound(scale):
        raise NotProjection("separability projection is not idempotent")
    if eng.residual(eng.dagger(p), p) > tol.bound(scale):
        raise NotProjection("separability projection is not self-adjoint")
    fused, u = eng.fuse(word)
    pf = eng.compose(u, eng.compose(p, eng.dagger(u)))
    tobj = [0] * len(eng.data.simples)
    vblocks = {}
    for c in eng.support((fused,)):
        b = eng.block(pf, c)
        if not b.size:
            continue
        V = split_projection(b)
        if V.shape[1]:
            tobj[eng.data.index[c]] = V.shape[1]
            vblocks[c] = V
    tobj = tuple(tobj)
    Vf = eng.mor((tobj,), (fused,), vblocks)
    Vw = eng.compose(eng.dagger(u), Vf)  # (T,) -> (m, n)
    lam = eng.compose(
        eng.dagger(Vw),
        eng.compose(
            eng.whisker_right(M.lam, N.word),
            eng.whisker_left_obj(M.left.obj, Vw),
        ),
    )
    rho = eng.compose(
        eng.dagger(Vw),
        eng.compose(
            eng.whisker_left(M.word, N.rho),
            eng.whisker_right_obj(Vw, N.right.obj),
        ),
    )
    return Bimodule(M.left, N.right, tobj, lam, rho), Vw, p


def left_unitor(A: AlgebraObject, M: Bimodule, Vw: Mor) -> Mor:
    """A (x)_A M -> M: action dressed with bubble^{-1/2}."""
    eng = A.eng
    return eng.compose(
        M.lam,
        eng.compose(eng.whisker_right_obj(A.bubble_pow(-0.5), M.obj), Vw),
    )


def right_unitor(M: Bimodule, B: AlgebraObject, Vw: Mor) -> Mor:
    eng = B.eng
    return eng.compose(
        M.rho,
        eng.compose(eng.whisker_left_obj(M.obj, B.bubble_pow(-0.5)), Vw),
    )


# --- duals of bimodules at delta = 0 -----------------------------------


def dual_bimodule_delta0(M: Bimodule):
    """(M^dual as B-A bimodule, ev0, coev0) for the adjunction between
    - (x)_A M and - (x)_B M^dual, with all bubble dressings at delta = 0.

    ev0: (m^dual, m) -> (B,), coev0: (A,) -> (m, m^dual); both descend
    through the separability projections and satisfy the dressed zig-zags.
    """
    eng = M.eng
    A, B = M.left, M.right
    m = M.obj
    md = eng.dual_obj(m)
    ev_m = eng.ev_obj(m)  # (md, m) -> ()
    coev_m = eng.coev_obj(m)  # () -> (m, md)
    evp = eng.dagger(coev_m)  # (m, md) -> ()
    coevp = eng.dagger(ev_m)  # () -> (md, m)

    s1 = eng.whisker_right(coevp, (B.obj, md))  # (B, md) -> (md, m, B, md)
    s2 = eng.whisker_left((md,), eng.whisker_right(M.rho, (md,)))  # -> (md, m, md)
    s3 = eng.whisker_left((md,), evp)  # -> (md,)
    lam_d = eng.compose(s3, eng.compose(s2, s1))

    t1 = eng.whisker_left((md, A.obj), coev_m)  # (md, A) -> (md, A, m, md)
    t2 = eng.whisker_right(eng.whisker_left((md,), M.lam), (md,))  # -> (md, m, md)
    t3 = eng.whisker_right(ev_m, (md,))  # -> (md,)
    rho_d = eng.compose(t3, eng.compose(t2, t1))
    Md = Bimodule(B, A, md, lam_d, rho_d)

    # ev0: (md, m) -> (B,)
    e1 = eng.whisker_left(
        (md,),
        eng.compose(
            eng.whisker_right_obj(A.bubble_pow(-1.5), m), eng.dagger(M.lam)
        ),
    )  # (md, m) -> (md, A, m)
    e2 = eng.whisker_right(rho_d, (m,))  # -> (md, m)
    e3 = eng.whisker_left((md,), eng.dagger(M.rho))  # -> (md, m, B)
    e4 = eng.whisker_right(ev_m, (B.obj,))  # (md, m, B) -> (B,)
    ev0 = eng.compose(e4, eng.compose(e3, eng.compose(e2, e1)))

    # coev0: (A,) -> (m, md)
    c1 = eng.whisker_left((A.obj,), coev_m)  # (A,) -> (A, m, md)
    c2 = eng.whisker_right(M.lam, (md,))  # -> (m, md)
    c3 = eng.whisker_right(eng.dagger(M.rho), (md,))  # -> (m, B, md)
    c4 = eng.whisker_left((m,), eng.whisker_right_obj(B.bubble_pow(-1.5), md))
    c5 = eng.whisker_left((m,), lam_d)  # (m, B, md) -> (m, md)
    coev0 = eng.compose(c5, eng.compose(c4, eng.compose(c3, eng.compose(c2, c1))))
    return Md, ev0, coev0


def delta0_zigzag_residuals(M: Bimodule, Md: Bimodule, ev0: Mor, coev0: Mor):
    """Residuals of both dressed zig-zag identities."""
    eng = M.eng
    A, B = M.left, M.right
    m, md = M.obj, Md.obj
    # m -> (A, m) -> (m, md, m) -> (m, B) -> m
    ua_inv = eng.compose(
        eng.whisker_right_obj(A.bubble_pow(-0.5), m), eng.dagger(M.lam)
    )
    ub = eng.compose(M.rho, eng.whisker_left_obj(m, B.bubble_pow(-0.5)))
    z1 = eng.compose(
        ub,
        eng.compose(
            eng.whisker_left((m,), ev0),
            eng.compose(eng.whisker_right(coev0, (m,)), ua_inv),
        ),
    )
    r1 = eng.residual(z1, eng.identity(M.word))
    # md -> (md, A) -> (md, m, md) -> (B, md) -> md
    ua_inv_d = eng.compose(
        eng.whisker_left_obj(md, A.bubble_pow(-0.5)), eng.dagger(Md.rho)
    )
    ub_d = eng.compose(Md.lam, eng.whisker_right_obj(B.bubble_pow(-0.5), md))
    z2 = eng.compose(
        ub_d,
        eng.compose(
            eng.whisker_right(ev0, (md,)),
            eng.compose(eng.whisker_left((md,), coev0), ua_inv_d),
        ),
    )
    r2 = eng.residual(z2, eng.identity(Md.word))
    return r1, r2


def bimodule_map_basis(N: Module, M: Bimodule, P: Module, tol: Tolerance = DEFAULT_TOL):
    """Basis of maps f: (n, m) -> (p): right-B-linear in the joint module
    structure and balanced over A between N's action and M's left action."""
    eng = N.eng
    A, B = M.left, M.right
    dom = N.word + M.word

    def b_defect(f):
        return eng.sub(
            eng.compose(f, eng.whisker_left(N.word, M.rho)),
            eng.compose(P.rho, eng.whisker_right_obj(f, B.obj)),
        )

    def a_defect(f):
        return eng.sub(
            eng.compose(f, eng.whisker_right(N.rho, M.word)),
            eng.compose(f, eng.whisker_left(N.word, M.lam)),
        )

    return _solve(
        eng,
        (dom, P.word),
        [
            (b_defect, (dom + (B.obj,), P.word)),
            (a_defect, (N.word + (A.obj,) + M.word, P.word)),
        ],
        tol,
    )


def mate_delta0(f: Mor, N: Module, M: Bimodule, coev0: Mor) -> Mor:
    """Mate (n,) -> (p, md) of f: (n, m) -> (p,) under the delta = 0
    adjunction: insert coev0 through the dressed unitor on N."""
    eng = N.eng
    A = M.left
    md = coev0.cod[1]
    s1 = eng.whisker_left(N.word, eng.compose(coev0, A.bubble_pow(-0.5)))
    s4 = eng.whisker_right(f, (md,))  # (n, m, md) -> (p, md)
    return eng.compose(s4, eng.compose(s1, eng.dagger(N.rho)))


def fused_right_module(algebra: AlgebraObject, word, rho_word: Mor) -> Module:
    """Module on the fusion of a word whose action lives on the last factor."""
    eng = algebra.eng
    fused, u = eng.fuse(word)
    rho = eng.compose(
        u, eng.compose(rho_word, eng.whisker_right_obj(eng.dagger(u), algebra.obj))
    )
    return Module(algebra, fused, rho)


def delta0_norm_identity(
    N: Module,
    M: Bimodule,
    P: Module,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
):
    """max over sampled bimodule maps f of
    |Tr^{C_B}_{N (x) M}(f^dag f) - Tr^{C_A}_N(mate^dag mate)|."""
    eng = N.eng
    Md, ev0, coev0 = dual_bimodule_delta0(M)
    basis = bimodule_map_basis(N, M, P, tol)
    if not basis:
        return 0.0, (0.0, 0.0)
    zz = delta0_zigzag_residuals(M, Md, ev0, coev0)
    NM = fused_right_module(M.right, N.word + M.word, eng.whisker_left(N.word, M.rho))
    _, u = eng.fuse(N.word + M.word)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        z = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        f = _mor_combo(eng, basis, z)
        endo = eng.compose(u, eng.compose(eng.dagger(f), eng.compose(f, eng.dagger(u))))
        t1 = module_trace(NM, endo)
        g = mate_delta0(f, N, M, coev0)
        t2 = module_trace(N, eng.compose(eng.dagger(g), g))
        worst = max(worst, abs(t1 - t2))
    return worst, zz

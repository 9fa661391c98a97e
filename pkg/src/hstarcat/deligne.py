"""Relative Deligne product of module categories via the ladder model.

Hom(m1 (x) n1 -> m2 (x) n2) = (+)_c M(m1 -> m2 <| c) (x) N(c |> n1 -> n2),
with composition by stacking ladders and resolving the doubled middle
string through fusion vertices, and the trace that keeps only the unit
channels with a d_j^{-1} weight.

Module sides are realized inside the fusion-tree engine: the regular
C-module on either side, right A-modules as a left C-module, and left
A-modules as a right C-module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import Certificate
from .diagram import Engine, Mor
from .intalg import (
    AlgebraObject,
    Module,
    _solve,
    _strict_right_unitor,
    _strict_unitor,
    module_hom_basis,
    module_trace,
    trace_alg_end,
)
from .numcore import DEFAULT_TOL, Tolerance


class MixedMiddleCategory(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


# --- module sides -------------------------------------------------------


class RegularRight:
    """C as a right module over itself: plain hom spaces and the
    categorical trace."""

    def __init__(self, eng: Engine):
        self.eng = eng

    def word(self, m):
        return (m,)

    def hom(self, m1, m2, c):
        return self.eng.hom_basis((m1,), (m2, self.eng.simple_obj(c)))

    def trace(self, f: Mor) -> complex:
        return self.eng.categorical_trace(f)


class RegularLeft:
    def __init__(self, eng: Engine):
        self.eng = eng

    def word(self, n):
        return (n,)

    def hom(self, c, n1, n2):
        return self.eng.hom_basis((self.eng.simple_obj(c), n1), (n2,))

    def trace(self, f: Mor) -> complex:
        return self.eng.categorical_trace(f)


class ModulesLeft:
    """Right A-modules as a left C-module: c |> m, with the canonical
    module trace."""

    def __init__(self, A: AlgebraObject):
        self.A = A
        self.eng = A.eng

    def word(self, m: Module):
        return m.word

    def hom(self, c, m1: Module, m2: Module):
        return module_hom_basis((self.eng.simple_obj(c),) + m1.word, m1, m2)

    def trace(self, f: Mor, m: Module) -> complex:
        # f is an endomorphism of a word ending in m's object
        eng = self.eng
        prefix = f.dom[:-1]
        fused, u = eng.fuse(f.dom)
        rho = eng.compose(
            u,
            eng.compose(
                eng.whisker_left(prefix, m.rho),
                eng.whisker_right_obj(eng.dagger(u), self.A.obj),
            ),
        )
        endo = eng.compose(u, eng.compose(f, eng.dagger(u)))
        return module_trace(Module(self.A, fused, rho), endo)


@dataclass
class LeftModule:
    """Left module over an algebra: action (A, m) -> (m)."""

    algebra: AlgebraObject
    obj: tuple
    lam: Mor

    @property
    def eng(self):
        return self.algebra.eng

    @property
    def word(self):
        return (self.obj,)


def free_left_module(A: AlgebraObject, O) -> LeftModule:
    eng = A.eng
    if isinstance(O, str):
        O = eng.simple_obj(O)
    m, u = eng.fuse((A.obj, O))
    lam = eng.compose(
        u,
        eng.compose(
            eng.whisker_right(A.mu, (O,)),
            eng.whisker_left_obj(A.obj, eng.dagger(u)),
        ),
    )
    return LeftModule(A, m, lam)


def left_module_trace(M: LeftModule, f: Mor) -> complex:
    """Mirror of the right-module trace: close on the right with the
    bubble^{-1/2} dressing on both released action strands."""
    eng = M.eng
    A = M.algebra
    m, md = M.obj, eng.dual_obj(M.obj)
    s1 = eng.whisker_left((A.obj,), eng.coev_obj(m))  # (A) -> (A, m, md)
    s2 = eng.whisker_right(M.lam, (md,))  # -> (m, md)
    s3 = eng.whisker_right_obj(f, md)
    s4 = eng.whisker_right(eng.dagger(M.lam), (md,))  # -> (A, m, md)
    s5 = eng.whisker_left((A.obj,), eng.dagger(eng.coev_obj(m)))  # -> (A)
    half = A.bubble_pow(-0.5)
    g = eng.compose(half, eng.compose(s5, eng.compose(s4, eng.compose(s3, eng.compose(s2, eng.compose(s1, half))))))
    return trace_alg_end(A, g)


class LeftModulesRight:
    """Left A-modules as a right C-module: m <| c."""

    def __init__(self, A: AlgebraObject):
        self.A = A
        self.eng = A.eng

    def word(self, m: LeftModule):
        return m.word

    def hom(self, m1: LeftModule, m2: LeftModule, c):
        eng = self.eng
        A = self.A
        cw = (eng.simple_obj(c),)
        cod = m2.word + cw

        def defect(f):
            return eng.sub(
                eng.compose(f, m1.lam),
                eng.compose(
                    eng.whisker_right(m2.lam, cw),
                    eng.whisker_left_obj(A.obj, f),
                ),
            )

        return _solve(eng, (m1.word, cod), [(defect, ((A.obj,) + m1.word, cod))])

    def trace(self, f: Mor, m: LeftModule) -> complex:
        # f is an endomorphism of a word starting with m's object
        eng = self.eng
        suffix = f.dom[1:]
        fused, u = eng.fuse(f.dom)
        lam = eng.compose(
            u,
            eng.compose(
                eng.whisker_right(m.lam, suffix),
                eng.whisker_left_obj(self.A.obj, eng.dagger(u)),
            ),
        )
        endo = eng.compose(u, eng.compose(f, eng.dagger(u)))
        return left_module_trace(LeftModule(self.A, fused, lam), endo)


# --- ladder category ----------------------------------------------------


@dataclass
class LadderObject:
    mside: object
    nside: object
    m: object
    n: object

    def check_shared(self, other: "LadderObject"):
        if self.mside is not other.mside or self.nside is not other.nside:
            raise MixedMiddleCategory("ladder objects from different products")


@dataclass
class LadderHom:
    """Sum of elementary tensors: per middle simple c, a list of pairs
    (f: m1 -> m2 <| c, g: c |> n1 -> n2)."""

    src: LadderObject
    dst: LadderObject
    terms: dict  # c -> list[(Mor, Mor)]


def _eng(L: LadderObject) -> Engine:
    return L.mside.eng


def _mword(L: LadderObject):
    return L.mside.word(L.m)


def _nword(L: LadderObject):
    return L.nside.word(L.n)


def ladder_hom_bases(src: LadderObject, dst: LadderObject):
    src.check_shared(dst)
    eng = _eng(src)
    out = {}
    for c in eng.data.simples:
        fs = src.mside.hom(src.m, dst.m, c)
        gs = src.nside.hom(c, src.n, dst.n)
        if fs and gs:
            out[c] = (fs, gs)
    return out


def ladder_hom_dim(src: LadderObject, dst: LadderObject) -> int:
    return sum(len(fs) * len(gs) for fs, gs in ladder_hom_bases(src, dst).values())


def random_ladder(src: LadderObject, dst: LadderObject, rng) -> LadderHom:
    eng = _eng(src)
    terms = {}
    for c, (fs, gs) in ladder_hom_bases(src, dst).items():
        lst = []
        for f in fs:
            for g in gs:
                z = rng.standard_normal() + 1j * rng.standard_normal()
                lst.append((eng.scale(z, f), g))
        terms[c] = lst
    return LadderHom(src, dst, terms)


def identity_ladder(L: LadderObject) -> LadderHom:
    """Unit-channel terms: graded projections through strict unitors."""
    eng = _eng(L)
    mw, nw = _mword(L), _nword(L)
    terms = {}
    for j in eng.data.units:
        ju = eng.simple_obj(j)
        ru = _strict_right_unitor(eng, mw, ju)  # (m, 1_j) -> (m)
        lu = _strict_unitor(eng, ju, nw)  # (1_j, n) -> (n)
        f = eng.dagger(ru)
        g = lu
        if f.blocks and g.blocks:
            terms[j] = [(f, g)]
    return LadderHom(L, L, terms)


def _same_obj(a, b) -> bool:
    return a is b or (isinstance(a, tuple) and isinstance(b, tuple) and a == b)


def ladder_compose(F: LadderHom, G: LadderHom) -> LadderHom:
    """F o G by stacking and resolving the doubled middle string."""
    if not (_same_obj(G.dst.m, F.src.m) and _same_obj(G.dst.n, F.src.n)):
        raise ShapeMismatch("non-composable ladder morphisms")
    eng = _eng(F.src)
    m3w = _mword(F.dst)
    n1w = _nword(G.src)
    terms = {}
    for c2, pairs2 in F.terms.items():
        c2o = eng.simple_obj(c2)
        for c1, pairs1 in G.terms.items():
            c1o = eng.simple_obj(c1)
            for f2, g2 in pairs2:
                for f1, g1 in pairs1:
                    fs = eng.compose(eng.whisker_right_obj(f2, c1o), f1)
                    gs = eng.compose(g2, eng.whisker_left((c2o,), g1))
                    for e in eng.support((c2o, c1o)):
                        nb = len(eng.basis((c2o, c1o), e))
                        for v in range(nb):
                            col = np.zeros((nb, 1), dtype=complex)
                            col[v, 0] = 1.0
                            nu = eng.mor((eng.simple_obj(e),), (c2o, c1o), {e: col})
                            fe = eng.compose(
                                eng.whisker_left(m3w, eng.dagger(nu)), fs
                            )
                            ge = eng.compose(gs, eng.whisker_right(nu, n1w))
                            if fe.blocks and ge.blocks:
                                terms.setdefault(e, []).append((fe, ge))
    return LadderHom(G.src, F.dst, terms)


def ladder_dagger(F: LadderHom) -> LadderHom:
    """Componentwise dagger plus string rotation through the cup/cap data."""
    eng = _eng(F.src)
    m2w = _mword(F.dst)
    n1w = _nword(F.src)
    terms = {}
    for c, pairs in F.terms.items():
        cb = eng.data.dual[c]
        cbo = eng.simple_obj(cb)
        for f, g in pairs:
            ft = eng.compose(
                eng.whisker_right_obj(eng.dagger(f), cbo),
                eng.whisker_left(m2w, eng.coev_simple(c)),
            )
            gt = eng.compose(
                eng.whisker_right(eng.ev_simple(c), n1w),
                eng.whisker_left((cbo,), eng.dagger(g)),
            )
            if ft.blocks and gt.blocks:
                terms.setdefault(cb, []).append((ft, gt))
    return LadderHom(F.dst, F.src, terms)


def ladder_add(F: LadderHom, G: LadderHom) -> LadderHom:
    terms = {c: list(p) for c, p in F.terms.items()}
    for c, p in G.terms.items():
        terms.setdefault(c, []).extend(p)
    return LadderHom(F.src, F.dst, terms)


def ladder_scale(z, F: LadderHom) -> LadderHom:
    eng = _eng(F.src)
    return LadderHom(
        F.src,
        F.dst,
        {c: [(eng.scale(z, f), g) for f, g in p] for c, p in F.terms.items()},
    )


def ladder_trace(F: LadderHom) -> complex:
    """Only unit channels survive, weighted by d_j^{-1}."""
    if not (_same_obj(F.src.m, F.dst.m) and _same_obj(F.src.n, F.dst.n)):
        raise ShapeMismatch("trace of a non-endomorphism")
    eng = _eng(F.src)
    mw, nw = _mword(F.src), _nword(F.src)
    total = 0.0
    for j in eng.data.units:
        pairs = F.terms.get(j, [])
        if not pairs:
            continue
        ju = eng.simple_obj(j)
        ru = _strict_right_unitor(eng, mw, ju)
        lu = eng.dagger(_strict_unitor(eng, ju, nw))
        for f, g in pairs:
            tm = _side_trace(F.src.mside, eng.compose(ru, f), F.src.m)
            tn = _side_trace(F.src.nside, eng.compose(g, lu), F.src.n)
            total += tm * tn / eng.udf.d(j)
    return complex(total)


def _side_trace(side, endo, obj):
    if isinstance(side, (RegularRight, RegularLeft)):
        return side.trace(endo)
    return side.trace(endo, obj)


def realize_regular(F: LadderHom) -> Mor:
    """For the C-C regular ladder: image in Hom(m1 (x) n1 -> m2 (x) n2)
    under the balanced tensor functor m (x) n."""
    eng = _eng(F.src)
    m2w = _mword(F.dst)
    n1w = _nword(F.src)
    out = eng.zero(_mword(F.src) + n1w, m2w + _nword(F.dst))
    for c, pairs in F.terms.items():
        for f, g in pairs:
            out = eng.add(
                out,
                eng.compose(eng.whisker_left(m2w, g), eng.whisker_right(f, n1w)),
            )
    return out


def act_on_module(F: LadderHom) -> Mor:
    """Image of a ladder endo of m (x) c under the right action functor
    m (x) c -> m <| c (n-side must be the regular module)."""
    eng = _eng(F.src)
    m2w = _mword(F.dst)
    c1w = _nword(F.src)
    out = eng.zero(_mword(F.src) + c1w, m2w + _nword(F.dst))
    for c, pairs in F.terms.items():
        for f, g in pairs:
            out = eng.add(
                out,
                eng.compose(eng.whisker_left(m2w, g), eng.whisker_right(f, c1w)),
            )
    return out


def right_action_isometry(
    mside,
    eng: Engine,
    m_objects,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> Certificate:
    """Compare the ladder trace on endos of m (x) c with the module trace
    of their image under the action functor."""
    nside = RegularLeft(eng)
    rng = np.random.default_rng(seed)
    worst = 0.0
    count = 0
    for m in m_objects:
        for c in eng.data.simples:
            L = LadderObject(mside, nside, m, eng.simple_obj(c))
            if ladder_hom_dim(L, L) == 0:
                continue
            for _ in range(samples):
                F = random_ladder(L, L, rng)
                t1 = ladder_trace(F)
                t2 = _side_trace(mside, act_on_module(F), m)
                worst = max(worst, abs(t1 - t2))
                count += 1
    ok = worst < tol.bound()
    return Certificate(
        ok,
        {"action_trace_gap": worst},
        {"samples": count},
        failed_axiom=None if ok else "right-action isometry",
    )

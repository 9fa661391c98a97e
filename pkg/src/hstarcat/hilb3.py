"""Pre-3-Hilbert presentations and their completions.

A presentation at desk scale is the delooping of an H*-multifusion
category: objects are the unit summands, 1-morphisms are objects of the
category, 2-morphisms are morphisms, and the weight Psi on End(1_a) is
the spherical weight psi. On top of this sit the two completions:

- finite direct sums, whose objects are lists of unit labels and whose
  summand inclusions satisfy the resolution sum ev_j ev_j^dag = id;
- the algebra completion, whose objects carry a certified H*-algebra in
  the endomorphism category, with Psi_A(f) = psi(iota^dag f bubble^-1
  iota) and duals from the delta = 0 bimodule adjunction.

Linking categories (the matrix category of all homs among a finite list
of objects) are assembled as explicit multifusion data: directly from
the ambient F-symbols for delooping objects, and numerically from the
bimodule calculus (relative tensors, unitors, associator matrix
elements in orthonormal intertwiner bases) for algebra objects. The
assembled data is always pushed back through the full validator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .certify import Certificate
from .diagram import Engine, Mor
from .fusion import (
    FusionData,
    SphericalWeight,
    renorm_scalar,
    udf_from_weight,
    validate,
)
from .intalg import (
    AlgebraObject,
    Bimodule,
    Module,
    _mor_combo,
    _solve,
    algebra_bimodule,
    dual_bimodule_delta0,
    left_trivial_bimodule,
    left_unitor,
    module_category,
    module_trace,
    relative_tensor,
    right_unitor,
    trivial_algebra,
    verify_bimodule,
    verify_hstar,
)
from .numcore import DEFAULT_TOL, Tolerance


class MissingDualityData(KeyError):
    pass


class CandidateNotSpherical(ValueError):
    pass


# --- objects of a presentation -----------------------------------------


@dataclass(frozen=True)
class DeloopObject:
    """A unit summand of the ambient category."""

    unit: str


@dataclass(frozen=True)
class SumObject:
    """Formal finite direct sum of unit summands (repeats allowed)."""

    parts: tuple


@dataclass
class MonadObject:
    """An H*-algebra in the endomorphism category of the base object."""

    algebra: AlgebraObject
    label: str = "A"


class Pre3HilbPresentation:
    """Finite generator-based presentation backed by one engine.

    Hom categories and completions beyond the listed objects are derived
    on demand; psi on End(1_a) comes from the engine's unit weight for
    engine-backed objects and from the dressed unit formula for monads.
    """

    def __init__(self, eng: Engine, objects):
        self.eng = eng
        self.objects = tuple(objects)

    def unit_obj(self, obj):
        eng = self.eng
        if isinstance(obj, DeloopObject):
            return eng.simple_obj(obj.unit)
        if isinstance(obj, SumObject):
            mults = {}
            for u in obj.parts:
                mults[u] = mults.get(u, 0) + 1
            return eng.obj(mults)
        if isinstance(obj, MonadObject):
            return obj.algebra.obj
        raise TypeError(f"not a presentation object: {obj!r}")

    def psi_value(self, obj, f: Mor) -> complex:
        """Psi_a applied to an endomorphism of the unit 1-morphism."""
        eng = self.eng
        if isinstance(obj, MonadObject):
            return monad_psi(obj.algebra, f)
        O = self.unit_obj(obj)
        if f.dom != (O,) or f.cod != (O,):
            raise ValueError("endomorphism of the wrong unit object")
        total = 0.0 + 0.0j
        for u in eng.data.units:
            b = f.blocks.get(u)
            if b is not None:
                total += eng.udf.psi.of_unit(eng.data, u) * np.trace(b)
        return complex(total)


def delooping(eng: Engine) -> Pre3HilbPresentation:
    return Pre3HilbPresentation(eng, [DeloopObject(u) for u in eng.data.units])


def monad_psi(A: AlgebraObject, f: Mor) -> complex:
    """Psi_A(f) = psi(iota^dag f bubble^-1 iota) on End of the unit
    1-morphism A of an algebra object."""
    eng = A.eng
    z = eng.compose(
        eng.dagger(A.iota), eng.compose(f, eng.compose(A.bubble_pow(-1.0), A.iota))
    )
    return eng.psi_of_unit_endo(z)


# --- sphericality of an installed Psi ----------------------------------


def presentation_sphericality(
    X: Pre3HilbPresentation,
    samples: int = 5,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> Certificate:
    """Sampled left/right closed-loop agreement for 1-morphisms between
    the engine-backed objects of the presentation."""
    eng = X.eng
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        mult = {c: int(rng.integers(0, 3)) for c in eng.data.simples}
        if not any(mult.values()):
            mult[eng.data.simples[0]] = 1
        O = eng.obj(mult)
        f = eng.random_mor((O,), (O,), rng)
        left = eng.psi_of_unit_endo(eng.trace_left(f))
        right = eng.psi_of_unit_endo(eng.trace_right(f))
        worst = max(worst, abs(left - right))
    scale = 1.0 + eng.udf.psi.total()
    return Certificate(
        ok=worst <= tol.bound(scale),
        residuals={"sphericality": worst},
        failed_axiom=None if worst <= tol.bound(scale) else "sphericality",
    )


# --- Hilbert direct sum completion -------------------------------------


def hilbert_sum_completion(X: Pre3HilbPresentation) -> Pre3HilbPresentation:
    """Close the object list under formal finite direct sums of the
    engine-backed objects (generated lazily via sum_object)."""
    base = []
    for obj in X.objects:
        if isinstance(obj, DeloopObject):
            base.append(SumObject((obj.unit,)))
        elif isinstance(obj, SumObject):
            base.append(obj)
    return Pre3HilbPresentation(X.eng, base)


def sum_object(X: Pre3HilbPresentation, parts) -> SumObject:
    labels = []
    for p in parts:
        if isinstance(p, DeloopObject):
            p = p.unit
        if p not in X.eng.data.units:
            raise KeyError(f"not a unit summand: {p}")
        labels.append(p)
    return SumObject(tuple(labels))


def sum_isometries(X: Pre3HilbPresentation, S: SumObject):
    """The coordinate inclusions I_j: 1_{a_j} -> 1_S, one per part."""
    eng = X.eng
    O = X.unit_obj(S)
    seen = {}
    out = []
    for u in S.parts:
        alpha = seen.get(u, 0)
        seen[u] = alpha + 1
        out.append(eng.include(O, u, alpha))
    return out


def certify_hilbert_sum(
    X: Pre3HilbPresentation,
    S: SumObject,
    samples: int = 5,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> Certificate:
    """Resolution of the identity by the coordinate inclusions and
    additivity of Psi over the summands."""
    eng = X.eng
    O = X.unit_obj(S)
    incs = sum_isometries(X, S)
    total = eng.zero((O,), (O,))
    for inc in incs:
        total = eng.add(total, eng.compose(inc, eng.dagger(inc)))
    res_defect = eng.residual(total, eng.identity((O,)))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        f = eng.random_mor((O,), (O,), rng)
        whole = X.psi_value(S, f)
        split = sum(
            X.psi_value(
                DeloopObject(u),
                eng.compose(eng.dagger(inc), eng.compose(f, inc)),
            )
            for u, inc in zip(S.parts, incs)
        )
        worst = max(worst, abs(whole - split))
    scale = 1.0 + eng.udf.psi.total()
    ok = res_defect <= tol.bound() * 10 and worst <= tol.bound(scale)
    axiom = None
    if res_defect > tol.bound() * 10:
        axiom = "direct-sum resolution"
    elif worst > tol.bound(scale):
        axiom = "Psi additivity"
    return Certificate(
        ok=ok,
        residuals={"resolution": res_defect, "additivity": worst},
        failed_axiom=axiom,
    )


# --- H*-monad completion -----------------------------------------------


def hstar_monad_completion(
    X: Pre3HilbPresentation, algebras, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> Pre3HilbPresentation:
    """Adjoin certified H*-monads (REJECTed algebras raise)."""
    objects = list(X.objects)
    for k, A in enumerate(algebras):
        cert = verify_hstar(A, tol, seed)
        if not cert.ok:
            raise ValueError(f"algebra fails H* certification: {cert.failed_axiom}")
        objects.append(MonadObject(A, label=f"A{k}"))
    return Pre3HilbPresentation(X.eng, objects)


def as_monad_bimodule(A: MonadObject, B: MonadObject, M) -> Bimodule:
    """Interpret a 1-morphism A -> B as an (algebra, algebra) bimodule."""
    eng = M.eng
    same_left = M.left.obj == A.algebra.obj and eng.residual(
        M.left.mu, A.algebra.mu
    ) == 0.0
    same_right = M.right.obj == B.algebra.obj and eng.residual(
        M.right.mu, B.algebra.mu
    ) == 0.0
    if not (same_left and same_right):
        raise ValueError("bimodule does not connect the given monads")
    return M


def monad_sphericality(
    A: MonadObject,
    B: MonadObject,
    M: Bimodule,
    samples: int = 10,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> Certificate:
    """Psi_B(left X-loop of f) = Psi_A(right X-loop of f) for sampled
    bimodule endomorphisms f, closing with the delta = 0 duality."""
    as_monad_bimodule(A, B, M)
    eng = M.eng
    Md, ev0, coev0 = dual_bimodule_delta0(M)
    basis = bimodule_homs(M, M, tol)
    rng = np.random.default_rng(seed)
    worst = 0.0
    evd = eng.dagger(ev0)
    coevd = eng.dagger(coev0)
    for _ in range(max(1, samples)):
        z = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        f = _mor_combo(eng, basis, z)
        left = eng.compose(ev0, eng.compose(eng.whisker_left((Md.obj,), f), evd))
        right = eng.compose(
            coevd, eng.compose(eng.whisker_right(f, (Md.obj,)), coev0)
        )
        vl = monad_psi(B.algebra, left)
        vr = monad_psi(A.algebra, right)
        scale = max(1.0, abs(vl))
        worst = max(worst, abs(vl - vr) / scale)
    ok = worst <= tol.bound()
    return Certificate(
        ok=ok,
        residuals={"sphericality": worst},
        failed_axiom=None if ok else "sphericality",
    )


# --- bimodule homs and splitting ---------------------------------------


def bimodule_homs(M1: Bimodule, M2: Bimodule, tol: Tolerance = DEFAULT_TOL):
    """Basis of maps intertwining both actions.

    The singular-value cut is absolute (the actions are O(1)-normalized):
    a purely relative cut misreads an all-roundoff constraint matrix as
    full rank and reports an empty hom space.
    """
    eng = M1.eng
    A, B = M1.left, M1.right

    def l_defect(f):
        return eng.sub(
            eng.compose(f, M1.lam),
            eng.compose(M2.lam, eng.whisker_left_obj(A.obj, f)),
        )

    def r_defect(f):
        return eng.sub(
            eng.compose(f, M1.rho),
            eng.compose(M2.rho, eng.whisker_right_obj(f, B.obj)),
        )

    n = eng.hom_dim(M1.word, M2.word)
    if n == 0:
        return []
    mats = [
        eng.linear_matrix(l_defect, (M1.word, M2.word), ((A.obj,) + M1.word, M2.word)),
        eng.linear_matrix(r_defect, (M1.word, M2.word), (M1.word + (B.obj,), M2.word)),
    ]
    big = np.vstack(mats)
    _, s, vh = np.linalg.svd(big)
    cut = 1e-8 * max(1.0, s[0] if s.size else 0.0)
    null = vh[(s > cut).sum():].conj().T
    return [
        eng.from_vector(M1.word, M2.word, null[:, k]) for k in range(null.shape[1])
    ]


def _conjugate_bimodule(F: Bimodule, mobj, vblocks) -> tuple:
    """Sub-bimodule carried by an isometry (mobj,) -> F.word."""
    eng = F.eng
    Vm = eng.mor(((tuple(mobj)),), F.word, vblocks)
    lam = eng.compose(
        eng.dagger(Vm), eng.compose(F.lam, eng.whisker_left_obj(F.left.obj, Vm))
    )
    rho = eng.compose(
        eng.dagger(Vm), eng.compose(F.rho, eng.whisker_right_obj(Vm, F.right.obj))
    )
    return Bimodule(F.left, F.right, tuple(mobj), lam, rho), Vm


def split_bimodule(F: Bimodule, tol: Tolerance = DEFAULT_TOL, seed: int = 0, depth: int = 0):
    """Simple summands with their inclusion isometries."""
    eng = F.eng
    comm = bimodule_homs(F, F, tol)
    if len(comm) == 1:
        return [(F, eng.identity(F.word))]
    if depth > 8:
        raise RuntimeError("bimodule splitting did not terminate")
    rng = np.random.default_rng(seed + 7 * depth)
    for _ in range(5):
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
            continue
        out = []
        for cl in clusters:
            lo, hi = cl[0] - 1e-6 * scale, cl[-1] + 1e-6 * scale
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
            piece, Vm = _conjugate_bimodule(F, mobj, vblocks)
            for sub, W in split_bimodule(piece, tol, seed, depth + 1):
                out.append((sub, eng.compose(Vm, W)))
        return out
    raise RuntimeError("could not split bimodule after re-randomization")


def free_bimodule(Ai: AlgebraObject, c, Aj: AlgebraObject) -> Bimodule:
    """A_i (x) c (x) A_j with outer multiplications, fused."""
    eng = Ai.eng
    if isinstance(c, str):
        c = eng.simple_obj(c)
    word = (Ai.obj, c, Aj.obj)
    fused, u = eng.fuse(word)
    lam = eng.compose(
        u,
        eng.compose(
            eng.whisker_right(eng.whisker_right_obj(Ai.mu, c), (Aj.obj,)),
            eng.whisker_left_obj(Ai.obj, eng.dagger(u)),
        ),
    )
    rho = eng.compose(
        u,
        eng.compose(
            eng.whisker_left((Ai.obj, c), Aj.mu),
            eng.whisker_right_obj(eng.dagger(u), Aj.obj),
        ),
    )
    return Bimodule(Ai, Aj, fused, lam, rho)


def _bimodule_endo_scalar(eng: Engine, f: Mor) -> complex:
    """The scalar of an endomorphism of a simple bimodule (c times id)."""
    tr = 0.0 + 0.0j
    dim = 0
    for c in eng.support(f.dom):
        b = f.blocks.get(c)
        n = len(eng.basis(f.dom, c))
        dim += n
        if b is not None:
            tr += np.trace(b)
    return complex(tr / dim)


def _gram_onb(eng: Engine, basis):
    """Orthonormalize bimodule maps out of a simple source: f^dag g is a
    scalar, so a Cholesky of the Gram matrix suffices."""
    if not basis:
        return []
    n = len(basis)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = _bimodule_endo_scalar(
                eng, eng.compose(eng.dagger(basis[i]), basis[j])
            )
    L = np.linalg.cholesky((G + G.conj().T) / 2)
    Linv = np.linalg.inv(L).conj().T  # columns give the new basis
    return [_mor_combo(eng, basis, Linv[:, k]) for k in range(n)]


# --- linking categories ------------------------------------------------


def _deloop_linking(eng: Engine, ua, ub, tol: Tolerance = DEFAULT_TOL):
    """2x2 matrix amalgam of the blocks of C graded by two unit summands
    (the units may coincide, giving the M_2 amplification)."""
    data = eng.data
    psi = eng.udf.psi
    pos = ((1, ua), (2, ub))

    def lab(i, j, c):
        return f"{i}{j}:{c}"

    simples = []
    grading = {}
    dual = {}
    for (i, si), (j, sj) in itertools.product(pos, pos):
        for c in data.simples:
            if data.s(c) == si and data.t(c) == sj:
                L = lab(i, j, c)
                simples.append(L)
                grading[L] = (lab(i, i, si), lab(j, j, sj))
                dual[L] = lab(j, i, data.dual[c])
    units = (lab(1, 1, ua), lab(2, 2, ub))
    unit_set = set(units)
    N = {}
    for (i, si), (j, sj), (k, sk) in itertools.product(pos, pos, pos):
        for a in data.simples:
            if (data.s(a), data.t(a)) != (si, sj) or lab(i, j, a) in unit_set:
                continue
            for b in data.simples:
                if (data.s(b), data.t(b)) != (sj, sk) or lab(j, k, b) in unit_set:
                    continue
                for c in data.simples:
                    n = data.n(a, b, c)
                    if n and (data.s(c), data.t(c)) == (si, sk):
                        N[(lab(i, j, a), lab(j, k, b), lab(i, k, c))] = n
    F = {}
    for (a, b, c, d), m in data.F.items():
        for (i, si), (j, sj), (k, sk), (l, sl) in itertools.product(pos, pos, pos, pos):
            ok = (
                (data.s(a), data.t(a)) == (si, sj)
                and (data.s(b), data.t(b)) == (sj, sk)
                and (data.s(c), data.t(c)) == (sk, sl)
                and (data.s(d), data.t(d)) == (si, sl)
            )
            if ok:
                F[(lab(i, j, a), lab(j, k, b), lab(k, l, c), lab(i, l, d))] = m
    out = FusionData(
        simples=tuple(simples),
        units=units,
        grading=grading,
        dual=dual,
        N=N,
        F=F,
    )
    weight = SphericalWeight((psi.of_unit(data, ua), psi.of_unit(data, ub)))
    return out, weight


class _LinkingBuilder:
    """Numeric skeletonization of the category of bimodules among a list
    of H*-algebras: simples, fusion rules, duals and F-matrices, all
    extracted from relative tensors in orthonormal intertwiner bases."""

    def __init__(self, eng: Engine, algebras, tol: Tolerance, seed: int):
        self.eng = eng
        self.algebras = list(algebras)
        self.tol = tol
        self.seed = seed
        self._tensors = {}
        self._onbs = {}
        self.simples = {}  # (i, j) -> list of Bimodule
        self.labels = {}  # id(Bimodule) -> label
        self.units = []
        self._enumerate()

    # -- simples ---------------------------------------------------------

    def _enumerate(self):
        eng, tol = self.eng, self.tol
        n = len(self.algebras)
        for i, j in itertools.product(range(n), range(n)):
            found = []
            for c in eng.data.simples:
                F = free_bimodule(self.algebras[i], c, self.algebras[j])
                if not any(F.obj):
                    continue
                assert verify_bimodule(F, tol) < 1e-8
                for piece, _ in split_bimodule(F, tol, self.seed):
                    if not any(bimodule_homs(piece, old, tol) for old in found):
                        found.append(piece)
            if i == j:
                # canonical representative for the unit: the algebra itself
                unit = algebra_bimodule(self.algebras[i])
                found = [unit] + [
                    p for p in found if not bimodule_homs(p, unit, tol)
                ]
            self.simples[(i, j)] = found
        order = []
        for i, j in itertools.product(range(n), range(n)):
            for k, X in enumerate(self.simples[(i, j)]):
                label = f"{i}{j}:{k}"
                self.labels[id(X)] = label
                order.append((label, (i, j), X))
        self.order = order
        self.units = [self.labels[id(self.simples[(i, i)][0])] for i in range(n)]

    def block_of(self, X: Bimodule):
        for (i, j), lst in self.simples.items():
            for Y in lst:
                if Y is X:
                    return (i, j)
        raise KeyError("not a registered simple")

    def is_unit(self, X: Bimodule) -> bool:
        i, j = self.block_of(X)
        return i == j and self.simples[(i, j)][0] is X

    # -- tensors and intertwiner bases ----------------------------------

    def tensor(self, X: Bimodule, Y: Bimodule):
        key = (id(X), id(Y))
        if key not in self._tensors:
            self._tensors[key] = relative_tensor(X, Y, self.tol)
        return self._tensors[key]

    def onb(self, X: Bimodule, Y: Bimodule):
        """dict simple Z -> orthonormal isometries Z -> X (x)_A Y; unit
        factors use the (unitary) unitors so the unit F-matrices come out
        strict."""
        key = (id(X), id(Y))
        if key in self._onbs:
            return self._onbs[key]
        eng = self.eng
        T, Vw, _ = self.tensor(X, Y)
        i, _ = self.block_of(X)
        _, l = self.block_of(Y)
        out = {}
        if self.is_unit(X):
            lu = left_unitor(X.right, Y, Vw)
            out = {id(Y): [eng.dagger(lu)]}
        elif self.is_unit(Y):
            ru = right_unitor(X, Y.left, Vw)
            out = {id(X): [eng.dagger(ru)]}
        else:
            for Z in self.simples[(i, l)]:
                basis = bimodule_homs(Z, T, self.tol)
                if basis:
                    out[id(Z)] = _gram_onb(eng, basis)
        self._onbs[key] = out
        return out

    def fusion_mults(self):
        N = {}
        for lx, bx, X in self.order:
            if self.is_unit(X):
                continue
            for ly, by, Y in self.order:
                if self.is_unit(Y) or bx[1] != by[0]:
                    continue
                ob = self.onb(X, Y)
                for lz, _, Z in self.order:
                    fs = ob.get(id(Z))
                    if fs:
                        N[(lx, ly, lz)] = len(fs)
        return N

    def duals(self):
        dual = {}
        for lx, (i, j), X in self.order:
            Xd, _, _ = dual_bimodule_delta0(X)
            matches = [
                self.labels[id(Z)]
                for Z in self.simples[(j, i)]
                if bimodule_homs(Xd, Z, self.tol)
            ]
            assert len(matches) == 1
            dual[lx] = matches[0]
        return dual

    # -- associator matrix elements -------------------------------------

    def f_matrices(self):
        eng = self.eng
        F = {}
        triples = [
            (lx, X, ly, Y, lz, Z)
            for lx, bx, X in self.order
            for ly, by, Y in self.order
            for lz, bz, Z in self.order
            if not (self.is_unit(X) or self.is_unit(Y) or self.is_unit(Z))
            and bx[1] == by[0]
            and by[1] == bz[0]
        ]
        for lx, X, ly, Y, lz, Z in triples:
            TXY, VXY, _ = self.tensor(X, Y)
            TL, VL, _ = self.tensor(TXY, Z)
            TYZ, VYZ, _ = self.tensor(Y, Z)
            TR, VR, _ = self.tensor(X, TYZ)
            WL = eng.compose(eng.whisker_right_obj(VXY, Z.obj), VL)
            WR = eng.compose(eng.whisker_left_obj(X.obj, VYZ), VR)
            alpha = eng.compose(eng.dagger(WR), WL)
            i, l = self.block_of(X)[0], self.block_of(Z)[1]
            for D in self.simples[(i, l)]:
                rows = []
                for E in self.simples[(i, self.block_of(Y)[1])]:
                    for r1 in self.onb(X, Y).get(id(E), []):
                        TEZ, VEZ, _ = self.tensor(E, Z)
                        lift = eng.compose(
                            eng.dagger(VL),
                            eng.compose(eng.whisker_right_obj(r1, Z.obj), VEZ),
                        )
                        for r2 in self.onb(E, Z).get(id(D), []):
                            rows.append(eng.compose(lift, r2))
                cols = []
                for G in self.simples[(self.block_of(Y)[0], l)]:
                    for c1 in self.onb(Y, Z).get(id(G), []):
                        TXG, VXG, _ = self.tensor(X, G)
                        lift = eng.compose(
                            eng.dagger(VR),
                            eng.compose(eng.whisker_left_obj(X.obj, c1), VXG),
                        )
                        for c2 in self.onb(X, G).get(id(D), []):
                            cols.append(eng.compose(lift, c2))
                if not rows:
                    continue
                m = np.zeros((len(rows), len(cols)), dtype=complex)
                for a, R in enumerate(rows):
                    aR = eng.compose(alpha, R)
                    for b, C in enumerate(cols):
                        m[a, b] = _bimodule_endo_scalar(
                            eng, eng.compose(eng.dagger(C), aR)
                        )
                F[(lx, ly, lz, self.labels[id(D)])] = m
        return F

    # -- final assembly --------------------------------------------------

    def fusion_data(self):
        grading = {}
        dual = self.duals()
        for lx, (i, j), X in self.order:
            grading[lx] = (self.units[i], self.units[j])
        data = FusionData(
            simples=tuple(lx for lx, _, _ in self.order),
            units=tuple(self.units),
            grading=grading,
            dual=dual,
            N=self.fusion_mults(),
            F=self.f_matrices(),
        )
        weight = SphericalWeight(
            [monad_psi(A, A.identity()).real for A in self.algebras]
        )
        return data, weight


def algebra_linking(
    eng: Engine, algebras, tol: Tolerance = DEFAULT_TOL, seed: int = 0
):
    builder = _LinkingBuilder(eng, algebras, tol, seed)
    return builder.fusion_data()


def linking_e1(
    X: Pre3HilbPresentation, a, b, tol: Tolerance = DEFAULT_TOL, seed: int = 0
):
    """The 2x2 linking multifusion category of a pair of objects, with
    its weight; the output is re-validated before being returned."""
    eng = X.eng
    if isinstance(a, DeloopObject) and isinstance(b, DeloopObject):
        data, weight = _deloop_linking(eng, a.unit, b.unit, tol)
    else:
        algs = []
        for obj in (a, b):
            if isinstance(obj, MonadObject):
                algs.append(obj.algebra)
            elif isinstance(obj, DeloopObject):
                algs.append(trivial_algebra(eng, obj.unit))
            else:
                raise TypeError(f"unsupported linking operand: {obj!r}")
        data, weight = algebra_linking(eng, algs, tol, seed)
    cert = validate(data, tol)
    if not cert.ok:
        raise ValueError(f"assembled linking data fails validation: {cert.failed_axiom}")
    return data, weight, cert


# --- hom 2-Hilbert spaces ----------------------------------------------


def hom_two_hilbert(
    X: Pre3HilbPresentation, a, b, samples: int = 5, seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
):
    """The hom-category a -> b as a 2-Hilbert space, with the left/right
    loop traces certified to agree."""
    from .hilb2 import TwoHilbertSpace

    eng = X.eng
    if isinstance(a, DeloopObject) and isinstance(b, DeloopObject):
        data = eng.data
        labels = tuple(
            c for c in data.simples if data.s(c) == a.unit and data.t(c) == b.unit
        )
        dims = tuple(eng.udf.d(c) for c in labels)
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            mult = {c: int(rng.integers(1, 3)) for c in labels}
            O = eng.obj(mult)
            if not any(O):
                break
            f = eng.random_mor((O,), (O,), rng)
            tl = eng.psi_of_unit_endo(eng.trace_left(f))
            tr = eng.psi_of_unit_endo(eng.trace_right(f))
            direct = eng.categorical_trace(f)
            worst = max(worst, abs(tl - tr), abs(tl - direct))
        cert = Certificate(
            ok=worst <= tol.bound(1.0 + sum(dims)),
            residuals={"loop_agreement": worst},
            failed_axiom=None if worst <= tol.bound(1.0 + sum(dims)) else "sphericality",
        )
        return TwoHilbertSpace(labels, dims), cert
    if isinstance(b, MonadObject) and isinstance(a, (DeloopObject, MonadObject)):
        if isinstance(a, MonadObject) and a.algebra is not b.algebra:
            raise NotImplementedError("monad-monad hom beyond the diagonal")
        mc = module_category(eng, b.algebra, tol, seed)
        rng = np.random.default_rng(seed)
        worst = 0.0
        M = mc.simples[0]
        for _ in range(samples):
            f = eng.random_mor(M.word, M.word, rng)
            g = eng.random_mor(M.word, M.word, rng)
            t1 = module_trace(M, eng.compose(f, g))
            t2 = module_trace(M, eng.compose(g, f))
            worst = max(worst, abs(t1 - t2))
        space = mc.two_hilbert()
        cert = Certificate(
            ok=worst <= tol.bound(1.0 + sum(mc.dims)),
            residuals={"traciality": worst},
            failed_axiom=None
            if worst <= tol.bound(1.0 + sum(mc.dims))
            else "traciality",
        )
        return space, cert
    raise NotImplementedError(f"hom category for {a!r} -> {b!r}")


# --- isometry classification -------------------------------------------


@dataclass
class UAFData:
    """Evaluation/coevaluation data for one 1-morphism, with optional
    isometries identifying the split (relative tensor) domains."""

    ev: Mor
    coev: Mor
    ev_split: Mor | None = None
    coev_split: Mor | None = None


def object_uaf(eng: Engine, O) -> UAFData:
    if isinstance(O, str):
        O = eng.simple_obj(O)
    return UAFData(ev=eng.ev_obj(O), coev=eng.coev_obj(O))


def inclusion_uaf(X: Pre3HilbPresentation, S: SumObject, j: int) -> UAFData:
    """The UAF data of the coordinate inclusion I_j: a_j -> S: both cups
    are strict except for the inclusion itself."""
    eng = X.eng
    inc = sum_isometries(X, S)[j]
    u = S.parts[j]
    return UAFData(ev=inc, coev=eng.identity((eng.simple_obj(u),)))


def splitting_uaf(B: AlgebraObject, tol: Tolerance = DEFAULT_TOL) -> UAFData:
    """The algebra B as a bimodule from its own monad to the standard
    unit 1_B, with the delta = 0 cups composed with the splitting
    isometries of the relative tensors."""
    eng = B.eng
    M = algebra_bimodule(B)
    Md, ev0, coev0 = dual_bimodule_delta0(M)
    _, Vev, _ = relative_tensor(Md, M, tol)
    _, Vco, _ = relative_tensor(M, Md, tol)
    return UAFData(
        ev=ev0,
        coev=coev0,
        ev_split=eng.compose(ev0, Vev),
        coev_split=eng.compose(eng.dagger(Vco), coev0),
    )


def _unitarity_residual(eng: Engine, f: Mor) -> float:
    r1 = eng.residual(eng.compose(eng.dagger(f), f), eng.identity(f.dom))
    r2 = eng.residual(eng.compose(f, eng.dagger(f)), eng.identity(f.cod))
    return max(r1, r2)


def certify_isometry_1mor(
    eng: Engine, uaf: UAFData, tol: Tolerance = DEFAULT_TOL
):
    """Classify a dualizable 1-morphism: coev unitary makes it an
    isometry, ev unitary a coisometry, both an isometric equivalence."""
    if uaf is None or uaf.ev is None or uaf.coev is None:
        raise MissingDualityData("no evaluation/coevaluation data")
    ev = uaf.ev_split if uaf.ev_split is not None else uaf.ev
    coev = uaf.coev_split if uaf.coev_split is not None else uaf.coev
    ev_defect = _unitarity_residual(eng, ev)
    coev_defect = _unitarity_residual(eng, coev)
    scale = 1.0 + eng.l2_norm(ev) + eng.l2_norm(coev)
    ev_ok = ev_defect <= tol.bound(scale)
    coev_ok = coev_defect <= tol.bound(scale)
    if ev_ok and coev_ok:
        kind = "IsometricEquivalence"
    elif coev_ok:
        kind = "Isometry"
    elif ev_ok:
        kind = "Coisometry"
    else:
        kind = "Neither"
    return kind, {"ev_unitarity": ev_defect, "coev_unitarity": coev_defect}


# --- splitting H*-monads -----------------------------------------------


@dataclass
class MonadSplitting:
    algebra: AlgebraObject  # the monad, now an object of its own
    bimodule: Bimodule  # B as a (trivial, B) bimodule
    pair: Bimodule  # B (x)_B B^dual with the pair-monad structure
    mu_T: Mor
    iota_T: Mor
    u: Mor  # B -> B (x)_B B^dual
    certificate: Certificate


def split_monad(
    B: AlgebraObject, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> MonadSplitting:
    """Split the monad B over the trivial algebra: exhibit B as
    X (x)_B X^dual for X = B as a (1, B) bimodule, with a certified
    unitary algebra isomorphism u."""
    eng = B.eng
    unit = next(u for u in eng.data.units if eng.mult(B.obj, u))
    cert0 = verify_hstar(B, tol, seed)
    if not cert0.ok:
        raise ValueError(f"monad fails H* certification: {cert0.failed_axiom}")
    A = trivial_algebra(eng, unit)
    M = left_trivial_bimodule(Module(B, B.obj, B.mu), unit)
    Md, ev0, coev0 = dual_bimodule_delta0(M)
    T, Vw, _ = relative_tensor(M, Md, tol)
    m, md = M.obj, Md.obj
    # ev0 ev0^dag is a positive scalar on the connected algebra B; the
    # scalar normalizes the middle contraction of the pair monad
    ee = eng.compose(ev0, eng.dagger(ev0))
    dimB = sum(len(eng.basis((B.obj,), c)) for c in eng.support((B.obj,)))
    lam = (
        sum(np.trace(b) for b in ee.blocks.values()).real / dimB
    )
    ev_norm = eng.residual(ee, eng.scale(lam, eng.identity((B.obj,))))
    # pair-monad structure on T = X (x)_B X^dual
    mid = eng.whisker_left((m,), eng.whisker_right(ev0, (md,)))  # -> (m, B, md)
    absorb = eng.whisker_left((m,), Md.lam)  # (m, B, md) -> (m, md)
    mu_T = eng.scale(
        1.0 / np.sqrt(lam),
        eng.compose(
            eng.dagger(Vw),
            eng.compose(absorb, eng.compose(mid, eng.tensor(Vw, Vw))),
        ),
    )
    c0 = eng.compose(coev0, A.iota)  # () -> (m, md)
    iota_T = eng.compose(eng.dagger(Vw), c0)
    # u: multiply into the left leg of coev0
    w = eng.compose(
        eng.whisker_right_obj(B.mu, md),
        eng.whisker_left((B.obj,), c0),
    )  # (B,) -> (m, md)
    u = eng.compose(eng.dagger(Vw), w)
    resid = {
        "u_unitarity": _unitarity_residual(eng, u),
        "u_multiplicative": eng.residual(
            eng.compose(u, B.mu), eng.compose(mu_T, eng.tensor(u, u))
        ),
        "u_unital": eng.residual(eng.compose(u, B.iota), iota_T),
        "ev_normalization": ev_norm,
    }
    scale = 1.0 + eng.l2_norm(u)
    ok = all(v <= tol.bound(scale) for v in resid.values())
    axiom = None
    if not ok:
        axiom = max(resid, key=resid.get)
    cert = Certificate(ok=ok, residuals=resid, failed_axiom=axiom)
    pair = Bimodule(A, A, T.obj, T.lam, T.rho)
    return MonadSplitting(B, M, pair, mu_T, iota_T, u, cert)


# --- weight on module categories and the comparison --------------------


def weight_mod_dagger(
    eng: Engine,
    A: AlgebraObject,
    eta=None,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
):
    """Psi on module natural endomorphisms of id over the category of
    A-modules: sum of d_m Tr_m(eta_m), with the per-component rescaling
    by the reciprocal of the renormalization value."""
    mc = module_category(eng, A, tol, seed)
    dims = list(mc.dims)
    if eta is None:
        eta = [1.0] * len(dims)
    raw = sum(z * d * d for z, d in zip(eta, dims))
    _, prefactors = renorm_scalar(eng.data, eng.udf.psi, tol)
    units = [u for u in eng.data.units if eng.mult(A.obj, u)]
    # modules over an algebra in one component rescale uniformly
    pre = prefactors[units[0]]
    return {
        "dims": dims,
        "raw": complex(raw),
        "prefactor": pre,
        "rescaled": complex(pre * raw),
    }


def theorem_b_check(
    data: FusionData,
    psi: SphericalWeight,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> Certificate:
    """Compare Psi at the standard unit monad with the rescaled Psi at
    the column module category; both must equal the unit weight."""
    if len(data.components()) != 1:
        raise ValueError("comparison requires an indecomposable category")
    eng = Engine(data, udf_from_weight(data, psi, tol))
    u1 = data.units[0]
    psi1 = psi.of_unit(data, u1)
    A = trivial_algebra(eng, u1)
    lhs = monad_psi(A, A.identity()).real
    rhs = weight_mod_dagger(eng, A, tol=tol, seed=seed)["rescaled"].real
    resid = {
        "monad_side": abs(lhs - psi1),
        "module_side": abs(rhs - psi1),
        "gap": abs(lhs - rhs),
    }
    ok = all(v <= tol.bound(psi1) for v in resid.values())
    return Certificate(
        ok=ok,
        residuals=resid,
        details={"psi_1": psi1, "monad": lhs, "modules": rhs},
        failed_axiom=None if ok else "weight comparison",
    )


# --- uniqueness of the unitary adjoint family --------------------------


def canonical_uaf(eng: Engine):
    """One (ev, coev) pair per simple from the engine's cups."""
    return {
        c: (eng.ev_simple(c), eng.coev_simple(c)) for c in eng.data.simples
    }


def gauge_uaf(eng: Engine, phases: dict):
    """Rescale a candidate by unit phases (zig-zags preserved)."""
    out = {}
    for c, (ev, coev) in canonical_uaf(eng).items():
        z = phases.get(c, 1.0)
        out[c] = (eng.scale(z, ev), eng.scale(1.0 / z, coev))
    return out


def _candidate_sphericality(eng: Engine, cand, tol: Tolerance) -> float:
    worst = 0.0
    for c, (ev, coev) in cand.items():
        left = eng.psi_of_unit_endo(eng.compose(ev, eng.dagger(ev)))
        right = eng.psi_of_unit_endo(eng.compose(eng.dagger(coev), coev))
        worst = max(worst, abs(left - right) / max(1.0, abs(left)))
    return worst


def uaf_uniqueness_check(
    eng: Engine, cand1, cand2, tol: Tolerance = DEFAULT_TOL
) -> Certificate:
    """Compare two adjoint-family candidates: after checking each makes
    the loop traces spherical, the mixed comparison cup composite must
    be unitary on every generator."""
    for name, cand in (("first", cand1), ("second", cand2)):
        defect = _candidate_sphericality(eng, cand, tol)
        if defect > tol.bound():
            raise CandidateNotSpherical(
                f"{name} candidate has loop asymmetry {defect:.3e}"
            )
    worst = 0.0
    residuals = {}
    for c in eng.data.simples:
        ev1, _ = cand1[c]
        _, coev2 = cand2[c]
        cb = eng.simple_obj(eng.data.dual[c])
        zeta = eng.compose(
            eng.whisker_right(ev1, (cb,)),
            eng.whisker_left((cb,), coev2),
        )
        d = _unitarity_residual(eng, zeta)
        residuals[f"zeta[{c}]"] = d
        worst = max(worst, d)
    ok = worst <= tol.bound()
    return Certificate(
        ok=ok,
        residuals=residuals,
        failed_axiom=None if ok else "comparison unitarity",
    )


# --- decomposition into simples ----------------------------------------


def decompose_simples(
    X: Pre3HilbPresentation, a, tol: Tolerance = DEFAULT_TOL, seed: int = 0
):
    """Split the unit 1-morphism of an object into simple summands with
    inclusion isometries; the summand resolution is certified."""
    eng = X.eng
    if isinstance(a, DeloopObject):
        ident = eng.identity((eng.simple_obj(a.unit),))
        return [(a.unit, ident)], Certificate(ok=True, residuals={"resolution": 0.0})
    if isinstance(a, SumObject):
        incs = sum_isometries(X, a)
        cert = certify_hilbert_sum(X, a, samples=1, seed=seed, tol=tol)
        return list(zip(a.parts, incs)), cert
    if isinstance(a, MonadObject):
        M = algebra_bimodule(a.algebra)
        pieces = split_bimodule(M, tol, seed)
        O = M.word
        total = eng.zero(O, O)
        out = []
        for k, (piece, V) in enumerate(pieces):
            total = eng.add(total, eng.compose(V, eng.dagger(V)))
            out.append((f"{a.label}.{k}", V))
        defect = eng.residual(total, eng.identity(O))
        ok = defect <= tol.bound() * 10
        return out, Certificate(
            ok=ok,
            residuals={"resolution": defect},
            failed_axiom=None if ok else "direct-sum resolution",
        )
    raise TypeError(f"not a presentation object: {a!r}")

"""String-diagram engine over a skeletal multifusion category.

Objects are multiplicity vectors over the simples; a tensor word is a
tuple of such vectors. A morphism between words is stored chargewise:
Hom(X -> Y) = (+)_c Hom(c -> Y) (x) Hom(c -> X)^*, with both hom spaces
in their right-comb fusion-tree bases. Tree vertices are isometries, so
composition is blockwise matrix multiplication and the dagger is the
blockwise conjugate transpose.

Right whiskering f (x) id is computed through the grouped-basis unitary
that re-expresses "tree of W fused with one extra strand" trees in the
right-comb basis; that unitary is assembled recursively from one F-symbol
per level. Cups and caps carry explicit coefficients alpha_c, beta_c from
the unitary dual functor data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class WordMismatch(ValueError):
    pass


@dataclass
class Mor:
    """Chargewise matrix presentation of a morphism dom -> cod."""

    eng: "Engine"
    dom: tuple
    cod: tuple
    blocks: dict  # simple label -> (dim Hom(c->cod), dim Hom(c->dom)) matrix


class Engine:
    def __init__(self, data, udf=None):
        self.data = data
        self.udf = udf
        self._basis = {}
        self._index = {}
        self._support = {}
        self._group = {}
        self._fcache = {}
        self._unit_of = {u: u for u in data.units}

    # --- objects and words ----------------------------------------------

    def obj(self, mults):
        """Multiplicity vector over the simples, from a dict or sequence."""
        if isinstance(mults, dict):
            for k in mults:
                if k not in self.data.index:
                    raise KeyError(f"unknown simple {k}")
            return tuple(int(mults.get(c, 0)) for c in self.data.simples)
        out = tuple(int(m) for m in mults)
        if len(out) != len(self.data.simples):
            raise WordMismatch("one multiplicity per simple required")
        return out

    def simple_obj(self, c):
        return self.obj({c: 1})

    def dual_obj(self, O):
        out = [0] * len(self.data.simples)
        for i, c in enumerate(self.data.simples):
            out[self.data.index[self.data.dual[c]]] += O[i]
        return tuple(out)

    def mult(self, O, x) -> int:
        return O[self.data.index[x]]

    # --- tree bases ------------------------------------------------------

    def basis(self, word, c):
        """Right-comb tree basis of Hom(c -> word). Entries for nonempty
        words are (x, alpha, e, v, sub_index): strand simple x, copy alpha,
        inner charge e, vertex v in V(x, e; c), tree index into
        basis(word[1:], e)."""
        key = (word, c)
        if key in self._basis:
            return self._basis[key]
        if not word:
            out = [()] if c in self._unit_of else []
        else:
            O, rest = word[0], word[1:]
            out = []
            for x in self.data.simples:
                if self.mult(O, x) == 0:
                    continue
                for alpha in range(self.mult(O, x)):
                    for e in self.support(rest):
                        for v in range(self.data.n(x, e, c)):
                            for si in range(len(self.basis(rest, e))):
                                out.append((x, alpha, e, v, si))
        self._basis[key] = out
        self._index[key] = {b: i for i, b in enumerate(out)}
        return out

    def basis_index(self, word, c):
        self.basis(word, c)
        return self._index[(word, c)]

    def support(self, word):
        if word not in self._support:
            self._support[word] = tuple(
                c for c in self.data.simples if self.basis(word, c)
            )
        return self._support[word]

    def hom_dim(self, X, Y) -> int:
        return sum(
            len(self.basis(Y, c)) * len(self.basis(X, c)) for c in self.support(X)
        )

    # --- morphism constructors -------------------------------------------

    def block(self, f: Mor, c) -> np.ndarray:
        b = f.blocks.get(c)
        if b is None:
            return np.zeros((len(self.basis(f.cod, c)), len(self.basis(f.dom, c))), dtype=complex)
        return b

    def mor(self, dom, cod, blocks) -> Mor:
        out = {}
        for c, m in blocks.items():
            m = np.asarray(m, dtype=complex)
            shape = (len(self.basis(cod, c)), len(self.basis(dom, c)))
            if m.shape != shape:
                raise WordMismatch(f"block {c}: shape {m.shape}, expected {shape}")
            if np.any(m != 0):
                out[c] = m
        return Mor(self, dom, cod, out)

    def identity(self, word) -> Mor:
        return Mor(
            self,
            word,
            word,
            {c: np.eye(len(self.basis(word, c)), dtype=complex) for c in self.support(word)},
        )

    def zero(self, dom, cod) -> Mor:
        return Mor(self, dom, cod, {})

    def random_mor(self, dom, cod, rng) -> Mor:
        blocks = {}
        for c in self.support(dom):
            nr, nc = len(self.basis(cod, c)), len(self.basis(dom, c))
            if nr and nc:
                blocks[c] = rng.standard_normal((nr, nc)) + 1j * rng.standard_normal((nr, nc))
        return Mor(self, dom, cod, blocks)

    # --- dagger category operations --------------------------------------

    def compose(self, f: Mor, g: Mor) -> Mor:
        """f o g."""
        if g.cod != f.dom:
            raise WordMismatch("composition word mismatch")
        blocks = {}
        for c, gb in g.blocks.items():
            fb = f.blocks.get(c)
            if fb is not None:
                blocks[c] = fb @ gb
        return self.mor(g.dom, f.cod, blocks)

    def dagger(self, f: Mor) -> Mor:
        return Mor(self, f.cod, f.dom, {c: b.conj().T for c, b in f.blocks.items()})

    def add(self, f: Mor, g: Mor) -> Mor:
        if f.dom != g.dom or f.cod != g.cod:
            raise WordMismatch("sum word mismatch")
        blocks = dict(f.blocks)
        for c, b in g.blocks.items():
            blocks[c] = blocks.get(c, 0) + b
        return self.mor(f.dom, f.cod, blocks)

    def scale(self, z, f: Mor) -> Mor:
        return self.mor(f.dom, f.cod, {c: z * b for c, b in f.blocks.items()})

    def sub(self, f: Mor, g: Mor) -> Mor:
        return self.add(f, self.scale(-1.0, g))

    def l2_norm(self, f: Mor) -> float:
        return float(np.sqrt(sum(np.linalg.norm(b) ** 2 for b in f.blocks.values())))

    def residual(self, f: Mor, g: Mor) -> float:
        return self.l2_norm(self.sub(f, g))

    # --- whiskering -------------------------------------------------------

    def _fsym(self, a, b, c, d):
        key = (a, b, c, d)
        if key not in self._fcache:
            m = self.data.f_matrix(a, b, c, d)
            rows = {r: i for i, r in enumerate(self.data.tree_rows(a, b, c, d))}
            cols = list(self.data.tree_cols(a, b, c, d))
            self._fcache[key] = (m, rows, cols)
        return self._fcache[key]

    def _grouped(self, W, O, c):
        """Basis of Hom(c -> W (x) O) grouped as vertex V(d, y; c) on a tree
        of W at charge d, one strand y from O: entries (y, beta, d, u, ti)."""
        out = []
        for y in self.data.simples:
            if self.mult(O, y) == 0:
                continue
            for beta in range(self.mult(O, y)):
                for d in self.support(W):
                    for u in range(self.data.n(d, y, c)):
                        for ti in range(len(self.basis(W, d))):
                            out.append((y, beta, d, u, ti))
        return out

    def group_last(self, W, O, c):
        """Unitary from the grouped basis of Hom(c -> W (x) O) to the
        right-comb basis of the concatenated word. Returns (grouped,
        index dict, matrix)."""
        key = (W, O, c)
        if key in self._group:
            return self._group[key]
        target = W + (O,)
        comb_idx = self.basis_index(target, c)
        grouped = self._grouped(W, O, c)
        gidx = {g: i for i, g in enumerate(grouped)}
        U = np.zeros((len(self.basis(target, c)), len(grouped)), dtype=complex)
        if not W:
            for col, (y, beta, d, u, ti) in enumerate(grouped):
                # d is the unit s(y); the vertex is the strict unitor
                tgt = (y, beta, self.data.t(y), 0, 0)
                U[comb_idx[tgt], col] = 1.0
        else:
            Wp = W[1:]
            for col, (y, beta, d, u, ti) in enumerate(grouped):
                x1, a1, e1, v1, si = self.basis(W, d)[ti]
                fm, frow, fcols = self._fsym(x1, e1, y, c)
                row = fm[frow[(d, v1, u)], :]
                for j, (g, t, r) in enumerate(fcols):
                    coeff = row[j]
                    if coeff == 0:
                        continue
                    gp, gp_idx, Up = self.group_last(Wp, O, g)
                    colvec = Up[:, gp_idx[(y, beta, e1, t, si)]]
                    for k in np.flatnonzero(np.abs(colvec) > 0):
                        tgt = (x1, a1, g, r, int(k))
                        U[comb_idx[tgt], col] += coeff * colvec[k]
        self._group[key] = (grouped, gidx, U)
        return self._group[key]

    def whisker_right_obj(self, f: Mor, O) -> Mor:
        """f (x) id_O for a single object O."""
        X, Y = f.dom, f.cod
        blocks = {}
        charges = set(self.support(X + (O,))) | set(self.support(Y + (O,)))
        for c in charges:
            gX, gXi, UX = self.group_last(X, O, c)
            gY, gYi, UY = self.group_last(Y, O, c)
            if not gX or not gY:
                continue
            M = np.zeros((len(gY), len(gX)), dtype=complex)
            for j, (y, beta, d, u, ti) in enumerate(gX):
                fb = f.blocks.get(d)
                if fb is None:
                    continue
                for si in range(len(self.basis(Y, d))):
                    v = fb[si, ti]
                    if v != 0:
                        M[gYi[(y, beta, d, u, si)], j] = v
            blocks[c] = UY @ M @ UX.conj().T
        return self.mor(X + (O,), Y + (O,), blocks)

    def whisker_left_obj(self, O, f: Mor) -> Mor:
        """id_O (x) f."""
        X, Y = f.dom, f.cod
        dom, cod = (O,) + X, (O,) + Y
        blocks = {}
        for c in self.support(dom):
            cod_idx = self.basis_index(cod, c)
            nrows = len(self.basis(cod, c))
            ncols = len(self.basis(dom, c))
            M = np.zeros((nrows, ncols), dtype=complex)
            for j, (x, alpha, e, v, ti) in enumerate(self.basis(dom, c)):
                fb = f.blocks.get(e)
                if fb is None:
                    continue
                for si in range(len(self.basis(Y, e))):
                    val = fb[si, ti]
                    if val != 0:
                        M[cod_idx[(x, alpha, e, v, si)], j] = val
            blocks[c] = M
        return self.mor(dom, cod, blocks)

    def whisker_right(self, f: Mor, word) -> Mor:
        for O in word:
            f = self.whisker_right_obj(f, O)
        return f

    def whisker_left(self, word, f: Mor) -> Mor:
        for O in reversed(word):
            f = self.whisker_left_obj(O, f)
        return f

    def tensor(self, f: Mor, g: Mor) -> Mor:
        return self.compose(self.whisker_left(f.cod, g), self.whisker_right(f, g.dom))

    # --- fusing a word into a single object -------------------------------

    def fuse(self, word):
        """(O, u) with u: word -> (O,) unitary; O[c] = dim Hom(c -> word).

        The comb tree basis is itself the identification, so every block
        of u is an identity matrix in the canonical orders.
        """
        O = tuple(len(self.basis(word, c)) for c in self.data.simples)
        blocks = {
            c: np.eye(len(self.basis(word, c)), dtype=complex)
            for c in self.support(word)
        }
        return O, self.mor(word, (O,), blocks)

    # --- inclusions, cups, caps ------------------------------------------

    def include(self, O, x, alpha) -> Mor:
        """Isometry (x,) -> (O,) onto copy alpha of the simple x."""
        c = x
        idx = self.basis_index((O,), c)[(x, alpha, self.data.t(x), 0, 0)]
        m = np.zeros((len(self.basis((O,), c)), 1), dtype=complex)
        m[idx, 0] = 1.0
        return self.mor((self.simple_obj(x),), (O,), {c: m})

    def _raw_ev(self, c) -> Mor:
        """Dagger of the pairing tree vertex 1_{t(c)} -> dual(c) (x) c."""
        cb = self.data.dual[c]
        dom = (self.simple_obj(cb), self.simple_obj(c))
        u = self.data.t(c)
        m = np.ones((1, len(self.basis(dom, u))), dtype=complex)
        assert m.shape[1] == 1  # N_{dual(c),c}^{1_t} = 1
        return self.mor(dom, (), {u: m})

    def _raw_coev(self, c) -> Mor:
        cb = self.data.dual[c]
        cod = (self.simple_obj(c), self.simple_obj(cb))
        u = self.data.s(c)
        m = np.ones((len(self.basis(cod, u)), 1), dtype=complex)
        assert m.shape[0] == 1
        return self.mor((), cod, {u: m})

    def zigzag_scalar(self, c) -> complex:
        """(id_c (x) raw_ev)(raw_coev (x) id_c) = theta_c id_c."""
        left = self.whisker_right_obj(self._raw_coev(c), self.simple_obj(c))
        right = self.whisker_left_obj(self.simple_obj(c), self._raw_ev(c))
        z = self.compose(right, left)
        return complex(self.block(z, c)[0, 0])

    def ev_simple(self, c) -> Mor:
        return self.scale(self.udf.alpha[c], self._raw_ev(c))

    def coev_simple(self, c) -> Mor:
        return self.scale(self.udf.beta[c], self._raw_coev(c))

    def ev_obj(self, O) -> Mor:
        """dual(O) (x) O -> unit, pairing copy alpha of c with copy alpha
        of dual(c)."""
        Od = self.dual_obj(O)
        out = self.zero((Od, O), ())
        for x in self.data.simples:
            xb = self.data.dual[x]
            for alpha in range(self.mult(O, x)):
                proj = self.tensor(
                    self.dagger(self.include(Od, xb, alpha)),
                    self.dagger(self.include(O, x, alpha)),
                )
                out = self.add(out, self.compose(self.ev_simple(x), proj))
        return out

    def coev_obj(self, O) -> Mor:
        Od = self.dual_obj(O)
        out = self.zero((), (O, Od))
        for x in self.data.simples:
            xb = self.data.dual[x]
            for alpha in range(self.mult(O, x)):
                incl = self.tensor(self.include(O, x, alpha), self.include(Od, xb, alpha))
                out = self.add(out, self.compose(incl, self.coev_simple(x)))
        return out

    # --- traces -----------------------------------------------------------

    def categorical_trace(self, f: Mor) -> complex:
        """Tr(f) = sum_c d_c tr(f_c) for an endomorphism of a word."""
        if f.dom != f.cod:
            raise WordMismatch("trace of a non-endomorphism")
        return complex(sum(self.udf.d(c) * np.trace(b) for c, b in f.blocks.items()))

    def trace_right(self, f: Mor) -> Mor:
        """Right closed loop of f in End((O,)), as an endo of the unit."""
        (O,) = f.dom
        coev = self.coev_obj(O)
        mid = self.whisker_right_obj(f, self.dual_obj(O))
        return self.compose(self.dagger(coev), self.compose(mid, coev))

    def trace_left(self, f: Mor) -> Mor:
        (O,) = f.dom
        ev = self.ev_obj(O)
        mid = self.whisker_left_obj(self.dual_obj(O), f)
        return self.compose(ev, self.compose(mid, self.dagger(ev)))

    def unit_component(self, z: Mor, u) -> complex:
        if z.dom != () or z.cod != ():
            raise WordMismatch("expected an endomorphism of the unit")
        b = z.blocks.get(u)
        return complex(b[0, 0]) if b is not None else 0.0

    def psi_of_unit_endo(self, z: Mor) -> complex:
        """psi applied to an endomorphism of the tensor unit."""
        psi = self.udf.psi
        return complex(
            sum(
                psi.of_unit(self.data, u) * self.unit_component(z, u)
                for u in self.data.units
            )
        )

    # --- hom spaces as inner product spaces -------------------------------

    def hom_basis(self, X, Y):
        """Elementary-matrix basis of Hom(X -> Y), canonical charge order."""
        out = []
        for c in self.support(X):
            nr, nc = len(self.basis(Y, c)), len(self.basis(X, c))
            for i in range(nr):
                for j in range(nc):
                    m = np.zeros((nr, nc), dtype=complex)
                    m[i, j] = 1.0
                    out.append(self.mor(X, Y, {c: m}))
        return out

    def to_vector(self, f: Mor) -> np.ndarray:
        parts = []
        for c in self.support(f.dom):
            parts.append(self.block(f, c).reshape(-1))
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    def from_vector(self, X, Y, v) -> Mor:
        blocks = {}
        pos = 0
        for c in self.support(X):
            nr, nc = len(self.basis(Y, c)), len(self.basis(X, c))
            blocks[c] = np.asarray(v[pos : pos + nr * nc]).reshape(nr, nc)
            pos += nr * nc
        return self.mor(X, Y, blocks)

    def linear_matrix(self, fun, dom_pair, cod_pair) -> np.ndarray:
        """Matrix of a linear map Hom(dom_pair) -> Hom(cod_pair) given by
        applying fun to morphisms."""
        cols = []
        for b in self.hom_basis(*dom_pair):
            cols.append(self.to_vector(fun(b)))
        n = self.hom_dim(*cod_pair)
        if not cols:
            return np.zeros((n, 0), dtype=complex)
        return np.stack(cols, axis=1)

"""Windowed delta-derivation solver over exact rationals.

A delta-derivation phi satisfies phi[x1..xn] = delta * sum_i [x1,..,phi(xi),..,xn]
(with Koszul signs when phi moves parity).  On an infinite graded algebra the
solver truncates to a degree window |degree2| <= 2W, restricts images to a
degree shift |image - source| <= 2S, assembles every residual equation whose
inputs and bracket outputs stay inside the window, and computes the exact
nullspace.  Windowed artifacts near the boundary are removed by solving a
strictly larger window and keeping only restrictions of its solutions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Optional, Sequence

from .algebras import AlgebraSpec, same_algebra
from .core import Element, Family, ONE, Scalar, ZERO, as_scalar, bidx

__all__ = [
    "LinMapWindow",
    "SolutionSpace",
    "WindowEscapeError",
    "closed_form_map",
    "delta_residual",
    "is_trivial_space",
    "nullspace",
    "solve_delta_derivations",
    "solve_stabilized",
    "stabilize",
]


class WindowEscapeError(ValueError):
    """A residual evaluation needed an index outside the map's source set."""


class LinMapWindow:
    """A linear map given by explicit images on a finite set of sources."""

    __slots__ = ("alg", "window", "shift_bound", "sources", "source_set", "images", "parity")

    def __init__(self, alg, window, images: dict, sources: Sequence | None = None, shift_bound=None):
        self.alg = alg
        self.window = window
        if sources is None:
            sources = alg.window_indices(window)
        self.sources = tuple(sorted(sources))
        self.source_set = frozenset(self.sources)
        src = self.source_set
        self.images = {}
        max_shift2 = 0
        parities = set()
        for s, img in images.items():
            if s not in src:
                raise ValueError(f"image given for {s.token}, which is not a source")
            if img.is_zero():
                continue
            self.images[s] = img
            for t, _ in img.terms.items():
                if not alg.valid_index(t):
                    raise ValueError(f"image index {t.token} is not valid in {alg.name}")
                d = abs(t.degree2 - s.degree2)
                if d > max_shift2:
                    max_shift2 = d
                parities.add(t.parity ^ s.parity)
        computed = (max_shift2 + 1) // 2
        self.shift_bound = computed if shift_bound is None else shift_bound
        if parities == {0} or not parities:
            self.parity = "even"
        elif parities == {1}:
            self.parity = "odd"
        else:
            self.parity = "mixed"

    def __call__(self, idx) -> Element:
        img = self.images.get(idx)
        if img is None:
            if idx not in self.source_set:
                raise WindowEscapeError(f"{idx.token} is outside the map's source window")
            return Element.zero()
        return img

    def apply(self, el: Element) -> Element:
        acc: dict = {}
        for i, c in el.terms.items():
            for oi, oc in self(i).terms.items():
                v = acc.get(oi, ZERO) + c * oc
                if v:
                    acc[oi] = v
                else:
                    acc.pop(oi, None)
        return Element(acc)

    def __repr__(self):
        body = ", ".join(f"{s.token} -> {img!r}" for s, img in sorted(self.images.items()))
        return f"<map {body or '0'}>"


def identity_map(alg, window) -> LinMapWindow:
    srcs = alg.window_indices(window) if not alg.is_finite else list(alg.basis_list)
    return LinMapWindow(alg, window, {s: Element.basis(s) for s in srcs}, sources=srcs)


def delta_residual(alg, phi: LinMapWindow, delta, args: tuple) -> Element:
    """phi[x1..xn] - delta * sum_i (sign) [x1,..,phi(xi),..,xn] on basis args.

    The Koszul sign for an image term of parity shift p in slot i is
    (-1)^{p(|x1|+..+|x_{i-1}|)}.  Raises WindowEscapeError when an argument
    or a bracket output falls outside phi's sources.
    """
    if len(args) != alg.arity:
        raise ValueError(f"expected {alg.arity} arguments, got {len(args)}")
    d = as_scalar(delta)
    src = phi.source_set
    for a in args:
        if a not in src:
            raise WindowEscapeError(f"argument {a.token} is outside the map's source window")
    bout = alg.bracket_basis(args)
    for t in bout.terms:
        if t not in src:
            raise WindowEscapeError(
                f"bracket output {t.token} escapes the window for tuple "
                f"({', '.join(a.token for a in args)})"
            )
    acc: dict = {}
    for bi, bc in bout.terms.items():
        for oi, oc in phi(bi).terms.items():
            v = acc.get(oi, ZERO) + bc * oc
            if v:
                acc[oi] = v
            else:
                acc.pop(oi, None)
    prefix = 0
    for i, xi in enumerate(args):
        for t, tc in phi(xi).terms.items():
            p = t.parity ^ xi.parity
            coeff = -d * tc if (p and prefix % 2) else d * tc
            inner = alg.bracket_basis(args[:i] + (t,) + args[i + 1 :])
            for oi, oc in inner.terms.items():
                v = acc.get(oi, ZERO) - coeff * oc
                if v:
                    acc[oi] = v
                else:
                    acc.pop(oi, None)
        prefix += xi.parity
    return Element(acc)


# ---------------------------------------------------------------------------
# exact elimination engine (sparse rows over Q)


def _rref(rows: Iterable[dict]) -> dict:
    """Reduced row echelon pivots {col: normalized row dict}, exact over Q."""
    pivots: dict = {}
    for row in rows:
        r = dict(row)
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                inv = ONE / r[lead]
                pivots[lead] = {c: v * inv for c, v in r.items()}
                break
            f = r.pop(lead)
            for c, v in p.items():
                if c == lead:
                    continue
                nv = r.get(c, ZERO) - f * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
    for lead in sorted(pivots, reverse=True):
        prow = pivots[lead]
        for other in pivots.values():
            if other is prow:
                continue
            f = other.get(lead)
            if f:
                del other[lead]
                for c, v in prow.items():
                    if c == lead:
                        continue
                    nv = other.get(c, ZERO) - f * v
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
    return pivots


def _nullspace_vectors(pivots: dict, cols: Sequence) -> list[dict]:
    """Canonical nullspace basis: one vector per free column, ascending."""
    out = []
    for f in cols:
        if f in pivots:
            continue
        vec = {f: ONE}
        for lead, row in pivots.items():
            c = row.get(f)
            if c:
                vec[lead] = -c
        out.append(vec)
    return out


def nullspace(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact nullspace basis of a dense rational matrix.

    Deterministic: fraction-preserving elimination with pivots taken on the
    leftmost nonzero column, rows in the given order; the basis is the
    canonical one with a unit entry in each free column.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    sparse = []
    for row in rows:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        r = {c: as_scalar(v) for c, v in enumerate(row) if v}
        if r:
            sparse.append(r)
    pivots = _rref(sparse)
    vecs = _nullspace_vectors(pivots, range(ncols))
    return [[v.get(c, ZERO) for c in range(ncols)] for v in vecs]


# ---------------------------------------------------------------------------
# the generic windowed system


class _Window:
    """Source/target bookkeeping for one (algebra, W, S) configuration."""

    def __init__(self, alg, window, shift):
        self.alg = alg
        if alg.is_finite:
            self.window = None
            self.shift = None
            self.sources = sorted(alg.basis_list)
            self.targets = {s: list(self.sources) for s in self.sources}
        else:
            if window is None or shift is None:
                raise ValueError("infinite algebras need window and shift bounds")
            if shift <= 0 or window <= 0:
                raise ValueError("window and shift bounds must be positive")
            if shift >= window:
                raise ValueError("shift bound must be smaller than the window")
            self.window = window
            self.shift = shift
            self.sources = alg.window_indices(window)
            self.targets = {
                s: alg.indices_in_degree2_range(s.degree2 - 2 * shift, s.degree2 + 2 * shift)
                for s in self.sources
            }
        self.source_set = frozenset(self.sources)
        self.unknowns = []
        self.uid = {}
        for s in self.sources:
            for t in self.targets[s]:
                self.uid[(s, t)] = len(self.unknowns)
                self.unknowns.append((s, t))

    def vector_of(self, phi: LinMapWindow, strict: bool = True) -> Optional[dict]:
        """Coordinates of a map; None (or ValueError when strict) if a
        nonzero image coefficient falls outside the unknown set."""
        vec = {}
        for s, img in phi.images.items():
            for t, c in img.terms.items():
                u = self.uid.get((s, t))
                if u is None:
                    if strict:
                        raise ValueError(
                            f"map sends {s.token} to {t.token}, outside shift bound {self.shift}"
                        )
                    return None
                vec[u] = c
        return vec

    def map_of(self, vec: dict) -> LinMapWindow:
        images: dict = {}
        for u, c in vec.items():
            s, t = self.unknowns[u]
            images.setdefault(s, {})[t] = c
        return LinMapWindow(
            self.alg,
            self.window,
            {s: Element(d) for s, d in images.items()},
            sources=self.sources,
        )


def _system_rows(win: _Window, delta: Fraction) -> list[tuple]:
    """Residual rows, one per (tuple, output index), normalized and deduped.

    Rows for permuted argument tuples are scalar multiples of each other,
    so only sorted tuples are generated.
    """
    alg = win.alg
    n = alg.arity
    rows = set()
    for args in combinations_with_replacement(win.sources, n):
        bout = alg.bracket_basis(args)
        if any(t not in win.source_set for t in bout.terms):
            continue
        acc: dict = {}
        for bi, bc in bout.terms.items():
            for t in win.targets[bi]:
                u = win.uid[(bi, t)]
                d = acc.setdefault(t, {})
                d[u] = d.get(u, ZERO) + bc
        prefix = 0
        for i, xi in enumerate(args):
            for t in win.targets[xi]:
                u = win.uid[(xi, t)]
                p = t.parity ^ xi.parity
                coeff = -delta if (p and prefix % 2) else delta
                inner = alg.bracket_basis(args[:i] + (t,) + args[i + 1 :])
                for oi, oc in inner.terms.items():
                    d = acc.setdefault(oi, {})
                    d[u] = d.get(u, ZERO) - coeff * oc
            prefix += xi.parity
        for d in acc.values():
            row = sorted((u, c) for u, c in d.items() if c)
            if not row:
                continue
            lead = row[0][1]
            rows.add(tuple((u, c / lead) for u, c in row))
    return sorted(rows)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(eq=False)
class SolutionSpace:
    """Exact span of delta-derivation maps found on one window."""

    alg: AlgebraSpec
    delta: Fraction
    window: Optional[int]
    shift: Optional[int]
    basis: tuple
    stable: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _window(self) -> _Window:
        return _Window(self.alg, self.window, self.shift)

    def contains(self, phi: LinMapWindow) -> bool:
        """Exact span membership of a map over the same window/shift set-up."""
        win = self._window()
        if phi.source_set != set(win.sources):
            raise ValueError("membership needs a map over the same source window")
        rows = [win.vector_of(b) for b in self.basis]
        cand = win.vector_of(phi, strict=False)
        if cand is None:
            # some image coefficient is outside the space's shift bound
            return False
        pivots = _rref(rows)
        r = dict(cand)
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                return False
            f = r.pop(lead)
            for c, v in p.items():
                if c == lead:
                    continue
                nv = r.get(c, ZERO) - f * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
        return True


def solve_delta_derivations(alg, delta, window=None, shift=None) -> SolutionSpace:
    """Exact nullspace of the windowed delta-derivation system.

    Finite algebras are solved densely (window and shift are ignored) and
    come back already stable; infinite ones carry boundary artifacts and
    should be passed through stabilize().
    """
    d = as_scalar(delta)
    win = _Window(alg, window, shift)
    rows = _system_rows(win, d)
    nuids = len(win.unknowns)
    uf = _UnionFind(nuids)
    for row in rows:
        first = row[0][0]
        for u, _ in row[1:]:
            uf.union(first, u)
    comp_rows: dict = {}
    for row in rows:
        comp_rows.setdefault(uf.find(row[0][0]), []).append(row)
    comp_cols: dict = {}
    for u in range(nuids):
        comp_cols.setdefault(uf.find(u), []).append(u)
    vectors = []
    for root in sorted(comp_cols):
        cols = comp_cols[root]
        rws = [dict(r) for r in comp_rows.get(root, [])]
        pivots = _rref(rws)
        vectors.extend(_nullspace_vectors(pivots, cols))
    vectors.sort(key=lambda v: min(v))
    basis = tuple(win.map_of(v) for v in vectors)
    return SolutionSpace(
        alg=alg,
        delta=d,
        window=win.window,
        shift=win.shift,
        basis=basis,
        stable=alg.is_finite,
    )


def stabilize(space_small: SolutionSpace, space_large: SolutionSpace) -> SolutionSpace:
    """Keep the part of the small-window space that extends to the large one.

    The result is spanned by restrictions of large-window solutions; its
    dimension can only drop when the windows grow, which is the sense in
    which it is stable.
    """
    if space_small.alg.is_finite:
        raise ValueError("finite-dimensional spaces are already stable")
    if not same_algebra(space_small.alg, space_large.alg):
        raise ValueError("stabilize needs solution spaces for the same algebra")
    if space_small.delta != space_large.delta or space_small.shift != space_large.shift:
        raise ValueError("stabilize needs matching delta and shift bound")
    gap = space_large.window - space_small.window
    if gap < max(space_small.shift, 1):
        raise ValueError(
            f"window gap {gap} is too small; it must be at least max(shift, 1) = "
            f"{max(space_small.shift, 1)}"
        )
    win = space_small._window()
    rows = []
    for b in space_large.basis:
        vec = {}
        for s in win.sources:
            for t, c in b(s).terms.items():
                u = win.uid.get((s, t))
                if u is None:
                    raise ValueError("restriction leaves the small shift window")
                vec[u] = c
        if vec:
            rows.append(vec)
    pivots = _rref(rows)
    vectors = [pivots[lead] for lead in sorted(pivots)]
    basis = tuple(win.map_of(v) for v in vectors)
    return SolutionSpace(
        alg=space_small.alg,
        delta=space_small.delta,
        window=space_small.window,
        shift=space_small.shift,
        basis=basis,
        stable=True,
    )


def solve_stabilized(alg, delta, window=None, shift=None, bump=None) -> SolutionSpace:
    """Solve at W and at W + bump (default S + 2), then stabilize."""
    if alg.is_finite:
        return solve_delta_derivations(alg, delta)
    if bump is None:
        bump = shift + 2
    small = solve_delta_derivations(alg, delta, window, shift)
    large = solve_delta_derivations(alg, delta, window + bump, shift)
    return stabilize(small, large)


def is_trivial_space(space: SolutionSpace) -> bool:
    """True iff the stabilized space is exactly the scalar multiples of id."""
    if not space.stable:
        raise ValueError("is_trivial_space needs a stabilized space")
    if space.dimension == 0:
        warnings.warn(
            "zero-dimensional derivation space: even the identity is missing",
            stacklevel=2,
        )
        return False
    if space.dimension != 1:
        return False
    phi = space.basis[0]
    lam = None
    for s in phi.sources:
        img = phi(s)
        terms = img.terms
        if len(terms) != 1 or s not in terms:
            return False
        c = terms[s]
        if lam is None:
            lam = c
        elif c != lam:
            return False
    return lam is not None and lam != 0


# ---------------------------------------------------------------------------
# closed-form candidate maps

CLOSED_FORM_FAMILIES = (
    "witt_shift_family",
    "wab_even",
    "wab_odd",
    "thin_candidate",
    "solvable_candidate",
)


def closed_form_map(family: str, coeffs: dict, alg, window: int) -> LinMapWindow:
    """Build one of the named closed-form map families on a window.

    witt_shift_family: {j: a_j}, e_i -> sum_j a_j e_{i+j}.
    wab_even: {t: a_t}, L_m -> sum a_t L_{m+t} and I_m -> sum a_t I_{m+t}.
    wab_odd: {t: b_t}, L_m -> sum b_t I_{m+t} and I_m -> 0.
    thin_candidate: {"alpha": {i: a_i}, "beta": {i: b_i}} with
        phi(e_1) = sum a_i e_i, phi(e_2) = sum b_i e_i and
        phi(e_n) = (1 - 2^{2-n}) a_1 e_n + 2^{2-n} L^{n-2} phi(e_2), n >= 3,
        where L is left bracket by e_1.
    solvable_candidate: {i: c_i}, phi(e_1) = sum c_i e_i and
        phi(e_n) = c_1 e_n for n >= 2.
    """
    E = Family.E

    def _sc(d):
        return {int(k): as_scalar(v) for k, v in d.items()}

    if family == "witt_shift_family":
        if alg.name != "witt":
            raise ValueError("witt_shift_family lives on the witt algebra")
        cs = _sc(coeffs)
        images = {}
        for s in alg.window_indices(window):
            i = s.degree2 // 2
            images[s] = Element({bidx(E, 2 * (i + j)): c for j, c in cs.items()})
        return LinMapWindow(alg, window, images)
    if family in ("wab_even", "wab_odd"):
        if alg.name != "wab":
            raise ValueError(f"{family} lives on the wab algebras")
        cs = _sc(coeffs)
        images = {}
        for s in alg.window_indices(window):
            if family == "wab_even":
                images[s] = Element(
                    {bidx(s.family, s.degree2 + 2 * t): c for t, c in cs.items()}
                )
            elif s.family is Family.L:
                images[s] = Element(
                    {bidx(Family.I, s.degree2 + 2 * t): c for t, c in cs.items()}
                )
            else:
                images[s] = Element.zero()
        return LinMapWindow(alg, window, images)
    if family == "thin_candidate":
        if alg.name != "thin":
            raise ValueError("thin_candidate lives on the thin algebra")
        alpha = _sc(coeffs.get("alpha", {}))
        beta = _sc(coeffs.get("beta", {}))
        if any(i < 1 for i in alpha) or any(i < 1 for i in beta):
            raise ValueError("thin indices start at 1")
        a1 = alpha.get(1, ZERO)
        images = {}
        for s in alg.window_indices(window):
            n = s.degree2 // 2
            if n == 1:
                images[s] = Element({bidx(E, 2 * i): c for i, c in alpha.items()})
            elif n == 2:
                images[s] = Element({bidx(E, 2 * i): c for i, c in beta.items()})
            else:
                shift = Fraction(4, 2**n)  # 2^{2-n}
                terms = {bidx(E, 2 * n): (1 - shift) * a1}
                for i, c in beta.items():
                    # L^{n-2} kills e_1 and shifts e_i (i >= 2) to e_{i+n-2}
                    if i >= 2 and c:
                        t = bidx(E, 2 * (i + n - 2))
                        terms[t] = terms.get(t, ZERO) + shift * c
                images[s] = Element(terms)
        return LinMapWindow(alg, window, images)
    if family == "solvable_candidate":
        if alg.name != "solvable":
            raise ValueError("solvable_candidate lives on the solvable algebra")
        cs = _sc(coeffs)
        if any(i < 1 for i in cs):
            raise ValueError("solvable indices start at 1")
        c1 = cs.get(1, ZERO)
        images = {}
        for s in alg.window_indices(window):
            n = s.degree2 // 2
            if n == 1:
                images[s] = Element({bidx(E, 2 * i): c for i, c in cs.items()})
            else:
                images[s] = Element.single(s, c1)
        return LinMapWindow(alg, window, images)
    raise ValueError(f"unknown closed-form family {family!r}; known: {CLOSED_FORM_FAMILIES}")


# ---------------------------------------------------------------------------
# JSON view


def space_to_jsonable(space: SolutionSpace, trivial: Optional[bool] = None) -> dict:
    from .core import render

    basis = []
    for b in space.basis:
        entry = [
            {"source": s.token, "image": render(b(s))}
            for s in b.sources
            if not b(s).is_zero()
        ]
        basis.append(entry)
    return {
        "algebra": space.alg.name,
        "params": {k: str(v) for k, v in sorted(space.alg.params.items())},
        "delta": str(space.delta),
        "window": space.window,
        "shift": space.shift,
        "dimension": space.dimension,
        "stable": space.stable,
        "trivial_only": trivial,
        "basis": basis,
    }

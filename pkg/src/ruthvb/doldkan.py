"""Chain complexes, normalization, and two inverse constructions.

The preferred inverse indexes level n by the injective order maps out of [k]
into [n] that preserve 0 (encoded as bitmasks); the classical inverse indexes
it by the surjections [n] ->> [k].  Both are built as block-structured
simplicial vector spaces so that identity checks compose index transports
rather than dense matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError
from .exactla import Fr, ONE, RatMat, Subspace, solve_matrix
from .graded import BlockMap, Grading
from .ordmaps import (
    drop_rank,
    prime_mask,
    transport_degeneracy_table,
    transport_face_table,
    zero_mono_masks,
)
from .simplicial import face_kernel


class ChainComplex:
    """Nonnegatively graded chain complex over Q with exact boundary."""

    def __init__(self, dims, boundary: dict[int, RatMat]):
        self.dims = tuple(int(d) for d in dims)
        self.boundary = {}
        for n in range(1, len(self.dims)):
            d = boundary.get(n)
            if d is None:
                d = RatMat.zeros(self.dim(n - 1), self.dim(n))
            if (d.rows, d.cols) != (self.dim(n - 1), self.dim(n)):
                raise ValidationError(f"boundary {n} has wrong shape")
            self.boundary[n] = d
        for n in range(2, len(self.dims)):
            if not (self.boundary[n - 1] @ self.boundary[n]).is_zero():
                raise ValidationError(f"boundary squared is nonzero at degree {n}", witness=n)

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def d(self, n: int) -> RatMat:
        return self.boundary.get(n, RatMat.zeros(self.dim(n - 1), self.dim(n)))

    @property
    def max_degree(self) -> int:
        for k in range(len(self.dims) - 1, -1, -1):
            if self.dims[k]:
                return k
        return 0

    def __eq__(self, other):
        return (
            isinstance(other, ChainComplex)
            and self.dims == other.dims
            and all(self.d(n) == other.d(n) for n in range(1, len(self.dims)))
        )

    def __repr__(self):
        return f"ChainComplex(dims={self.dims})"


def sign_flip(Y: ChainComplex) -> ChainComplex:
    """The complex with boundary scaled by (-1)^(n-1) in degree n."""
    return ChainComplex(
        Y.dims,
        {n: Y.d(n).scale(Fr(-1) if (n - 1) % 2 else Fr(1)) for n in range(1, len(Y.dims))},
    )


def half_twist_sign(n: int) -> Fraction:
    """(-1)^(n choose 2): the degreewise sign conjugating the two boundary conventions."""
    return Fr(-1) if (n * (n - 1) // 2) % 2 else Fr(1)


class SimpVS:
    """Truncated simplicial vector space with cached block-structured operators."""

    def __init__(self, L: int, grading_fn, face_fn, deg_fn, kind: str = "generic"):
        self.L = L
        self.kind = kind
        self._grading_fn = grading_fn
        self._face_fn = face_fn
        self._deg_fn = deg_fn
        self._gradings: dict[int, Grading] = {}
        self._faces: dict[tuple[int, int], BlockMap] = {}
        self._degs: dict[tuple[int, int], BlockMap] = {}

    # fiber-complex interface (single anonymous fiber per level)
    def level_keys(self, n: int):
        return (None,)

    def face_key(self, n: int, key, i: int):
        return None

    def deg_key(self, n: int, key, j: int):
        return None

    def grading(self, n: int, key=None) -> Grading:
        g = self._gradings.get(n)
        if g is None:
            g = self._gradings[n] = self._grading_fn(n)
        return g

    def face(self, n: int, i: int, key=None) -> BlockMap:
        m = self._faces.get((n, i))
        if m is None:
            m = self._faces[(n, i)] = self._face_fn(n, i)
        return m

    def deg(self, n: int, j: int, key=None) -> BlockMap:
        m = self._degs.get((n, j))
        if m is None:
            m = self._degs[(n, j)] = self._deg_fn(n, j)
        return m

    def dim(self, n: int) -> int:
        return self.grading(n).total


def from_dense_matrices(L, dims, faces, degs) -> SimpVS:
    """Generic single-block simplicial vector space from dense matrices."""

    def grading(n):
        return Grading.single(dims[n])

    def face(n, i):
        return BlockMap.from_dense(grading(n), grading(n - 1), faces[(n, i)])

    def deg(n, j):
        return BlockMap.from_dense(grading(n), grading(n + 1), degs[(n, j)])

    return SimpVS(L, grading, face, deg)


def constant_simp_vs(dim: int, L: int) -> SimpVS:
    g = Grading.single(dim)
    ident = BlockMap.identity(g)
    return SimpVS(L, lambda n: g, lambda n, i: ident, lambda n, j: ident)


# ---------------------------------------------------------------------------
# The 0-preserving-mono inverse.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _dk_d0_terms(beta_mask: int) -> tuple[tuple[int, str, int], ...]:
    """(source mask, kind, sign) triples feeding target beta under d_0.

    kind "D" is the boundary block on the primed index; kind "s" a signed
    identity block on a deleted interior element.
    """
    bp = prime_mask(beta_mask)
    l = bin(beta_mask).count("1") - 1
    terms = [(bp, "D", 1)]
    for i in range(1, l + 2):
        terms.append((drop_rank(bp, i), "s", 1 if i % 2 else -1))
    return tuple(terms)


def dk(Y: ChainComplex, L: int | None = None) -> SimpVS:
    """Simplicial vector space on the 0-preserving mono indices of Y."""
    if L is None:
        L = Y.max_degree + 3

    def grading(n):
        masks = zero_mono_masks(n)
        return Grading(masks, tuple(Y.dim(bin(m).count("1") - 1) for m in masks))

    def face(n, i):
        src, dst = grading(n), grading(n - 1)
        if i > 0:
            return BlockMap.transport(src, dst, [(b, s, 1) for b, s in transport_face_table(n, i)])
        blocks = {}
        for beta in zero_mono_masks(n - 1):
            if dst.dim(beta) == 0:
                continue
            for smask, kind, sign in _dk_d0_terms(beta):
                deg_s = bin(smask).count("1") - 1
                if src.dim(smask) == 0:
                    continue
                if kind == "D":
                    blocks[(beta, smask)] = Y.d(deg_s).scale(sign)
                else:
                    blocks[(beta, smask)] = Fr(sign)
        return BlockMap(src, dst, blocks)

    def deg(n, j):
        src, dst = grading(n), grading(n + 1)
        return BlockMap.transport(src, dst, [(b, s, 1) for b, s in transport_degeneracy_table(n, j)])

    return SimpVS(L, grading, face, deg, kind="dk")


def dk_sign_iso(Y: ChainComplex, L: int) -> dict[int, BlockMap]:
    """Blockwise signs (-1)^(deg choose 2) as maps dk(sign_flip(Y))_n -> dk(Y)_n."""
    X = dk(sign_flip(Y), L)
    out = {}
    for n in range(L + 1):
        g = X.grading(n)
        out[n] = BlockMap(
            g, g, {(m, m): half_twist_sign(bin(m).count("1") - 1) for m in g.labels}
        )
    return out


# ---------------------------------------------------------------------------
# The classical (surjection-indexed) inverse.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def surjections(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All monotone surjections [n] ->> [k] as image tuples."""
    if k > n or k < 0:
        return ()
    if n == 0:
        return ((0,),)
    out = []
    for prev in surjections(n - 1, k):
        out.append(prev + (prev[-1],))
    for prev in surjections(n - 1, k - 1):
        out.append(prev + (prev[-1] + 1,))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def surjection_labels(n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for k in range(n + 1):
        out.extend(surjections(n, k))
    return tuple(out)


def dk_classic(Y: ChainComplex, L: int | None = None) -> SimpVS:
    """The popular inverse with level n indexed by surjections out of [n]."""
    if L is None:
        L = Y.max_degree + 3

    def grading(n):
        labels = surjection_labels(n)
        return Grading(labels, tuple(Y.dim(lab[-1]) for lab in labels))

    def face(n, i):
        src, dst = grading(n), grading(n - 1)
        blocks = {}
        for alpha in surjection_labels(n):
            if src.dim(alpha) == 0:
                continue
            k = alpha[-1]
            img = alpha[:i] + alpha[i + 1 :]
            if len(set(img)) == k + 1:
                blocks[(img, alpha)] = blocks.get((img, alpha), Fr(0)) + 1
            elif i == n:
                # the top value is hit only at the last input; d_n applies the boundary
                beta = img  # a surjection [n-1] ->> [k-1]
                if dst.dim(beta):
                    blocks[(beta, alpha)] = Y.d(k)
        return BlockMap(src, dst, blocks)

    def deg(n, j):
        src, dst = grading(n), grading(n + 1)
        blocks = {}
        for alpha in surjection_labels(n):
            img = alpha[: j + 1] + alpha[j:]
            blocks[(img, alpha)] = Fr(1)
        return BlockMap(src, dst, blocks)

    return SimpVS(L, grading, face, deg, kind="dk_classic")


def mono_epi_duality(n: int) -> dict[int, tuple[int, ...]]:
    """Levelwise pairing: 0-preserving mono mask -> dual surjection label at level n."""
    out = {}
    for mask in zero_mono_masks(n):
        elems = []
        m, v = mask, 0
        while m:
            if m & 1:
                elems.append(v)
            m >>= 1
            v += 1
        label = []
        r = 0
        for i in range(n + 1):
            while r + 1 < len(elems) and elems[r + 1] <= i:
                r += 1
            label.append(r)
        out[mask] = tuple(label)
    return out


# ---------------------------------------------------------------------------
# Normalization.
# ---------------------------------------------------------------------------


@dataclass
class Normalization:
    """Canonical kernels with the restricted differential and inclusion bases."""

    dims: tuple[int, ...]
    boundary: dict[int, RatMat]
    inclusions: dict[int, Subspace]

    def complex(self) -> ChainComplex:
        return ChainComplex(self.dims, self.boundary)


def normalize(X: SimpVS, up_to: int | None = None) -> Normalization:
    """Intersection of the positive face kernels with differential d_0.

    Assumes X satisfies the simplicial identities; run
    verify_simplicial_identities first on untrusted input.
    """
    top = X.L if up_to is None else up_to
    inclusions = {}
    dims = []
    for n in range(top + 1):
        sub = face_kernel(X, n, None, range(1, n + 1))
        inclusions[n] = sub
        dims.append(sub.dim)
    boundary = {}
    for n in range(1, top + 1):
        if dims[n] == 0 or dims[n - 1] == 0:
            boundary[n] = RatMat.zeros(dims[n - 1], dims[n])
            continue
        img = X.face(n, 0).to_dense() @ inclusions[n].mat.transpose()
        boundary[n] = solve_matrix(inclusions[n - 1].mat.transpose(), img)
    result = Normalization(tuple(dims), boundary, inclusions)
    for n in range(2, top + 1):
        prod = result.boundary[n - 1] @ result.boundary[n]
        if not prod.is_zero():
            raise ValidationError(f"restricted differential does not square to zero at {n}")
    return result


def degenerate_span(X: SimpVS, n: int) -> Subspace:
    """Span of the images of all degeneracies hitting level n."""
    g = X.grading(n)
    if n == 0:
        return Subspace.zero(g.total)
    rows = []
    for j in range(n):
        dense = X.deg(n - 1, j).to_dense()
        for c in range(dense.cols):
            rows.append([dense.data[r][c] for r in range(dense.rows)])
    return Subspace.from_rows(g.total, rows)


def chain_iso_onto(norm: Normalization, Y: ChainComplex, projection) -> dict[int, RatMat]:
    """Construct an exact chain isomorphism from the normalization onto Y.

    `projection(n)` must give the dense matrix of the candidate projection
    X_n -> Y_n (for the mono-indexed model, the top-index component).  Scalars
    are adjusted degreewise so the boundaries intertwine exactly; failure to
    do so raises.
    """
    top = len(norm.dims) - 1
    out = {}
    scale = ONE
    for n in range(top + 1):
        if norm.dims[n] != Y.dim(n):
            raise ValidationError(f"normalization dim mismatch at degree {n}")
        cand = projection(n) @ norm.inclusions[n].mat.transpose() if norm.dims[n] else RatMat.zeros(0, 0)
        if n == 0:
            f = cand
        else:
            lhs = out[n - 1] @ norm.boundary[n]
            rhs = Y.d(n) @ cand
            scale = ONE
            found = None
            for r in range(rhs.rows):
                for c in range(rhs.cols):
                    if rhs.data[r][c]:
                        found = lhs.data[r][c] / rhs.data[r][c]
                        break
                if found is not None:
                    break
            if found is not None:
                scale = found
            if rhs.scale(scale) != lhs:
                raise ValidationError(f"no scalar conjugation matches boundaries at degree {n}")
            f = cand.scale(scale)
        if norm.dims[n] and f.rank() != norm.dims[n]:
            raise ValidationError(f"candidate projection not invertible at degree {n}")
        out[n] = f
    return out


def dk_projection(X: SimpVS, n: int) -> RatMat:
    """Dense matrix of the top-index component of level n for either inverse model."""
    g = X.grading(n)
    if X.kind == "dk":
        label = (1 << (n + 1)) - 1
    elif X.kind == "dk_classic":
        label = tuple(range(n + 1))
    else:
        raise ValueError("projection only defined for the two inverse models")
    d = g.dim(label)
    off = g.offset(label)
    out = RatMat.zeros(d, g.total)
    for r in range(d):
        out.data[r][off + r] = ONE
    return out


def normalization_roundtrip(Y: ChainComplex, X: SimpVS, up_to: int | None = None):
    """normalize(X) together with a constructed exact isomorphism onto Y."""
    norm = normalize(X, up_to=up_to)
    iso = chain_iso_onto(norm, Y, lambda n: dk_projection(X, n))
    return norm, iso


# ---------------------------------------------------------------------------
# Horn filling diagnostics and the unique normal cleavage.
# ---------------------------------------------------------------------------


@dataclass
class LevelCheck:
    level: int
    k: int
    passed: bool
    detail: str = ""


@dataclass
class FlatCleavageReport:
    horn_iso: list[LevelCheck]
    flatness: list[LevelCheck]
    order_equivalence: list[LevelCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.horn_iso + self.flatness + self.order_equivalence)


def check_unique_flat_cleavage(X: SimpVS) -> FlatCleavageReport:
    """Verify the degenerate span is a normal flat cleavage and the order criterion."""
    from .simplicial import horn_dim, horn_map_dense

    norm = normalize(X)
    spans = {n: degenerate_span(X, n) for n in range(X.L + 1)}
    horn_iso = []
    for n in range(1, X.L + 1):
        D = spans[n]
        for k in range(n):
            hd = horn_dim(X, n, k, None)
            stacked = horn_map_dense(X, n, k, None)
            restricted = stacked @ D.mat.transpose() if D.dim else RatMat.zeros(stacked.rows, 0)
            rk = restricted.rank()
            ok = rk == D.dim == hd
            horn_iso.append(LevelCheck(n, k, ok, f"rank {rk}, dim D {D.dim}, horn {hd}"))
    flatness = []
    for n in range(2, X.L + 1):
        W = _flat_witness_space(X, spans, n)
        img = image_of_subspace(X.face(n, 0).to_dense(), W)
        ok = all(spans[n - 1].contains(row) for row in img.mat.data)
        flatness.append(LevelCheck(n, 0, ok, f"witness dim {W.dim}"))
    order_equiv = []
    for n in range(1, X.L + 1):
        unique = True
        for k in range(n + 1):
            ker = face_kernel(X, n, None, [i for i in range(n + 1) if i != k])
            if ker.dim:
                unique = False
                break
        order_equiv.append(
            LevelCheck(n, -1, unique == (norm.dims[n] == 0), f"NX dim {norm.dims[n]}")
        )
    return FlatCleavageReport(horn_iso, flatness, order_equiv)


def image_of_subspace(A: RatMat, S: Subspace) -> Subspace:
    from .exactla import image

    return image(A, S)


def _flat_witness_space(X: SimpVS, spans: dict[int, Subspace], n: int) -> Subspace:
    """{w in D_n : s_k w in D_k for k>0, d_i w in D_{n-1} for i>0}."""
    from .exactla import intersect, preimage

    W = spans[n]
    for k in range(1, n):
        s_k = restriction_to_prefix(X, n, k)
        W = intersect(W, preimage(s_k, spans[k]))
    for i in range(1, n + 1):
        W = intersect(W, preimage(X.face(n, i).to_dense(), spans[n - 1]))
    return W


def restriction_to_prefix(X: SimpVS, n: int, k: int) -> RatMat:
    """Dense matrix of the prefix restriction X_n -> X_k (drop top vertices)."""
    mat = None
    for m in range(n, k, -1):
        f = X.face(m, m).to_dense()
        mat = f if mat is None else f @ mat
    return mat if mat is not None else RatMat.identity(X.dim(n))

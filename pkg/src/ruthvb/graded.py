"""Block-decomposed linear maps between labeled direct sums.

Fibers of the bundles in this library are direct sums indexed by simplex-
category data.  Face and degeneracy maps are extremely sparse in that
decomposition: most blocks are signed identities.  BlockMap keeps that
structure explicit, storing each block either as a Fraction (meaning that
scalar times the identity) or as a dense RatMat, so that identity
verification composes index transports instead of full matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch
from .exactla import Fr, ONE, ZERO, RatMat

Entry = Fraction | RatMat


@dataclass(frozen=True)
class Grading:
    """Ordered list of (label, dimension) blocks making up a coordinate space."""

    labels: tuple
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.dims):
            raise DimensionMismatch("labels and dims must align")
        offsets = []
        t = 0
        for d in self.dims:
            offsets.append(t)
            t += d
        object.__setattr__(self, "_offsets", tuple(offsets))
        object.__setattr__(self, "_index", {l: i for i, l in enumerate(self.labels)})
        object.__setattr__(self, "_total", t)

    @property
    def total(self) -> int:
        return self._total

    def index(self, label) -> int:
        return self._index[label]

    def dim(self, label) -> int:
        return self.dims[self._index[label]]

    def offset(self, label) -> int:
        return self._offsets[self._index[label]]

    def slice(self, label, vec):
        i = self._index[label]
        o = self._offsets[i]
        return vec[o : o + self.dims[i]]

    @staticmethod
    def single(dim: int, label=None) -> Grading:
        return Grading((label,), (dim,))


def _entry_mul(a: Entry, b: Entry) -> Entry:
    if isinstance(a, Fraction):
        if isinstance(b, Fraction):
            return a * b
        return b.scale(a)
    if isinstance(b, Fraction):
        return a.scale(b)
    return a @ b


def _entry_add(a: Entry | None, b: Entry, dim_out: int, dim_in: int) -> Entry | None:
    if a is None:
        r = b
    elif isinstance(a, Fraction) and isinstance(b, Fraction):
        r = a + b
    else:
        r = _densify(a, dim_out, dim_in) + _densify(b, dim_out, dim_in)
    if isinstance(r, Fraction):
        return r if r else None
    return None if r.is_zero() else r


def _densify(e: Entry, dim_out: int, dim_in: int) -> RatMat:
    if isinstance(e, Fraction):
        if dim_out != dim_in:
            raise DimensionMismatch("scalar block must be square")
        return RatMat.identity(dim_out).scale(e)
    return e


def _entries_equal(a: Entry | None, b: Entry | None, dim_out: int, dim_in: int) -> bool:
    if a is None and b is None:
        return True
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    am = _densify(a, dim_out, dim_in) if a is not None else RatMat.zeros(dim_out, dim_in)
    bm = _densify(b, dim_out, dim_in) if b is not None else RatMat.zeros(dim_out, dim_in)
    return am == bm


class BlockMap:
    """A linear map dst <- src given by blocks keyed (dst_label, src_label)."""

    __slots__ = ("src", "dst", "blocks", "_rows")

    @classmethod
    def _raw(cls, src: Grading, dst: Grading, blocks: dict) -> BlockMap:
        """Internal constructor for blocks already known to be valid and nonzero."""
        self = object.__new__(cls)
        self.src = src
        self.dst = dst
        self.blocks = blocks
        self._rows = None
        return self

    def __init__(self, src: Grading, dst: Grading, blocks: dict):
        self.src = src
        self.dst = dst
        self._rows = None
        self.blocks = {}
        for (dl, sl), e in blocks.items():
            do, si = dst.dim(dl), src.dim(sl)
            if do == 0 or si == 0:
                continue
            if isinstance(e, Fraction):
                if not e:
                    continue
                if do != si:
                    raise DimensionMismatch("scalar block must join equal dims")
            else:
                if (e.rows, e.cols) != (do, si):
                    raise DimensionMismatch(
                        f"block {dl}<-{sl} has shape {e.rows}x{e.cols}, want {do}x{si}"
                    )
                if e.is_zero():
                    continue
            self.blocks[(dl, sl)] = e

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(src: Grading, dst: Grading) -> BlockMap:
        return BlockMap(src, dst, {})

    @staticmethod
    def identity(g: Grading) -> BlockMap:
        return BlockMap(g, g, {(l, l): ONE for l in g.labels})

    @staticmethod
    def transport(src: Grading, dst: Grading, pairs) -> BlockMap:
        """Index transport: each (dst_label, src_label, coef) a scaled identity block."""
        return BlockMap(src, dst, {(dl, sl): Fr(c) for dl, sl, c in pairs})

    @staticmethod
    def from_dense(src: Grading, dst: Grading, mat: RatMat) -> BlockMap:
        if (mat.rows, mat.cols) != (dst.total, src.total):
            raise DimensionMismatch("dense matrix does not match gradings")
        blocks = {}
        for dl in dst.labels:
            do, doff = dst.dim(dl), dst.offset(dl)
            for sl in src.labels:
                si, soff = src.dim(sl), src.offset(sl)
                if do and si:
                    sub = RatMat(do, si, [mat.data[doff + r][soff : soff + si] for r in range(do)])
                    if not sub.is_zero():
                        blocks[(dl, sl)] = sub
        return BlockMap(src, dst, blocks)

    # -- algebra -----------------------------------------------------------

    def compose(self, other: BlockMap) -> BlockMap:
        """self ∘ other (apply other first)."""
        if other.dst is not self.src and other.dst != self.src:
            raise DimensionMismatch("composition gradings do not match")
        by_mid: dict = {}
        for (ml, sl), e in other.blocks.items():
            by_mid.setdefault(ml, []).append((sl, e))
        acc: dict = {}
        for (dl, ml), e1 in self.blocks.items():
            lst = by_mid.get(ml)
            if not lst:
                continue
            do = self.dst.dim(dl)
            for sl, e2 in lst:
                prod = _entry_mul(e1, e2)
                key = (dl, sl)
                acc[key] = _entry_add(acc.get(key), prod, do, other.src.dim(sl))
        return BlockMap._raw(other.src, self.dst, {k: v for k, v in acc.items() if v is not None})

    def __add__(self, other: BlockMap) -> BlockMap:
        if self.src != other.src or self.dst != other.dst:
            raise DimensionMismatch("sum gradings do not match")
        acc = dict(self.blocks)
        for key, e in other.blocks.items():
            dl, sl = key
            cur = _entry_add(acc.get(key), e, self.dst.dim(dl), self.src.dim(sl))
            if cur is None:
                acc.pop(key, None)
            else:
                acc[key] = cur
        return BlockMap._raw(self.src, self.dst, acc)

    def __neg__(self) -> BlockMap:
        return self.scale(Fr(-1))

    def __sub__(self, other: BlockMap) -> BlockMap:
        return self + (-other)

    def scale(self, c) -> BlockMap:
        c = Fr(c)
        if not c:
            return BlockMap.zero(self.src, self.dst)
        return BlockMap._raw(
            self.src,
            self.dst,
            {k: (e * c if isinstance(e, Fraction) else e.scale(c)) for k, e in self.blocks.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockMap):
            return NotImplemented
        if self.src != other.src or self.dst != other.dst:
            return False
        for key in self.blocks.keys() | other.blocks.keys():
            dl, sl = key
            if not _entries_equal(
                self.blocks.get(key), other.blocks.get(key), self.dst.dim(dl), self.src.dim(sl)
            ):
                return False
        return True

    def __hash__(self):
        raise TypeError("BlockMap is not hashable")

    def is_zero(self) -> bool:
        return not self.blocks

    # -- application -------------------------------------------------------

    def apply(self, vec) -> tuple[Fraction, ...]:
        if len(vec) != self.src.total:
            raise DimensionMismatch("vector length does not match source grading")
        out = [ZERO] * self.dst.total
        for (dl, sl), e in self.blocks.items():
            soff = self.src.offset(sl)
            doff = self.dst.offset(dl)
            si = self.src.dim(sl)
            piece = vec[soff : soff + si]
            if isinstance(e, Fraction):
                for r in range(si):
                    if piece[r]:
                        out[doff + r] += e * piece[r]
            else:
                for r, row in enumerate(e.data):
                    s = ZERO
                    for a, x in zip(row, piece):
                        if a and x:
                            s += a * x
                    if s:
                        out[doff + r] += s
        return tuple(out)

    def to_dense(self) -> RatMat:
        out = RatMat.zeros(self.dst.total, self.src.total)
        for (dl, sl), e in self.blocks.items():
            soff = self.src.offset(sl)
            doff = self.dst.offset(dl)
            si = self.src.dim(sl)
            if isinstance(e, Fraction):
                for r in range(si):
                    out.data[doff + r][soff + r] = e
            else:
                for r, row in enumerate(e.data):
                    out.data[doff + r][soff : soff + si] = row[:]
        return out

    def sparse_rows(self) -> list[dict[int, Fraction]]:
        """Rows of the dense matrix as sparse dicts over source coordinates (cached)."""
        if self._rows is not None:
            return self._rows
        rows: list[dict[int, Fraction]] = [dict() for _ in range(self.dst.total)]
        for (dl, sl), e in self.blocks.items():
            soff = self.src.offset(sl)
            doff = self.dst.offset(dl)
            si = self.src.dim(sl)
            if isinstance(e, Fraction):
                ei = int(e) if e.denominator == 1 else e
                for r in range(si):
                    rows[doff + r][soff + r] = rows[doff + r].get(soff + r, 0) + ei
            else:
                for r, row in enumerate(e.data):
                    tgt = rows[doff + r]
                    for c, a in enumerate(row):
                        if a:
                            ai = int(a) if a.denominator == 1 else a
                            tgt[soff + c] = tgt.get(soff + c, 0) + ai
        self._rows = [{k: v for k, v in r.items() if v} for r in rows]
        return self._rows

    def is_transport(self) -> bool:
        """True when every block is a scalar identity."""
        return all(isinstance(e, Fraction) for e in self.blocks.values())

    def __repr__(self):
        return f"BlockMap({self.dst.total}x{self.src.total}, {len(self.blocks)} blocks)"

"""Exact linear algebra over the rationals.

Dense matrices with arbitrary-precision Fraction entries, canonical subspaces
in reduced row echelon form, and a sparse exact eliminator for the large but
very sparse systems produced by face-map constraints.  No floating point
anywhere; equality of subspaces is equality of representations.  All values
are immutable in practice and safe to share between threads.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch, NoSolutionError, NonUniqueSolutionError

Fr = Fraction
ZERO = Fr(0)
ONE = Fr(1)


class RatMat:
    """A rows x cols matrix of Fractions, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: list[list[Fraction]]):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise DimensionMismatch(f"data does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> RatMat:
        return RatMat(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> RatMat:
        m = RatMat.zeros(n, n)
        for i in range(n):
            m.data[i][i] = ONE
        return m

    @staticmethod
    def from_rows(rows_data, cols: int | None = None) -> RatMat:
        rows_data = [[Fr(x) for x in row] for row in rows_data]
        r = len(rows_data)
        c = len(rows_data[0]) if rows_data else (cols if cols is not None else 0)
        return RatMat(r, c, rows_data)

    @staticmethod
    def col_vector(vec) -> RatMat:
        return RatMat(len(vec), 1, [[Fr(x)] for x in vec])

    def copy(self) -> RatMat:
        return RatMat(self.rows, self.cols, [row[:] for row in self.data])

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: RatMat) -> RatMat:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return RatMat(
            self.rows,
            self.cols,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
        )

    def __sub__(self, other: RatMat) -> RatMat:
        return self + (-other)

    def __neg__(self) -> RatMat:
        return RatMat(self.rows, self.cols, [[-a for a in row] for row in self.data])

    def scale(self, c) -> RatMat:
        c = Fr(c)
        return RatMat(self.rows, self.cols, [[c * a for a in row] for row in self.data])

    def __matmul__(self, other: RatMat) -> RatMat:
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        out = RatMat.zeros(self.rows, other.cols)
        odata = other.data
        for i, row in enumerate(self.data):
            acc = out.data[i]
            for k, a in enumerate(row):
                if a:
                    ok = odata[k]
                    for j, b in enumerate(ok):
                        if b:
                            acc[j] += a * b
        return out

    def apply(self, vec) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length does not match column count")
        out = []
        for row in self.data:
            s = ZERO
            for a, x in zip(row, vec):
                if a and x:
                    s += a * x
            out.append(s)
        return tuple(out)

    def transpose(self) -> RatMat:
        return RatMat(self.cols, self.rows, [list(col) for col in zip(*self.data)] if self.rows else [[] for _ in range(self.cols)])

    # -- structure ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMat)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def is_zero(self) -> bool:
        return all(not a for row in self.data for a in row)

    def row(self, i) -> tuple[Fraction, ...]:
        return tuple(self.data[i])

    def col(self, j) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.data)

    @staticmethod
    def vstack(mats: list[RatMat]) -> RatMat:
        cols = mats[0].cols
        data = []
        for m in mats:
            if m.cols != cols:
                raise DimensionMismatch("vstack column mismatch")
            data.extend(row[:] for row in m.data)
        return RatMat(len(data), cols, data)

    @staticmethod
    def hstack(mats: list[RatMat]) -> RatMat:
        rows = mats[0].rows
        if any(m.rows != rows for m in mats):
            raise DimensionMismatch("hstack row mismatch")
        data = [sum((m.data[i] for m in mats), []) for i in range(rows)]
        return RatMat(rows, sum(m.cols for m in mats), data)

    def rref(self) -> tuple[RatMat, tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns."""
        m = [row[:] for row in self.data]
        pivots = []
        r = 0
        for c in range(self.cols):
            pr = None
            for i in range(r, self.rows):
                if m[i][c]:
                    pr = i
                    break
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = ONE / m[r][c]
            m[r] = [a * inv for a in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    mr = m[r]
                    m[i] = [a - f * b for a, b in zip(m[i], mr)]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return RatMat(self.rows, self.cols, m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def inverse(self) -> RatMat:
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices invert")
        aug = RatMat.hstack([self, RatMat.identity(self.rows)])
        red, piv = aug.rref()
        if len(piv) < self.rows or any(p >= self.rows for p in piv):
            raise NonUniqueSolutionError("matrix is singular")
        return RatMat(self.rows, self.rows, [row[self.rows:] for row in red.data])

    def __repr__(self):
        return f"RatMat({self.rows}x{self.cols})"


def solve_unique(A: RatMat, b) -> tuple[Fraction, ...]:
    """The unique x with A x = b; exact.

    Raises NoSolutionError when b is outside the column space and
    NonUniqueSolutionError when the kernel is nontrivial.
    """
    aug = RatMat.hstack([A, RatMat.col_vector(list(b))])
    red, piv = aug.rref()
    if any(p == A.cols for p in piv):
        raise NoSolutionError("right-hand side outside the column space")
    if len(piv) < A.cols:
        raise NonUniqueSolutionError("kernel is nontrivial")
    x = [ZERO] * A.cols
    for r, c in enumerate(piv):
        x[c] = red.data[r][A.cols]
    return tuple(x)


def left_solver(M: RatMat) -> RatMat:
    """L with L @ v the unique solution of M x = v, for consistent v.

    Requires full column rank; consistency of v is the caller's burden (the
    product M @ (L @ v) recovers v only for v in the column space).
    """
    aug = RatMat.hstack([M, RatMat.identity(M.rows)])
    red, piv = aug.rref()
    main = [(r, p) for r, p in enumerate(piv) if p < M.cols]
    if len(main) < M.cols:
        raise NonUniqueSolutionError("matrix does not have full column rank")
    L = RatMat.zeros(M.cols, M.rows)
    for r, p in main:
        L.data[p] = red.data[r][M.cols:]
    return L


def solve_matrix(A: RatMat, B: RatMat) -> RatMat:
    """Solve A X = B column by column, requiring uniqueness throughout."""
    aug = RatMat.hstack([A, B])
    red, piv = aug.rref()
    if any(p >= A.cols for p in piv):
        raise NoSolutionError("some right-hand column outside the column space")
    if len(piv) < A.cols:
        raise NonUniqueSolutionError("kernel is nontrivial")
    X = RatMat.zeros(A.cols, B.cols)
    for r, c in enumerate(piv):
        X.data[c] = red.data[r][A.cols:]
    return X


class Subspace:
    """A subspace of Q^ambient with an RREF basis; equal iff represented equally."""

    __slots__ = ("ambient", "mat", "_eqs")

    def __init__(self, ambient: int, mat: RatMat):
        if mat.cols != ambient:
            raise DimensionMismatch("basis width must equal ambient dimension")
        self.ambient = ambient
        self.mat = mat  # RREF, no zero rows
        self._eqs = None

    @staticmethod
    def from_rows(ambient: int, rows) -> Subspace:
        if not rows:
            return Subspace.zero(ambient)
        red, piv = RatMat.from_rows(rows, ambient).rref()
        return Subspace(ambient, RatMat(len(piv), ambient, red.data[: len(piv)]))

    @staticmethod
    def zero(ambient: int) -> Subspace:
        return Subspace(ambient, RatMat.zeros(0, ambient))

    @staticmethod
    def full(ambient: int) -> Subspace:
        return Subspace(ambient, RatMat.identity(ambient))

    @property
    def dim(self) -> int:
        return self.mat.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.mat == other.mat
        )

    def __hash__(self):
        return hash((self.ambient, self.mat))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient})"

    def contains(self, vec) -> bool:
        v = [Fr(x) for x in vec]
        for row in self.mat.data:
            # rows are RREF: pivot entry 1 at the leading column
            lead = next(j for j, a in enumerate(row) if a)
            f = v[lead]
            if f:
                v = [x - f * b for x, b in zip(v, row)]
        return all(not x for x in v)

    def coordinates(self, vec) -> tuple[Fraction, ...]:
        """Coefficients of vec in the basis rows; raises if not a member."""
        return solve_unique(self.mat.transpose(), list(vec)) if self.dim else self._assert_zero(vec)

    def _assert_zero(self, vec):
        if any(Fr(x) for x in vec):
            raise NoSolutionError("vector outside the zero subspace")
        return ()

    def equations(self) -> RatMat:
        """Rows N with S = {x : N x = 0}."""
        if self._eqs is None:
            self._eqs = kernel(self.mat).mat
        return self._eqs


def kernel(A: RatMat) -> Subspace:
    """Exact null space {x : A x = 0} with canonical RREF basis."""
    red, piv = A.rref()
    pivset = set(piv)
    free = [c for c in range(A.cols) if c not in pivset]
    rows = []
    for f in free:
        v = [ZERO] * A.cols
        v[f] = ONE
        for r, c in enumerate(piv):
            v[c] = -red.data[r][f]
        rows.append(v)
    return Subspace.from_rows(A.cols, rows)


def image(A: RatMat, S: Subspace | None = None) -> Subspace:
    """Column space of A, or A(S) when S is given."""
    if S is None:
        return Subspace.from_rows(A.rows, [list(col) for col in zip(*A.data)] if A.rows else [])
    if S.ambient != A.cols:
        raise DimensionMismatch("subspace ambient must match column count")
    return Subspace.from_rows(A.rows, [list(A.apply(row)) for row in S.mat.data])


def preimage(A: RatMat, S: Subspace) -> Subspace:
    """{x : A x in S}, computed through the equation form of S."""
    if S.ambient != A.rows:
        raise DimensionMismatch("subspace ambient must match row count")
    eqs = S.equations()
    if eqs.rows == 0:
        return Subspace.full(A.cols)
    return kernel(eqs @ A)


def intersect(S: Subspace, T: Subspace) -> Subspace:
    return zassenhaus(S, T)[1]


def sum_subspaces(S: Subspace, T: Subspace) -> Subspace:
    return zassenhaus(S, T)[0]


def zassenhaus(S: Subspace, T: Subspace) -> tuple[Subspace, Subspace]:
    """(S + T, S ∩ T) from one echelon pass over the doubled block matrix."""
    if S.ambient != T.ambient:
        raise DimensionMismatch("ambient dimensions differ")
    n = S.ambient
    rows = []
    for r in S.mat.data:
        rows.append(r + r)
    for r in T.mat.data:
        rows.append(r + [ZERO] * n)
    if not rows:
        return Subspace.zero(n), Subspace.zero(n)
    red, piv = RatMat.from_rows(rows, 2 * n).rref()
    sum_rows, int_rows = [], []
    for i in range(red.rows):
        left = red.data[i][:n]
        right = red.data[i][n:]
        if any(left):
            sum_rows.append(left)
        elif any(right):
            int_rows.append(right)
    return Subspace.from_rows(n, sum_rows), Subspace.from_rows(n, int_rows)


def is_complement(S: Subspace, T: Subspace, ambient: int) -> bool:
    """True when S ∩ T = {0} and dim S + dim T = ambient."""
    if S.ambient != ambient or T.ambient != ambient:
        raise DimensionMismatch("ambient dimensions differ")
    if S.dim + T.dim != ambient:
        return False
    return intersect(S, T).dim == 0


# ---------------------------------------------------------------------------
# Sparse exact elimination.
#
# Face-map constraint systems are huge but mostly single- or double-entry
# rows; plain dense elimination would dominate the whole library's runtime.
# Rows are dicts {var: coefficient}.
# ---------------------------------------------------------------------------


def _sparse_eliminate(rows: list[dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Forward-eliminate sparse rows; returns pivot-variable -> normalized row.

    Coefficients may be ints or Fractions (mixed arithmetic stays exact);
    unit coefficients take agcd-free path since transport rows dominate.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    queue = sorted((r for r in rows if r), key=len)
    for row in queue:
        row = dict(row)
        while row:
            # reduce against existing pivots
            hit = None
            for v in row:
                if v in pivots:
                    hit = v
                    break
            if hit is None:
                break
            c = row.pop(hit)
            prow = pivots[hit]
            if c == 1:
                for v2, c2 in prow.items():
                    if v2 == hit:
                        continue
                    nv = row.get(v2, 0) - c2
                    if nv:
                        row[v2] = nv
                    else:
                        row.pop(v2, None)
            elif c == -1:
                for v2, c2 in prow.items():
                    if v2 == hit:
                        continue
                    nv = row.get(v2, 0) + c2
                    if nv:
                        row[v2] = nv
                    else:
                        row.pop(v2, None)
            else:
                for v2, c2 in prow.items():
                    if v2 == hit:
                        continue
                    nv = row.get(v2, 0) - c * c2
                    if nv:
                        row[v2] = nv
                    else:
                        row.pop(v2, None)
        if not row:
            continue
        # pick the sparsest normalization pivot: any var; choose min for determinism
        pv = min(row)
        lead = row[pv]
        if lead == 1:
            pivots[pv] = row
        elif lead == -1:
            pivots[pv] = {v: -c for v, c in row.items()}
        else:
            inv = ONE / lead if isinstance(lead, Fraction) else Fr(1, lead)
            pivots[pv] = {v: c * inv for v, c in row.items()}
    return pivots


def sparse_rank(rows: list[dict[int, Fraction]], nvars: int) -> int:
    return len(_sparse_eliminate(rows))


def sparse_kernel_basis(rows: list[dict[int, Fraction]], nvars: int) -> list[dict[int, Fraction]]:
    """Basis of the solution space of the homogeneous sparse system.

    One basis vector per free variable, with unit value there; pivot values
    back-substituted.  The result is triangular with respect to the free
    variables, hence canonical for a fixed variable order.
    """
    pivots = _sparse_eliminate(rows)
    # back-substitute so each pivot row mentions only free variables
    order = sorted(pivots, reverse=True)
    for pv in order:
        row = pivots[pv]
        changed = True
        while changed:
            changed = False
            for v in list(row):
                if v != pv and v in pivots:
                    c = row.pop(v)
                    for v2, c2 in pivots[v].items():
                        if v2 == v:
                            continue
                        nv = row.get(v2, 0) - c * c2
                        if nv:
                            row[v2] = nv
                        else:
                            row.pop(v2, None)
                    changed = True
                    break
    basis = []
    pivset = set(pivots)
    for f in range(nvars):
        if f in pivset:
            continue
        vec = {f: ONE}
        for pv, row in pivots.items():
            c = row.get(f)
            if c:
                vec[pv] = -c
        basis.append(vec)
    return basis


def sparse_nullity(rows: list[dict[int, Fraction]], nvars: int) -> int:
    return nvars - sparse_rank(rows, nvars)


def dense_rows_from_sparse(vecs: list[dict[int, Fraction]], nvars: int) -> list[list[Fraction]]:
    out = []
    for v in vecs:
        row = [ZERO] * nvars
        for i, c in v.items():
            row[i] = Fr(c)
        out.append(row)
    return out

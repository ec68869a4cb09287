"""Splitting a bundle with a cleavage back into an operator tower.

Horn filling inside the cleavage drives everything: push-forwards move one
vertex at a time toward the last object, the retraction composes them, and
the resulting coordinate change identifies the bundle with a semi-direct
product.  Components of that coordinate change vanish above the order, so
verification stays block-sparse even at high levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NoSolutionError, ValidationError
from .exactla import Fr, RatMat, Subspace, left_solver, solve_matrix
from .graded import BlockMap, Grading
from .groupoid import NerveSimplex
from .ordmaps import mask_to_tuple
from .ruth import GaugeData, Ruth, RuthMorphism, check_morphism, validate_ruth
from .sdp import build_sdp, sdp_grading, twisted_cleavage
from .svb import (
    BundleMap,
    Cleavage,
    SimpVB,
    check_cleavage,
    check_weakly_flat_morphism,
    core,
)
from .simplicial import face_kernel


class SplitContext:
    """A fibration with a validated normal weakly flat cleavage, plus caches.

    validate: "cleavage" runs the full cleavage checker; "none" trusts the
    caller (used internally where the cleavage is one by construction).
    Caches are write-once; the context never mutates its inputs.
    """

    def __init__(self, V: SimpVB, C: Cleavage, validate: str = "cleavage"):
        self.V = V
        self.C = C
        self.G = V.base
        self.L = V.L
        self.core = core(V)
        self.E = self.core.bundle
        self.N = self.E.N
        self._k_basis: dict = {}
        self._pik_coords: dict = {}
        self._split_mat: dict = {}
        self._fill_ops: dict = {}
        self._phi: dict = {}
        if validate == "cleavage":
            rep = check_cleavage(V, C, check_interior=False)
            if not (rep.bijective and rep.normal and rep.weakly_flat):
                raise ValidationError(
                    "cleavage is not normal weakly flat bijective", witness=rep.failures[:3]
                )
        elif validate != "none":
            raise ValueError("validate must be 'cleavage' or 'none'")

    # -- kernels and projections -------------------------------------------

    def k_basis(self, n: int, s: NerveSimplex) -> Subspace:
        key = (n, s)
        sub = self._k_basis.get(key)
        if sub is None:
            sub = self._k_basis[key] = face_kernel(self.V, n, s, range(1, n + 1))
        return sub

    def pik_coords(self, n: int, s: NerveSimplex) -> RatMat:
        """Rows giving K-coordinates of the projection with kernel C.

        At level zero the kernel is the whole fiber and the projection is the
        identity; cleavages only start at level one.
        """
        key = (n, s)
        mat = self._pik_coords.get(key)
        if mat is None:
            K = self.k_basis(n, s)
            d = self.V.fiber_dim(n, s)
            if n == 0:
                P = K.mat.transpose()
            else:
                Csub = self.C.subspace(n, s)
                if K.dim + Csub.dim != d:
                    raise ValidationError(f"fiber is not kernel plus cleavage at level {n}")
                P = RatMat.vstack([K.mat, Csub.mat]).transpose()
            inv = P.inverse()
            mat = RatMat(K.dim, d, inv.data[: K.dim])
            self._pik_coords[key] = mat
        return mat

    # -- horn filling inside the cleavage ------------------------------------

    def _fill_operator(self, n: int, k: int, s: NerveSimplex):
        key = (n, k, s)
        op = self._fill_ops.get(key)
        if op is None:
            Cb = self.C.subspace(n, s).mat.transpose()  # fiber x dimC
            mats = [self.V.face(n, j, s).to_dense() @ Cb for j in range(n + 1) if j != k]
            stacked = RatMat.vstack(mats)
            L = left_solver(stacked)
            op = self._fill_ops[key] = (Cb, L, stacked)
        return op

    def horn_fill(self, n: int, k: int, s: NerveSimplex, faces: dict, check: bool = False):
        """The unique cartesian filler of a relative horn, linear in the horn.

        faces maps each index j != k to a vector over the j-th face of s.
        With check=True the prescribed faces are verified against the filler,
        which rejects inconsistent horns.
        """
        if not 0 <= k < n:
            raise ValidationError("cleavage filling needs k < n")
        Cb, L, stacked = self._fill_operator(n, k, s)
        vec: list[Fraction] = []
        for j in range(n + 1):
            if j == k:
                continue
            vec.extend(faces[j])
        coef = L.apply(vec)
        filler = Cb.apply(coef)
        if check:
            if stacked.apply(coef) != tuple(vec):
                raise NoSolutionError("prescribed faces are not a consistent horn")
        return filler

    # -- push-forwards --------------------------------------------------------

    def h_vector(self, n: int, i: int, s: NerveSimplex, x):
        """The cartesian prism over x in direction i; returns (h, its base)."""
        if not 0 <= i < n + 1:
            raise ValidationError("direction must be a vertex below the top")
        G = self.G
        t = G.degeneracy(s, i + 1)
        vals: dict[tuple[int, ...], tuple] = {}
        edge = (i, i + 1)
        edge_base = G.restrict_vertices(t, edge)
        ri, _ = self.V.restrict_map(n, s, (i,))
        vals[edge] = self.horn_fill(1, 0, edge_base, {1: ri.apply(x)})
        members = [v for v in range(n + 2) if v not in edge]
        for size in range(3, n + 3):
            for extra_bits in range(1 << len(members)):
                if bin(extra_bits).count("1") != size - 2:
                    continue
                alpha = tuple(sorted(edge + tuple(
                    members[b] for b in range(len(members)) if (extra_bits >> b) & 1
                )))
                m = len(alpha) - 1
                ip = alpha.index(i)
                faces = {}
                for j in range(m + 1):
                    if j == ip:
                        continue
                    sub = alpha[:j] + alpha[j + 1 :]
                    if i in sub and i + 1 in sub:
                        faces[j] = vals[sub]
                    else:
                        orig = tuple(v if v <= i else v - 1 for v in sub)
                        rmat, _ = self.V.restrict_map(n, s, orig)
                        faces[j] = rmat.apply(x)
                vals[alpha] = self.horn_fill(m, ip, G.restrict_vertices(t, alpha), faces)
        return vals[tuple(range(n + 2))], t

    def push_forward(self, n: int, i: int, s: NerveSimplex, x):
        """(h_i(x), p_i(x), base of p_i(x)) for a vector x over s."""
        h, t = self.h_vector(n, i, s, x)
        p = self.V.face(n + 1, i, t).apply(h)
        return h, p, self.G.face(t, i)

    def retraction_vector(self, n: int, s: NerveSimplex, x, a: int | None = None):
        """Apply the push-forward word, rightmost factor first; returns (vec, base)."""
        a = n if a is None else a
        cur, base = x, s
        for b in range(1, a + 1):
            for i in range(b - 1, -1, -1):
                _, cur, base = self.push_forward(n, i, base, cur)
        return cur, base

    def retraction_matrix(self, n: int, s: NerveSimplex, a: int | None = None):
        d = self.V.fiber_dim(n, s)
        cols = []
        base_out = None
        for c in range(d):
            e = tuple(Fr(1) if r == c else Fr(0) for r in range(d))
            vec, base_out = self.retraction_vector(n, s, e, a)
            cols.append(vec)
        out = RatMat.zeros(len(cols[0]) if cols else 0, d)
        for c, col in enumerate(cols):
            for r, v in enumerate(col):
                out.data[r][c] = v
        return out, (base_out if base_out is not None else s)

    # -- the splitting coordinate change --------------------------------------

    def split_matrix(self, n: int, s: NerveSimplex) -> RatMat:
        """Core coordinates of the retraction after projecting along the cleavage."""
        key = (n, s)
        mat = self._split_mat.get(key)
        if mat is not None:
            return mat
        K = self.k_basis(n, s)
        x_obj = self.G.vertex_obj(s, n)
        core_basis = self.core.bases[(n, x_obj)]
        rows_out = core_basis.dim
        d = self.V.fiber_dim(n, s)
        if K.dim != rows_out:
            raise ValidationError("kernel rank jumps across the fiber; not a fibration")
        if rows_out == 0:
            mat = RatMat.zeros(0, d)
        else:
            r_on_k = RatMat.zeros(rows_out, K.dim)
            for j, row in enumerate(K.mat.data):
                vec, base = self.retraction_vector(n, s, tuple(row))
                coords = core_basis.coordinates(vec)
                for r, v in enumerate(coords):
                    r_on_k.data[r][j] = v
            mat = r_on_k @ self.pik_coords(n, s)
        self._split_mat[key] = mat
        return mat

    def w_grading(self, n: int, s: NerveSimplex) -> Grading:
        return sdp_grading(self.E, self.G, n, s)

    def phi_block(self, n: int, s: NerveSimplex) -> BlockMap:
        """The splitting map as a block map onto the mask-graded model fiber."""
        key = (n, s)
        bm = self._phi.get(key)
        if bm is not None:
            return bm
        Vg = self.V.grading(n, s)
        Wg = self.w_grading(n, s)
        blocks = {}
        for mask in Wg.labels:
            k = bin(mask).count("1") - 1
            if Wg.dim(mask) == 0 or k > self.N:
                continue
            restr, base = self.V.restrict_map(n, s, mask_to_tuple(mask))
            M = self.split_matrix(k, base)
            row = BlockMap.from_dense(
                restr.dst, Grading((mask,), (M.rows,)), M
            ).compose(restr)
            for (_, sl), e in row.blocks.items():
                blocks[(mask, sl)] = e
        bm = self._phi[key] = BlockMap(Vg, Wg, blocks)
        return bm

    def phi_matrix(self, n: int, s: NerveSimplex) -> RatMat:
        return self.phi_block(n, s).to_dense()


# ---------------------------------------------------------------------------
# Extraction.
# ---------------------------------------------------------------------------


def certified_operator_cap(ctx: SplitContext) -> int:
    """Largest m whose extraction fits under the truncation."""
    return min(ctx.N + 1, ctx.L - ctx.N)


def extract_ruth(ctx: SplitContext) -> Ruth:
    """Read the operator tower off the zeroth face in split coordinates.

    Embeds a core vector over a unit-prefixed base, maps back to the bundle,
    takes the zeroth face, and projects to the top index; operators beyond the
    certified cap vanish by degree.  The output is validated before return.
    """
    G, E = ctx.G, ctx.E
    ops: dict = {}
    cap = certified_operator_cap(ctx)
    for m in range(cap + 1):
        for g in G.nerve_level(m):
            table = {}
            x0 = g.x0
            top_obj = G.vertex_obj(g, m)
            for deg in E.degrees():
                cols = E.dim(x0, deg)
                tgt = deg + m - 1
                rows = E.dim(top_obj, tgt) if tgt >= 0 else 0
                if rows == 0 or cols == 0:
                    continue
                fiber = g
                for _ in range(deg):
                    fiber = G.degeneracy(fiber, 0)
                level = deg + m
                if level > ctx.L:
                    continue
                phi = ctx.phi_matrix(level, fiber)
                wg = ctx.w_grading(level, fiber)
                sigma_mask = (1 << (deg + 1)) - 1
                off = wg.offset(sigma_mask)
                embed = RatMat.zeros(wg.total, cols)
                for c in range(cols):
                    embed.data[off + c][c] = Fr(1)
                v_cols = solve_matrix(phi, embed)
                d0v = ctx.V.face(level, 0, fiber).to_dense() @ v_cols
                base0 = G.face(fiber, 0)
                w = ctx.phi_matrix(level - 1, base0) @ d0v
                wg0 = ctx.w_grading(level - 1, base0)
                iota_mask = (1 << level) - 1
                ioff = wg0.offset(iota_mask)
                block = RatMat(rows, cols, [w.data[ioff + r] for r in range(rows)])
                sign = -1 if (m + deg - 1) % 2 else 1
                if sign < 0:
                    block = -block
                if not block.is_zero():
                    table[deg] = block
            if table:
                ops[(m, g)] = table
    R = Ruth(E, ops, m_cap=2 * E.N + 2)
    validate_ruth(R)
    return R


# ---------------------------------------------------------------------------
# Round trip and morphism descent.
# ---------------------------------------------------------------------------


@dataclass
class RoundtripReport:
    simplicial_ok: bool
    invertible_ok: bool
    cleavage_ok: bool
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.simplicial_ok and self.invertible_ok and self.cleavage_ok


def roundtrip_bundle(ctx: SplitContext) -> tuple[Ruth, RoundtripReport]:
    """Extract, rebuild, and verify the splitting map is an exact isomorphism.

    Faces are compared at levels up to L-1 and degeneracies up to L-2; the top
    level loses one face check to the truncation.
    """
    R = extract_ruth(ctx)
    W = build_sdp(R, ctx.L, validate=False)
    G = ctx.G
    simplicial_ok = True
    invertible_ok = True
    cleavage_ok = True
    checked = 0
    failures: list = []

    def fail(tag, *info):
        if len(failures) < 10:
            failures.append((tag,) + info)

    top = ctx.L - 1
    for n in range(top + 1):
        for s in G.nerve_level(n):
            phi_n = ctx.phi_block(n, s)
            dense = phi_n.to_dense()
            checked += 1
            if dense.rows != dense.cols or dense.rank() != dense.rows:
                invertible_ok = False
                fail("invertible", n, G.simplex_index(s))
            if n >= 1:
                for i in range(n + 1):
                    t = G.face(s, i)
                    lhs = ctx.phi_block(n - 1, t).compose(ctx.V.face(n, i, s))
                    rhs = W.face(n, i, s).compose(phi_n)
                    checked += 1
                    if lhs != rhs:
                        simplicial_ok = False
                        fail("face", n, i, G.simplex_index(s))
            if n + 1 <= top:
                for j in range(n + 1):
                    t = G.degeneracy(s, j)
                    lhs = ctx.phi_block(n + 1, t).compose(ctx.V.deg(n, j, s))
                    rhs = W.deg(n, j, s).compose(phi_n)
                    checked += 1
                    if lhs != rhs:
                        simplicial_ok = False
                        fail("degeneracy", n, j, G.simplex_index(s))
            if n >= 1:
                # the cleavage must map onto the canonical one
                eqC = ctx.C.equations(n, s)
                dimC = ctx.V.fiber_dim(n, s) - eqC.rank() if eqC.rows else ctx.V.fiber_dim(n, s)
                wg = ctx.w_grading(n, s)
                iota = (1 << (n + 1)) - 1
                lam = wg.dim(iota)
                checked += 1
                if dimC != ctx.V.fiber_dim(n, s) - lam:
                    cleavage_ok = False
                    fail("cleavage-dim", n, G.simplex_index(s))
                elif lam:
                    Cb = ctx.C.subspace(n, s).mat.transpose()
                    ioff = wg.offset(iota)
                    img = dense @ Cb
                    for r in range(ioff, ioff + lam):
                        if any(img.data[r]):
                            cleavage_ok = False
                            fail("cleavage-image", n, G.simplex_index(s))
                            break
    return R, RoundtripReport(simplicial_ok, invertible_ok, cleavage_ok, checked, failures)


def lower_morphism(phi: BundleMap, R_src: Ruth, R_dst: Ruth,
                   C_src: Cleavage | None = None, C_dst: Cleavage | None = None) -> RuthMorphism:
    """Descend a weakly flat bundle map between mask-graded bundles to a morphism.

    Rejects maps that fail weak flatness; the counterexample bundle shows the
    hypothesis is necessary.
    """
    from .svb import canonical_cleavage

    C_src = C_src if C_src is not None else canonical_cleavage(phi.V)
    C_dst = C_dst if C_dst is not None else canonical_cleavage(phi.W)
    bad = check_weakly_flat_morphism(phi, C_src, C_dst)
    if bad:
        raise ValidationError("bundle map is not weakly flat", witness=bad[0])
    G = phi.V.base
    E_src, E_dst = R_src.E, R_dst.E
    ops: dict = {}
    cap = min(R_src.m_cap, phi.V.L)
    for m in range(cap + 1):
        for g in G.nerve_level(m):
            table = {}
            for deg in E_src.degrees():
                cols = E_src.dim(g.x0, deg)
                rows = E_dst.dim(G.vertex_obj(g, m), deg + m)
                if rows == 0 or cols == 0:
                    continue
                level = deg + m
                if level > phi.V.L:
                    continue
                fiber = g
                for _ in range(deg):
                    fiber = G.degeneracy(fiber, 0)
                bm = phi.at(level, fiber)
                sigma_mask = (1 << (deg + 1)) - 1
                iota_mask = (1 << (level + 1)) - 1
                entry = bm.blocks.get((iota_mask, sigma_mask))
                if entry is None:
                    continue
                if isinstance(entry, Fraction):
                    mat = RatMat.identity(rows).scale(entry)
                else:
                    mat = entry
                if not mat.is_zero():
                    table[deg] = mat
            if table:
                ops[(m, g)] = table
    return RuthMorphism(R_src, R_dst, ops)


# ---------------------------------------------------------------------------
# Gauge twisting through the bundle.
# ---------------------------------------------------------------------------


def gauge_twist_via_split(R: Ruth, psi: GaugeData, L: int | None = None) -> Ruth:
    """Twist the canonical cleavage by gauge data and split along it.

    The twisted cleavage is normal and bijective by construction; the checks
    on the extracted tower (and on the gauge data as a morphism onto it) are
    asserted and reject invalid data.
    """
    B = build_sdp(R, L)
    Cpsi = twisted_cleavage(B, psi)
    ctx = SplitContext(B, Cpsi, validate="none")
    R2 = extract_ruth(ctx)
    morph = psi.as_morphism(R, R2)
    rep = check_morphism(morph)
    if not rep.ok:
        raise ValidationError("gauge data does not descend to a morphism", witness=rep.violations[0])
    return R2

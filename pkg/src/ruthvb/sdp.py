"""The semi-direct product of a finite groupoid with an operator tower.

Fibers at level n are indexed by the 0-preserving monos into [n]; positive
faces and degeneracies are index transports, and the zeroth face combines
operator blocks along tail arrows (prefix factorizations) with signed
identities (interior deletions).  A second, source-indexed code path for the
zeroth face acts as a built-in self-oracle for the sign bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ValidationError
from .exactla import Fr, RatMat, Subspace
from .graded import BlockMap, Grading
from .groupoid import FinGroupoid, NerveSimplex
from .ordmaps import (
    d0_row,
    mask_to_tuple,
    transport_degeneracy_table,
    transport_face_table,
    zero_mono_masks,
)
from .ruth import GaugeData, GradedBundle, Ruth, RuthMorphism, validate_ruth
from .svb import BundleMap, Cleavage, SimpVB, canonical_cleavage, explicit_cleavage


def _as_scalar(mat: RatMat) -> Fraction | None:
    """c when mat == c * identity, else None."""
    if mat.rows != mat.cols:
        return None
    c = mat.data[0][0] if mat.rows else Fr(0)
    for i in range(mat.rows):
        for j in range(mat.cols):
            if mat.data[i][j] != (c if i == j else 0):
                return None
    return c


def sdp_grading(E: GradedBundle, G: FinGroupoid, n: int, s: NerveSimplex) -> Grading:
    masks = zero_mono_masks(n)
    dims = tuple(
        E.dim(G.vertex_obj(s, m.bit_length() - 1), bin(m).count("1") - 1) for m in masks
    )
    return Grading(masks, dims)


class SdpBundle(SimpVB):
    """build_sdp output: a mask-graded bundle remembering its tower."""

    def __init__(self, R: Ruth, L: int):
        self.R = R
        self.E = R.E
        G = R.G

        def grading(n, s):
            return sdp_grading(self.E, G, n, s)

        def face(n, i, s):
            src = self.grading(n, s)
            dst = self.grading(n - 1, G.face(s, i))
            if i > 0:
                return BlockMap.transport(src, dst, [(b, a, 1) for b, a in transport_face_table(n, i)])
            blocks = {}
            for beta in zero_mono_masks(n - 1):
                if dst.dim(beta) == 0:
                    continue
                for term in d0_row(beta, n):
                    if src.dim(term.source_mask) == 0:
                        continue
                    if term.case == "II":
                        blocks[(beta, term.source_mask)] = Fr(term.sign)
                        continue
                    h = G.restrict_vertices(s, term.tail)
                    deg = bin(term.source_mask).count("1") - 1
                    mat = R.block(term.m, h, deg)
                    if mat.is_zero():
                        continue
                    c = _as_scalar(mat)
                    entry = c * term.sign if c is not None else mat.scale(term.sign)
                    key = (beta, term.source_mask)
                    prev = blocks.get(key)
                    if prev is None:
                        blocks[key] = entry
                    else:  # cannot happen: factorizations are unique
                        raise AssertionError("duplicate d_0 term")
            return BlockMap(src, dst, blocks)

        def deg(n, j, s):
            src = self.grading(n, s)
            dst = self.grading(n + 1, G.degeneracy(s, j))
            return BlockMap.transport(
                src, dst, [(b, a, 1) for b, a in transport_degeneracy_table(n, j)]
            )

        super().__init__(G, L, grading, face, deg, kind="sdp")

    def canonical_cleavage(self) -> Cleavage:
        return canonical_cleavage(self)


def build_sdp(R: Ruth, L: int | None = None, validate: bool = True) -> SdpBundle:
    """Assemble the semi-direct product, rejecting invalid towers first.

    Default truncation is 2N+3: products of two operators are nontrivial up
    to level 2N+2 and one extra level guards the double-face checks.  The
    full bundle verification (simplicial identities, fibration, order, core)
    lives in verify_sdp so perturbation experiments can build raw bundles.
    """
    if L is None:
        L = 2 * R.E.N + 3
    if L < 1:
        raise ValidationError("truncation level must be at least 1")
    if validate:
        validate_ruth(R)
    return SdpBundle(R, L)


@dataclass
class SdpVerification:
    identities_ok: bool
    identities_checked: int
    order: int | None
    order_ok: bool
    core_ok: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.identities_ok and self.order_ok and self.core_ok


def verify_sdp(B: SdpBundle) -> SdpVerification:
    """Simplicial identities, fibration order, and core, all exact."""
    from .simplicial import verify_simplicial_identities
    from .svb import check_fibration, core

    rep = verify_simplicial_identities(B)
    fib = check_fibration(B)
    cr = core(B)
    order_ok = fib.is_fibration and fib.order == B.E.N
    core_ok = cr.bundle == B.E
    failures = [("identity", v.identity, v.level, v.indices) for v in rep.violations]
    failures += [("fibration",) + f for f in fib.failures]
    if not core_ok:
        failures.append(("core", "dims differ"))
    return SdpVerification(rep.ok, rep.checked, fib.order, order_ok, core_ok, failures)


# ---------------------------------------------------------------------------
# Source-indexed zeroth face: the self-oracle for Remark-style formulas.
# ---------------------------------------------------------------------------


def d0_homogeneous_column(R: Ruth, n: int, s: NerveSimplex, alpha_mask: int):
    """Blocks of d_0 on the homogeneous summand alpha, enumerated source-side.

    Prefix extensions of alpha by top elements give operator blocks along the
    extension tail; single interior insertions give signed identities.  This
    enumeration never consults the target-indexed tables, so agreement with
    the blockwise path checks the sign conventions from two directions.
    """
    G = R.G
    out: dict[int, object] = {}
    elems = mask_to_tuple(alpha_mask)
    k = len(elems) - 1
    top = elems[-1]
    deg = k
    above = [v for v in range(top + 1, n + 1)]
    for tmask in range(1 << len(above)):
        tail_elems = [above[b] for b in range(len(above)) if (tmask >> b) & 1]
        bp = alpha_mask
        for v in tail_elems:
            bp |= 1 << v
        l = k + len(tail_elems) - 1  # beta:[l] -> [n-1]
        m = len(tail_elems)
        tail_verts = (top,) + tuple(tail_elems)
        h = G.restrict_vertices(s, tail_verts)
        mat = R.block(m, h, deg)
        if mat.is_zero():
            continue
        sign = -1 if l % 2 else 1
        beta = (bp & ~1) >> 1  # unprime
        out[beta] = mat.scale(sign)
    for v in range(1, top):
        if (alpha_mask >> v) & 1:
            continue
        bp = alpha_mask | (1 << v)
        i = bin(bp & ((1 << v) - 1)).count("1")  # rank of v in beta'
        beta = (bp & ~1) >> 1
        sign = Fr(-1 if (i + 1) % 2 else 1)
        out[beta] = sign
    return out


def d0_paths_agree(B: SdpBundle, levels=None) -> bool:
    """Compare the target-indexed and source-indexed zeroth-face assemblies."""
    from .graded import _entries_equal

    G = B.base
    levels = range(1, B.L + 1) if levels is None else levels
    for n in levels:
        for s in G.nerve_level(n):
            blockwise = B.face(n, 0, s)
            src = B.grading(n, s)
            dst = B.grading(n - 1, G.face(s, 0))
            for alpha in zero_mono_masks(n):
                if src.dim(alpha) == 0:
                    continue
                expected = d0_homogeneous_column(B.R, n, s, alpha)
                for beta in zero_mono_masks(n - 1):
                    if dst.dim(beta) == 0:
                        continue
                    got = blockwise.blocks.get((beta, alpha))
                    want = expected.get(beta)
                    if isinstance(want, RatMat) and want.is_zero():
                        want = None
                    if isinstance(want, Fraction) and not want:
                        want = None
                    if not _entries_equal(got, want, dst.dim(beta), src.dim(alpha)):
                        return False
    return True


# ---------------------------------------------------------------------------
# Morphism lifts and twisted cleavages.
# ---------------------------------------------------------------------------


def _lift_block_map(Vs: SimpVB, Vt: SimpVB, block_provider, n: int, s: NerveSimplex) -> BlockMap:
    """Level-preserving map with target components summing prefix restrictions."""
    G = Vs.base
    src = Vs.grading(n, s)
    dst = Vt.grading(n, s)
    blocks = {}
    for beta in zero_mono_masks(n):
        l = bin(beta).count("1") - 1
        if dst.dim(beta) == 0:
            continue
        elems = mask_to_tuple(beta)
        for r in range(l + 1):
            smask = 0
            for v in elems[: r + 1]:
                smask |= 1 << v
            if src.dim(smask) == 0:
                continue
            h = G.restrict_vertices(s, elems[r:])
            mat = block_provider(l - r, h, r)
            if mat.is_zero():
                continue
            c = _as_scalar(mat)
            blocks[(beta, smask)] = c if c is not None else mat
    return BlockMap(src, dst, blocks)


def lift_morphism(psi: RuthMorphism, Vs: SimpVB | None = None, Vt: SimpVB | None = None,
                  L: int | None = None) -> BundleMap:
    """The bundle map induced by a tower morphism between two semi-direct products."""
    if Vs is None:
        Vs = build_sdp(psi.source, L)
    if Vt is None:
        Vt = build_sdp(psi.target, L if L is not None else Vs.L)

    def fn(n, s):
        return _lift_block_map(Vs, Vt, psi.block, n, s)

    return BundleMap(Vs, Vt, fn, name="lift")


def gauge_lift(V: SdpBundle, psi: GaugeData) -> BundleMap:
    """The lift formula applied to bare gauge data; needs no target tower."""

    def fn(n, s):
        return _lift_block_map(V, V, psi.block, n, s)

    return BundleMap(V, V, fn, name="gauge-lift")


def twisted_cleavage(V: SdpBundle, psi: GaugeData) -> Cleavage:
    """Preimage of the canonical cleavage under the gauge lift, as an equation form."""
    E = V.E
    G = V.base

    def rows(n, s):
        g = V.grading(n, s)
        top_obj = G.vertex_obj(s, n)
        lam = E.dim(top_obj, n)
        out = RatMat.zeros(lam, g.total)
        if lam == 0:
            return out
        full = (1 << (n + 1)) - 1
        elems = mask_to_tuple(full)
        for r in range(n + 1):
            smask = (1 << (r + 1)) - 1
            if g.dim(smask) == 0:
                continue
            h = G.restrict_vertices(s, elems[r:])
            mat = psi.block(n - r, h, r)
            if mat.is_zero():
                continue
            off = g.offset(smask)
            for a in range(mat.rows):
                for b in range(mat.cols):
                    if mat.data[a][b]:
                        out.data[a][off + b] += mat.data[a][b]
        return out

    return Cleavage(V, equations_fn=rows, name="twisted")


# ---------------------------------------------------------------------------
# The order-two counterexample bundle.
# ---------------------------------------------------------------------------


def example_not_full():
    """Pair-groupoid pullback of the two-step line complex with two cleavages.

    Returns (V, C, Cprime): C is canonical (normal and flat); Cprime modifies
    three level-two fibers by triangle families and is normal and weakly flat,
    yet the identity map (V, Cprime) -> (V, C) is not weakly flat.

    The modified fibers carry the triangle families (lam, mu, -lam+mu),
    (lam, mu, -mu/2), and (lam, mu, -lam) in (v10, v20, v210) coordinates.
    The companion coefficients are pinned by solving the sixteen level-three
    closure equations exactly: the family -lam+mu on the repeated-tail fiber
    admits a one-parameter family of valid companions and these are the
    members matching the quoted witness (lam=0, mu=1, top component 1).
    """
    from .doldkan import ChainComplex, dk
    from .groupoid import pair_groupoid
    from .svb import pullback_svb

    Y = ChainComplex((0, 1, 1), {2: RatMat.from_rows([[1]])})
    G = pair_groupoid(2)
    V = pullback_svb(dk(Y, 4), G)
    C = canonical_cleavage(V)

    # object 0 plays x, object 1 plays y; patterns list (x_0, x_1, x_2)
    def simplex_for(pattern):
        x0, x1, x2 = pattern
        a = next(
            g for g in range(G.n_arrows)
            if G.arrow_src[g] == x0 and G.arrow_tgt[g] == x1
        )
        b = next(
            g for g in range(G.n_arrows)
            if G.arrow_src[g] == x1 and G.arrow_tgt[g] == x2
        )
        return NerveSimplex(x0, (a, b))

    table = {
        (2, simplex_for((1, 0, 0))): Subspace.from_rows(3, [[1, 0, -1], [0, 1, 1]]),
        (2, simplex_for((0, 1, 0))): Subspace.from_rows(3, [[1, 0, 0], [0, 1, Fr(-1, 2)]]),
        (2, simplex_for((1, 0, 1))): Subspace.from_rows(3, [[1, 0, -1], [0, 1, 0]]),
    }
    Cp = explicit_cleavage(V, table, fallback=C, name="modified")
    return V, C, Cp


# ---------------------------------------------------------------------------
# Coherence sensitivity: the converse direction of the double-face identity.
# ---------------------------------------------------------------------------


@dataclass
class SensitivityReport:
    perturbed: tuple | None
    rh2_failed: bool
    rh2_witness: tuple | None
    d0_identity_failed: bool
    d0_witness: tuple | None
    witness_related: bool
    restored_ok: bool
    outcome: str = "broken"  # "broken" | "coherent" | "vacuous"
    note: str = ""

    @property
    def ok(self) -> bool:
        if self.outcome == "vacuous":
            return True
        if self.outcome == "coherent":
            # every tried perturbation stayed coherent and the double face
            # held each time: the equivalence verified in its other direction
            return not self.rh2_failed and not self.d0_identity_failed
        return (
            self.rh2_failed
            and self.d0_identity_failed
            and self.witness_related
            and self.restored_ok
        )


def _first_d0_identity_failure(B: SimpVB):
    """Scan levels for the first fiber where d_0 d_0 differs from d_0 d_1."""
    G = B.base
    for n in range(2, B.L + 1):
        for s in G.nerve_level(n):
            lhs = B.face(n - 1, 0, G.face(s, 0)).compose(B.face(n, 0, s))
            rhs = B.face(n - 1, 0, G.face(s, 1)).compose(B.face(n, 1, s))
            if lhs != rhs:
                return (n, G.simplex_index(s), s)
    return None


def _contains_subsimplex(G: FinGroupoid, s: NerveSimplex, target: NerveSimplex) -> bool:
    from itertools import combinations

    n, m = s.level, target.level
    if m > n:
        return False
    for verts in combinations(range(n + 1), m + 1):
        if G.restrict_vertices(s, verts) == target:
            return True
    return False


def rh2_sensitivity(R: Ruth, L: int | None = None, rng=None, block=None,
                    max_tries: int = 8) -> SensitivityReport:
    """Perturb operator blocks (m >= 2) and watch the two failures move together.

    A perturbation that breaks the coherence must also break the double
    zeroth face, at a related fiber, and restoring the block must restore
    both.  Some towers have genuinely free blocks (one-object commutative
    bases with vanishing differential): each tried perturbation then stays
    coherent and the double face is verified to keep holding, which checks
    the equivalence from its other side.  Vacuous when no block exists.
    """
    import random

    from .ruth import check_rh2

    G, E = R.G, R.E
    rng = rng or random.Random(0)
    if L is None:
        L = 2 * E.N + 3

    if block is None:
        candidates = []
        for m in range(2, E.N + 2):
            for s in G.nerve_level(m):
                if G.is_degenerate(s):
                    continue
                for deg in E.degrees():
                    rows = E.dim(G.vertex_obj(s, m), deg + m - 1)
                    cols = E.dim(s.x0, deg)
                    if rows and cols:
                        candidates.append((m, s, deg, rows, cols))
        if not candidates:
            return SensitivityReport(None, False, None, False, None, True, True,
                                     outcome="vacuous",
                                     note="no perturbable block of level >= 2")
        rng.shuffle(candidates)
        candidates = candidates[:max_tries]
    else:
        m, s, deg = block
        candidates = [(m, s, deg, E.dim(G.vertex_obj(s, m), deg + m - 1), E.dim(s.x0, deg))]

    last = None
    coherent_count = 0
    for m, s, deg, rows, cols in candidates:
        delta = Fr(rng.randint(1, 5), rng.randint(1, 3))
        mat = R.block(m, s, deg).copy()
        mat.data[rng.randrange(rows)][rng.randrange(cols)] += delta
        Rp = R.with_block(m, s, deg, mat)
        last = (m, G.simplex_index(s), deg)

        rh2 = check_rh2(Rp)
        Bp = build_sdp(Rp, L, validate=False)
        d0_fail = _first_d0_identity_failure(Bp)
        if rh2.ok:
            if d0_fail is not None:
                return SensitivityReport(last, False, None, True, d0_fail[:2], False,
                                         True, outcome="broken",
                                         note="double face broke without the coherence")
            coherent_count += 1
            continue
        rh2_witness = rh2.violations[0]
        related = False
        if d0_fail is not None:
            wm, widx = rh2_witness
            related = _contains_subsimplex(G, d0_fail[2], G.nerve_level(wm)[widx])
        restored_ok = check_rh2(R).ok
        if d0_fail is not None:
            B = build_sdp(R, L, validate=False)
            n, _, s_w = d0_fail
            lhs = B.face(n - 1, 0, G.face(s_w, 0)).compose(B.face(n, 0, s_w))
            rhs = B.face(n - 1, 0, G.face(s_w, 1)).compose(B.face(n, 1, s_w))
            restored_ok = restored_ok and lhs == rhs
        return SensitivityReport(
            last,
            True,
            rh2_witness,
            d0_fail is not None,
            d0_fail[:2] if d0_fail else None,
            related,
            restored_ok,
        )
    return SensitivityReport(
        last, False, None, False, None, True, True, outcome="coherent",
        note=f"{coherent_count} perturbations stayed coherent with the double face intact",
    )


def unit_face_clause(B: SimpVB) -> bool:
    """d_0 u_0 = id at every fiber up to the truncation."""
    G = B.base
    for n in range(0, B.L):
        for s in G.nerve_level(n):
            lhs = B.face(n + 1, 0, G.degeneracy(s, 0)).compose(B.deg(n, 0, s))
            if lhs != BlockMap.identity(B.grading(n, s)):
                return False
    return True


# ---------------------------------------------------------------------------
# Order-zero oracle: the translation bundle.
# ---------------------------------------------------------------------------


def translation_svb(R: Ruth, L: int) -> SimpVB:
    """Nerve of the translation groupoid as a mask-graded bundle.

    Faces come from the arrow-pair semantics: interior faces and degeneracies
    fix the source value, the zeroth face moves it along the first arrow.
    Written against the groupoid picture, not the direct-sum tables, so it can
    serve as an independent comparison for order-zero semi-direct products.
    """
    if R.E.N != 0:
        raise ValidationError("translation bundle needs an order-zero tower")
    G, E = R.G, R.E

    def grading(n, s):
        return sdp_grading(E, G, n, s)

    def face(n, i, s):
        src = grading(n, s)
        dst = grading(n - 1, G.face(s, i))
        if i == 0:
            g1 = NerveSimplex(s.x0, s.arrows[:1])
            return BlockMap(src, dst, {(1, 1): R.block(1, g1, 0)})
        return BlockMap(src, dst, {(1, 1): Fr(1)})

    def deg(n, j, s):
        src = grading(n, s)
        dst = grading(n + 1, G.degeneracy(s, j))
        return BlockMap(src, dst, {(1, 1): Fr(1)})

    return SimpVB(G, L, grading, face, deg, kind="translation")

import random
from fractions import Fraction as Fr

import pytest

from conftest import random_chain_complex
from ruthvb.doldkan import (
    ChainComplex,
    Normalization,
    check_unique_flat_cleavage,
    degenerate_span,
    dk,
    dk_classic,
    dk_sign_iso,
    half_twist_sign,
    mono_epi_duality,
    normalization_roundtrip,
    normalize,
    sign_flip,
    surjection_labels,
)
from ruthvb.errors import ValidationError
from ruthvb.exactla import RatMat, Subspace, kernel
from ruthvb.graded import BlockMap
from ruthvb.ordmaps import zero_mono_masks
from ruthvb.simplicial import (
    face_kernel,
    horn_dim,
    horn_map_dense,
    horn_of_vector,
    horn_space_basis,
    verify_simplicial_identities,
)

TWO_STEP = ChainComplex((1, 2, 1), {1: RatMat.from_rows([[1, 0]]), 2: RatMat.from_rows([[0], [1]])})


def test_boundary_squared_rejected():
    with pytest.raises(ValidationError):
        ChainComplex((1, 1, 1), {1: RatMat.from_rows([[1]]), 2: RatMat.from_rows([[1]])})


def test_constant_complex_gives_constant_object():
    Y = ChainComplex((2,), {})
    X = dk(Y, 4)
    for n in range(5):
        assert X.dim(n) == 2
    norm = normalize(X)
    assert norm.dims == (2, 0, 0, 0, 0)


def test_dk_level_dims_count_monos():
    X = dk(TWO_STEP, 5)
    from math import comb

    for n in range(6):
        assert X.dim(n) == sum(comb(n, k) * TWO_STEP.dim(k) for k in range(n + 1))


def test_dk_case_blocks():
    # the boundary block sits on the primed index, interior deletions are signs
    Y = TWO_STEP
    X = dk(Y, 3)
    d0 = X.face(2, 0)
    src, dst = X.grading(2), X.grading(1)
    assert d0.blocks[(0b11, 0b111)] == Y.d(2)  # boundary block
    assert d0.blocks[(0b11, 0b101)] == Fr(1)  # drop the interior element
    assert d0.blocks[(0b11, 0b011)] == Fr(-1)  # drop the top element


def test_simplicial_identities_random(toplevel=6):
    rng = random.Random(7)
    for _ in range(5):
        Y = random_chain_complex(rng)
        rep = verify_simplicial_identities(dk(Y, toplevel))
        assert rep.ok, rep.violations[:3]


def test_roundtrip_constructed_iso():
    rng = random.Random(11)
    for _ in range(8):
        Y = random_chain_complex(rng)
        X = dk(Y, Y.max_degree + 3)
        norm, iso = normalization_roundtrip(Y, X)
        assert norm.dims[: len(Y.dims)] == Y.dims
        for n in range(1, len(Y.dims)):
            assert iso[n - 1] @ norm.boundary[n] == Y.d(n) @ iso[n]


def test_degenerate_span_is_top_kernel():
    Y = TWO_STEP
    X = dk(Y, 4)
    for n in range(1, 5):
        D = degenerate_span(X, n)
        full = (1 << (n + 1)) - 1
        g = X.grading(n)
        rows = RatMat.zeros(g.dim(full), g.total)
        for r in range(g.dim(full)):
            rows.data[r][g.offset(full) + r] = Fr(1)
        assert D == kernel(rows)
        assert D.dim + Y.dim(n) == X.dim(n)


def test_kernel_support_characterization():
    # positive-face kernels pick out the components containing the face index
    Y = TWO_STEP
    X = dk(Y, 4)
    for n in (2, 3):
        for i in range(1, n + 1):
            K = face_kernel(X, n, None, [i])
            g = X.grading(n)
            expect = []
            for mask in zero_mono_masks(n):
                if not (mask >> i) & 1:
                    continue
                for r in range(g.dim(mask)):
                    v = [Fr(0)] * g.total
                    v[g.offset(mask) + r] = Fr(1)
                    expect.append(v)
            assert K == Subspace.from_rows(g.total, expect)
    # and the full intersection is supported on the top index alone
    K = face_kernel(X, 2, None, [1, 2])
    g = X.grading(2)
    assert K.dim == g.dim(0b111)
    for row in K.mat.data:
        assert all(v == 0 for v in row[: g.offset(0b111)])


def test_kan_horns_fill_uniquely_above_top_degree():
    Y = TWO_STEP
    L = 5
    X = dk(Y, L)
    for n in range(1, L + 1):
        for k in range(n + 1):
            hd = horn_dim(X, n, k, None)
            stacked = horn_map_dense(X, n, k, None)
            assert stacked.rank() == hd  # fillers exist
            unique = X.dim(n) == stacked.rank()
            assert unique == (n > Y.max_degree)


def test_horn_of_vector_consistent():
    X = dk(TWO_STEP, 4)
    _, basis = horn_space_basis(X, 2, 1, None)
    vec = tuple(Fr(i + 1) for i in range(X.dim(2)))
    assert basis.contains(horn_of_vector(X, 2, 1, None, vec))


def test_check_unique_flat_cleavage():
    rng = random.Random(3)
    for _ in range(3):
        Y = random_chain_complex(rng, max_degree=3, max_dim=2)
        X = dk(Y, Y.max_degree + 2)
        rep = check_unique_flat_cleavage(X)
        assert rep.ok


def test_trivial_complex_everything_degenerate():
    Y = ChainComplex((1,), {})
    X = dk(Y, 4)
    rep = check_unique_flat_cleavage(X)
    assert rep.ok
    for n in range(1, 5):
        assert degenerate_span(X, n).dim == X.dim(n)


def test_dk_classic_dims_and_normalization():
    rng = random.Random(13)
    for _ in range(6):
        Y = random_chain_complex(rng)
        L = Y.max_degree + 3
        Xc = dk_classic(Y, L)
        X = dk(Y, L)
        for n in range(L + 1):
            assert X.dim(n) == Xc.dim(n)
        assert verify_simplicial_identities(Xc, levels=range(min(L, 5) + 1)).ok
        norm, iso = normalization_roundtrip(Y, Xc)
        assert norm.dims[: len(Y.dims)] == Y.dims
        for n in range(1, len(Y.dims)):
            assert iso[n - 1] @ norm.boundary[n] == Y.d(n) @ iso[n]


def test_levelwise_identification_not_simplicial():
    """The epi/mono pairing matches levels but no degeneracy square commutes."""
    Y = ChainComplex((0, 1), {})
    L = 3
    X, Xc = dk(Y, L), dk_classic(Y, L)
    found = False
    for n in range(L):
        pairing_n = mono_epi_duality(n)
        pairing_n1 = mono_epi_duality(n + 1)
        iso_n = _pairing_iso(X, Xc, n, pairing_n)
        iso_n1 = _pairing_iso(X, Xc, n + 1, pairing_n1)
        for j in range(n + 1):
            lhs = iso_n1 @ X.deg(n, j).to_dense()
            rhs = Xc.deg(n, j).to_dense() @ iso_n
            if lhs != rhs:
                found = True
    assert found


def _pairing_iso(X, Xc, n, pairing):
    g, gc = X.grading(n), Xc.grading(n)
    out = RatMat.zeros(gc.total, g.total)
    for mask, label in pairing.items():
        d = g.dim(mask)
        assert d == gc.dim(label)
        for r in range(d):
            out.data[gc.offset(label) + r][g.offset(mask) + r] = Fr(1)
    return out


def test_sign_conventions():
    assert [half_twist_sign(n) for n in range(5)] == [1, 1, -1, -1, 1]
    Y = TWO_STEP
    iso = dk_sign_iso(Y, 4)
    Xf, X = dk(sign_flip(Y), 4), dk(Y, 4)
    for n in range(1, 5):
        for i in range(n + 1):
            assert iso[n - 1].compose(Xf.face(n, i)) == X.face(n, i).compose(iso[n])
    for n in range(4):
        for j in range(n + 1):
            assert iso[n + 1].compose(Xf.deg(n, j)) == X.deg(n, j).compose(iso[n])


def test_surjection_labels_counts():
    from math import comb

    for n in range(6):
        labels = surjection_labels(n)
        assert len(labels) == 2 ** n
        for k in range(n + 1):
            assert sum(1 for l in labels if l[-1] == k) == comb(n, k)

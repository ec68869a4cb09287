import random
from fractions import Fraction as Fr

import pytest

from ruthvb.errors import DimensionMismatch
from ruthvb.exactla import RatMat
from ruthvb.graded import BlockMap, Grading


def rand_blockmap(rng, src: Grading, dst: Grading, density=0.6) -> BlockMap:
    blocks = {}
    for dl in dst.labels:
        for sl in src.labels:
            if rng.random() > density:
                continue
            if rng.random() < 0.4 and dst.dim(dl) == src.dim(sl):
                blocks[(dl, sl)] = Fr(rng.randint(-3, 3))
            else:
                blocks[(dl, sl)] = RatMat.from_rows(
                    [[Fr(rng.randint(-2, 2)) for _ in range(src.dim(sl))]
                     for _ in range(dst.dim(dl))],
                    src.dim(sl),
                )
    return BlockMap(src, dst, blocks)


def test_grading_layout():
    g = Grading(("a", "b", "c"), (2, 0, 3))
    assert g.total == 5
    assert g.offset("c") == 2
    assert g.slice("c", (1, 2, 3, 4, 5)) == (3, 4, 5)


def test_scalar_block_must_be_square():
    g2 = Grading(("a",), (2,))
    g3 = Grading(("b",), (3,))
    with pytest.raises(DimensionMismatch):
        BlockMap(g2, g3, {("b", "a"): Fr(1)})


def test_compose_matches_dense():
    rng = random.Random(4)
    for _ in range(25):
        dims = lambda k: tuple(rng.randint(0, 3) for _ in range(k))
        ga = Grading(tuple(range(3)), dims(3))
        gb = Grading(tuple(range(2)), dims(2))
        gc = Grading(tuple(range(3)), dims(3))
        f = rand_blockmap(rng, ga, gb)
        g = rand_blockmap(rng, gb, gc)
        comp = g.compose(f)
        assert comp.to_dense() == g.to_dense() @ f.to_dense()


def test_add_neg_eq_apply():
    rng = random.Random(5)
    ga = Grading((0, 1), (2, 2))
    gb = Grading((0, 1), (2, 1))
    f = rand_blockmap(rng, ga, gb)
    g = rand_blockmap(rng, ga, gb)
    assert (f + g).to_dense() == f.to_dense() + g.to_dense()
    assert (-f).to_dense() == -(f.to_dense())
    assert (f - f).is_zero()
    vec = tuple(Fr(rng.randint(-3, 3)) for _ in range(ga.total))
    assert f.apply(vec) == tuple(f.to_dense().apply(vec))


def test_scalar_and_dense_blocks_compare_equal():
    g = Grading((0,), (2,))
    a = BlockMap(g, g, {(0, 0): Fr(3)})
    b = BlockMap(g, g, {(0, 0): RatMat.identity(2).scale(3)})
    assert a == b
    assert BlockMap.identity(g) == BlockMap(g, g, {(0, 0): RatMat.identity(2)})


def test_transport_and_sparse_rows():
    src = Grading((0, 1), (1, 2))
    dst = Grading((0, 1), (2, 1))
    t = BlockMap.transport(src, dst, [(1, 0, 1)])
    rows = t.sparse_rows()
    assert rows[dst.offset(1)] == {src.offset(0): Fr(1)}
    assert t.is_transport()


def test_zero_dim_blocks_dropped():
    src = Grading((0, 1), (0, 2))
    dst = Grading((0,), (2,))
    m = BlockMap(src, dst, {(0, 0): RatMat.zeros(2, 0), (0, 1): Fr(2)})
    assert list(m.blocks) == [(0, 1)]

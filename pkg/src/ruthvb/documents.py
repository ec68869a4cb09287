"""JSON document formats and canonical serialization.

Frozen conventions (see FORMATS.md): rationals are "p/q" strings (or "p" when
integral), matrices are row-major nested arrays, simplices are referenced by
their index in the canonical nerve enumeration, and fiber blocks follow the
ascending-bitmask order of the 0-preserving mono index.  Dumps are canonical:
sorted keys, compact separators, one trailing newline; identical inputs give
byte-identical documents.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ValidationError
from .exactla import Fr, RatMat, Subspace
from .graded import Grading
from .groupoid import FinGroupoid
from .ruth import GradedBundle, Ruth
from .svb import Cleavage, SimpVB, explicit_cleavage


def rat_to_str(x: Fraction) -> str:
    x = Fr(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_from_str(s, where="") -> Fraction:
    try:
        if isinstance(s, int):
            return Fr(s)
        if "/" in s:
            p, q = s.split("/")
            return Fr(int(p), int(q))
        return Fr(int(s))
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"bad rational {s!r} at {where}: {e}") from None


def mat_to_json(m: RatMat):
    return [[rat_to_str(x) for x in row] for row in m.data]


def mat_from_json(rows, where="") -> RatMat:
    data = [[rat_from_str(x, where) for x in row] for row in rows]
    if not data:
        return RatMat(0, 0, [])
    return RatMat(len(data), len(data[0]), data)


def canonical_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# Groupoids.
# ---------------------------------------------------------------------------


def groupoid_to_doc(G: FinGroupoid) -> dict:
    return {
        "kind": "groupoid",
        "name": G.name,
        "objects": list(G.objects),
        "arrows": [
            {"id": i, "name": G.arrow_names[i], "src": G.objects[G.arrow_src[i]],
             "tgt": G.objects[G.arrow_tgt[i]]}
            for i in range(G.n_arrows)
        ],
        "units": {G.objects[x]: G.unit_of_obj[x] for x in range(G.n_objects)},
        "inverses": [[g, G.inv[g]] for g in range(G.n_arrows)],
        "compose": sorted([g2, g1, g] for (g2, g1), g in G.comp.items()),
    }


def groupoid_from_doc(doc: dict) -> FinGroupoid:
    try:
        objects = list(doc["objects"])
        oidx = {name: i for i, name in enumerate(objects)}
        arrows = doc["arrows"]
        n = len(arrows)
        src = [0] * n
        tgt = [0] * n
        names = [""] * n
        for a in arrows:
            i = a["id"]
            src[i] = oidx[a["src"]]
            tgt[i] = oidx[a["tgt"]]
            names[i] = a.get("name", f"a{i}")
        units = [doc["units"][name] for name in objects]
        inv = [0] * n
        for g, h in doc["inverses"]:
            inv[g] = h
        comp = {(g2, g1): g for g2, g1, g in doc["compose"]}
    except (KeyError, IndexError, TypeError) as e:
        raise ValidationError(f"malformed groupoid document: missing or bad field {e}") from None
    return FinGroupoid(objects, src, tgt, comp, units, inv,
                       name=doc.get("name", ""), arrow_names=names)


# ---------------------------------------------------------------------------
# Chain complexes.
# ---------------------------------------------------------------------------


def chain_to_doc(Y) -> dict:
    return {
        "kind": "chain_complex",
        "dims": list(Y.dims),
        "boundary": {str(n): mat_to_json(Y.d(n)) for n in range(1, len(Y.dims))},
    }


def chain_from_doc(doc: dict):
    from .doldkan import ChainComplex

    dims = doc["dims"]
    boundary = {
        int(n): mat_from_json(rows, f"boundary[{n}]") for n, rows in doc.get("boundary", {}).items()
    }
    return ChainComplex(dims, boundary)


# ---------------------------------------------------------------------------
# Operator towers.
# ---------------------------------------------------------------------------


def ruth_to_doc(R: Ruth) -> dict:
    G = R.G
    ops = []
    for (m, s), table in sorted(R.ops.items(), key=lambda kv: (kv[0][0], G.simplex_index(kv[0][1]))):
        for deg in sorted(table):
            ops.append({
                "m": m,
                "simplex": G.simplex_index(s),
                "degree": deg,
                "matrix": mat_to_json(table[deg]),
            })
    return {
        "kind": "ruth",
        "groupoid": groupoid_to_doc(G),
        "dims": {G.objects[x]: [R.E.dim(x, k) for k in R.E.degrees()] for x in range(G.n_objects)},
        "mcap": R.m_cap,
        "operators": ops,
    }


def ruth_from_doc(doc: dict) -> Ruth:
    G = groupoid_from_doc(doc["groupoid"])
    oidx = {name: i for i, name in enumerate(G.objects)}
    dims = {oidx[name]: tuple(v) for name, v in doc["dims"].items()}
    E = GradedBundle(G, dims)
    ops: dict = {}
    for entry in doc.get("operators", []):
        m = entry["m"]
        s = G.nerve_level(m)[entry["simplex"]]
        table = ops.setdefault((m, s), {})
        table[entry["degree"]] = mat_from_json(entry["matrix"], f"operator m={m}")
    return Ruth(E, ops, m_cap=doc.get("mcap"))


# ---------------------------------------------------------------------------
# Bundles and cleavages.
# ---------------------------------------------------------------------------


def _label_to_json(label):
    return label if isinstance(label, int) else None


def svb_to_doc(V: SimpVB) -> dict:
    G = V.base
    fibers = {}
    faces = {}
    degs = {}
    for n in range(V.L + 1):
        level = []
        for s in G.nerve_level(n):
            g = V.grading(n, s)
            level.append([[_label_to_json(l), d] for l, d in zip(g.labels, g.dims)])
        fibers[str(n)] = level
        if n >= 1:
            faces[str(n)] = [
                [mat_to_json(V.face(n, i, s).to_dense()) for i in range(n + 1)]
                for s in G.nerve_level(n)
            ]
        if n < V.L:
            degs[str(n)] = [
                [mat_to_json(V.deg(n, j, s).to_dense()) for j in range(n + 1)]
                for s in G.nerve_level(n)
            ]
    return {
        "kind": "svb",
        "groupoid": groupoid_to_doc(G),
        "L": V.L,
        "fibers": fibers,
        "faces": faces,
        "degeneracies": degs,
    }


def svb_from_doc(doc: dict) -> SimpVB:
    from .graded import BlockMap

    G = groupoid_from_doc(doc["groupoid"])
    L = doc["L"]
    gradings = {}
    for n_str, level in doc["fibers"].items():
        n = int(n_str)
        for idx, blocks in enumerate(level):
            labels = tuple(b[0] for b in blocks)
            dims = tuple(b[1] for b in blocks)
            gradings[(n, G.nerve_level(n)[idx])] = Grading(labels, dims)

    face_mats = {}
    for n_str, level in doc.get("faces", {}).items():
        n = int(n_str)
        for idx, mats in enumerate(level):
            s = G.nerve_level(n)[idx]
            for i, rows in enumerate(mats):
                face_mats[(n, i, s)] = mat_from_json(rows, f"face n={n} i={i}")
    deg_mats = {}
    for n_str, level in doc.get("degeneracies", {}).items():
        n = int(n_str)
        for idx, mats in enumerate(level):
            s = G.nerve_level(n)[idx]
            for j, rows in enumerate(mats):
                deg_mats[(n, j, s)] = mat_from_json(rows, f"degeneracy n={n} j={j}")

    def grading(n, s):
        return gradings[(n, s)]

    def face(n, i, s):
        return BlockMap.from_dense(grading(n, s), grading(n - 1, G.face(s, i)), face_mats[(n, i, s)])

    def deg(n, j, s):
        return BlockMap.from_dense(grading(n, s), grading(n + 1, G.degeneracy(s, j)), deg_mats[(n, j, s)])

    return SimpVB(G, L, grading, face, deg, kind=doc.get("kind_hint", "generic"))


def cleavage_to_doc(V: SimpVB, C: Cleavage) -> dict:
    G = V.base
    fibers = {}
    for n in range(1, V.L + 1):
        fibers[str(n)] = [
            mat_to_json(C.subspace(n, s).mat) for s in G.nerve_level(n)
        ]
    return {"kind": "cleavage", "L": V.L, "fibers": fibers}


def cleavage_from_doc(V: SimpVB, doc: dict) -> Cleavage:
    G = V.base
    table = {}
    for n_str, level in doc["fibers"].items():
        n = int(n_str)
        for idx, rows in enumerate(level):
            s = G.nerve_level(n)[idx]
            mat = mat_from_json(rows, f"cleavage n={n}")
            table[(n, s)] = Subspace.from_rows(V.fiber_dim(n, s), mat.data)
    return explicit_cleavage(V, table, name="loaded")


def load_document(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from None


def save_document(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_dumps(doc))

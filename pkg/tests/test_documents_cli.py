import json
import random
import subprocess
import sys
from fractions import Fraction as Fr

import pytest

from conftest import random_gauge, random_strict_ruth
from ruthvb import documents as docs
from ruthvb.cli import main
from ruthvb.doldkan import ChainComplex
from ruthvb.errors import ValidationError
from ruthvb.exactla import RatMat
from ruthvb.groupoid import pair_groupoid
from ruthvb.ruth import check_rh2, gauge_twist
from ruthvb.sdp import build_sdp


def test_rational_strings():
    assert docs.rat_to_str(Fr(3, 2)) == "3/2"
    assert docs.rat_to_str(Fr(-4)) == "-4"
    assert docs.rat_from_str("3/2") == Fr(3, 2)
    assert docs.rat_from_str("-4") == Fr(-4)
    with pytest.raises(ValidationError):
        docs.rat_from_str("1/0")


def test_groupoid_doc_roundtrip():
    G = pair_groupoid(3)
    doc = docs.groupoid_to_doc(G)
    H = docs.groupoid_from_doc(json.loads(docs.canonical_dumps(doc)))
    assert H.objects == G.objects
    assert H.comp == G.comp
    assert H.inv == G.inv


def test_ruth_doc_roundtrip():
    G = pair_groupoid(2)
    rng = random.Random(5)
    R0 = random_strict_ruth(G, rng, (1, 1))
    R = gauge_twist(R0, random_gauge(R0.E, rng))
    doc = docs.ruth_to_doc(R)
    R2 = docs.ruth_from_doc(json.loads(docs.canonical_dumps(doc)))
    assert R2.E.N == R.E.N
    for (m, s), table in R.ops.items():
        for deg, mat in table.items():
            s2 = R2.G.nerve_level(m)[G.simplex_index(s)]
            assert R2.block(m, s2, deg) == mat
    assert check_rh2(R2).ok


def test_svb_and_cleavage_doc_roundtrip():
    G = pair_groupoid(2)
    rng = random.Random(6)
    R = random_strict_ruth(G, rng, (1, 1))
    B = build_sdp(R, 3)
    doc = docs.svb_to_doc(B)
    V = docs.svb_from_doc(json.loads(docs.canonical_dumps(doc)))
    for n in range(1, 4):
        for idx, s in enumerate(G.nerve_level(n)):
            s2 = V.base.nerve_level(n)[idx]
            assert V.face(n, 0, s2).to_dense() == B.face(n, 0, s).to_dense()
    cdoc = docs.cleavage_to_doc(B, B.canonical_cleavage())
    C = docs.cleavage_from_doc(V, json.loads(docs.canonical_dumps(cdoc)))
    from ruthvb.svb import check_cleavage

    rep = check_cleavage(V, C, check_interior=False)
    assert rep.bijective and rep.normal and rep.weakly_flat


@pytest.fixture()
def doc_dir(tmp_path):
    G = pair_groupoid(2)
    rng = random.Random(8)
    R0 = random_strict_ruth(G, rng, (1, 1))
    R = gauge_twist(R0, random_gauge(R0.E, rng))
    docs.save_document(str(tmp_path / "groupoid.json"), docs.groupoid_to_doc(G))
    docs.save_document(str(tmp_path / "ruth.json"), docs.ruth_to_doc(R))
    return tmp_path, R


def test_cli_validate_groupoid(doc_dir, capsys):
    path, _ = doc_dir
    assert main(["validate", "groupoid", str(path / "groupoid.json")]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out


def test_cli_validate_ruth_and_exit_codes(doc_dir, tmp_path):
    path, R = doc_dir
    assert main(["--quiet", "validate", "ruth", str(path / "ruth.json")]) == 0
    # corrupt one operator entry: validation failure, exit code 1
    doc = docs.load_document(str(path / "ruth.json"))
    for entry in doc["operators"]:
        if entry["m"] == 2:
            entry["matrix"][0][0] = "7/2"
            break
    bad = tmp_path / "bad.json"
    docs.save_document(str(bad), doc)
    assert main(["--quiet", "validate", "ruth", str(bad)]) == 1
    # unreadable input: exit code 2
    assert main(["--quiet", "validate", "ruth", str(tmp_path / "missing.json")]) == 2
    # malformed JSON: exit code 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["--quiet", "validate", "ruth", str(broken)]) == 2


def test_cli_build_and_split_pipeline(doc_dir, tmp_path):
    path, R = doc_dir
    out = tmp_path / "out"
    out.mkdir()
    code = main([
        "--quiet", "--json", str(tmp_path / "rep.json"),
        "build-sdp", str(path / "ruth.json"), "--out", str(out),
    ])
    assert code == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert all(r["pass"] for r in rep["results"])
    code = main([
        "--quiet", "--json", str(tmp_path / "cert.json"),
        "split", str(out / "svb.json"), str(out / "cleavage.json"),
        "--out", str(tmp_path / "recovered.json"),
    ])
    assert code == 0
    recovered = docs.ruth_from_doc(docs.load_document(str(tmp_path / "recovered.json")))
    doc = docs.ruth_to_doc(recovered)
    original = docs.load_document(str(path / "ruth.json"))
    assert doc["operators"] == original["operators"]


def test_cli_build_rejects_invalid_tower(doc_dir, tmp_path):
    path, _ = doc_dir
    doc = docs.load_document(str(path / "ruth.json"))
    entry = next(e for e in doc["operators"] if e["m"] == 1)
    entry["matrix"][0][0] = "9/7"
    bad = tmp_path / "bad.json"
    docs.save_document(str(bad), doc)
    assert main(["--quiet", "build-sdp", str(bad)]) == 1


def test_cli_split_rejects_bad_cleavage(doc_dir, tmp_path):
    path, _ = doc_dir
    out = tmp_path / "out"
    out.mkdir()
    assert main(["--quiet", "build-sdp", str(path / "ruth.json"), "--out", str(out)]) == 0
    cdoc = docs.load_document(str(out / "cleavage.json"))
    width = len(cdoc["fibers"]["2"][0][0])
    cdoc["fibers"]["2"][0] = [["0"] * (width - 1) + ["1"]]
    bad = tmp_path / "bad_cleavage.json"
    docs.save_document(str(bad), cdoc)
    assert main(["--quiet", "split", str(out / "svb.json"), str(bad)]) == 1


def test_cli_determinism(doc_dir, tmp_path):
    path, _ = doc_dir
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--quiet", "--json", str(a), "validate", "ruth", str(path / "ruth.json")]) == 0
    assert main(["--quiet", "--json", str(b), "validate", "ruth", str(path / "ruth.json")]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_examples_subcommand(capsys):
    assert main(["--quiet", "examples", "translation"]) == 0
    with_json = main(["examples", "not-full"])
    assert with_json == 0


def test_cli_cohomology(doc_dir, tmp_path):
    path, R = doc_dir
    out = tmp_path / "out"
    out.mkdir()
    main(["--quiet", "build-sdp", str(path / "ruth.json"), "--out", str(out)])
    code = main([
        "--quiet", "--json", str(tmp_path / "coh.json"),
        "cohomology", str(out / "svb.json"), "--max-degree", "1",
    ])
    assert code == 0
    rep = json.loads((tmp_path / "coh.json").read_text())
    assert "betti" in rep


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ruthvb.cli", "examples", "dk-sign", "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0


def test_fixture_dir_env(doc_dir, tmp_path, monkeypatch):
    path, _ = doc_dir
    monkeypatch.setenv("RUTHVB_FIXTURE_DIR", str(path))
    assert main(["--quiet", "validate", "groupoid", "groupoid.json"]) == 0

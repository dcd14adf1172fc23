import json
import subprocess
import sys

import pytest

from pdsforge.cli import main, parse_group


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    text = out.read_text(encoding="utf-8")
    return code, json.loads(text), text


def strip_time(text):
    return "\n".join(l for l in text.splitlines() if '"wall_time_s"' not in l)


def test_construct_affine_g1(tmp_path):
    code, doc, _ = run(["construct", "--family", "affine-g1", "--q", "3", "--m", "2", "--eps", "+1"], tmp_path)
    assert code == 0 and doc["ok"]
    assert list(doc)[:2] == ["schema_version", "command"] and doc["schema_version"] == "1"
    assert list(doc)[-1] == "wall_time_s"
    assert [c["params"] for c in doc["result"]["classes"]] == [[81, 32, 13, 12], [81, 24, 9, 6], [81, 24, 9, 6]]
    assert all("ids" in c for c in doc["result"]["classes"])
    assert doc["checks"]["structure"]["center_order"] == 3


def test_construct_examples(tmp_path):
    code, doc, _ = run(["construct", "--family", "semidirect-paley", "--p", "3", "--t", "2", "--twisted"], tmp_path)
    assert code == 0 and doc["result"]["params"] == [81, 40, 19, 20]
    code, doc, _ = run(["construct", "--family", "paley-field", "--q", "83"], tmp_path)
    assert code == 0 and doc["result"]["params"] == [83, 41, 20] and doc["checks"]["skew_hadamard"]


def test_output_is_byte_stable_and_hash_only(tmp_path):
    argv = ["construct", "--family", "semidirect-scheme", "--p", "3", "--t", "2", "--twisted"]
    _, _, a = run(argv, tmp_path, "a.json")
    _, _, b = run(argv + ["--threads", "3"], tmp_path, "b.json")
    assert strip_time(a) == strip_time(b)
    _, doc, _ = run(argv + ["--hash-only"], tmp_path, "c.json")
    assert all("ids" not in c for c in doc["result"]["classes"])


def test_verify_round_trip_and_corruption(tmp_path):
    _, doc, _ = run(["construct", "--family", "semidirect-paley", "--p", "3", "--t", "2", "--twisted"], tmp_path)
    ids = doc["result"]["ids"]
    (tmp_path / "set.json").write_text(json.dumps(ids))
    code, v, _ = run(["verify", "semidirect:3:2", str(tmp_path / "set.json")], tmp_path, "v.json")
    assert code == 0 and v["result"]["set_hash"] == doc["result"]["set_hash"]
    assert v["result"]["census_checksum"] == doc["result"]["census_checksum"]
    # drop one element
    (tmp_path / "bad.json").write_text(json.dumps(ids[:-1]))
    code, v, _ = run(["verify", "semidirect:3:2", str(tmp_path / "bad.json")], tmp_path, "w.json")
    assert code == 1 and v["result"]["kind"] in ("NotPDS", "NotRegular")


def test_verify_skew_hadamard(tmp_path):
    (tmp_path / "sq7.json").write_text("[1, 2, 4]")
    code, v, _ = run(["verify", "cyclic:7", str(tmp_path / "sq7.json"), "--kind", "skew-hadamard"], tmp_path)
    assert code == 0 and v["checks"]["skew_hadamard"] is True


def test_usage_errors_are_json(tmp_path):
    code, doc, _ = run(["construct", "--family", "nope"], tmp_path)
    assert code == 2 and doc["error"]["type"] == "UsageError"
    (tmp_path / "oob.json").write_text("[1, 99]")
    code, doc, _ = run(["verify", "cyclic:7", str(tmp_path / "oob.json")], tmp_path, "e.json")
    assert code == 2 and "out of range" in doc["error"]["message"]
    (tmp_path / "junk.json").write_text("{not json")
    code, doc, _ = run(["verify", "cyclic:7", str(tmp_path / "junk.json")], tmp_path, "f.json")
    assert code == 2
    code, doc, _ = run(["construct", "--family", "affine-g2", "--q", "3", "--m", "2", "--eps", "-1"], tmp_path, "g.json")
    assert code == 2 and doc["error"]["type"] == "BadParameters"


def test_scheme_commands(tmp_path):
    base = ["--family", "semidirect-scheme", "--p", "3", "--t", "2", "--twisted"]
    code, doc, _ = run(["scheme", "amorphic", *base, "--mode", "all"], tmp_path)
    assert code == 0 and (doc["result"]["checked"], doc["result"]["passed"]) == (62, 62)
    code, a, at = run(["scheme", "amorphic", *base, "--mode", "sample:7:11"], tmp_path, "s1.json")
    code, b, bt = run(["scheme", "amorphic", *base, "--mode", "sample:7:11"], tmp_path, "s2.json")
    assert strip_time(at) == strip_time(bt) and a["result"]["checked"] == 7
    code, doc, _ = run(["scheme", "constants", *base], tmp_path, "k.json")
    assert code == 0 and doc["result"]["symmetric"]
    assert len(doc["result"]["constants"]) == 7


def test_product_commands(tmp_path):
    code, doc, _ = run(["product", "stanton-sprott", "--left", "semidirect-paley:3:2:twisted",
                        "--right", "paley-field:83", "--hash-only"], tmp_path, "p1.json")
    assert code == 0 and doc["result"]["certificate"]["params"] == [6723, 3361, 1680]
    assert len(doc["factors"]) == 2 and all("set_hash" in f for f in doc["factors"])
    code, doc, _ = run(["product", "paley", "--left", "semidirect-paley:3:2:twisted",
                        "--right", "affine-paley-q4:3", "--hash-only"], tmp_path, "p2.json")
    assert code == 0 and doc["result"]["certificate"]["params"] == [6561, 3280, 1639, 1640]
    code, doc, _ = run(["product", "combine3", "--mode", "LC", "--left", "affine-g1:3:2:+1",
                        "--right", "affine-g1:3:2:-1", "--hash-only"], tmp_path, "p3.json")
    assert code == 0 and doc["checks"]["family_ok"]
    assert [c["size"] for c in doc["result"]["classes"]] == [2132, 2214, 2214]
    code, doc, _ = run(["product", "recipe", "--left", "semidirect-scheme:3:2:untwisted",
                        "--right", "affine-paley-q4:3", "--target", "semidirect-scheme:3:2:twisted",
                        "--hash-only"], tmp_path, "p4.json")
    assert code == 0 and doc["checks"] == {"round_trip": True, "same_parameters": True}


def test_parse_group_specs():
    G = parse_group("product:(semidirect:3:2)x(product:(abelian:3)x(affine-g1:3:2:+1))")
    assert G.order == 81 * 3 * 81
    assert parse_group(G.spec).spec == G.spec
    assert parse_group("affine-g1:9:2:-1:mod=1,0,1").order == 9 ** 4


def test_console_script_exit_codes(tmp_path):
    r = subprocess.run([sys.executable, "-m", "pdsforge.cli", "construct", "--family", "latin3", "--hash-only"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["ok"]
    r = subprocess.run([sys.executable, "-m", "pdsforge.cli", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2 and "error" in json.loads(r.stdout)

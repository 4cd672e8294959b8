#!/usr/bin/env python3
"""Smoke test for the `seifert_skein` Python extension.

Loads the cdylib built by `cargo build -p seifert-skein-py` (building it
if necessary), then exercises the main types and operations end to end.
Run from anywhere:

    python3 python/smoke_test.py
"""

import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / "libseifert_skein.so"
        for profile in ("release", "debug")
    ]
    existing = [c for c in candidates if c.exists()]
    if not existing:
        subprocess.run(
            ["cargo", "build", "-p", "seifert-skein-py"], cwd=ROOT, check=True
        )
        existing = [c for c in candidates if c.exists()]
    src = max(existing, key=lambda c: c.stat().st_mtime)
    tmp = Path(tempfile.mkdtemp(prefix="seifert-skein-"))
    shutil.copy2(src, tmp / "seifert_skein.so")
    sys.path.insert(0, str(tmp))
    import seifert_skein

    return seifert_skein


def main():
    sk = load_module()
    checks = 0

    def ok(label):
        nonlocal checks
        checks += 1
        print(f"ok {checks:2d} - {label}")

    # --- slope parsing and the data type ---------------------------------
    assert sk.parse_slopes("1/2,-1/3,-1/5") == [(2, 1), (3, -1), (5, -1)]
    m = sk.SeifertData.parse("1/2,-1/3,-1/5")
    assert m.slopes == [(2, 1), (3, -1), (5, -1)]
    assert m.euler_number() == "-1/30"
    assert not m.is_normalized()
    n = m.normalize()
    assert n.is_normalized()
    assert n.slopes == [(2, 3), (3, -2), (5, -4)]
    ok("Seifert data, euler number, normalization")

    # --- invariant report -------------------------------------------------
    r = m.invariants(basis=True, independence=True)
    assert r["characters"]["x_irr"] == 2
    assert r["characters"]["skein_dim"] == 3
    assert r["characters"]["skein_dim_exact"] is True
    assert r["characters"]["reduced"] is True
    assert r["homology"]["h1_order"] == 1
    assert r["homology"]["x_M"] == 0
    assert len(r["characters"]["basis"]) == 3
    assert r["characters"]["min_singular_value"] > 1e-6
    assert r["classification"]["verdict"] == "finite"
    ok("invariant report for the 1/2,-1/3,-1/5 sphere")

    r2 = sk.SeifertData([(3, 1), (3, 1), (3, 1)]).invariants()
    assert r2["characters"]["reduced"] is False
    assert r2["homology"]["x_M"] == 1
    ok("non-reduced instance detected")

    # --- character table ---------------------------------------------------
    table = m.character_table()
    kinds = [rec["kind"] for rec in table["records"]]
    assert kinds.count("irreducible") == 2
    assert kinds.count("central") == 1
    assert m.skein_dimension() == (3, True)
    ok("character table and skein dimension")

    # --- rewriting system ---------------------------------------------------
    red = m.reduce([6, -5, 1, 2, 0, 3], trace=True)
    assert red["steps"] > 0
    assert red["terminal_terms"] == len(red["terminal"])
    gens = {tuple(v) for v in m.generating_set()}
    assert m.generating_set_count() == len(gens)
    for index, _coeff in red["terminal"]:
        assert tuple(index) in gens, f"non-terminal index {index}"
    assert len(red["trace"]) == red["steps"]
    already = m.reduce([0, -4, 0, 0, 0, 0])
    assert already["steps"] == 0 and already["terminal_terms"] == 1
    ok("reduction lands in the terminal generating set")

    # --- twisted cohomology --------------------------------------------------
    coh = m.cohomology("irreducible:0")
    assert coh["dim_h1"] == 0
    assert coh["relation_residual"] < 1e-9
    exc = sk.SeifertData([(3, 1), (3, 1), (3, 1)]).cohomology("exceptional:0")
    assert (exc["dim_z1"], exc["dim_b1"], exc["dim_h1"]) == (4, 2, 2)
    ok("cohomology dimensions at irreducible and exceptional points")

    # --- error contract -------------------------------------------------------
    try:
        sk.SeifertData.parse("1/2,-1/3,-1/6").invariants()
        raise AssertionError("zero Euler number must be rejected")
    except ValueError as e:
        assert "Euler" in str(e)
    try:
        sk.SeifertData([(4, 2), (3, 1), (5, 1)])
        raise AssertionError("non-coprime slope must be rejected")
    except ValueError:
        pass
    ok("mathematical preconditions raise ValueError")

    # --- known values -----------------------------------------------------------
    assert sk.known_manifolds() == ["S2xS1", "RP3", "RP3#RP3"]
    assert sk.known("RP3")["dimension"] == 2
    assert sk.known("RP3#RP3")["dimension"] == 4
    assert "Hoste" in sk.known("S2xS1")["citation"]
    rp3 = sk.SeifertData.parse("2/1,0/1,0/1").invariants()
    assert rp3["known_value"]["dimension"] == rp3["characters"]["skein_dim"] == 2
    ok("known-values table and detection")

    # --- census ------------------------------------------------------------------
    with tempfile.NamedTemporaryFile(suffix=".jsonl", mode="r") as f:
        summary = sk.census(2, "full", f.name)
        assert summary["discrepancies"] == []
        assert summary["instances"] > 0
        lines = Path(f.name).read_text().splitlines()
        assert len(lines) == summary["instances"]
        parsed = json.loads(lines[0])
        assert "homology" in parsed and "characters" in parsed
    ok("census runs clean and streams valid JSON lines")

    # --- unitary representations ---------------------------------------------------
    rep = sk.su2_rp2_rep([(3, 1), (5, 2)], [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    assert rep["residual"] < 1e-9
    center, radius = rep["trace_interval"]
    assert abs(rep["trace_c1c2"] - center) <= radius + 1e-9
    four = sk.su2_s2_rep(
        [(2, 1), (2, 1), (2, 1), (2, -1)], [5.0 * math.pi / 12.0]
    )
    assert four["residual"] < 1e-9
    assert len(four["fibers"]) == 4
    ok("SU(2) constructions verify their relations")

    print(f"\nsmoke test passed: {checks} sections")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Smoke test for the mabs_py extension module.

Builds the extension with cargo, loads it, and drives the analyzer and the
interpreter over the bundled example programs:

    python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_extension() -> pathlib.Path:
    subprocess.run(
        ["cargo", "build", "-p", "mabs-py"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "debug" / "libmabs_py.so"
    if not built.exists():  # e.g. macOS
        built = ROOT / "target" / "debug" / "libmabs_py.dylib"
    out = ROOT / "target" / "debug" / "mabs_py.so"
    shutil.copyfile(built, out)
    return out.parent


def main() -> int:
    sys.path.insert(0, str(build_extension()))
    import mabs_py

    math_src = (ROOT / "programs" / "math.mabs").read_text()
    math_nc_src = (ROOT / "programs" / "math_nc.mabs").read_text()
    cpx_src = (ROOT / "programs" / "cpxsched.mabs").read_text()

    # Frontend.
    checked = json.loads(mabs_py.check(math_src))
    assert checked["ok"] and checked["classes"] == ["Math"], checked
    try:
        mabs_py.check("class C { Int m() { return 1 } } { skip; }")
        raise AssertionError("parse error expected")
    except ValueError as e:
        assert "parse-error" in str(e), e

    # Contracts.
    cct = json.loads(mabs_py.contracts(math_src))
    assert len(cct["pretty"]) == 3, cct["pretty"]
    assert any("fact_ag" in line for line in cct["pretty"])

    # Analysis: the precision split on fact_nc.
    report = json.loads(mabs_py.analyze(math_nc_src, backend="both", saturation=2))
    verdicts = {b["backend"]: b["verdict"] for b in report["backends"]}
    assert verdicts == {
        "fixpoint": "potential-deadlock",
        "modelcheck": "deadlock-free",
    }, verdicts
    assert [b["saturated"] for b in report["backends"]] == [True, False]

    report = json.loads(mabs_py.analyze(cpx_src))
    assert all(b["verdict"] == "potential-deadlock" for b in report["backends"])

    # Interpreter.
    prog = mabs_py.Program(cpx_src)
    verdicts = set()
    for seed in range(10):
        trace = json.loads(prog.run(seed=seed, max_steps=2000))
        verdicts.add(trace["verdict"])
    assert "deadlocked" in verdicts, verdicts

    summary = json.loads(prog.explore(depth=40))
    assert summary["reachable"] and summary["termination_reachable"], summary

    free = mabs_py.Program(math_src)
    summary = json.loads(free.explore(depth=60))
    assert not summary["reachable"], summary

    print("mabs_py smoke test: PASS")
    return 0


if __name__ == "__main__":
    sys.exit(main())

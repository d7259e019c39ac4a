#!/usr/bin/env python3
# Copyright 2026 The epg Authors
# SPDX-License-Identifier: Apache-2.0
"""End-to-end checks of the epg command line: exit codes, report schema, exports."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

epg, fixtures, schema_path = sys.argv[1], pathlib.Path(sys.argv[2]), sys.argv[3]
schema = json.loads(pathlib.Path(schema_path).read_text())
failures = []


def run(*args):
    return subprocess.run([epg, *map(str, args)], capture_output=True, text=True)


def expect(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


r = run("analyze", fixtures / "foo_bar_attack.json")
report = json.loads(r.stdout)
reentrancy = [f for f in report["findings"] if f["rule"] == "Reentrancy"]
expect(r.returncode == 2, "attack exits 2")
expect(len(reentrancy) == 1, "attack has one Reentrancy finding")

r = run("analyze", fixtures / "empty_transfer.json")
expect(r.returncode == 0 and json.loads(r.stdout)["findings"] == [], "plain transfer exits 0 with no findings")

with tempfile.TemporaryDirectory() as tmp:
    bad = pathlib.Path(tmp) / "malformed.json"
    bad.write_text("{\"tx\": ")
    r = run("analyze", bad)
    expect(r.returncode == 1 and "MalformedTrace" in r.stderr, "malformed trace exits 1 naming MalformedTrace")

    out = pathlib.Path(tmp) / "report.json"
    r = run("analyze", fixtures / "foo_bar_attack.json", "--out", out)
    expect(r.returncode == 2 and json.loads(out.read_text())["findings"], "--out writes the report")

r = run("analyze", fixtures / "foo_bar_attack.json", "--config", fixtures / "nope.toml")
expect(r.returncode == 1, "missing config exits 1")

for trace in sorted(fixtures.glob("*.json")):
    r = run("analyze", trace, "--config", fixtures / "strict.toml")
    try:
        jsonschema.validate(json.loads(r.stdout), schema)
        valid = r.returncode in (0, 2)
    except (jsonschema.ValidationError, json.JSONDecodeError) as e:
        print(e)
        valid = False
    expect(valid, f"report for {trace.name} matches the schema")

r = run("analyze", fixtures)
batch = json.loads(r.stdout)
expect(r.returncode == 2 and len(batch) == len(list(fixtures.glob("*.json"))), "directory mode reports every trace")

dots = [run("export", fixtures / "foo_bar_attack.json", "--graph", "ctg", "--format", "dot").stdout for _ in range(2)]
expect(dots[0] == dots[1] and dots[0].count("addr=") == 3, "CTG DOT export is stable with 3 nodes")
r = run("export", fixtures / "empty_transfer.json", "--graph", "ctg", "--format", "graphson")
expect(r.returncode == 0 and len(json.loads(r.stdout)["@value"]["vertices"]) == 2, "plain transfer CTG has 2 vertices")

r = run("traverse", fixtures / "foo_bar_attack.json", "--expr", "repeat(out(T))", "--from", "0")
expect(r.returncode == 0 and len(json.loads(r.stdout)) >= 3, "traverse evaluates an expression")
r = run("traverse", fixtures / "foo_bar_attack.json", "--expr", "out(BOGUS)", "--from", "0")
expect(r.returncode == 1, "unknown label exits 1")

print(f"{len(failures)} failing")
sys.exit(1 if failures else 0)

#!/usr/bin/env python3
"""Re-run every fixture case through hl-lab and store its stdout, stderr and exit code."""
import json
import pathlib
import subprocess
import sys

here = pathlib.Path(__file__).resolve().parent
binary = sys.argv[1] if len(sys.argv) > 1 else str(here.parents[1] / "build" / "tools" / "hl-lab")
expected = here / "expected"
expected.mkdir(exist_ok=True)

for case in json.loads((here / "cases.json").read_text())["cases"]:
    stdin = (here / "inputs" / case["stdin"]).read_bytes() if case["stdin"] else b""
    run = subprocess.run([binary, *case["args"]], input=stdin, capture_output=True, env={})
    (expected / f"{case['name']}.out").write_bytes(run.stdout)
    (expected / f"{case['name']}.err").write_bytes(run.stderr)
    (expected / f"{case['name']}.code").write_text(f"{run.returncode}\n")
    print(f"{case['name']}: exit {run.returncode}")

#!/usr/bin/env python3
"""Golden-file tests for the hjkit CLI.

Runs every command on every fixture (text and JSON), the negative controls
and the malformed inputs; compares stdout and exit codes with the files in
this directory and validates every JSON report against the schema.
Pass --update to rewrite the goldens.
"""
import argparse
import json
import math
import pathlib
import subprocess
import tempfile
import sys

import jsonschema

HERE = pathlib.Path(__file__).resolve().parent

# Per-fixture arguments that make each command meaningful.
FIXTURE_ARGS = {
    "burgers": {
        "connection": ["--connection", "nabla"],
        "hj-eq": ["--order", "0", "--compose-flatness"],
        "integrate": ["--connection", "nabla", "--at", "t=0,x=0", "--init", "u=-1",
                      "--grid", "t=0:0.5:0.01,x=0:0.5:0.01", "--solution", "leaf"],
        "residual": ["--solution", "leaf", "--domain", "t=0:0.5,x=0:0.5"],
    },
    "heat": {
        "connection": ["--connection", "kernel"],
        "hj-eq": ["--order", "0", "--compose-flatness"],
        "integrate": ["--connection", "kernel", "--at", "t=1,x=0", "--init", "u=1",
                      "--grid", "t=1:2:0.01,x=0:1:0.01", "--solution", "kernel"],
        "residual": ["--solution", "kernel", "--domain", "t=0.5:2,x=-2:2"],
    },
    "kdv": {
        "connection": ["--connection", "nabla"],
        "hj-eq": ["--order", "1"],
        "integrate": ["--connection", "nabla", "--at", "x=1,t=0", "--init", "u=2,u_x=-4,u_t=0",
                      "--grid", "x=1:1.5:0.005,t=0:0.5:0.01", "--solution", "rational"],
        "residual": ["--solution", "rational", "--domain", "x=0.5:2,t=0:1"],
    },
    "boussinesq": {
        "connection": ["--connection", "wave"],
        "hj-eq": ["--order", "0"],
        "integrate": ["--connection", "wave", "--at", "t=0,x=2",
                      "--init", "u=-3/2*(1-c^2)*sech(1/2*sqrt(1-c^2)*2)^2,v=3*c*sqrt(1-c^2)*tanh(1/2*sqrt(1-c^2)*2)",
                      "--grid", "t=0:0.5:0.01,x=2:3:0.01", "--solution", "sech2"],
        "residual": ["--solution", "sech2", "--domain", "t=0:2,x=-5:5"],
    },
    "oscillator": {
        "connection": ["--connection", "nabla"],
        "hj-eq": ["--order", "0"],
        "integrate": ["--connection", "nabla", "--at", "t=0", "--init", "x=1", "--grid", "t=0:1:0.01",
                      "--solution", "leaf"],
        "residual": ["--solution", "leaf", "--domain", "t=0:1"],
    },
}

USES_CONNECTION = {"flatness", "check-flat", "check-hj", "check-subdiffiety", "check-hj-problem"}
COMMANDS = ["prolong", "flatness", "check-flat", "hj-eq", "check-hj", "check-subdiffiety", "el", "legendre",
            "constraints", "hamiltonian", "elh", "check-hj-problem", "integrate", "residual", "symmetry-check"]

# (name, expected exit, arguments); file names are relative to the fixture directory.
EXTRA = [
    ("burgers.mutant.check-hj", 1, ["check-hj", "burgers.hjk", "--connection", "mutant"]),
    ("burgers.printed.check-hj", 1, ["check-hj", "burgers.hjk", "--connection", "printed"]),
    ("burgers.ansatz-generic.hj-eq", 0, ["hj-eq", "burgers.hjk", "--order", "0", "--connection", "nabla"]),
    ("burgers.lift.residual", 0, ["residual", "burgers.hjk", "--connection", "nabla", "--at", "t=0,x=0",
                                   "--init", "u=-1", "--grid", "t=0:0.5:0.01,x=0:0.5:0.01",
                                   "--derivatives", "lift"]),
    ("burgers.difference.residual", 0, ["residual", "burgers.hjk", "--connection", "nabla", "--at", "t=0,x=0",
                                         "--init", "u=-1", "--grid", "t=0:0.5:0.01,x=0:0.5:0.01",
                                         "--derivatives", "difference", "--max-residual", "1e-2"]),
    ("burgers.latex.hj-eq", 0, ["hj-eq", "burgers.hjk", "--order", "0", "--compose-flatness", "--latex"]),
    ("burgers.params.check-hj", 0, ["check-hj", "burgers.hjk", "--connection", "nabla", "--params", "x0=1"]),
    ("heat.mutant.check-hj", 1, ["check-hj", "heat.hjk", "--connection", "mutant"]),
    ("heat.constant.check-hj", 0, ["check-hj", "heat.hjk", "--connection", "constant"]),
    ("heat.printed.residual", 1, ["residual", "heat.hjk", "--solution", "printed", "--at", "t=1,x=1"]),
    ("heat.generated.hj-eq", 0, ["hj-eq", "heat.hjk", "--order", "0"]),
    ("heat.latex.hj-eq", 0, ["hj-eq", "heat.hjk", "--order", "0", "--compose-flatness", "--latex"]),
    ("kdv.mutant.check-hj", 1, ["check-hj", "kdv.hjk", "--connection", "mutant"]),
    ("kdv.flipped.check-flat", 1, ["check-flat", "kdv.hjk", "--connection", "flipped"]),
    ("kdv.slow-boost.symmetry-check", 1, ["symmetry-check", "kdv.hjk", "--lie-field", "slow_boost"]),
    ("kdv.latex.hj-eq", 0, ["hj-eq", "kdv.hjk", "--order", "1", "--latex"]),
    ("kdv.exact-only.check-hj", 0, ["check-hj", "kdv.hjk", "--connection", "nabla", "--exact-only"]),
    ("boussinesq.printed.check-hj-problem", 1, ["check-hj-problem", "boussinesq.hjk", "--connection", "printed"]),
    ("boussinesq.mutant.check-hj-problem", 1, ["check-hj-problem", "boussinesq.hjk", "--connection", "mutant"]),
    ("boussinesq.mutant-momenta.check-hj-problem", 1, ["check-hj-problem", "boussinesq.hjk", "--connection", "wave",
                                                        "--momenta", "mutant"]),
    ("boussinesq.printed.residual", 1, ["residual", "boussinesq.hjk", "--solution", "printed",
                                        "--domain", "t=0:2,x=-5:5"]),
    ("boussinesq.el-system.check-subdiffiety", 0, ["check-subdiffiety", "boussinesq.hjk", "--connection", "wave",
                                                   "--lagrangian", "boussinesq"]),
    ("oscillator.mutant.check-hj", 1, ["check-hj", "oscillator.hjk", "--connection", "mutant"]),
    ("oscillator.legendre.check-hj-problem", 0, ["check-hj-problem", "oscillator.hjk", "--connection", "nabla",
                                                 "--momenta", "legendre"]),
    ("oscillator.mutant-momenta.check-hj-problem", 1, ["check-hj-problem", "oscillator.hjk", "--connection", "nabla",
                                                       "--momenta", "mutant"]),
    ("oscillator.csv.integrate", 0, ["integrate", "oscillator.hjk", "--connection", "nabla", "--at", "t=0",
                                     "--init", "x=1", "--grid", "t=0:1:0.25", "--solution", "leaf", "--max-error", "1e-4",
                                     "--csv", "%csv"]),
    ("burgers.csv.integrate", 0, ["integrate", "burgers.hjk", "--connection", "nabla", "--at", "t=0,x=0",
                                  "--init", "u=-1", "--grid", "t=0:0.2:0.1,x=0:0.2:0.1", "--csv", "%csv"]),
    ("bad.duplicate", 2, ["check-hj", "@bad/duplicate.hjk"]),
    ("bad.order-mismatch", 2, ["check-flat", "@bad/order_mismatch.hjk"]),
    ("bad.syntax", 2, ["prolong", "@bad/syntax.hjk"]),
    ("bad.unresolved", 2, ["prolong", "@bad/unresolved.hjk"]),
    ("bad.missing-file", 2, ["prolong", "no_such_file.hjk"]),
    ("bad.unknown-block", 2, ["check-hj", "burgers.hjk", "--connection", "nope"]),
    ("bad.params", 2, ["check-hj", "burgers.hjk", "--params", "zz=1"]),
    ("bad.integrate-args", 2, ["integrate", "burgers.hjk", "--connection", "nabla"]),
]


def matrix_cases(fixture):
    args = FIXTURE_ARGS[fixture]
    for cmd in COMMANDS:
        extra = []
        if cmd in USES_CONNECTION:
            extra = args["connection"]
        elif cmd in args:
            extra = args[cmd]
        yield (f"{fixture}.{cmd}", None, [cmd, f"{fixture}.hjk"] + extra)


def all_cases(only):
    cases = []
    for fixture in FIXTURE_ARGS:
        if only in (None, fixture):
            cases.extend(matrix_cases(fixture))
    for case in EXTRA:
        group = case[0].split(".")[0]
        if only in (None, group) or (only == "bad" and group == "bad"):
            cases.append(case)
    return cases


def resolve(args, csv_path):
    out = []
    for a in args:
        if a == "%csv":
            out.append(str(csv_path))
        elif a.startswith("@"):
            out.append(str(HERE / a[1:]))
        else:
            out.append(a)
    return out


def csv_close(want, got):
    wl, gl = want.strip().splitlines(), got.strip().splitlines()
    if len(wl) != len(gl) or wl[:1] != gl[:1]:
        return False
    for w, g in zip(wl[1:], gl[1:]):
        wf, gf = w.split(","), g.split(",")
        if len(wf) != len(gf) or not all(close(float(a), float(b)) for a, b in zip(wf, gf)):
            return False
    return True


def close(a, b):
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(close(a[k], b[k]) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(close(x, y) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=1e-6, abs_tol=1e-12)
    return a == b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--hjkit", required=True)
    ap.add_argument("--fixtures", required=True)
    ap.add_argument("--only")
    ap.add_argument("--update", action="store_true")
    opts = ap.parse_args()
    opts.hjkit = str(pathlib.Path(opts.hjkit).resolve())
    schema = json.loads((HERE.parent.parent / "schema" / "report.schema.json").read_text())
    failures = []
    cases = all_cases(opts.only)
    tmp = tempfile.TemporaryDirectory()
    csv_path = pathlib.Path(tmp.name) / "section.csv"
    for name, expected_exit, args in cases:
        for fmt in ("text", "json"):
            csv_path.unlink(missing_ok=True)
            proc = subprocess.run([opts.hjkit, *resolve(args, csv_path), "--format", fmt], cwd=opts.fixtures,
                                  capture_output=True, text=True, timeout=120)
            if "%csv" in args and fmt == "text":
                csv_golden = HERE / "expected" / f"{name}.csv"
                got = csv_path.read_text() if csv_path.exists() else ""
                if opts.update:
                    csv_golden.write_text(got)
                elif not csv_golden.exists() or not csv_close(csv_golden.read_text(), got):
                    failures.append(f"{name} [csv]: section differs from golden")
            golden = HERE / "expected" / f"{name}.{'txt' if fmt == 'text' else 'json'}"
            record = f"# exit {proc.returncode}\n{proc.stdout}"
            if fmt == "json":
                try:
                    jsonschema.validate(json.loads(proc.stdout), schema)
                except (json.JSONDecodeError, jsonschema.ValidationError) as e:
                    failures.append(f"{name} [json]: schema: {str(e).splitlines()[0]}")
            if expected_exit is not None and proc.returncode != expected_exit:
                failures.append(f"{name} [{fmt}]: exit {proc.returncode}, expected {expected_exit}")
            if opts.update:
                golden.parent.mkdir(exist_ok=True)
                golden.write_text(record)
                continue
            if not golden.exists():
                failures.append(f"{name} [{fmt}]: missing golden {golden.name}")
                continue
            want = golden.read_text()
            want_exit, _, want_out = want.partition("\n")
            if want_exit != f"# exit {proc.returncode}":
                failures.append(f"{name} [{fmt}]: {want_exit[2:]} expected, got exit {proc.returncode}")
            elif fmt == "json":
                if not close(json.loads(want_out), json.loads(proc.stdout)):
                    failures.append(f"{name} [json]: report differs from golden")
            elif want_out != proc.stdout:
                failures.append(f"{name} [text]: output differs from golden")
    for f in failures:
        print("FAIL", f)
    print(f"{len(cases)} cases, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

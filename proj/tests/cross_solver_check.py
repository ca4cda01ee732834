#!/usr/bin/env python3
"""Exports LPs with the CLI and re-solves them with SciPy's HiGHS.

Usage: cross_solver_check.py <mlpoly binary> <check_lp.py>
"""

import csv
import io
import os
import subprocess
import sys
import tempfile


def run(cmd):
    return subprocess.run(cmd, check=True, capture_output=True, text=True).stdout


def main():
    cli, checker = sys.argv[1], sys.argv[2]
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        def compare(label, args, expected, extra):
            nonlocal failures
            path = os.path.join(tmp, "instance.lp")
            run([cli, "export-lp", *args, "--output", path])
            got = float(run([sys.executable, checker, path, *extra]).strip())
            ok = abs(got - expected) <= 1e-6
            failures += not ok
            print(f"{'ok  ' if ok else 'FAIL'} {label}: embedded {expected!r}, HiGHS {got!r}")

        code = ["--n", "9", "--beta", "3", "--gamma", "2", "--code-seed", "2", "--p", "0.3"]
        rows = list(csv.DictReader(io.StringIO(run(
            [cli, "decode", *code, "--trials", "1", "--seed-base", "3",
             "--methods", "Parity,Standard,Clique,MultiClique,IP"]))))
        for row in rows:
            extra = ["--integer"] if row["method"] == "IP" else []
            compare(f"(9,3,2) {row['method']}", ["--application", "decode", *code,
                    "--method", row["method"], "--seed", row["seed"]],
                    float(row["lp_value"]), extra)

        image = ["--image-kind", "CEN", "--width", "6", "--height", "6", "--p", "0.2"]
        rows = list(csv.DictReader(io.StringIO(run(
            [cli, "restore", *image, "--trials", "1", "--seed-base", "5",
             "--methods", "Standard,Flower,Clique,IP"]))))
        for row in rows:
            extra = ["--with-constant"] + (["--integer"] if row["kind"] == "IP" else [])
            compare(f"6x6 CEN {row['kind']}", ["--application", "restore", *image,
                    "--method", row["kind"], "--seed", row["seed"]],
                    float(row["lp_value"]), extra)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

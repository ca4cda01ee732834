#!/usr/bin/env python3
"""Solve an exported LP file with SciPy's HiGHS and print the optimum.

Reads the LP text written by `mlpoly export-lp` (Maximize, Subject To,
Bounds, optional Binaries, End). Binaries are solved as continuous [0, 1]
columns unless --integer is given. With --expect, exits 1 when the optimum
differs from the given value by more than --tol.
"""

import argparse
import math
import re
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+(\S+)")


def parse_lp(text):
    sections = {"obj": [], "rows": [], "bounds": [], "binaries": []}
    current = None
    constant = 0.0
    for raw in text.splitlines():
        m = re.match(r"\\.*objective constant (\S+)", raw)
        if m:
            constant = float(m.group(1))
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key == "maximize":
            current = "obj"
        elif key == "subject to":
            current = "rows"
        elif key == "bounds":
            current = "bounds"
        elif key == "binaries":
            current = "binaries"
        elif key == "end":
            break
        elif current in ("obj", "rows"):
            # Continuation lines start without a "name:" label.
            if re.match(r"^[A-Za-z_][\w.]*:", line) or not sections[current]:
                sections[current].append(line)
            else:
                sections[current][-1] += " " + line
        elif current is not None:
            sections[current].append(line)
        else:
            raise ValueError(f"unexpected line: {raw}")
    return sections, constant


def solve(text, integer):
    sections, constant = parse_lp(text)
    names, index = [], {}

    def col(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    obj = {}
    for line in sections["obj"]:
        for sign, coef, name in TERM.findall(line.split(":", 1)[1]):
            obj[col(name)] = obj.get(col(name), 0.0) + float(sign + coef)

    rows = []
    for line in sections["rows"]:
        body = line.split(":", 1)[1]
        m = re.match(r"(.*?)\s*(<=|>=|=)\s*(\S+)\s*$", body)
        lhs, rel, rhs = m.group(1), m.group(2), float(m.group(3))
        rows.append(([(col(n), float(s + c)) for s, c, n in TERM.findall(lhs)], rel, rhs))

    n = len(names)
    lo, hi = np.zeros(n), np.full(n, np.inf)
    for line in sections["bounds"]:
        parts = line.split()
        if len(parts) == 2 and parts[1] == "free":
            lo[col(parts[0])], hi[col(parts[0])] = -np.inf, np.inf
        elif len(parts) == 3 and parts[1] == "=":
            lo[col(parts[0])] = hi[col(parts[0])] = float(parts[2])
        elif len(parts) == 5:
            lo[col(parts[2])], hi[col(parts[2])] = float(parts[0]), float(parts[4])
        else:
            raise ValueError(f"unsupported bound: {line}")
    binaries = [col(name) for name in sections["binaries"]]

    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = -v  # linprog minimizes
    ub, eq = [], []
    for terms, rel, rhs in rows:
        if rel == "=":
            eq.append((terms, rhs))
        elif rel == "<=":
            ub.append((terms, rhs))
        else:
            ub.append(([(j, -v) for j, v in terms], -rhs))

    def matrix(block):
        if not block:
            return None, None
        r, cidx, vals = [], [], []
        for i, (terms, _) in enumerate(block):
            for j, v in terms:
                r.append(i)
                cidx.append(j)
                vals.append(v)
        mat = coo_matrix((vals, (r, cidx)), shape=(len(block), n)).tocsr()
        return mat, np.array([rhs for _, rhs in block])

    a_ub, b_ub = matrix(ub)
    a_eq, b_eq = matrix(eq)
    integrality = None
    if integer and binaries:
        integrality = np.zeros(n)
        integrality[binaries] = 1
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=list(zip(lo, hi)), method="highs", integrality=integrality)
    if res.status != 0:
        raise RuntimeError(f"HiGHS status {res.status}: {res.message}")
    return -res.fun, constant


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp", help="LP file")
    parser.add_argument("--integer", action="store_true", help="keep Binaries integral")
    parser.add_argument("--with-constant", action="store_true",
                        help="add the objective constant from the header comment")
    parser.add_argument("--expect", type=float, help="value to compare against")
    parser.add_argument("--tol", type=float, default=1e-6)
    args = parser.parse_args()
    with open(args.lp) as f:
        value, constant = solve(f.read(), args.integer)
    if args.with_constant:
        value += constant
    print(repr(value))
    if args.expect is not None and not math.isclose(value, args.expect, rel_tol=0.0,
                                                    abs_tol=args.tol):
        print(f"mismatch: expected {args.expect!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

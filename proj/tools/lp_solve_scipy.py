#!/usr/bin/env python3
"""Solve an LP file written by `nols lpgen --emit` with scipy's HiGHS.

Prints one JSON object: status, objective, variable and row counts.
Only the subset of the LP format that nols emits is understood.
"""
import argparse
import json
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix


def parse(text):
    names, index, free = [], {}, set()
    obj, rows = {}, []
    section, stmt = None, []

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    def terms(tokens):
        out, i = {}, 0
        while i < len(tokens):
            sign = 1.0
            if tokens[i] in "+-":
                sign = -1.0 if tokens[i] == "-" else 1.0
                i += 1
            coef = 1.0
            try:
                coef = float(tokens[i])
                i += 1
            except ValueError:
                pass
            j = var(tokens[i])
            out[j] = out.get(j, 0.0) + sign * coef
            i += 1
        return out

    def flush():
        nonlocal stmt
        if not stmt:
            return
        if section == "obj":
            obj.update(terms(stmt[1:]))
        else:
            rows.append((terms(stmt[1:-2]), stmt[-2], float(stmt[-1])))
        stmt = []

    for line in text.splitlines():
        if line.startswith("\\@var "):
            var(line.split()[1])
            continue
        if line.startswith("\\"):
            continue
        tok = line.split()
        if not tok:
            continue
        head = tok[0].lower()
        if head == "maximize":
            section = "obj"
        elif head == "subject":
            flush()
            section = "rows"
        elif head in ("bounds", "end"):
            flush()
            section = head
        elif section == "bounds":
            if len(tok) == 2 and tok[1].lower() == "free":
                free.add(var(tok[0]))
            else:
                raise ValueError("unsupported bound line: " + line)
        else:
            if section == "rows" and tok[0].endswith(":"):
                flush()
            stmt.extend(tok)
    return names, free, obj, rows


def solve(text):
    names, free, obj, rows = parse(text)
    n = len(names)
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = -v
    ub, eq = [], []
    for t, sense, rhs in rows:
        if sense == "<=":
            ub.append((t, rhs))
        elif sense == ">=":
            ub.append(({j: -v for j, v in t.items()}, -rhs))
        else:
            eq.append((t, rhs))

    def mat(rs):
        if not rs:
            return None, None
        i, j, v = [], [], []
        for k, (t, _) in enumerate(rs):
            for col, val in t.items():
                i.append(k)
                j.append(col)
                v.append(val)
        return csr_matrix((v, (i, j)), shape=(len(rs), n)), np.array([r for _, r in rs])

    a_ub, b_ub = mat(ub)
    a_eq, b_eq = mat(eq)
    bounds = [(None, None) if j in free else (0, None) for j in range(n)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    return {
        "status": status,
        "objective": -res.fun if res.status == 0 else None,
        "variables": n,
        "constraints": len(rows),
        "message": res.message,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("lp", help="LP file, or - for stdin")
    args = ap.parse_args()
    text = sys.stdin.read() if args.lp == "-" else open(args.lp).read()
    out = solve(text)
    print(json.dumps(out))
    return 0 if out["status"] == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())

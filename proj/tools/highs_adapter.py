#!/usr/bin/env python3
"""External LP backend: solves an LP file with scipy's HiGHS and writes solution JSON.

    highs_adapter.py input.lp output.json

Use it with `spalloc --backend "external:python3 tools/highs_adapter.py" lp solve ...`
or through the SPALLOC_LP_BACKEND environment variable.
"""

import json
import math
import re
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix


def parse_number(text):
    text = text.strip()
    if text in ("inf", "+inf", "infinity"):
        return math.inf
    if text in ("-inf", "-infinity"):
        return -math.inf
    return float(text)


def parse_terms(expr):
    terms = []
    tokens = expr.split()
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in ("+", "-"):
            sign = 1.0 if tok == "+" else -1.0
            continue
        try:
            coef = parse_number(tok)
            continue
        except ValueError:
            pass
        terms.append((tok, sign * (1.0 if coef is None else coef)))
        sign, coef = 1.0, None
    return terms


def read_lp(path):
    sense = None
    objective = []
    rows = []
    bounds = {}
    section = None
    with open(path) as fh:
        for raw in fh:
            line = raw.split("\\", 1)[0].strip()
            if not line:
                continue
            low = line.lower()
            if low in ("maximize", "minimize"):
                sense, section = low, "obj"
                continue
            if low == "subject to":
                section = "rows"
                continue
            if low == "bounds":
                section = "bounds"
                continue
            if low == "end":
                break
            if section == "obj":
                objective = parse_terms(line.split(":", 1)[1])
            elif section == "rows":
                name, body = line.split(":", 1)
                m = re.match(r"(.*?)(<=|>=|=)(.*)$", body)
                rows.append((name.strip(), parse_terms(m.group(1)), m.group(2), parse_number(m.group(3))))
            elif section == "bounds":
                parts = line.split()
                if len(parts) == 2 and parts[1] == "free":
                    bounds[parts[0]] = (-math.inf, math.inf)
                elif len(parts) == 3:
                    var, rel, val = parts
                    lo, hi = bounds.get(var, (0.0, math.inf))
                    if rel == ">=":
                        lo = parse_number(val)
                    elif rel == "<=":
                        hi = parse_number(val)
                    else:
                        lo = hi = parse_number(val)
                    bounds[var] = (lo, hi)
                elif len(parts) == 5:
                    bounds[parts[2]] = (parse_number(parts[0]), parse_number(parts[4]))
                else:
                    raise ValueError("cannot parse bound: " + line)
    return sense, objective, rows, bounds


def solve(path):
    sense, objective, rows, bounds = read_lp(path)
    names = list(bounds)
    for _, terms, _, _ in rows:
        for var, _ in terms:
            if var not in bounds:
                bounds[var] = (0.0, math.inf)
                names.append(var)
    index = {v: k for k, v in enumerate(names)}
    c = np.zeros(len(names))
    for var, coef in objective:
        c[index[var]] += coef
    if sense == "maximize":
        c = -c

    ub_r, ub_c, ub_v, ub_b = [], [], [], []
    eq_r, eq_c, eq_v, eq_b = [], [], [], []
    for _, terms, rel, rhs in rows:
        if rel == "=":
            r = len(eq_b)
            for var, coef in terms:
                eq_r.append(r), eq_c.append(index[var]), eq_v.append(coef)
            eq_b.append(rhs)
        else:
            scale = 1.0 if rel == "<=" else -1.0
            r = len(ub_b)
            for var, coef in terms:
                ub_r.append(r), ub_c.append(index[var]), ub_v.append(scale * coef)
            ub_b.append(scale * rhs)
    n = len(names)
    a_ub = coo_matrix((ub_v, (ub_r, ub_c)), shape=(len(ub_b), n)).tocsr() if ub_b else None
    a_eq = coo_matrix((eq_v, (eq_r, eq_c)), shape=(len(eq_b), n)).tocsr() if eq_b else None
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=ub_b or None,
        A_eq=a_eq,
        b_eq=eq_b or None,
        bounds=[(None if math.isinf(lo) else lo, None if math.isinf(hi) else hi) for lo, hi in (bounds[v] for v in names)],
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status)
    if status is None:
        raise RuntimeError("HiGHS stopped: " + res.message)
    out = {"status": status, "objective": None, "nonzeros": {}, "backend": "highs"}
    if status == "optimal":
        out["objective"] = -res.fun if sense == "maximize" else res.fun
        out["nonzeros"] = {v: float(x) for v, x in zip(names, res.x) if x != 0.0}
    return out


def main(argv):
    if len(argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    with open(argv[2], "w") as fh:
        json.dump(solve(argv[1]), fh)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

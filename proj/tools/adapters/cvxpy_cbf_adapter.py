#!/usr/bin/env python3
"""Solve a CBF file with cvxpy and write a cvxc solution file.

usage: cvxpy_cbf_adapter.py [--solver NAME] INPUT.cbf OUTPUT.sol
"""

import argparse
import sys

import numpy as np
import cvxpy as cp


class CbfError(Exception):
    pass


def read_cbf(path):
    with open(path) as f:
        lines = [ln.split("#", 1)[0].strip() for ln in f]
    lines = [ln for ln in lines if ln]
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise CbfError("unexpected end of file")
        pos += 1
        return lines[pos - 1]

    def domains(header):
        total, k = (int(t) for t in header.split())
        out = []
        for _ in range(k):
            kind, n = take().split()
            out.append((kind, int(n)))
        if sum(n for _, n in out) != total:
            raise CbfError("domain sizes do not add up")
        return total, out

    doc = {"sense": "MIN", "nvar": 0, "var_domains": [], "ncon": 0, "con_domains": [],
           "psdcon": [], "obj_a": [], "obj_b": 0.0, "a": [], "b": [], "h": [], "d": []}
    while pos < len(lines):
        key = take()
        if key == "VER":
            if int(take()) not in (1, 2, 3):
                raise CbfError("unsupported version")
        elif key == "OBJSENSE":
            doc["sense"] = take()
        elif key == "VAR":
            doc["nvar"], doc["var_domains"] = domains(take())
        elif key == "CON":
            doc["ncon"], doc["con_domains"] = domains(take())
        elif key == "PSDCON":
            doc["psdcon"] = [int(take()) for _ in range(int(take()))]
        elif key == "OBJACOORD":
            for _ in range(int(take())):
                j, v = take().split()
                doc["obj_a"].append((int(j), float(v)))
        elif key == "OBJBCOORD":
            doc["obj_b"] = float(take())
        elif key == "ACOORD":
            for _ in range(int(take())):
                i, j, v = take().split()
                doc["a"].append((int(i), int(j), float(v)))
        elif key == "BCOORD":
            for _ in range(int(take())):
                i, v = take().split()
                doc["b"].append((int(i), float(v)))
        elif key == "HCOORD":
            for _ in range(int(take())):
                k, j, r, c, v = take().split()
                doc["h"].append((int(k), int(j), int(r), int(c), float(v)))
        elif key == "DCOORD":
            for _ in range(int(take())):
                k, r, c, v = take().split()
                doc["d"].append((int(k), int(r), int(c), float(v)))
        else:
            raise CbfError("unsupported section " + key)
    return doc


def build(doc):
    n = doc["nvar"]
    x = cp.Variable(n) if n > 0 else None
    cons = []
    col = 0
    for kind, size in doc["var_domains"]:
        part = x[col:col + size]
        if kind == "L+":
            cons.append(part >= 0)
        elif kind == "L-":
            cons.append(part <= 0)
        elif kind == "L=":
            cons.append(part == 0)
        elif kind != "F":
            raise CbfError("unsupported variable domain " + kind)
        col += size

    m = doc["ncon"]
    if m > 0:
        A = np.zeros((m, n))
        b = np.zeros(m)
        for i, j, v in doc["a"]:
            A[i, j] += v
        for i, v in doc["b"]:
            b[i] += v
        rows = A @ x + b
        row = 0
        for kind, size in doc["con_domains"]:
            r = rows[row:row + size]
            if kind == "L+":
                cons.append(r >= 0)
            elif kind == "L-":
                cons.append(r <= 0)
            elif kind == "L=":
                cons.append(r == 0)
            elif kind == "Q":
                cons.append(cp.SOC(r[0], r[1:]))
            elif kind == "QR":
                # 2*r0*r1 >= |r2..|^2 as a second-order cone.
                cons.append(cp.SOC(r[0] + r[1], cp.hstack([r[0] - r[1], np.sqrt(2) * r[2:]])))
            elif kind == "EXP":
                cons.append(cp.constraints.ExpCone(r[2], r[1], r[0]))
            elif kind != "F":
                raise CbfError("unsupported cone " + kind)
            row += size

    for k, dim in enumerate(doc["psdcon"]):
        const = np.zeros((dim, dim))
        for kk, r, c, v in doc["d"]:
            if kk == k:
                const[r, c] += v
                if r != c:
                    const[c, r] += v
        mat = const
        for kk, j, r, c, v in doc["h"]:
            if kk == k:
                e = np.zeros((dim, dim))
                e[r, c] = v
                e[c, r] = v
                mat = mat + x[j] * e
        cons.append(cp.Constant(0) + mat >> 0)

    obj = doc["obj_b"]
    for j, v in doc["obj_a"]:
        obj = obj + v * x[j]
    obj = cp.Constant(obj) if not isinstance(obj, cp.Expression) else obj
    goal = cp.Maximize(obj) if doc["sense"] == "MAX" else cp.Minimize(obj)
    return cp.Problem(goal, cons), x


STATUS = {
    cp.OPTIMAL: "PRIMAL_AND_DUAL_FEASIBLE",
    cp.INFEASIBLE: "PRIMAL_INFEASIBLE",
    cp.UNBOUNDED: "DUAL_INFEASIBLE",
}


def main(argv):
    ap = argparse.ArgumentParser()
    ap.add_argument("--solver", default="CLARABEL")
    ap.add_argument("input")
    ap.add_argument("output")
    args = ap.parse_args(argv)
    try:
        doc = read_cbf(args.input)
    except (CbfError, ValueError) as e:
        print("cannot read {}: {}".format(args.input, e), file=sys.stderr)
        return 2
    prob, x = build(doc)
    try:
        prob.solve(solver=args.solver)
    except cp.error.SolverError as e:
        print("solver failed: {}".format(e), file=sys.stderr)
        return 3
    status = STATUS.get(prob.status, "UNKNOWN")
    with open(args.output, "w") as f:
        f.write("STATUS {}\n".format(status))
        if status == "PRIMAL_AND_DUAL_FEASIBLE" and x is not None:
            for j, v in enumerate(np.asarray(x.value).ravel()):
                f.write("VAR {} {}\n".format(j, repr(float(v))))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))

#!/usr/bin/env python3
"""Independent reference for the numbers frozen into the C++ tests.

Enumerates simple paths of shape abstraction* dependency* from every measured
node and scores them by measured[k] times the importance product. FR is one
dependency step from a predecessor's TR. Shares no
code with the engine. Usage: derive_expected.py [model.json ...]
"""
import json
import sys
from fractions import Fraction


def load(path):
    with open(path) as f:
        doc = json.load(f)
    d = len(doc["perspectives"])
    kinds = doc["relation_kinds"]
    measured = {n["id"]: n.get("measured_risk") for n in doc["nodes"]}
    edges = []
    for e in doc["edges"]:
        iv = e.get("importance", [1] * d)
        edges.append((e["source"], e["target"], e["label"], kinds[e["label"]], iv))
    return doc, d, measured, edges


def propagate(d, measured, edges):
    ids = list(measured)
    zero = [Fraction(0)] * d
    dr = {n: list(zero) for n in ids}
    fr = {n: list(zero) for n in ids}
    causes = {n: [[] for _ in range(d)] for n in ids}
    best = {n: [[] for _ in range(d)] for n in ids}

    def visit(node, value, path, seen, in_dependency, leaf):
        for k in range(d):
            table = fr if in_dependency else dr
            if value[k] > table[node][k]:
                table[node][k] = value[k]
            best[node][k].append((value[k], leaf, tuple(path)))
        for (s, t, label, kind, iv) in edges:
            if s != node or t in seen:
                continue
            if kind == "abstraction" and in_dependency:
                continue
            if kind == "dependency" and measured[t] is not None:
                continue
            nxt = [value[k] * Fraction(str(iv[k])) for k in range(d)]
            visit(t, nxt, path + [f"{s}->{t}#{label}"], seen | {t}, in_dependency or kind == "dependency", leaf)

    for m, risk in measured.items():
        if risk is not None:
            visit(m, [Fraction(str(x)) for x in risk], [], {m}, False, m)

    # Simple paths give TR; FR is then one dependency step from a predecessor's
    # TR, which on a cycle may include the node's own risk coming back.
    simple_tr = {n: [max(dr[n][k], fr[n][k]) for k in range(d)] for n in ids}
    fr = {n: list(zero) for n in ids}
    for (s, t, label, kind, iv) in edges:
        if kind != "dependency" or measured[t] is not None:
            continue
        for k in range(d):
            fr[t][k] = max(fr[t][k], simple_tr[s][k] * Fraction(str(iv[k])))

    out = {}
    for n in ids:
        tr = [max(dr[n][k], fr[n][k]) for k in range(d)]
        assert tr == simple_tr[n]
        for k in range(d):
            if tr[k] > 0:
                causes[n][k] = sorted({(leaf, path) for (v, leaf, path) in best[n][k] if v == tr[k]})
        out[n] = {"dr": [float(x) for x in dr[n]], "fr": [float(x) for x in fr[n]],
                  "tr": [float(x) for x in tr], "causes": causes[n]}
    return out


def main(paths):
    for path in paths:
        doc, d, measured, edges = load(path)
        result = propagate(d, measured, edges)
        print(f"== {path}")
        for n, r in result.items():
            print(f"{n}: dr={r['dr']} fr={r['fr']} tr={r['tr']}")
            for k, cs in enumerate(r["causes"]):
                for leaf, p in cs:
                    print(f"    {doc['perspectives'][k]}: {leaf} via {list(p)}")


if __name__ == "__main__":
    main(sys.argv[1:])

#!/usr/bin/env python3
"""Writes the reference algebras of corpus/ as presentation files.

Each algebra is given by its forest types, their sum, the leaf images and
the maps of the one-node contexts b([]). Context types are generated as the
closure of those maps under composition and both inserts, so every axiom
holds by construction; fo2dec still validates them on load.
"""

import pathlib
import sys


def build(h_names, plus, leaves, inners, accept):
    n = len(h_names)
    idx = {h: i for i, h in enumerate(h_names)}

    def as_map(f):
        return tuple(idx[f(h)] for h in h_names)

    maps = []
    names = {}

    def add(mp):
        if mp not in names:
            names[mp] = "v%d" % len(maps)
            maps.append(mp)

    inner_maps = {b: as_map(f) for b, f in inners.items()}
    for mp in inner_maps.values():
        add(mp)
    plus_i = [[idx[plus(h_names[a], h_names[b])] for b in range(n)]
              for a in range(n)]
    changed = True
    while changed:
        changed = False
        for v in list(maps):
            cands = []
            for w in list(maps):
                cands.append(tuple(v[w[h]] for h in range(n)))
            for g in range(n):
                cands.append(tuple(plus_i[g][v[h]] for h in range(n)))
                cands.append(tuple(plus_i[v[h]][g] for h in range(n)))
            for c in cands:
                if c not in names:
                    add(c)
                    changed = True

    def vname(mp):
        return names[mp]

    out = []
    out.append("[H]\n" + " ".join(h_names))
    out.append("[V]\n" + " ".join(vname(m) for m in maps))
    out.append("[Hplus]\n" + "\n".join(
        "%s %s -> %s" % (h_names[a], h_names[b], h_names[plus_i[a][b]])
        for a in range(n) for b in range(n)))
    out.append("[Vtimes]\n" + "\n".join(
        "%s %s -> %s" % (vname(v), vname(w),
                         vname(tuple(v[w[h]] for h in range(n))))
        for v in maps for w in maps))
    out.append("[action]\n" + "\n".join(
        "%s %s -> %s" % (vname(v), h_names[h], h_names[v[h]])
        for v in maps for h in range(n)))
    out.append("[insertL]\n" + "\n".join(
        "%s %s -> %s" % (h_names[g], vname(v),
                         vname(tuple(plus_i[g][v[h]] for h in range(n))))
        for g in range(n) for v in maps))
    out.append("[insertR]\n" + "\n".join(
        "%s %s -> %s" % (vname(v), h_names[g],
                         vname(tuple(plus_i[v[h]][g] for h in range(n))))
        for v in maps for g in range(n)))
    out.append("[leaves]\n" + "\n".join(
        "%s -> %s" % (a, h) for a, h in leaves.items()))
    out.append("[inners]\n" + "\n".join(
        "%s -> %s" % (b, vname(inner_maps[b])) for b in inners))
    out.append("[accept]\n" + " ".join(accept))
    return "\n\n".join(out) + "\n"


def alg_trivial():
    return build(["h"], lambda a, b: "h", {"a": "h"}, {"b": lambda h: "h"},
                 ["h"])


def alg_a():
    # contains an a-leaf
    mx = lambda x, y: "h1" if "h1" in (x, y) else "h0"
    return build(["h0", "h1"], mx, {"a": "h1", "c": "h0"},
                 {"b": lambda h: h}, ["h1"])


def alg_par():
    # even number of a-leaves
    xor = lambda x, y: "p0" if x == y else "p1"
    return build(["p0", "p1"], xor, {"a": "p1", "c": "p0"},
                 {"b": lambda h: h}, ["p0"])


def alg_first():
    # the first root is an a-leaf
    return build(["ha", "hc"], lambda x, y: x, {"a": "ha", "c": "hc"},
                 {"b": lambda h: "hc"}, ["ha"])


def alg_be_raw():
    # Boolean trees evaluating to 1: a single tree carries its value, a
    # forest of several trees the and and the or of its roots
    hs = ["S0", "S1", "M00", "M01", "M11"]

    def summary(h):
        if h[0] == "S":
            v = int(h[1])
            return (v, v)
        return (int(h[1]), int(h[2]))

    def plus(x, y):
        a1, o1 = summary(x)
        a2, o2 = summary(y)
        return "M%d%d" % (a1 & a2, o1 | o2)

    def conj(h):
        return "S%d" % summary(h)[0]

    def disj(h):
        return "S%d" % summary(h)[1]

    return build(hs, plus, {"zero": "S0", "one": "S1"},
                 {"AND": conj, "OR": disj}, ["S1"])


def tiny_odd():
    # a leaf is 0, b negates the or of its children; accept if some root is 1
    mx = lambda x, y: "t1" if "t1" in (x, y) else "t0"
    flip = lambda h: "t1" if h == "t0" else "t0"
    return build(["t0", "t1"], mx, {"a": "t0"}, {"b": flip}, ["t1"])


def tiny_first():
    # the first root is a leaf
    return build(["fa", "fb"], lambda x, y: x, {"a": "fa"},
                 {"b": lambda h: "fb"}, ["fa"])


CORPUS = {
    "trivial": alg_trivial,
    "alg_a": alg_a,
    "alg_par": alg_par,
    "alg_first": alg_first,
    "alg_be_raw": alg_be_raw,
    "tiny1": tiny_odd,
    "tiny2": tiny_first,
}


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "corpus")
    out.mkdir(parents=True, exist_ok=True)
    for name, fn in CORPUS.items():
        (out / (name + ".alg")).write_text(fn())


if __name__ == "__main__":
    main()

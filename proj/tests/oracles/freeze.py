"""Prints the oracle values frozen into the C++ tests.

Run from the repository root: python3 tests/oracles/freeze.py
Uses brute.py (enumeration) and sympy (symbolic determinants).
"""
import json
import os
import sys

import sympy as sp

sys.path.insert(0, os.path.dirname(__file__))
import brute  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def load(name):
    with open(os.path.join(DATA, name)) as f:
        return json.load(f)


def net_mats(doc):
    N = doc["n"] + 2
    return [[row[i * N:(i + 1) * N] for i in range(N)] for row in doc["matrices"]]


def section(title):
    print("==", title)


def nets():
    for name, primes in (("net42_seed42.json", (3, 5, 7)), ("pencil_seed1.json", (3, 5, 7, 11, 13))):
        doc = load(name)
        mats = net_mats(doc)
        section(name)
        for p in primes:
            X, Q, Y, hist = brute.net_counts(mats, p)
            qb = brute.qbar_count(mats, doc["point"], p)
            print(f"p={p} X={X} Q={Q} Y={Y} Qbar={qb} hist={hist}")


def cubic():
    doc = load("cubic_seed1.json")
    x = sp.symbols("x0:6")
    F = sum(mono["coeff"] * sp.prod([x[i] ** e for i, e in enumerate(mono["exponents"])])
            for mono in doc["monomials"])
    y = sp.symbols("y0:3")
    lam, z = sp.symbols("lam"), sp.symbols("z0:3")
    sub = {x[0]: z[0], x[1]: z[1], x[2]: z[2], x[3]: lam * y[0], x[4]: lam * y[1], x[5]: lam * y[2]}
    R = sp.expand(sp.cancel(F.subs(sub, simultaneous=True) / lam))
    zs = list(z) + [lam]
    # Gram with G_ab = (1/2) d^2R/dz_a dz_b, scaled by 2 to stay integral.
    H = sp.Matrix(4, 4, lambda a, b: sp.diff(R, zs[a], zs[b]))
    det2 = sp.Poly(sp.expand(H.det()), *y)  # det(2G) = 16 det(G), same square class
    section("cubic_seed1.json")
    for p in (5, 7):
        f5 = [tuple(v) for v in brute.proj_points(5, p)]
        Fp = sp.Poly(F, *x)
        X = sum(1 for v in f5 if Fp.eval(dict(zip(x, v))) % p == 0)
        Y = sum(1 + brute.chi(int(det2.eval(dict(zip(y, s)))), p) for s in brute.proj_points(2, p))
        print(f"p={p} X={X} Y={Y}")


def verra():
    doc = load("verra_seed1.json")
    T = doc["tensor"]
    s, t, w = sp.symbols("s0:3"), sp.symbols("t0:3"), sp.symbols("w")
    G = sum(T[((a * 3 + b) * 3 + c) * 3 + d] * s[a] * s[b] * t[c] * t[d]
            for a in range(3) for b in range(3) for c in range(3) for d in range(3))
    G = sp.expand(G)

    def cover(vars_fiber, vars_base):
        form = w ** 2 - G
        zs = [w] + list(vars_fiber)
        H = sp.Matrix(4, 4, lambda a, b: sp.diff(form, zs[a], zs[b]))
        return sp.Poly(sp.expand(H.det()), *vars_base)

    d1, d2 = cover(t, s), cover(s, t)
    Gp = sp.Poly(G, *(list(s) + list(t)))
    section("verra_seed1.json")
    for p in (3, 5, 7):
        pts = list(brute.proj_points(2, p))
        X = sum(1 + brute.chi(int(Gp.eval(dict(zip(list(s) + list(t), a + b)))), p) for a in pts for b in pts)
        Y1 = sum(1 + brute.chi(int(d1.eval(dict(zip(s, a)))), p) for a in pts)
        Y2 = sum(1 + brute.chi(int(d2.eval(dict(zip(t, a)))), p) for a in pts)
        print(f"p={p} X={X} Y1={Y1} Y2={Y2}")


def determinant_poly():
    s = sp.symbols("s0:3")
    mats = [
        [[1, 2, 0, -1], [2, 0, 3, 1], [0, 3, -2, 4], [-1, 1, 4, 5]],
        [[0, 1, -3, 2], [1, 4, 0, 0], [-3, 0, 1, -2], [2, 0, -2, 3]],
        [[2, 0, 1, 1], [0, -1, 2, 5], [1, 2, 0, -4], [1, 5, -4, 0]],
    ]
    M = sp.Matrix(4, 4, lambda i, j: sum(s[k] * mats[k][i][j] for k in range(3)))
    P = sp.Poly(sp.expand(M.det()), *s)
    section("det4x4")
    for mono, c in sorted(P.terms()):
        print(mono, c)


if __name__ == "__main__":
    determinant_poly()
    nets()
    cubic()
    verra()

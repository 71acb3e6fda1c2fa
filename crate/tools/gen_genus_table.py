#!/usr/bin/env python3
"""Genus of X_0(M) for M <= 100 from the coset action of SL2(Z).

Independent of the closed-form index/elliptic-point count: the cosets of
Gamma_0(M) are the points of P^1(Z/MZ); S, ST and T act on them and the
genus follows from Riemann-Hurwitz on the resulting permutation triple.

Usage: gen_genus_table.py > data/genus_table.txt
"""
from math import gcd


def p1_points(m):
    pts = set()
    for c in range(m):
        for d in range(m):
            if gcd(gcd(c, d), m) == 1:
                pts.add(normalize(c, d, m))
    return sorted(pts)


def normalize(c, d, m):
    # canonical representative of (c : d) up to units of Z/mZ
    best = None
    for u in range(1, m + 1):
        if gcd(u, m) == 1:
            cand = ((u * c) % m, (u * d) % m)
            if best is None or cand < best:
                best = cand
    return best


def act(pt, mat, m):
    c, d = pt
    a, b, cc, dd = mat
    # row vector (c, d) times matrix
    return normalize((c * a + d * cc) % m, (c * b + d * dd) % m, m)


def cycles(perm):
    seen, count, lengths = set(), 0, []
    for p in perm:
        if p in seen:
            continue
        n, q = 0, p
        while q not in seen:
            seen.add(q)
            q = perm[q]
            n += 1
        lengths.append(n)
    return lengths


def genus(m):
    if m == 1:
        return 0
    pts = p1_points(m)
    s = {p: act(p, (0, -1, 1, 0), m) for p in pts}
    st = {p: act(p, (0, -1, 1, 1), m) for p in pts}
    t = {p: act(p, (1, 1, 0, 1), m) for p in pts}
    mu = len(pts)
    e2 = sum(1 for l in cycles(s) if l == 1)
    e3 = sum(1 for l in cycles(st) if l == 1)
    cusps = len(cycles(t))
    # 2g - 2 = mu/6 - e2/2 - 2e3/3 - cusps  (times 12 below to stay integral)
    num = mu - 3 * e2 - 4 * e3 - 6 * cusps + 12
    assert num % 12 == 0, (m, mu, e2, e3, cusps)
    return num // 12


if __name__ == "__main__":
    print("# M genus(X_0(M)), from the coset action of SL2(Z) on P^1(Z/MZ)")
    for m in range(1, 101):
        print(m, genus(m))

#!/usr/bin/env python3
"""Extract Monster / Baby Monster character data from GAP's CTblLib.

Usage:
    gen_character_data.py <path/to/ctbllib/data/ctomonst.tbl> <out_dir>

Writes characters_monster.txt (V_1..V_15) and characters_babymonster.txt
(U_1..U_13) in the plain-text character format read by `mf_core::groupdata`.
Class names are ATLAS names: element order followed by a letter assigned in
table order among classes of equal element order.
"""
import string
import sys
from pathlib import Path

IRREPS = {"M": 15, "B": 13}
OUT = {"M": "characters_monster.txt", "B": "characters_babymonster.txt"}


class Reader:
    def __init__(self, text):
        self.s = text
        self.i = 0

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] in " \t\r\n":
            self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i]

    def value(self):
        c = self.peek()
        if c == "[":
            return self.list_()
        if c == '"':
            j = self.s.index('"', self.i + 1)
            v = self.s[self.i + 1 : j]
            self.i = j + 1
            return v
        # integer or opaque expression (irrationalities, identifiers)
        start, depth = self.i, 0
        while True:
            ch = self.s[self.i]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0:
                    break
                depth -= 1
            elif ch == "," and depth == 0:
                break
            self.i += 1
        tok = self.s[start : self.i].replace("\n", "").strip()
        try:
            return int(tok)
        except ValueError:
            return ("expr", tok)

    def list_(self):
        assert self.s[self.i] == "["
        self.i += 1
        out = []
        if self.peek() == "]":
            self.i += 1
            return out
        while True:
            if self.peek() in ",]":
                out.append(None)  # hole
            else:
                out.append(self.value())
            c = self.peek()
            self.i += 1
            if c == "]":
                return out
            assert c == ",", (c, self.s[self.i - 20 : self.i + 20])


def read_mot(text, name):
    start = text.index('MOT("%s",' % name)
    r = Reader(text)
    r.i = start + len('MOT(')
    args = []
    while True:
        args.append(r.value())
        c = r.peek()
        r.i += 1
        if c == ")":
            return args
        assert c == ","


def element_orders(powermaps, nclasses):
    primes = [p for p, m in enumerate(powermaps, start=1) if m]
    maps = {p: powermaps[p - 1] for p in primes}

    def power(cls, n):
        for p in primes:
            while n % p == 0:
                cls = maps[p][cls - 1]
                n //= p
        assert n == 1
        return cls

    def smooth(n):
        for p in primes:
            while n % p == 0:
                n //= p
        return n == 1

    orders = []
    for cls in range(1, nclasses + 1):
        n = 1
        while not (smooth(n) and power(cls, n) == 1):
            n += 1
        orders.append(n)
    return orders


def atlas_names(orders):
    seen = {}
    names = []
    for o in orders:
        k = seen.get(o, 0)
        seen[o] = k + 1
        letters = string.ascii_uppercase
        suffix = letters[k] if k < 26 else letters[k // 26 - 1] + letters[k % 26]
        names.append(f"{o}{suffix}")
    return names


def main():
    src = Path(sys.argv[1]).read_text()
    out_dir = Path(sys.argv[2])
    for name, count in IRREPS.items():
        args = read_mot(src, name)
        centralizers, powermaps, irreducibles = args[2], args[3], args[4]
        n = len(centralizers)
        orders = element_orders(powermaps, n)
        for o, cz in zip(orders, centralizers):
            assert cz % o == 0
        names = atlas_names(orders)
        rows = irreducibles[:count]
        for idx, row in enumerate(rows, start=1):
            if not (isinstance(row, list) and len(row) == n and all(isinstance(v, int) for v in row)):
                raise SystemExit(f"{name}: irreducible {idx} is not an explicit integer character")
        lines = [
            "# source: GAP CTblLib table \"%s\" (ATLAS ordering), irreducibles 1..%d" % (name, count),
            "classes: " + " ".join(names),
            "orders: " + " ".join(map(str, orders)),
        ]
        for idx, row in enumerate(rows, start=1):
            lines.append(f"irrep {idx} {row[0]} : " + " ".join(map(str, row)))
        (out_dir / OUT[name]).write_text("\n".join(lines) + "\n")
        print(f"{name}: {n} classes, {count} irreps -> {OUT[name]}")


if __name__ == "__main__":
    main()

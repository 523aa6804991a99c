"""Regenerate src/pmcheck/data/pgroups.json.

Each group is written through the permutation generators of its left regular
representation, built from an explicit multiplication rule on tuples.
"""

import itertools
import json
from pathlib import Path


def regular_generators(elements, mul, gens):
    index = {e: i for i, e in enumerate(elements)}
    return [[index[mul(g, x)] for x in elements] for g in gens]


def abelian(orders):
    elems = list(itertools.product(*[range(o) for o in orders]))
    mul = lambda a, b: tuple((x + y) % o for x, y, o in zip(a, b, orders))
    gens = [tuple(int(i == j) for j in range(len(orders))) for i in range(len(orders))]
    return elems, mul, gens


def heisenberg(p):
    elems = list(itertools.product(range(p), repeat=3))
    mul = lambda a, b: ((a[0] + b[0]) % p, (a[1] + b[1]) % p, (a[2] + b[2] + a[0] * b[1]) % p)
    return elems, mul, [(1, 0, 0), (0, 1, 0)]


def modular(p):
    # <x, y | x^(p^2) = y^p = 1, y x y^-1 = x^(1+p)>, elements x^i y^j
    n = p * p
    elems = list(itertools.product(range(n), range(p)))
    mul = lambda a, b: ((a[0] + pow(1 + p, a[1], n) * b[0]) % n, (a[1] + b[1]) % p)
    return elems, mul, [(1, 0), (0, 1)]


def dihedral8():
    # r^i s^j with s r s = r^-1
    elems = list(itertools.product(range(4), range(2)))
    mul = lambda a, b: ((a[0] + (-1) ** a[1] * b[0]) % 4, (a[1] + b[1]) % 2)
    return elems, mul, [(1, 0), (0, 1)]


def quaternion8():
    # unit quaternions +-1, +-i, +-j, +-k as (sign, unit)
    units = ["1", "i", "j", "k"]
    table = {
        ("1", u): (1, u) for u in units
    }
    table.update({(u, "1"): (1, u) for u in units})
    table.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                  ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                  ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, u) for s in (1, -1) for u in units]

    def mul(a, b):
        s, u = table[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return elems, mul, [(1, "i"), (1, "j")]


def entries():
    for p in (2, 3):
        yield f"C{p}", p, abelian([p])
        yield f"C{p*p}", p, abelian([p * p])
        yield f"C{p**3}", p, abelian([p**3])
        yield f"C{p}xC{p}", p, abelian([p, p])
        yield f"C{p*p}xC{p}", p, abelian([p * p, p])
        yield f"C{p}xC{p}xC{p}", p, abelian([p, p, p])
        if p == 2:
            yield "D8", 2, dihedral8()
            yield "Q8", 2, quaternion8()
        else:
            yield f"Heis{p**3}", p, heisenberg(p)
            yield f"M{p**3}", p, modular(p)


def main():
    groups = []
    for name, p, (elems, mul, gens) in entries():
        groups.append({
            "name": name,
            "p": p,
            "order": len(elems),
            "generators": regular_generators(elems, mul, gens),
        })
    out = Path(__file__).resolve().parents[1] / "src" / "pmcheck" / "data" / "pgroups.json"
    with open(out, "w") as fh:
        json.dump({"format": "pmcheck-pgroups/1", "groups": groups}, fh, indent=None)
        fh.write("\n")
    print(f"wrote {len(groups)} groups to {out}")


if __name__ == "__main__":
    main()

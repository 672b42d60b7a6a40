#!/usr/bin/env python3
"""Generate the order-10 explicit Nystrom tableau as Rust decimal literals.

The method is polynomial extrapolation (in h^2) of the explicit midpoint rule
with substep counts 2, 4, 6, 8, 10, written as an explicit Runge-Kutta
tableau (A, b, c) and converted to Nystrom form for y'' = f(x, y):

    a_nys = A @ A,   b_nys = A^T b,   bhat = b,   c unchanged.

All arithmetic is exact (fractions); literals carry 25 significant digits.

Usage: python3 gen_rkn10.py > ../src/tableau/rkn10.rs
"""
from decimal import Decimal, getcontext
from fractions import Fraction as Fr

getcontext().prec = 40
SEQ = (2, 4, 6, 8, 10)


def build_rk():
    rows = [[]]  # stage 0 evaluates at the step start
    cs = [Fr(0)]
    outs = []
    for n in SEQ:
        h = Fr(1, n)
        prev = {}
        cur = {0: h}
        for i in range(1, n):
            s = len(rows)
            rows.append(dict(cur))
            cs.append(i * h)
            nxt = dict(prev)
            nxt[s] = nxt.get(s, Fr(0)) + 2 * h
            prev, cur = cur, nxt
        outs.append(cur)
    m = len(rows)
    a = [[Fr(0)] * m for _ in range(m)]
    for p, row in enumerate(rows):
        for q, v in (row.items() if isinstance(row, dict) else []):
            a[p][q] = v
    gam = []
    for j, nj in enumerate(SEQ):
        g = Fr(1)
        for l, nl in enumerate(SEQ):
            if l != j:
                g *= Fr(nj * nj, nj * nj - nl * nl)
        gam.append(g)
    b = [Fr(0)] * m
    for g, out in zip(gam, outs):
        for q, v in out.items():
            b[q] += g * v
    return a, b, cs


def to_nystrom(a, b):
    m = len(a)
    a2 = [[sum(a[p][k] * a[k][q] for k in range(m)) for q in range(m)] for p in range(m)]
    bn = [sum(b[p] * a[p][q] for p in range(m)) for q in range(m)]
    return a2, bn, list(b)


def lit(x):
    d = Decimal(x.numerator) / Decimal(x.denominator)
    if d == 0:
        return "0.0"
    return format(d, ".24e").replace("e+", "e")


def main():
    a, b, c = build_rk()
    an, bn, bh = to_nystrom(a, b)
    m = len(c)
    assert sum(bh) == 1 and sum(bn) == Fr(1, 2)
    assert all(an[p][q] == 0 for p in range(m) for q in range(p, m))
    print("// Generated by scripts/gen_rkn10.py. Do not edit by hand.")
    print("//")
    print("// Extrapolated midpoint rule (substeps 2, 4, 6, 8, 10) in Nystrom form.")
    print()
    print("#![allow(clippy::excessive_precision)]")
    print()
    print(f"pub(super) const STAGES: usize = {m};")
    print()
    print("pub(super) const C: [f64; STAGES] = [")
    for x in c:
        print(f"    {lit(x)},")
    print("];")
    print()
    print("/// Strictly lower triangle, row-major: row p holds a[p][0..p].")
    print(f"pub(super) const A_LOWER: [f64; {m * (m - 1) // 2}] = [")
    for p in range(1, m):
        print(f"    // row {p}")
        for q in range(p):
            print(f"    {lit(an[p][q])},")
    print("];")
    print()
    print("pub(super) const B: [f64; STAGES] = [")
    for x in bn:
        print(f"    {lit(x)},")
    print("];")
    print()
    print("pub(super) const BHAT: [f64; STAGES] = [")
    for x in bh:
        print(f"    {lit(x)},")
    print("];")


if __name__ == "__main__":
    main()

"""The tower congruences for both shipped towers.

For each tower: the special element, the four-star sums, the Moebius-summed
transferred element and the coefficient congruence on trace pairs.
"""

from pmcheck import congruence as cg

for name in sorted(cg.TOWERS):
    T = cg.build_tower(name)
    sp, rep = cg.select_special_g(T)
    print(f"== {name}: p = {T.p}, |Sigma| = {T.order}, f = {sp.f}, level {sp.level}")
    print(f"   g = {sp.g.residue} mod {sp.level}, exact norm {sp.g.norm}")
    for d in rep.details:
        print(f"   N_F(g_F) over {d['field']}: {d['norm']}, v_p(N - 1) = {d['v_p(N-1)']}")

    fs = cg.check_four_star(T, ks=(2,))
    vals = sorted({d[3] for d in fs.details})
    print(f"   four-star: {'pass' if fs.passed else 'FAIL'}, valuations seen {vals}")

    th = cg.check_theorem(T, ks=(2,))
    coeffs = {y: c for y, c in th.details[0][1].items() if c}
    print(f"   transferred sum: {'pass' if th.passed else 'FAIL'}, nonzero coefficients {coeffs}")

    p9 = cg.check_prop9(T, alphas=range(1, 4), ks=(2,))
    nz = [(a, str(c)) for a, _, c, _ in p9.details if c][:4]
    print(f"   trace-pair coefficients: {'pass' if p9.passed else 'FAIL'}, e.g. {nz}")
    print()

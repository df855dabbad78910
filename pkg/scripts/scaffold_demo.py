"""Build a small lattice scaffold and compare the construction's dimension with the closed form.

    python scripts/scaffold_demo.py
"""
from fractions import Fraction

from thickset.errors import InfeasibleParams
from thickset.game import Pass, ThicknessStrategy
from thickset.scaffold import (build_scaffold, check_claims_i_ii_iii, desk_params, make_params,
                               scaffold_dimension, verify_tree)
from thickset.sets import CentralCantor


def main():
    p = desk_params(Fraction(1, 864), Fraction(1, 2), x0=(Fraction(1, 5),))
    claims = check_claims_i_ii_iii(p)
    print(f"desk: N={p.N} M={p.M} feasible={p.feasible} claims={claims.holds}")
    for name, alice in (("pass", Pass()), ("thickness", ThicknessStrategy(CentralCantor()))):
        root = build_scaffold(p, alice, 3, keep=10)
        rep = verify_tree(root, p)
        print(f"  {name}: nodes={rep.nodes} min_children={rep.min_children} ok={rep.ok}")
    print("alpha,c,construction_deficit,closed_form_deficit,ratio")
    for alpha in (1e-8, 1e-10, 1e-12, 1e-14):
        for c in (Fraction(1, 2), Fraction(3, 4)):
            try:
                q = make_params(1, alpha, Fraction(1, 4), c)
            except InfeasibleParams:
                print(f"{alpha:g},{c},infeasible,,")
                continue
            dim = scaffold_dimension(q)
            print(f"{alpha:g},{c},{dim.construction_deficit:.6e},{dim.closed_form_deficit:.6e},"
                  f"{dim.construction_deficit / dim.closed_form_deficit:.4f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Grid-refinement study for the product-integration quadrature.

Prints the endpoint error of the fractional integral against the
monomial closed form, the semigroup defect, and the gap between the
iterative solver and the constant-coefficient representation, each over
a sequence of grid sizes.  Empirical orders should come out >= 1.
"""

import argparse

import numpy as np

from psihilfer import (CauchyProblem, LinearProblem, OrderParams, build_grid,
                       frac_integral, make_psi, monomial_oracle, parse,
                       picard_solve, solve_constant)


def quadrature_table(ns):
    psi = make_psi("identity", (), (0.0, 1.0))
    exact = monomial_oracle(psi, 0.5, 1.5, 0.0, 1.0)
    print("\nfractional integral of t^0.5, order 0.5, value at t=1")
    print(f"{'n':>6} {'rel error':>12} {'ratio':>8}")
    prev = None
    for n in ns:
        grid = build_grid(psi, 0.0, 1.0, n)
        vals = frac_integral(grid, 0.5, np.sqrt(grid.nodes), mode="plain")
        err = abs(vals[-1] - exact) / exact
        ratio = f"{prev / err:8.2f}" if prev else "       -"
        print(f"{n:>6} {err:12.3e} {ratio}")
        prev = err


def semigroup_table(ns):
    psi = make_psi("identity", (), (0.0, 1.0))
    print("\nsemigroup defect: order 0.3 after 0.4 versus order 0.7, h=sin")
    print(f"{'n':>6} {'rel defect':>12}")
    for n in ns:
        grid = build_grid(psi, 0.0, 1.0, n)
        h = np.sin(grid.nodes)
        chained = frac_integral(grid, 0.3,
                                frac_integral(grid, 0.4, h, mode="plain"),
                                mode="plain")
        direct = frac_integral(grid, 0.7, h, mode="plain")
        defect = np.max(np.abs(chained - direct)) / np.max(np.abs(direct))
        print(f"{n:>6} {defect:12.3e}")


def solver_table(ns):
    psi = make_psi("identity", (), (0.0, 1.0))
    params = OrderParams(0.6, 0.4)
    problem = CauchyProblem(psi=psi, params=params, a=0.0, xi=1.0, y_a=1.0,
                            rhs=parse("-1*y"), k_box=1.0)
    print("\nsolver versus closed form, decay problem, weighted sup gap")
    print(f"{'n':>6} {'gap':>12} {'iters':>6}")
    for n in ns:
        sol, rep = picard_solve(problem, n=n, horizon=1.0)
        ref = solve_constant(LinearProblem(psi=psi, params=params, a=0.0,
                                           b=1.0, y_a=1.0, lam=-1.0), n)
        gap = np.max(np.abs(sol.w - ref.w))
        print(f"{n:>6} {gap:12.3e} {rep.iterations:>6}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[128, 256, 512, 1024, 2048])
    args = ap.parse_args()
    quadrature_table(args.sizes)
    semigroup_table(args.sizes)
    solver_table(args.sizes)


if __name__ == "__main__":
    main()

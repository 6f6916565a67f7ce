"""Solving the fractional-order integral boundary-value problem.

Run with:  python3 demos/04_fractional_boundary_value_problem.py

The right-hand side f(t, x) = 0.2 (1 + t + sin^2 x) is Lipschitz in x with
constant 0.2, and 0.2 * lambda stays below 1, so the integral operator is a
relation contraction on the nonnegative cone and Picard iteration converges
from the zero function.
"""

import numpy as np

from relfix import (
    FbvpProblem,
    Grid,
    OperatorVariant,
    caputo_derivative_nodes,
    lambda_paper,
    lambda_tight,
    solve_fbvp,
)
from relfix.fixtures import sine_mix_source

beta, k, L = 1.5, 0.5, 0.2
f = sine_mix_source(0.2)

print(f"order beta = {beta}, boundary parameter k = {k}, Lipschitz L = {L}")
print(f"displayed contraction constant: {lambda_paper(beta, k):.6f}")
print(f"re-derived (tight) constant:    {lambda_tight(beta, k):.6f}")
print(f"L * lambda = {L * lambda_tight(beta, k):.6f} < 1, so iteration contracts")

print()
print("solving on n = 256 nodes...")
problem = FbvpProblem(beta=beta, k=k, L=L, f=f, grid=Grid(256))
solution = solve_fbvp(problem, tol=1e-8)
print(f"  converged in {solution.iterations} iterations "
      f"(worst observed gap ratio {solution.gap_ratio:.4f})")
print(f"  fixed-point residual:   {solution.fixed_point_residual:.3e}")
print(f"  x(0) = {solution.x.values[0]}, x(1) = {solution.x.values[-1]:.6f}, "
      f"sup norm {solution.x.sup_norm:.6f}")
print(f"  equation residual (max over interior nodes): {solution.caputo_residual:.4f}")
print("  (the max sits in the boundary layer at t -> 0 where the exact")
print("   second derivative is unbounded; away from it the residual decays:)")
for n in (64, 128, 256):
    p = FbvpProblem(beta=beta, k=k, L=L, f=f, grid=Grid(n))
    x = solve_fbvp(p, tol=1e-10).x
    cd = caputo_derivative_nodes(x, beta)
    fv = f(p.grid.nodes, x.values)
    mid = abs(float(cd[n // 2] - fv[n // 2]))
    print(f"    n = {n:>3}: residual at t = 0.5 is {mid:.5f}")

print()
print("the two operator variants differ in the boundary coupling sign:")
for variant in OperatorVariant:
    p = FbvpProblem(beta=beta, k=k, L=L, f=f, grid=Grid(256), variant=variant)
    s = solve_fbvp(p, tol=1e-8)
    print(f"  {variant.value:>16}: x(1) = {s.x.values[-1]:+.6f}, "
          f"|x(1) + int_0^k x| = {s.boundary_residual:.2e}")
print("(only the corrected variant satisfies the integral boundary condition;")
print(" the all-plus variant is the form used for the contraction analysis)")

print()
print("grid refinement of the solution itself:")
previous = None
for n in (64, 128, 256, 512):
    p = FbvpProblem(beta=beta, k=k, L=L, f=f, grid=Grid(n))
    values = solve_fbvp(p, tol=1e-10).x.values
    if previous is not None:
        gap = float(np.max(np.abs(previous - values[::2])))
        print(f"  sup difference between n = {n // 2} and n = {n}: {gap:.3e}")
    previous = values

"""Attraction basins on the two-variable academic problem.

The academic problem minimizes a truss weight 4 x1 + 2 x2 whose feasible
set is a polyhedron plus the segment {0} x [5, 5 sqrt(2)] and the isolated
origin.  Three points matter: the global minimizer xo = (0, 0), the local
minimizer xstar = (0, 5), and xplus = (0, 5 sqrt(2)), which is weakly
stationary but not a minimizer.

This script runs the homotopy driver from a grid of starts for every
scheme (plus the direct single-NLP baseline), prints a per-scheme summary
table, and draws an ASCII basin map for one scheme.  Expect the direct
baseline to strand some starts ("neither") while the regularizations
bucket essentially everything.
"""
import sys
import time

from mpvc.cli import run_grid, _grid_points

NX = 14 if "--quick" in sys.argv else 26
GRID = f"-5,20,{NX},-5,20,{NX}"
points = _grid_points(GRID)

print(f"{len(points)} starts on [-5, 20]^2")
print(f"{'method':12s} {'xo':>5s} {'xstar':>6s} {'xplus':>6s} {'neither':>8s} "
      f"{'outer':>7s} {'inner':>7s} {'time':>7s}")
maps = {}
for scheme in ["none", "global", "local", "lshaped", "nonsmooth"]:
    t0 = time.time()
    rows, summary = run_grid("academic", scheme, points, jobs=2)
    b = summary["buckets"]
    print(f"{scheme:12s} {b['xo']:5d} {b['xstar']:6d} {b['xplus']:6d} {b['neither']:8d} "
          f"{summary['total_outer_iterations']:7d} {summary['total_inner_iterations']:7d} "
          f"{time.time()-t0:6.1f}s")
    maps[scheme] = rows

mark = {"xo": "o", "xstar": "*", "xplus": "+", "neither": "?"}
print("\nBasin map, global regularization (rows top to bottom = x2 high to low):")
rows = maps["global"]
for j in reversed(range(NX)):
    line = "".join(mark[rows[j * NX + i]["bucket"]] for i in range(NX))
    print("   " + line)
print("   o = origin, * = local minimizer, + = weakly stationary corner, ? = stranded")

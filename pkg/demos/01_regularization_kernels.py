"""Tour of the four regularization kernels.

Every scheme replaces the product constraint G*H <= 0 of one vanishing
pair by a single parametrized row.  This script prints each kernel over a
small (G, H) grid so the feasible-set geometry is visible as the sign
pattern of the row value, and demonstrates the smoothness properties the
solver relies on: the local kernel's C^1 switch at |G - H| = t and the
L-shaped kernel's C^1 branch joint at G + H = t.
"""
import numpy as np

from mpvc import Scheme, kernel_global, phi_kdb, phi_ks, phi_su, theta, theta_prime

KERNELS = {
    Scheme.GLOBAL: kernel_global,
    Scheme.LOCAL: phi_su,
    Scheme.LSHAPED: phi_ks,
    Scheme.NONSMOOTH: phi_kdb,
}

t = 1.0
gs = np.linspace(-1.5, 2.5, 9)
hs = np.linspace(2.5, -0.5, 7)

print(f"Sign of the kernel row value at t = {t} ('.' feasible, 'X' infeasible)")
for scheme, fn in KERNELS.items():
    print(f"\n{scheme.value} -- rows: H from {hs[0]} down to {hs[-1]}, "
          f"cols: G from {gs[0]} to {gs[-1]}")
    for H in hs:
        line = "".join(". " if fn(G, H, t)[0] <= 0 else "X " for G in gs)
        print(f"  H={H:+.1f}  {line}")

print("\nSmoothing profile: theta(+-1) = 1, slopes -1/+1, curvature > 0 inside")
for s in (-1.0, -0.5, 0.0, 0.5, 1.0):
    print(f"  theta({s:+.1f}) = {theta(s):.6f}   theta'({s:+.1f}) = {theta_prime(s):+.6f}")

print("\nC^1 continuity of the local kernel across |G - H| = t:")
G = 0.7
for side in (-1e-10, 1e-10):
    H = G - (t + side)
    v, a, b = phi_su(G, H, t)
    print(f"  G-H = t{side:+.0e}:  value={v:+.12f}  (alpha, beta)=({a:.12f}, {b:.12f})")

print("\nC^1 continuity of the L-shaped kernel across G + H = t:")
for side in (-1e-10, 1e-10):
    v, cG, cH = phi_ks(0.4, t - 0.4 + side, t)
    print(f"  G+H = t{side:+.0e}:  value={v:+.12f}  coeffs=({cG:+.12f}, {cH:+.12f})")

"""The four methods side by side on a small k = 2 equation.

F = f(u) + t Q(F, D F, D^2 F, u) with linear f and Q; every method should
return the same annihilator.
"""
import time

from catalix import SolveOptions, fixed_point_spec, solve

spec = fixed_point_spec("2 + 3*u", "1 + 2*x - y1 + 3*y2 + u", 2, 1, "linear k=2")
for method in ("direct", "elim", "geom", "hgp"):
    start = time.time()
    res = solve(spec, SolveOptions(method=method, certify=True))
    print(f"{method:6s} {time.time() - start:5.1f} s  ({res.deg_t}, {res.deg_z0})  "
          f"{res.certificate.status:10s} {res.R}")

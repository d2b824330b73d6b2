"""3-constellations: from the equation to a certified cubic.

Run with ``python demos/constellations.py``.
"""
import time
from importlib import resources

from catalix import SolveOptions, load_dde, run_modular_probe, solve
from catalix.dde import series_at_point
from catalix.mpoly import MonomialOrder

spec = load_dde(resources.files("catalix").joinpath("data", "3const.dde"))
print("P has order", spec.k, "at the point u =", spec.a)
print("first terms of F(t, 1):", series_at_point(spec, 8)[0])

# one prime, one evaluation pass: the partial degrees of the annihilator
probe = run_modular_probe(spec, seed=1)
print(f"probe mod {probe.p}: d_t = {probe.d_t}, d_z0 = {probe.d_z0}")

for method in ("hgp", "elim"):
    start = time.time()
    res = solve(spec, SolveOptions(method=method, certify=True))
    print(f"\n{method} ({time.time() - start:.1f} s)")
    print("  R =", res.R.format(MonomialOrder.lex("z0", "t")))
    print("  certificate:", res.certificate)

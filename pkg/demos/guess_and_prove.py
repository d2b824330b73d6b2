"""Guess an annihilator from series terms, then prove it by a residual check.

Uses the Tutte planar-maps equation, whose generating function at u = 1
satisfies 27 t^2 z^2 - 18 t z + z + 16 t - 1 = 0.
"""
from importlib import resources

from catalix import certify, guess_algebraic, load_dde, run_modular_probe
from catalix.dde import series_at_point
from catalix.guess import residual_valuation
from catalix.mpoly import parse_poly

spec = load_dde(resources.files("catalix").joinpath("data", "tutte.dde"))
probe = run_modular_probe(spec)
dt, dz = probe.d_t, probe.d_z0
print(f"probe degrees: d_t = {dt}, d_z0 = {dz}")

series = series_at_point(spec, 12)[0]
print("series:", series)
R = guess_algebraic(series, dt, dz)
print("guess:", R)

cert = certify(R, spec, "probe", (dt, dz))
print("certificate:", cert)

# a wrong candidate is caught at the first mismatching coefficient
wrong = parse_poly("27*t^2*z0^2 - 18*t*z0 + z0 + 15*t - 1", R.vars)
print("wrong candidate residual valuation:", residual_valuation(wrong, series))

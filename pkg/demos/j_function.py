"""J~ for the momentum symbol on a phase-space square.

Prints a small map of J~(p', q') around a base point, then the peak and the
mean width of the region where J~ stays above half its peak.

Run: python3 demos/j_function.py
"""
import numpy as np

from weyleth.jfunc import JTilde, evaluate_region, jtilde_eval
from weyleth.weylcalc import PhasePolynomial

jt = JTilde.on_cube(PhasePolynomial.p(1, 1), [0.8, 0.0])
xs = np.linspace(-6, 6, 7)
print("      " + " ".join(f"{x:8.1f}" for x in xs))
for y in xs:
    row = jtilde_eval(jt, np.array([[x, y] for x in xs])).real
    print(f"{y:5.1f} " + " ".join(f"{v:8.4f}" for v in row))
ev = evaluate_region(jt, eps=0.5, n_directions=64)
print(f"\npeak {ev.peak:.4f}, mean half-peak width {ev.mean_width:.3f} +- {ev.stderr:.3f}")

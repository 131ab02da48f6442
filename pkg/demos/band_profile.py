"""Off-diagonal band of K_11/Omega in the LMG eigenbasis.

Diagonalizes the three-mode model at a modest Omega, bins |O_ij|^2 by energy
difference around the band centre and prints the profile with its half-width.

Run: python3 demos/band_profile.py [omega]
"""
import sys

import numpy as np

from weyleth.experiments import lmg_run
from weyleth.lmg import load_params
from weyleth.spectral import band_profile, half_width

omega = int(sys.argv[1]) if len(sys.argv) > 1 else 30
run = lmg_run(load_params(omega=omega))
prof = band_profile(run.o_ij, run.spectrum, run.e_mid)
print(f"Omega={omega}  dim={len(run.spectrum.energies)}  E_centre={run.e_mid:.3f}  half-width={half_width(prof):.3f}")
for w, v, n in zip(prof.omega, prof.values, prof.counts):
    if w >= 0 and n and np.isfinite(v):
        bar = "#" * max(0, int(2 * (np.log10(v) + 12)))
        print(f"{w:7.3f} {v:10.3e} {bar}")

"""
Scanning the Fourier criterion
==============================

``C_{B,V}(Y)`` compares one Fourier coefficient with a Gaussian-weighted
sum of all the others.  Potentials for which ``|Y|^{n+1} C_{B,V}(Y)`` is
unbounded have purely absolutely continuous spectrum.  A finite scan can
only collect evidence, so the verdicts below are labels on a radial
envelope rather than statements about the spectrum.
"""

import numpy as np

from landau_bloch import (
    build_lattice,
    cosine_potential,
    growth_verdict,
    lacunary_potential,
    make_flux,
    scan,
)
from landau_bloch.lattice import TWO_PI

lattice = build_lattice((1.0, 0.0), (0.0, 1.0))
flux = make_flux(lattice, 1, 1)  # B = 2 pi

###############################################################################
# A trigonometric polynomial
# --------------------------
# For ``2 cos(2 pi x1)`` the criterion is positive only at the two modes
# themselves; far from the support it is zero.

cos_report = scan(cosine_potential(lattice), flux, n=0, Rmax=60.0)
# the maximum is shared by (1, 0) and (-1, 0); report the later row
i = len(cos_report.weighted) - 1 - int(np.argmax(cos_report.weighted[::-1]))
print("cosine peak", cos_report.indices[i], f"{cos_report.weighted[i]:.6f}",
      f"(expected 2 pi (1 - e^(-2 pi)) = {TWO_PI * (1 - np.exp(-TWO_PI)):.6f})")
print("verdict:", growth_verdict(cos_report).verdict)

###############################################################################
# A lacunary family
# -----------------
# Coefficients ``|Y_j|^{-1/2}`` at ``Y_j = 2 pi (2^j, 0)`` give an envelope
# growing like ``|Y|^{1/2}``.  The scan must reach the last mode.

lac = lacunary_potential(lattice, 6)
report = scan(lac, flux, n=0, Rmax=TWO_PI * 64 + 1)
for j in range(1, 7):
    s = report.shell_of(TWO_PI * 2**j)
    print(f"shell at |Y| = {TWO_PI * 2**j:7.2f}: envelope {report.envelope[s]:.4f}")
verdict = growth_verdict(report)
print("verdict:", verdict.verdict, f"(log-log slope {verdict.slope:.3f})")

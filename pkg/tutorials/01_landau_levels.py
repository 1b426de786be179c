"""
Landau levels in the magnetic Bloch fiber
=========================================

With no potential the fiber matrices are diagonal in the Landau-level
basis.  Every quasimomentum gives the levels ``(2m+1) B``, each repeated
``P`` times.  This script builds that picture from scratch and then turns
on a weak cosine potential to watch the levels broaden into bands.
"""

import numpy as np

from landau_bloch import (
    FourierPotential,
    band_widths,
    build_lattice,
    cosine_potential,
    make_flux,
    sweep,
)

# The unit square lattice at flux 3 per cell gives B = 6 pi.
lattice = build_lattice((1.0, 0.0), (0.0, 1.0))
flux = make_flux(lattice, P=3, Q=1)
print(f"B = {flux.B:.6f}  (6 pi = {6 * np.pi:.6f})")

###############################################################################
# Free fibers
# -----------
# Ten Landau levels on an 8 x 8 grid of quasimomenta.  The maximum deviation
# from the exact levels is at round-off size.

free = sweep(flux, FourierPotential.zero(lattice), M=10, grid=(8, 8))
exact = np.repeat((2 * np.arange(11) + 1) * flux.B, flux.P)
print("max |lambda - (2m+1)B| =", np.max(np.abs(free.eigenvalues - exact)))

###############################################################################
# A periodic potential splits the degeneracy
# ------------------------------------------
# ``V = 0.5 * 2 cos(2 pi x1)`` is small next to the level spacing 2B, so each
# level turns into P narrow bands.

V = cosine_potential(lattice, 1, 0, 0.5)
bands = sweep(flux, V, M=10, grid=(8, 8))
widths = band_widths(bands)
for i in range(6):
    lo, hi, w = widths[i]
    print(f"band {i:2d}: [{lo:9.4f}, {hi:9.4f}]  width {w:.3e}")

"""
Two binding algebras side by side
=================================

Real-valued HRR binds by circular convolution. CHRR stores one angle per
slot and binds by adding angles. This walk-through shows where the two
agree and where they part ways.
"""

import numpy as np

from circular_hrr import chrr, hrr

rng = np.random.default_rng(0)
d = 512

# HRR: bind a role to a filler, then recover the filler with the exact inverse.
role = hrr.project(hrr.sample_gaussian(d, rng))
filler = hrr.sample_gaussian(d, rng)
trace = hrr.bind(role, filler)
recovered = hrr.bind(trace, hrr.invert(role))
print("HRR   sim(recovered, filler) =", round(hrr.similarity(recovered, filler), 9))

# Projection puts every spectral bin on the unit circle ...
print("HRR   spectrum of projected role: min |F| = %.6f, max |F| = %.6f"
      % (np.abs(hrr.dft(role)).min(), np.abs(hrr.dft(role)).max()))

# ... but a sum of two projected vectors falls off it again.
other = hrr.project(hrr.sample_gaussian(d, rng))
mags = np.abs(hrr.dft(hrr.superpose(role, other)))
print("HRR   spectrum of role + other: min |F| = %.3f, max |F| = %.3f" % (mags.min(), mags.max()))

# CHRR: the same story with angles. Binding is addition mod 2*pi and
# inversion is negation, so unbinding is exact up to rounding.
phi = chrr.sample_uniform(d, rng)
theta = chrr.sample_uniform(d, rng)
back = chrr.bind(chrr.bind(phi, theta), chrr.invert(theta))
print("CHRR  sim(recovered, phi) =", chrr.similarity(back, phi))

# Superposition averages phasors and keeps only the angle, so the result
# is again a valid circular vector.
mix = chrr.superpose_many([phi, theta])
print("CHRR  sim(phi + theta, phi) = %.3f, sim(phi + theta, theta) = %.3f"
      % (chrr.similarity(mix, phi), chrr.similarity(mix, theta)))
print("CHRR  every slot of the mix lies in (-pi, pi]:",
      bool(np.all((mix > -np.pi) & (mix <= np.pi))))

"""
Two co-rotating Gaussian vortices
=================================

At leading order each vortex is a Gaussian that drifts in the field of the
other.  The pair turns on a circle at a rate that slows as the cores grow.
Compare with the quadrupole-truncated single-vortex estimate.
"""

import math

import numpy as np

from hermite_vortex import CoreParams, MomentSet, SystemState, VortexState, integrate
from hermite_vortex.reference import rotation_frequency_new, rotation_frequency_quadrupole

lam0, nu = 0.01, 0.01
state = SystemState(0.0, [VortexState((1.0, 0.0), MomentSet.gaussian(0, 1.0)),
                          VortexState((-1.0, 0.0), MomentSet.gaussian(0, 1.0))],
                    CoreParams(lam0, nu))
traj = integrate(state, 100.0, 0.1, sample_every=100)

sep = traj.centers[:, 1] - traj.centers[:, 0]
angle = np.unwrap(np.arctan2(sep[:, 1], sep[:, 0]))
print("t     radius     turns")
for t, s, a in zip(traj.times, sep, angle):
    print("%5.0f  %.10f  %.4f" % (t, np.hypot(*s) / 2, (a - angle[0]) / (2 * math.pi)))

# both frequency curves start from the point-vortex value 1/(4 pi)
t = np.linspace(0.0, 100.0, 11)
new = rotation_frequency_new(1.0, 1.0, np.sqrt(lam0 ** 2 + 4 * nu * t))
old = rotation_frequency_quadrupole(1.0, 1.0, lam0, nu, t)
print("\n1/(4 pi) = %.6f" % (1 / (4 * math.pi)))
print("t      two vortices  quadrupole")
for row in zip(t, new, old):
    print("%5.0f  %.6f      %.6f" % row)

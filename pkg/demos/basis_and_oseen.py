"""
Hermite functions, projections and the Oseen vortex
===================================================

A Gaussian vortex is the (0, 0) Hermite function.  Everything else is a
derivative of it, and projecting back recovers the coefficients.
"""

import numpy as np

from hermite_vortex import CoreParams, MomentSet, SystemState, VortexState, integrate
from hermite_vortex.fields import eval_vorticity, project_moments
from hermite_vortex.hermite_basis import hermite_function, hermite_indices

lam = 0.8
x = np.array([[0.0, 0.0], [0.5, 0.2], [1.0, -1.0]])
for k in [(0, 0), (1, 0), (2, 1)]:
    print(k, hermite_function(k, x, lam))

# build a vortex with a few higher moments and project its field
moments = {(2, 0): 0.1, (1, 1): -0.04, (0, 3): 0.01}
state = SystemState(0.0, [VortexState((0.0, 0.0), MomentSet.gaussian(3, 1.0, moments))],
                    CoreParams(lam))
recovered = project_moments(lambda p: eval_vorticity(state, p), 3, lam)
for k, m in zip(hermite_indices(3), recovered):
    if abs(m) > 1e-12:
        print("M[%d,%d] = %.12f" % (k[0], k[1], m))

# a lone Gaussian is an exact solution: all higher moments stay at zero
# while the core spreads as lambda^2 = lambda0^2 + 4 nu t
oseen = SystemState(0.0, [VortexState((0.0, 0.0), MomentSet.gaussian(4, 1.0))], CoreParams(1.0, 0.02))
traj = integrate(oseen, 10.0, 0.05, sample_every=50)
print("t      lambda    max |M[k]|, k != 0")
for t, lam_t, m in zip(traj.times, traj.lam[:, 0], traj.moments[:, 0]):
    print("%5.1f  %.6f  %.1e" % (t, lam_t, np.abs(m[1:]).max()))

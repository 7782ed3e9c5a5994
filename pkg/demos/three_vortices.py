"""
Three interacting vortices with deforming cores
===============================================

Each vortex carries moments up to second order.  The diagnostics follow
mass, first moments, weighted enstrophy and the share of the top shell.
"""

from hermite_vortex import CoreParams, MomentSet, SystemState, VortexState, integrate
from hermite_vortex.diagnostics import Monitor

core = CoreParams(0.5, 0.01)
state = SystemState(0.0, [
    VortexState((0.0, 0.0), MomentSet.gaussian(2, 1.0, {(2, 0): 0.05})),
    VortexState((2.0, 0.5), MomentSet.gaussian(2, 0.5)),
    VortexState((-1.0, 1.8), MomentSet.gaussian(2, -0.3, {(1, 1): 0.01})),
], core)

mon = Monitor(state)
traj = integrate(state, 10.0, 0.02, sample_every=50, monitor=mon)

print("t     centres")
for t, c in zip(traj.times, traj.centers):
    print("%4.1f  " % t + "  ".join("(%+.4f, %+.4f)" % tuple(x) for x in c))

print("\nt     enstrophy per vortex           tail share          first moments")
for row in mon.rows:
    print("%4.1f  %s  %s  %.1e" % (row.t, " ".join("%.5f" % e for e in row.enstrophy),
                                   " ".join("%.4f" % f for f in row.tail), row.first_moment.max()))
print("impulse drift %.1e" % max(r.impulse_drift for r in mon.rows))

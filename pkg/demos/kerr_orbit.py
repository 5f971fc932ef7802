"""A bound orbit around a Kerr black hole, integrated in the threading frame."""

import math

import numpy as np

from spacethread import catalog_lookup, force3, initial_state, integrate
from spacethread.geodesics import force_identity_residual, integrate_coordinate

kerr = catalog_lookup("kerr", m=1.0, a=0.7)
init = initial_state(kerr, [0.0, 8.0, math.pi / 2 - 0.3, 0.0],
                     dx=[1.0, 0.01, 0.005, 0.044], normalize=True)
print("K =", init.K)

traj = integrate(kerr, init, 50.0, tol=1e-10)
print("status", traj.status, "steps", len(traj.lam) - 1)
print("max K drift    ", np.max(np.abs(traj.k_drift)))
print("max norm drift ", np.max(np.abs(traj.norm_drift)))
print("r range        ", traj.y[:, 1].min(), traj.y[:, 1].max())
print("force identity ", force_identity_residual(kerr, traj))

# the same path from the coordinate geodesic equation
ref = integrate_coordinate(kerr, init.x, init.dx, 50.0, tol=1e-10)
print("position gap at lambda = 50:", np.max(np.abs(traj.y[-1, :4] - ref.y[-1][:4])))

# 3D force along the orbit: orthogonal to the spatial velocity
for st in list(traj.states())[::len(traj.lam) // 4]:
    f = force3(kerr, st)
    print(f"lambda {st.lam:7.3f}  F = {f.f_up}  h(F, v) = {f.orthogonality:.1e}")

# a radial plunge stops where Phi^2 -> 0 (the ergosurface)
plunge = integrate(kerr, initial_state(kerr, [0, 6.0, math.pi / 2, 0], dx=[1, -0.3, 0, 0],
                                       normalize=True), 200.0)
print("plunge:", plunge.status, "at r =", plunge.boundary_point[1])

"""The free energy as a Lyapunov function.

Scan the free energy and its exact descent rate along the line through the
equidistribution (s = 0) and a point of the periodic orbit (s = 1).  Both
endpoints are critical points of the descent (rate 0); strictly between,
the rate is negative; extending past the orbit toward the simplex boundary
it dives toward minus infinity.
"""

import numpy as np

from meanrotor import MINUS_INF, ModelParams, free_energy, free_energy_rate, orbit_segment

for beta in (2.3, 3.0):
    params = ModelParams(beta=beta, q=10)
    print(f"\nbeta = {beta}")
    print("   s        psi          dpsi/dt")
    rows = []
    for s in np.linspace(0.0, 1.04, 27):
        try:
            nu = orbit_segment(params, float(s))
        except ValueError:
            break  # left the simplex
        psi = free_energy(params, nu).value
        rate = free_energy_rate(params, nu)
        rows.append((s, psi, rate))
        shown = "-inf" if rate is MINUS_INF else f"{rate: .6e}"
        print(f"{s:6.3f}  {psi: .8f}  {shown}")

    with open(f"lyapunov_scan_beta{beta}.csv", "w") as fh:
        fh.write("s,psi,dpsi_dt\n")
        for s, psi, rate in rows:
            val = "-inf" if rate is MINUS_INF else f"{rate:.17g}"
            fh.write(f"{s:.17g},{psi:.17g},{val}\n")
    print(f"wrote lyapunov_scan_beta{beta}.csv")

"""The standing wave as an integrator benchmark, and its instability.

The splitting scheme conserves mass to rounding and energy to O(dt^2); halving
dt divides the energy drift by four on a generic below-threshold state. The
sampled ground state rotates in phase while its modulus stays put -- for a
while. The supercritical standing wave is linearly unstable, so discretization
error seeds an exponentially growing core mode (rate ~ 7 here): the modulus
deviation climbs from ~1e-5 through ~1e-3 near t ~ 1.7 and the profile
collapses around t ~ 3. Mass conservation survives the collapse; pointwise
fidelity does not.
"""
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from deltanls import (
    EvolutionConfig,
    GridFunction,
    Params,
    conservation_report,
    evolve,
    make_grid,
)
from deltanls.groundstate import soliton_value

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = 7.0
params = Params(gamma=-1.0, p=p, omega=1.0)
grid = make_grid(40.0, 8193)
q = GridFunction(grid, soliton_value(1.0, -1.0, p, grid.x).astype(complex))

traj = evolve(q, params, EvolutionConfig(dt=1e-3, t_max=4.0, record_every=40))
rep = conservation_report(traj)

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
axes[0].semilogy(traj.times, np.maximum(rep.mass_drift, 1e-18), label="mass drift")
axes[0].semilogy(traj.times, np.maximum(rep.energy_drift, 1e-18), label="energy drift")
axes[0].set_title("relative conservation drift")
axes[0].set_xlabel("t")
axes[0].legend()
axes[1].semilogy(traj.times, np.maximum(traj.modulus_deviation, 1e-18))
axes[1].set_title("modulus deviation from Q: the unstable mode grows")
axes[1].set_xlabel("t")
fig.tight_layout()
fig.savefig(OUT / "standing_wave_conservation.png", dpi=130)
print(f"wrote {OUT / 'standing_wave_conservation.png'}")

i15 = np.searchsorted(traj.times, 1.5)
print(f"over t <= 1.5: mass drift {rep.mass_drift[:i15].max():.2e}, "
      f"energy drift {rep.energy_drift[:i15].max():.2e}, "
      f"modulus deviation {traj.modulus_deviation[:i15].max():.2e}")
print(f"by t = {traj.times[-1]:.2f}: modulus deviation {traj.modulus_deviation[-1]:.2e} "
      f"(verdict: {traj.verdict})")

# second-order energy drift on a genuinely moving state
u0 = 0.8 * q
print("\nStrang order on 0.8 Q (t = 1):")
prev = None
for dt in (8e-3, 4e-3, 2e-3, 1e-3):
    tr = evolve(u0, params, EvolutionConfig(dt=dt, t_max=1.0, record_every=5))
    drift = conservation_report(tr).max_energy_drift
    ratio = "" if prev is None else f"   ratio {prev / drift:.3f}"
    print(f"  dt = {dt:.0e}: max energy drift {drift:.3e}{ratio}")
    prev = drift

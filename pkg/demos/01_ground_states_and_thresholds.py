"""Ground-state profiles and the threshold landscape.

The free soliton is a single sech-power bump. Switching on a repulsive point
interaction (gamma < 0) pushes the profile away from the origin: the ground
state dips at x = 0 and peaks symmetrically on both sides, the more so the
closer omega gets to gamma^2/2, below which no ground state exists at all.

The thresholds follow the same story: the non-radial one never feels the
potential (n = l), while the radial one interpolates between the soliton
action (gamma -> 0) and twice of it (omega -> gamma^2/2, where the optimizing
profile splits into two escaping half-solitons).
"""
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from deltanls import GridFunction, Params, evaluate, make_grid
from deltanls.groundstate import (
    delta_soliton_exists,
    soliton_value,
    threshold_l,
    threshold_r,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = 7.0
x = np.linspace(-6, 6, 1201)

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for gamma in (0.0, -0.5, -1.0, -1.3):
    axes[0].plot(x, soliton_value(1.0, gamma, p, x), label=f"gamma = {gamma}")
axes[0].set_title("ground states at omega = 1 (p = 7)")
axes[0].set_xlabel("x")
axes[0].legend()

omegas = np.linspace(0.05, 3.0, 240)
gamma = -1.0
l_vals = np.array([threshold_l(w, p) for w in omegas])
r_vals = np.array([threshold_r(w, gamma, p) for w in omegas])
axes[1].plot(omegas, l_vals, label="l = n (non-radial)")
axes[1].plot(omegas, r_vals, label="r (radial, gamma = -1)")
axes[1].plot(omegas, 2 * l_vals, "--", label="2 l")
axes[1].axvline(gamma**2 / 2, color="gray", lw=0.8)
axes[1].annotate("omega = gamma^2/2", (gamma**2 / 2, r_vals[-1] * 0.75), rotation=90)
axes[1].set_title("threshold values vs omega")
axes[1].set_xlabel("omega")
axes[1].legend()
fig.tight_layout()
fig.savefig(OUT / "ground_states_and_thresholds.png", dpi=130)
print(f"wrote {OUT / 'ground_states_and_thresholds.png'}")

# the sampled ground state is a discrete critical point: P and I vanish
grid = make_grid(30.0, 16385)
params = Params(gamma=gamma, p=p, omega=1.0)
q = GridFunction(grid, soliton_value(1.0, gamma, p, grid.x).astype(complex))
rep = evaluate(q, params)
print(f"P(Q)  = {rep.virial:+.2e}   (continuum value: 0)")
print(f"I(Q)  = {rep.nehari:+.2e}   (continuum value: 0)")
print(f"S(Q)  = {rep.action:.8f} vs r_omega = {threshold_r(1.0, gamma, p):.8f}")
print(f"delta soliton exists at omega=0.4, gamma=-1: {delta_soliton_exists(0.4, gamma)}")
print(f"  there r = 2l: {threshold_r(0.4, gamma, p):.6f} = {2 * threshold_l(0.4, p):.6f}")

"""Where initial data lands: scattering side, blow-up side, or above threshold.

Scaling the ground state traces the classic picture: below lambda = 1 the data
sits under the threshold with positive virial functional (scattering side),
above it the virial flips negative (blow-up side). Between the non-radial and
radial thresholds there is a window where only the radial classification has
anything to say.

The frequency-free criterion needs no omega at all; it agrees with the
fixed-frequency verdict evaluated at the optimal frequency, sample by sample.
"""
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from deltanls import (
    GridFunction,
    Params,
    classify_fixed_omega,
    classify_frequency_free,
    evaluate,
    make_grid,
    optimal_omega,
)
from deltanls.groundstate import free_state_constants, soliton_value, threshold_r

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = 7.0
params = Params(gamma=-1.0, p=p, omega=1.0)
grid = make_grid(30.0, 4097)
q = GridFunction(grid, soliton_value(1.0, -1.0, p, grid.x).astype(complex))

lams = np.linspace(0.3, 1.5, 61)
actions, virials, regions = [], [], []
for lam in lams:
    res = classify_fixed_omega(lam * q, params, radial=True)
    actions.append(res.value)
    virials.append(res.p_value)
    regions.append(res.region)

fig, ax = plt.subplots(figsize=(7, 4.5))
colors = {"scatter_plus": "tab:blue", "blowup_minus": "tab:red",
          "above_threshold": "tab:gray"}
ax.scatter(lams, actions, c=[colors[r] for r in regions], s=18)
ax.axhline(threshold_r(1.0, -1.0, p), color="k", lw=0.8, label="radial threshold")
ax.set_xlabel("lambda (scaling of the ground state)")
ax.set_ylabel("action at omega = 1")
ax.set_title("radial classification along the soliton ray")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "classification_sweep.png", dpi=130)
print(f"wrote {OUT / 'classification_sweep.png'}")

flip = next(i for i in range(len(regions) - 1) if regions[i] != regions[i + 1])
print(f"verdict flips between lambda = {lams[flip]:.3f} and {lams[flip + 1]:.3f}")

# the window between the thresholds: radial-only classification
w = classify_fixed_omega(0.7 * q, params, radial=False)
r = classify_fixed_omega(0.7 * q, params, radial=True)
print(f"0.7 Q: non-radial says {w.region}, radial says {r.region}")

# frequency-free vs fixed-omega at the optimal frequency
rng = np.random.default_rng(42)
consts = free_state_constants(p)
agree = total = 0
for _ in range(40):
    env = np.exp(-((grid.x - rng.uniform(-4, 4)) ** 2) / rng.uniform(1.5, 6.0))
    osc = np.exp(1j * rng.uniform(-1.5, 1.5) * grid.x)
    f = GridFunction(grid, rng.uniform(0.05, 0.35) * env * osc)
    rep = evaluate(f, params)
    f = float(np.sqrt(consts["mass"] / rep.mass)) * f
    ff = classify_frequency_free(f, params)
    if ff.region == "above_threshold":
        continue
    fo = classify_fixed_omega(f, params.with_omega(optimal_omega(f, params)))
    total += 1
    agree += fo.region == ff.region
print(f"frequency-free vs fixed-omega agreement: {agree}/{total}")

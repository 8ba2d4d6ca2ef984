#!/usr/bin/env python3
"""The two nominal desk-scale scenarios on the surrogate half-quadrotor.

Two rotors drive an azimuth-rate channel (rad/s) and a pitch-angle channel
(rad) with cross-coupling, friction, gravity, and gyroscopic terms, behind
a +-10 V offset / +-24 V saturation actuator map.  Both channels run the
reference gains (alpha1=0.001, kp1=0.5, alpha2=5, kp2=500) at 10 ms updates:
scenario1 tracks smoothed steps, scenario2 steps plus two sinusoids.
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from mfctrl import export_csv, load_config, reference_range, run_scenario, tracking_rmse

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

for name in ("scenario1", "scenario2"):
    cfg = load_config(name)
    rec = run_scenario(cfg)
    print(f"\n{name}: {len(rec)} ticks of {cfg.dt_control * 1e3:.0f} ms")
    for i, label in ((1, "azimuth rate"), (2, "pitch angle")):
        rmse = tracking_rmse(rec, i, 2.0, None)
        rng = reference_range(rec, i)
        print(f"  {label}: RMSE {rmse:.5f} = {100 * rmse / rng:.2f}% of range, "
              f"saturated {100 * rec.summary[f'saturation_fraction{i}']:.1f}% of ticks")
    export_csv(rec, os.path.join(OUT, f"{name}.csv"))

    fig, axes = plt.subplots(3, 1, figsize=(9, 8), sharex=True)
    for ax, i, label in ((axes[0], 1, "azimuth rate [rad/s]"), (axes[1], 2, "pitch [rad]")):
        ax.plot(rec.t, rec.channel(i, "y_star"), "k--", lw=1.2, label="reference")
        ax.plot(rec.t, rec.channel(i, "y"), "C0", lw=0.9, label="output")
        ax.set_ylabel(label)
        ax.legend(loc="lower right")
    axes[2].plot(rec.t, rec.channel(1, "v"), "C2", lw=0.6, label="v1 [V]")
    axes[2].plot(rec.t, rec.channel(2, "v"), "C3", lw=0.6, label="v2 [V]")
    axes[2].set_ylabel("motor volts"); axes[2].set_xlabel("t [s]")
    axes[2].legend(loc="lower right")
    axes[0].set_title(f"{name}: tracking with fixed gains, no plant model")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, f"03_{name}.png"), dpi=120)
    print(f"  wrote {OUT}/03_{name}.png and {name}.csv")

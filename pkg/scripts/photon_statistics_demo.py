#!/usr/bin/env python3
"""Bunching/antibunching showcase: thermal, coherent and single-photon light.

Runs the regression correlator for the three canonical photon statistics and
prints the classification each series receives.
"""

import numpy as np

from twotime.analysis import classify
from twotime.correlators import InitialState, SystemSpec, g2_regression
from twotime.dynamics import DampingChannel, QuadraticHamiltonian
from twotime.hilbert import FockCutoff

H = QuadraticHamiltonian(omega=1.0)
CASES = {
    "thermal (nbar = 0.5, steady state)": SystemSpec(
        H, DampingChannel(kappa=1.0, n_thermal=0.5), InitialState.thermal(0.5),
        FockCutoff(25), t_prepare=20.0),
    "coherent (alpha0 = 1, closed)": SystemSpec(
        H, DampingChannel(), InitialState.coherent(1.0), FockCutoff(30)),
    "single photon (|1>, damped)": SystemSpec(
        H, DampingChannel(kappa=1.0), InitialState.fock(1), FockCutoff(10)),
}


def main():
    taus = np.linspace(0, 5, 20)
    for label, sys_spec in CASES.items():
        series = g2_regression(sys_spec, taus)
        rep = classify(series)
        tc = f", critical time {rep.critical_time:.3g}" if rep.critical_time else ""
        print(f"{label}")
        print(f"  g2(0) = {rep.g2_zero:.6g} ({rep.classification_zero}), "
              f"{rep.bunching}{tc}")
        print(f"  g2 at tau = {taus[1]:.3g}, {taus[5]:.3g}, {taus[-1]:.3g}: "
              f"{series.g2[1]:.4f}, {series.g2[5]:.4f}, {series.g2[-1]:.4f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Cross-validate the three phase-space routes against the regression oracle.

Prints a per-scenario, per-method table of max pointwise deviations of the
unnormalized correlator g(tau) = <adag(t+tau) a(t)> over a tau grid.
"""

import argparse

import numpy as np

from twotime.correlators import InitialState, SystemSpec, unnormalized_g
from twotime.dynamics import DampingChannel, QuadraticHamiltonian
from twotime.hilbert import FockCutoff
from twotime.phasespace import _g_raw
from twotime.quadrature import IntegrationConfig

SCENARIOS = {
    "harmonic+coherent": (QuadraticHamiltonian(omega=1.0), 1.0, 0.0, 2 * np.pi),
    "driven+vacuum": (QuadraticHamiltonian(omega=1.0, eta=0.5), 0.0, 1.0, 2.0),
    "squeezed+vacuum": (QuadraticHamiltonian(omega=1.0, xi=0.2), 0.0, 1.0, 1.0),
}
METHODS = ("propagator", "qfunction_two_variable", "qfunction_derivative")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--nodes", type=int, default=24)
    ap.add_argument("--cutoff", type=int, default=40)
    args = ap.parse_args()

    cfg = IntegrationConfig(nodes_per_axis=args.nodes)
    print(f"{'scenario':22s} {'method':26s} max |dev|")
    for label, (H, alpha0, t_prep, horizon) in SCENARIOS.items():
        sys_spec = SystemSpec(H, DampingChannel(), InitialState.coherent(alpha0),
                              FockCutoff(args.cutoff), t_prepare=t_prep)
        taus = np.linspace(0, horizon, args.points)
        oracle = np.array([unnormalized_g(sys_spec, float(t)) for t in taus])
        for method in METHODS:
            vals = np.array([
                _g_raw(sys_spec, t_prep, float(t), method, cfg, 12)[0] for t in taus
            ])
            print(f"{label:22s} {method:26s} {np.max(np.abs(vals - oracle)):.3e}")


if __name__ == "__main__":
    main()

"""Compare measured crossover scales with the asymptote-intersection constants.

For the velocity cutoff, the quadratic regime 4 n_max dx^2 / (pi L tau) meets
the linear regime 4 dx / L^2 at dx = pi tau / (n_max L) = 2 pi hbar / (m c).
For a spectrum truncated at m*, the two regimes meet at pi / m*.
"""
import math

import numpy as np

from boxfractal.fractal_analysis import StructureFunction, crossover_scale, log_scales
from boxfractal.propagators import KernelParams
from boxfractal.relativistic import RelativisticParams, compton_crossover_experiment


def compton_table(cs=(50.0, 100.0, 200.0, 500.0, 1000.0)):
    print("c        knee/lambda_C   intersection/lambda_C   (asymptotic 2 pi = %.3f)" % (2 * math.pi))
    p = KernelParams()
    for c in cs:
        rel = RelativisticParams(c)
        lam = rel.compton_wavelength
        k, _ = compton_crossover_experiment(p, rel, 1.0, log_scales(lam / 30, min(100 * lam, 0.5), 48))
        print(f"{c:7.0f}  {k.scale / lam:12.3f}   {k.intersection / lam:12.3f}")


def truncated_table(mstars=(100, 300, 1000, 3000)):
    print("m*       knee*m*/pi")
    for ms in mstars:
        m = np.arange(1, ms + 1)
        d = log_scales(0.01 / ms, 300 / ms, 48)
        S = np.array([4 * np.sum(m**-2.0 * np.sin(m * x / 2) ** 2) for x in d])
        k = crossover_scale(StructureFunction(d, S, np.ones(d.size)))
        print(f"{ms:7d}  {k.scale * ms / math.pi:8.3f}")


if __name__ == "__main__":
    compton_table()
    truncated_table()

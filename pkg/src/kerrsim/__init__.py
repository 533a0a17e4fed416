"""Simulation toolkit for the coherently driven, dissipative Kerr oscillator.

Four solution routes over one shared model:

- `semiclassical`: steady-state branch analysis and Euler / Euler-Maruyama
  propagation of the mean-field equation.
- `exact_steady`: closed-form quantum steady state via generalized
  hypergeometric series.
- `lindblad`: dense truncated-Fock master equation, the brute-force
  reference everything else is validated against.
- `tebd`: matrix-product-state evolution of the oscillator coupled to its
  bath mapped onto a nearest-neighbour chain.

Plus `spectra` (quadrature fluctuation spectra, analytic and numeric),
`wigner` (phase-space maps), and `cli` (figure-reproduction runner).
"""

from . import chain_map, cli, errors, exact_steady, lindblad, model, semiclassical, spectra, tebd, wigner
from .model import BathSpec, InitialState, KerrParams

__all__ = [
    "BathSpec",
    "InitialState",
    "KerrParams",
    "chain_map",
    "cli",
    "errors",
    "exact_steady",
    "lindblad",
    "model",
    "semiclassical",
    "spectra",
    "tebd",
    "wigner",
]

__version__ = "0.1.0"

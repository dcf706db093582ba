"""Entangled quantum sensors that identify which-path information in one shot.

Subsystems, roughly bottom-up:

- ``rng``      counter-based uniform streams (reproducible, order-independent)
- ``qcore``    dense statevectors, collective Z rotations, measurement sampling
- ``trajset``  trajectory families (symmetric, cyclic windows, custom)
- ``simplex``  exact rational phase-1 simplex for feasibility questions
- ``solver``   sensing-state construction, closed-form and LP routes
- ``discrim``  optimal discrimination, failure curves, repetition analysis
- ``beam``     four-atom beam-crossing scenario, entangled vs unentangled
- ``qec``      error-channel recoverability and stabilizer/transversality checks
- ``cli``      command-line front end over the above
"""

__version__ = "0.1.0"

__all__ = [
    "rng",
    "qcore",
    "trajset",
    "simplex",
    "solver",
    "discrim",
    "beam",
    "qec",
    "cli",
]

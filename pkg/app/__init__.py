"""Stake share lab: Pólya-urn simulations and exact oracles for proof-of-stake rewards.

Subpackages follow the pipeline: ``schedule`` defines reward rules, ``urn``
simulates the finite urn, ``moments`` and ``limits`` provide the analytic
oracles, ``population`` and ``dilution`` cover infinite and dynamical
populations, and ``lab`` wires everything into figures and acceptance checks.
"""

__version__ = "1.0.0"

__all__ = ["__version__"]

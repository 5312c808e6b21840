"""Deterministic steering-law swarm simulations (mutual motion camouflage and
topological velocity alignment) with analytic invariant checks."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"

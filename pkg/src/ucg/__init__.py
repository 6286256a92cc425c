"""Exact solvers for cooperative games under uncertainty.

Modules:

``ucg.lp``           exact rational simplex and lexicographic minimax
``ucg.tu``           deterministic TU games: core, balancedness, nucleolus
``ucg.uncertainty``  discrete distributions, capacities, belief functions, Choquet
``ucg.chance``       chance-constrained games and quantile-preference games
``ucg.state``        state-of-nature games and the Weak Sequential Core
``ucg.bel``          games over possible worlds with belief-function priors
``ucg.cli``          the ``ucg`` command
"""

from .errors import CapabilityError, InputError, UcgError, UnboundedError

__version__ = "0.1.0"

__all__ = ["CapabilityError", "InputError", "UcgError", "UnboundedError", "__version__"]

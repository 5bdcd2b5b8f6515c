"""Relativistic Landau collision kernel algebra and particle simulation.

Subpackages:

* ``kernel``     -- exact kinematic scalars and kernel matrices (Phi, Sigma, B, ...)
* ``estimates``  -- region splitting, Psi/Theta calculus, pointwise-bound surveys
* ``gronwall``   -- the generalized log-Lipschitz Gronwall comparison
* ``transport``  -- particle ensembles, Juttner sampling, exact Wasserstein-2
* ``sde``        -- interacting-particle discretization of the stochastic representation
* ``cli``        -- command line orchestration
"""

from rellandau.kernel import SingularPair

__all__ = ["SingularPair"]
__version__ = "0.1.0"

"""
netlasso - network Lasso recovery of clustered graph signals

Recovers piecewise-constant graph signals from few noisy node samples by solving
the network Lasso, and certifies through network-flow feasibility when a sampling
set guarantees accurate recovery.

License: GPL-3.0-or-later
Version: 1.0.0
"""

__version__ = "1.0.0"
__license__ = "GPL-3.0-or-later"

__all__ = ["__version__", "__license__"]

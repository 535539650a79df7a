"""Behavioral repertoire imitation learning toolkit.

Thin wrapper over the C++ core: demonstration store, behavioral
descriptors and PCA, DBSCAN clustering, the behavior-conditioned
policy network, the microbuild environment, and UCB1 adaptation.
"""

from ._bril import *  # noqa: F401,F403
from ._bril import __version__  # noqa: F401

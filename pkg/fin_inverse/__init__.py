"""
fin-inverse
Conductivity reconstruction for a 2-D cooling fin from boundary temperatures,
using a Metropolis-Hastings chain with smoothness, slope and flatness priors.
"""

__version__ = "0.1.0"

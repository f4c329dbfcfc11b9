"""Single-qudit VQC classifier with a quantum-autoencoder embedding."""

from ._quditml import *  # noqa: F401,F403
from ._quditml import __doc__  # noqa: F401

__version__ = "0.1.0"

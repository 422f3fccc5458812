"""Hierarchical sequence-to-sequences autoencoder with latent-space pattern
completion. Thin wrapper over the compiled core."""

try:
    from ._hs2s import *  # noqa: F401,F403  (installed layout)
except ImportError:  # build-tree layout: _hs2s.so on PYTHONPATH
    from _hs2s import *  # noqa: F401,F403

__version__ = "0.1.0"

"""Photoassociation spectra between trapped atom pairs and ultralong-range
molecular levels: trap-pair states, near-threshold vibrational levels of a
-C3/R^3 potential, Franck-Condon factors and spontaneous linewidths."""

__version__ = "0.1.0"

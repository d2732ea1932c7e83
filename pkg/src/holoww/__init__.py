"""Pseudospectral simulator and analysis toolkit for 2D gravity water waves
in holomorphic (conformal) coordinates, with paradifferential normal forms,
scale-graded control norms, an elliptic/hyperbolic phase-space decomposition,
and wave-packet extraction of the long-time asymptotic profile."""

__version__ = "0.1.0"

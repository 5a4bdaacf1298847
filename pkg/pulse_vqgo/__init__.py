"""Pulse VQGO - pulse-level transmon simulation and variational gate optimization"""

__version__ = "1.0.0"
__author__ = "Pulse VQGO Team"

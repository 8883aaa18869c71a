"""Encode finite oracle sets into fields, S-integer rings and torsion-free
abelian groups, and recover them from scrambled black-box presentations."""

__version__ = "0.1.0"

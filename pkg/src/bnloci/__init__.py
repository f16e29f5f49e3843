"""Exact-rational Brill-Noether calculus.

Subpackages:

- exactq: rationals, quadratics, piecewise-affine functions
- bncore: expected-dimension numbers and Serre duality
- regions: slope-plane membership tables for the two nonemptiness regions
- oracle: certified nonemptiness decisions
- construct: product/kernel constructions and the composite boundary
- cli: command line entry point
"""

from __future__ import annotations

__version__ = "0.1.0"

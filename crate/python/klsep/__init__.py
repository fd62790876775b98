"""Kazhdan-Lusztig bases, W-graphs and separated elements.

Thin Python veneer over the compiled `_native` module. Elements are letter
words ("e", "st", "suvtvsu"); polynomials come back as display strings.
"""

from klsep._native import Basis, Group, fiber, torsion_d4, __version__

__all__ = ["Basis", "Group", "fiber", "torsion_d4", "__version__"]

"""Exact computation with compact subgroups of the torus and their duals."""

from .exactnum import TorusPoint, circle_dist, torus_dist
from .finabelian import FgAbelian, FinAbelian
from .lattice import Lattice, hnf, snf
from .multitab import EqSystem, FiniteGroupTable, PartialTable
from .torusgrp import FiniteQuotientMap, TorusSubgroup

__version__ = "0.1.0"

__all__ = [
    "EqSystem",
    "FgAbelian",
    "FinAbelian",
    "FiniteGroupTable",
    "FiniteQuotientMap",
    "Lattice",
    "PartialTable",
    "TorusPoint",
    "TorusSubgroup",
    "circle_dist",
    "hnf",
    "snf",
    "torus_dist",
]

"""Groebner bases in Weyl algebras and algorithms for D-module functors."""

from .ring import RingSpec, Operator, multiply, dehomogenize, homogenize_F, homogenize_h, \
    multi_homogenize, order_of, total_degree
from .text import parse, render

__all__ = ["RingSpec", "Operator", "multiply", "dehomogenize", "homogenize_F", "homogenize_h",
           "multi_homogenize", "order_of", "total_degree", "parse", "render"]

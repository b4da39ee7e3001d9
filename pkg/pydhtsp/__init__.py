# -*- coding: utf-8 -*-
"""A primal-dual 2-approximation for the two-depot heterogeneous TSP."""


__version__ = "0.1.0"

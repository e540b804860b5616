"""Combinatorics and random geometry of cubic planar graphs at desk scale.

The package is organised around the pipeline

    exact counts  ->  power series  ->  random samplers  ->  maps & metrics,

with every sampler validated against exact enumeration before it is trusted.
"""

__version__ = "0.1.0"

from cubiclab.counts import (  # noqa: F401
    count_quasi_simple,
    count_simple_polygon,
    count_simple_sphere,
    kappa,
    partition_function_Z,
    theta,
)

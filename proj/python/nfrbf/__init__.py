"""Neural fields on flat domains and closed surfaces with RBF quadrature.

Arrays go in and out as NumPy arrays: points are (n, 2) or (n, 3) float arrays and
triangles are (m, 3) integer arrays.
"""

from ._core import (
    DegenerateGeometry,
    Error,
    InvalidInput,
    NumericalError,
    cyclide_mesh,
    delaunay,
    deformed_sphere_mesh,
    exact_integral,
    firing_rate,
    fit_rate,
    flat_weights,
    integrate_ab5,
    manufactured_error,
    read_mesh,
    simulate,
    sphere_mesh,
    square_nodes,
    surface_weights,
    test_function,
    torus_mesh,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateGeometry",
    "Error",
    "InvalidInput",
    "NumericalError",
    "cyclide_mesh",
    "delaunay",
    "deformed_sphere_mesh",
    "exact_integral",
    "firing_rate",
    "fit_rate",
    "flat_weights",
    "integrate_ab5",
    "manufactured_error",
    "read_mesh",
    "simulate",
    "sphere_mesh",
    "square_nodes",
    "surface_weights",
    "test_function",
    "torus_mesh",
]

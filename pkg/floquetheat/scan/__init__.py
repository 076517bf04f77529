"""Parameter scans over named grid axes.

A kernel taking scalar keyword arguments is looped over a :class:`Grid` by composing
:class:`ForAll` steps, and each step may run its points in a process pool:

>>> from floquetheat.scan import ForAll, Grid, compose
>>> grid = Grid(gamma0=[1.0, 2.0], temperature=[0.5])
>>> compose(lambda gamma0, temperature: gamma0 * temperature, ForAll("gamma0", "temperature"))(grid)
[[0.5], [1.0]]
"""

from floquetheat.scan.for_all import ForAll, ScanError, compose, pool_vmap, python_vmap
from floquetheat.scan.grid import Grid

__all__ = ["ForAll", "Grid", "ScanError", "compose", "pool_vmap", "python_vmap"]

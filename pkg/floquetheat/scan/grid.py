""":class:`Grid`, the named axes of a parameter scan."""

import itertools
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

import numpy as np


class Grid(Mapping):
    """An ordered mapping from axis names to 1-D sequences of values.

    >>> grid = Grid({"gamma0": [1e-6, 1e-5], "temperature": [0.05, 0.1, 0.2]})
    >>> grid.dimensions
    ('gamma0', 'temperature')
    >>> grid.shape
    (2, 3)
    >>> grid.remove_dimension("gamma0")
    Grid({'temperature': (0.05, 0.1, 0.2)})

    Values are stored as tuples of Python numbers, so results computed from them compare
    and print the same way in every process.
    """

    def __init__(self, axes: Mapping[str, Sequence] = (), **more_axes: Sequence):
        self._axes: Dict[str, Tuple] = {}
        for name, values in itertools.chain(dict(axes).items(), more_axes.items()):
            values = np.asarray(values)
            if values.ndim != 1 or values.size == 0:
                raise ValueError(
                    f"Grid axis {name!r} must be a non-empty 1-D sequence, got shape {values.shape}."
                )
            self._axes[name] = tuple(values.tolist())

    @property
    def dimensions(self) -> Tuple[str, ...]:
        return tuple(self._axes)

    def has_dimension(self, *dimensions: str) -> bool:
        """Return True if the grid has all the given dimensions.

        >>> Grid(x=[1, 2]).has_dimension("x", "y")
        False
        """
        return all(d in self._axes for d in dimensions)

    def remove_dimension(self, dimensions: Union[str, Iterable[str]]) -> "Grid":
        "Return a copy without the given dimension(s)."
        if isinstance(dimensions, str):
            dimensions = [dimensions]
        dimensions = set(dimensions)
        return Grid({k: v for k, v in self._axes.items() if k not in dimensions})

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(v) for v in self._axes.values())

    @property
    def size(self) -> int:
        "The number of grid points."
        return int(np.prod(self.shape, dtype=int))

    def points(self) -> Iterator[Dict[str, float]]:
        """Yield every grid point as a dict, the last axis varying fastest.

        >>> list(Grid(x=[1, 2], y=[3]).points())
        [{'x': 1, 'y': 3}, {'x': 2, 'y': 3}]
        """
        for values in itertools.product(*self._axes.values()):
            yield dict(zip(self._axes, values))

    def __getitem__(self, dimension: str) -> Tuple:
        return self._axes[dimension]

    def __iter__(self):
        return iter(self._axes)

    def __len__(self) -> int:
        return len(self._axes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return list(self._axes.items()) == list(other._axes.items())

    __hash__ = None

    def __repr__(self) -> str:
        return f"Grid({self._axes})"


if __name__ == "__main__":
    import doctest

    doctest.testmod()

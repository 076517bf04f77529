""":class:`ForAll` transforms a function of scalar parameters such that it runs over
every point of a :class:`~floquetheat.scan.grid.Grid`, sequentially or in a pool of
worker processes."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from floquetheat.errors import FloquetHeatError
from floquetheat.scan.grid import Grid

log = logging.getLogger(__name__)

T_vmap = Callable[[Callable[[dict], Any], Sequence[dict]], List[Any]]


def compose(x, *wrapping_functions):
    """Apply each function in ``wrapping_functions`` to ``x``, left to right.

    >>> f = lambda x: x+1
    >>> g = lambda x: x*2
    >>> h = lambda x: x**2
    >>> compose(1, f, g, h)  # ((1 + 1) * 2) ** 2 = 16
    16

    This is the same as ``h(g(f(1)))``, but reads in the order of evaluation. It is how
    looped functions are built up from :class:`ForAll` steps.
    """
    for wrap in wrapping_functions:
        x = wrap(x)
    return x


def get_fn_name(f) -> str:
    if hasattr(f, "__qualname__"):
        return f.__qualname__
    if hasattr(f, "__name__"):
        return f.__name__
    return repr(f)


@dataclass
class ScanError(FloquetHeatError):
    """An error raised by the kernel at one point of a scan.

    It names the kernel and the grid point, and keeps the original exception."""

    original_exception: Exception
    point: Dict[str, Any]
    step: str

    def __post_init__(self):
        super().__init__(
            f"{self.step} failed at {self.point}: {self.original_exception!r}"
        )

    def __reduce__(self):
        return ScanError, (self.original_exception, self.point, self.step)

    __hash__ = Exception.__hash__


def python_vmap(f: Callable[[dict], Any], items: Sequence[dict]) -> List[Any]:
    "Call ``f`` on every item, in order, with a plain loop."
    return [f(item) for item in items]


@dataclass(frozen=True)
class pool_vmap:
    """Call ``f`` on every item in a pool of ``workers`` processes, keeping the order of
    ``items``.

    ``f`` and the items must be picklable; the loops built by :class:`ForAll` are as
    long as their kernel is. With ``progress`` a :mod:`tqdm` bar counts finished points.
    """

    workers: Optional[int] = None
    progress: bool = False
    desc: Optional[str] = None

    def __call__(self, f: Callable[[dict], Any], items: Sequence[dict]) -> List[Any]:
        bar = dict(total=len(items), desc=self.desc, disable=not self.progress)
        if self.workers == 1 or len(items) == 1:
            return [f(item) for item in tqdm(items, **bar)]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            return list(tqdm(pool.map(f, items), **bar))


@dataclass
class _Point:
    "Call the kernel on one grid point and wrap its errors in :class:`ScanError`."

    kernel: Callable

    def __call__(self, kwargs: dict):
        try:
            return self.kernel(**kwargs)
        except ScanError:
            raise
        except Exception as e:
            raise ScanError(e, dict(kwargs), get_fn_name(self.kernel)) from e


@dataclass
class _Inner:
    "Run the loops below ``depth`` for one value of the axis at ``depth - 1``."

    looped: "_Looped"
    depth: int
    grid: Grid

    def __call__(self, kwargs: dict):
        return self.looped.loop(self.depth, self.grid, kwargs)


@dataclass
class _Looped:
    """A kernel looped over the named axes of a grid, the first axis outermost.

    Calling it with a grid returns nested lists indexed like ``result[i][j]...`` in the
    order of :attr:`dimensions`. Axes of the grid that are not looped over are passed to
    the kernel whole, and extra keyword arguments are passed through unchanged."""

    kernel: Callable
    dimensions: Sequence[str]
    vmap_impls: Sequence[Optional[T_vmap]]

    def loop(self, depth: int, grid: Grid, kwargs: dict):
        dimension = self.dimensions[depth]
        vmap_impl = self.vmap_impls[depth] or python_vmap
        items = [{**kwargs, dimension: value} for value in grid[dimension]]
        if depth == len(self.dimensions) - 1:
            return vmap_impl(_Point(self.kernel), items)
        return vmap_impl(_Inner(self, depth + 1, grid), items)

    def __call__(self, grid: Grid, **kwargs):
        for dimension in self.dimensions:
            if not grid.has_dimension(dimension):
                raise ValueError(f"Grid does not contain the dimension {dimension}.")
        rest = grid.remove_dimension(self.dimensions)
        log.debug("Scanning %s over %d points.", get_fn_name(self.kernel), grid.size)
        return self.loop(0, grid, {**rest, **kwargs})

    def __repr__(self) -> str:
        loops = ", ".join(repr(d) for d in self.dimensions)
        return f"ForAll({loops})({get_fn_name(self.kernel)})"


class ForAll:
    """Loop a function of scalar parameters over named grid axes.

    >>> f = lambda x, y: x + y
    >>> grid = Grid({"x": range(2), "y": range(3)})

    Transform f to run on the grid defined by the "x" and "y" axes:

    >>> looped = compose(f, ForAll("y"), ForAll("x"))
    >>> looped(grid)
    [[0, 1, 2], [1, 2, 3]]

    Several axes can be given at once. Note that the order of the axes in
    ``ForAll("y"), ForAll("x")`` and ``ForAll("x", "y")`` is reversed:

    >>> compose(f, ForAll("x", "y"))(grid)  # Same as above
    [[0, 1, 2], [1, 2, 3]]
    """

    def __init__(
        self,
        dimension: str,
        *additional_dimensions: str,
        vmap_impl: Optional[T_vmap] = None,
    ):
        self.dimensions = [dimension, *additional_dimensions]
        self.vmap_impl = vmap_impl

    def __call__(self, f: Callable) -> _Looped:
        impls = [self.vmap_impl] * len(self.dimensions)
        if isinstance(f, _Looped):
            return _Looped(
                f.kernel, [*self.dimensions, *f.dimensions], [*impls, *f.vmap_impls]
            )
        return _Looped(f, list(self.dimensions), impls)

    def __repr__(self) -> str:
        dimensions_str = ", ".join([repr(dim) for dim in self.dimensions])
        return f"ForAll({dimensions_str})"


if __name__ == "__main__":
    import doctest

    doctest.testmod()

"""Point sets in the half-open unit cube [0, 1)^d.

Coordinates are stored row-major: point ``j`` is ``coords[j]``.  The
half-open convention matches the anchored counting boxes [0, t) used by
the discrepancy modules, so a coordinate equal to 1.0 is rejected on
construction and on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# First 16 primes: Halton bases for up to 16 axes.
_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


@dataclass(frozen=True)
class PointSet:
    """Immutable array of n_points points in [0, 1)^dim."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("coords must have shape (n_points, dim)")
        if arr.shape[1] < 1:
            raise ValueError("dim must be at least 1")
        if arr.size:
            if not np.isfinite(arr).all():
                raise ValueError("coordinates must be finite")
            if (arr < 0.0).any() or (arr >= 1.0).any():
                raise ValueError("coordinates must lie in the half-open cube [0, 1)")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


def empty_pointset(dim: int) -> PointSet:
    """The N = 0 point set in dimension ``dim``."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    return PointSet(np.empty((0, dim)))


def generate_uniform(n: int, dim: int, seed: int) -> PointSet:
    """n i.i.d. uniform points from a fixed 64-bit generator (PCG64).

    The same (n, dim, seed) always yields bit-identical coordinates, so
    seeded fixtures are reproducible across runs and platforms.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return PointSet(rng.random((n, dim)))


def _radical_inverse(index: int, base: int) -> float:
    f = 1.0
    r = 0.0
    while index > 0:
        f /= base
        r += f * (index % base)
        index //= base
    return r


def generate_halton(n: int, dim: int) -> PointSet:
    """First n Halton points (prime bases, index starting at 1).

    Axis i uses the i-th prime, so the first point in d = 1 is 1/2 and
    the base-2 axis runs 1/2, 1/4, 3/4, 1/8, ...  Supports dim <= 16.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 1 <= dim <= len(_HALTON_PRIMES):
        raise ValueError(f"halton generator supports 1 <= dim <= {len(_HALTON_PRIMES)}")
    pts = np.empty((n, dim))
    for j in range(n):
        for i in range(dim):
            pts[j, i] = _radical_inverse(j + 1, _HALTON_PRIMES[i])
    return PointSet(pts)


def save_pointset(ps: PointSet) -> str:
    """CSV text, one point per line, full round-trip precision."""
    lines = [",".join(repr(float(c)) for c in row) for row in ps.coords]
    return "".join(line + "\n" for line in lines)


def load_pointset(text: str, dim: int | None = None) -> PointSet:
    """Parse CSV text produced by save_pointset.

    An empty file is the empty point set; its dimension cannot be
    inferred, so ``dim`` is required in that case.  Rejects malformed
    lines, coordinates outside [0, 1), and inconsistent row lengths.
    """
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: malformed coordinate") from exc
        if rows and len(row) != len(rows[0]):
            raise ValueError(f"line {lineno}: inconsistent dimension")
        rows.append(row)
    if not rows:
        if dim is None:
            raise ValueError("empty input: dimension must be supplied")
        return empty_pointset(dim)
    if dim is not None and dim != len(rows[0]):
        raise ValueError(f"declared dim {dim} does not match rows of length {len(rows[0])}")
    return PointSet(np.array(rows))


def pointset_to_json(ps: PointSet) -> str:
    """JSON export: {"dim": d, "points": [[...], ...]} at full precision."""
    return json.dumps({"dim": ps.dim, "points": ps.coords.tolist()})


def pointset_from_json(text: str) -> PointSet:
    obj = json.loads(text)
    dim = int(obj["dim"])
    pts = obj["points"]
    if not pts:
        return empty_pointset(dim)
    arr = np.array(pts, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError("points do not match declared dim")
    return PointSet(arr)

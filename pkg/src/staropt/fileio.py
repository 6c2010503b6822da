"""On-disk formats: generating vectors as JSON, point sets as text.

A vector file stores the dimension, the prime bases, and one full digit
permutation per base (leading 0 included).  A point file is a plain text
table with a `# n d` header and one `%.17g` row per point, so values
round-trip exactly through the decimal form.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .sequence import GeneratingVector, Permutation, PointSet, first_primes

POINT_FORMAT = "%.17g"


class FileFormatError(ValueError):
    """A file exists but its contents do not match the expected format."""


def vector_to_json(gv: GeneratingVector) -> dict:
    return {
        "dimension": gv.dimension,
        "primes": [perm.base for perm in gv.perms],
        "permutations": [list(perm.map) for perm in gv.perms],
    }


def vector_from_json(data: dict, source: str = "vector") -> GeneratingVector:
    for key in ("dimension", "primes", "permutations"):
        if key not in data:
            raise FileFormatError(f"{source}: missing key {key!r}")
    dimension = data["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise FileFormatError(f"{source}: dimension must be a positive integer")
    if data["primes"] != first_primes(dimension):
        raise FileFormatError(
            f"{source}: primes must be the first {dimension} primes"
        )
    perms = data["permutations"]
    if len(perms) != dimension:
        raise FileFormatError(
            f"{source}: expected {dimension} permutations, found {len(perms)}"
        )
    built = []
    for j, (base, perm) in enumerate(zip(data["primes"], perms)):
        try:
            built.append(Permutation(base, tuple(int(v) for v in perm)))
        except (TypeError, ValueError) as err:
            raise FileFormatError(f"{source}: permutation {j}: {err}") from err
    return GeneratingVector(tuple(built))


def save_vector(path: str | Path, gv: GeneratingVector) -> None:
    Path(path).write_text(json.dumps(vector_to_json(gv), indent=2) + "\n")


def load_vector(path: str | Path) -> GeneratingVector:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise FileFormatError(f"{path}: not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise FileFormatError(f"{path}: expected a JSON object")
    return vector_from_json(data, source=str(path))


def save_points(path: str | Path, points: PointSet) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {points.n} {points.d}\n")
        for row in points.coords:
            fh.write(" ".join(POINT_FORMAT % x for x in row) + "\n")


def load_points(path: str | Path) -> PointSet:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise FileFormatError(f"{path}:1: expected header '# n d'")
        fields = header[1:].split()
        if len(fields) != 2:
            raise FileFormatError(f"{path}:1: expected header '# n d'")
        try:
            n, d = int(fields[0]), int(fields[1])
        except ValueError as err:
            raise FileFormatError(f"{path}:1: header counts must be integers") from err
        rows = np.empty((n, d), dtype=np.float64)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise FileFormatError(f"{path}: expected {n} rows, found {i}")
            parts = line.split()
            if len(parts) != d:
                raise FileFormatError(
                    f"{path}:{i + 2}: expected {d} columns, found {len(parts)}"
                )
            try:
                rows[i] = [float(v) for v in parts]
            except ValueError as err:
                raise FileFormatError(f"{path}:{i + 2}: bad number: {err}") from err
        extra = fh.readline()
        if extra.strip():
            raise FileFormatError(f"{path}:{n + 2}: trailing data after {n} rows")
    try:
        return PointSet(rows)
    except ValueError as err:
        raise FileFormatError(f"{path}: {err}") from err

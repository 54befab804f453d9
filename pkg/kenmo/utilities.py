"""Assorted utilities for developers."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np
from jaxtyping import Shaped
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

rng: np.random.Generator = np.random.default_rng()
"""A central random number generator.

Seed is set with :func:`kenmo.utilities.set_seed`"""


def set_seed(rand_seed: int):
    """Set the seed for the central random number generator

    Parameters
    ----------
    rand_seed : int
        random seed
    """
    new_rng = np.random.default_rng(rand_seed)
    assert (
        rng.bit_generator.state["bit_generator"]
        == new_rng.bit_generator.state["bit_generator"]
    ), "should be same bit generator type (default PCG64)"
    rng.bit_generator.state = new_rng.bit_generator.state


def build_components(
    dimension: int, n_slots: int, component: Callable[..., Any]
) -> Shaped[np.ndarray, "..."]:
    """Dense object array with ``component(*index)`` at every index

    Parameters
    ----------
    dimension : int
        Range of every index
    n_slots : int
        Number of indices; 0 gives a 0-d array
    component : Callable
        Called with `n_slots` integer arguments
    """
    out = np.empty((dimension,) * n_slots, dtype=object)
    for index in np.ndindex(*out.shape):
        out[index] = component(*index)
    return out


def sample_points(
    coordinates: Sequence[str],
    count: int,
    box: tuple[float, float] = (1, 3),
    generator: Optional[np.random.Generator] = None,
    denominator: int = 8,
) -> list[dict[str, Fraction]]:
    """Random rational points with coordinates on a grid inside `box`

    Parameters
    ----------
    coordinates : Sequence[str]
        Coordinate names
    count : int
        Number of points
    box : tuple[float, float], optional
        Closed interval each coordinate is drawn from, by default (1, 3)
    generator : np.random.Generator, optional
        Source of randomness, by default the central :data:`rng`
    denominator : int, optional
        Grid spacing is ``1/denominator``, by default 8
    """
    generator = rng if generator is None else generator
    lo = int(np.ceil(box[0] * denominator))
    hi = int(np.floor(box[1] * denominator))
    if hi < lo:
        raise ValueError(f"box {box} contains no grid points")
    draws = generator.integers(lo, hi + 1, size=(count, len(coordinates)))
    return [
        {c: Fraction(int(k), denominator) for c, k in zip(coordinates, row)}
        for row in draws
    ]


def parse_point(point: Mapping[str, Any]) -> dict[str, Fraction]:
    return {name: Fraction(str(value)) for name, value in point.items()}


def exact_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix, computed exactly"""
    rows = [[QQ(x.numerator, x.denominator) for x in map(Fraction, row)] for row in matrix]
    if not rows or not rows[0]:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), QQ).rank()


def leading_minors(matrix: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Leading principal minors of a square rational matrix"""
    minors = []
    for k in range(1, len(matrix) + 1):
        rows = [
            [QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row[:k]]
            for row in matrix[:k]
        ]
        det = DomainMatrix(rows, (k, k), QQ).det()
        minors.append(Fraction(int(det.numerator), int(det.denominator)))
    return minors

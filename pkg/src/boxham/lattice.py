"""Finite-volume geometry and operators for box-constant disorder.

The volume is a block of rectangular boxes on Z^d.  Box ``n`` (a tuple of
integers) holds the sites ``{x : n_i*l_i < x_i <= (n_i+1)*l_i}``; the disorder
potential is constant on each box.  This module builds the partition, the
nearest-neighbour Laplacian with Dirichlet truncation, box projections, the
Hamiltonian ``H = Laplacian + sum_n omega_n P_n + sum_i lambda_i P_{e_i}``,
and the face products ``P_0 L P_n L P_0`` that later modules rely on.

All structural objects are integer matrices so identity checks are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteSampleError, VolumeError

DEFAULT_SITE_CAP = 200_000
DEFAULT_RADIUS_CAP = 4


@dataclass(frozen=True)
class BoxPartition:
    """Geometry container: dimension, box side lengths, truncation radius.

    Boxes ``n`` with ``max_i |n_i| <= radius`` are materialized.  Sites are
    ordered lexicographically, and the ordering is part of the contract
    (reproducible matrices, reproducible tensor-factor ordering).
    """

    d: int
    lengths: tuple[int, ...]
    radius: int
    sites: tuple[tuple[int, ...], ...] = field(repr=False)
    site_index: dict[tuple[int, ...], int] = field(repr=False, compare=False)

    @property
    def boxes(self) -> list[tuple[int, ...]]:
        rng = range(-self.radius, self.radius + 1)
        return [n for n in itertools.product(rng, repeat=self.d)]

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def box_of(self, site: tuple[int, ...]) -> tuple[int, ...]:
        """Box index of a site: n_i = floor((x_i - 1) / l_i)."""
        return tuple((x - 1) // l for x, l in zip(site, self.lengths))


@dataclass(frozen=True)
class DisorderSample:
    """One realization of the box potential.

    ``values`` maps every materialized box index to its omega; ``distribution``
    records the (lower, upper) bounds of the uniform law it was drawn from.
    """

    values: dict[tuple[int, ...], float]
    distribution: tuple[float, float]
    seed: int


@dataclass(frozen=True)
class LatticeOperator:
    """A real symmetric matrix over the enumerated sites of a partition."""

    sites: tuple[tuple[int, ...], ...]
    entries: np.ndarray
    partition: BoxPartition = field(repr=False)


def build_partition(
    d: int,
    lengths: list[int] | tuple[int, ...],
    radius: int,
    *,
    site_cap: int = DEFAULT_SITE_CAP,
    radius_cap: int = DEFAULT_RADIUS_CAP,
) -> BoxPartition:
    """Materialize the boxes with all |n_i| <= radius and enumerate their sites.

    Raises VolumeError when the total site count Prod(l_i) * (2*radius+1)^d
    exceeds ``site_cap`` (the error names the offending count), or when the
    radius exceeds the desk-scale cap.
    """
    lengths = tuple(int(l) for l in lengths)
    if d < 1 or len(lengths) != d or any(l < 1 for l in lengths):
        raise VolumeError(f"need d >= 1 and {d} lengths >= 1, got lengths={lengths}")
    if radius < 0:
        raise VolumeError(f"radius must be nonnegative, got {radius}")
    if radius > radius_cap:
        raise VolumeError(f"radius {radius} exceeds cap {radius_cap}")
    count = 1
    for l in lengths:
        count *= l
    count *= (2 * radius + 1) ** d
    if count > site_cap:
        raise VolumeError(f"volume of {count} sites exceeds cap {site_cap}")

    lo = [-radius * l + 1 for l in lengths]
    hi = [(radius + 1) * l for l in lengths]
    axes = [range(a, b + 1) for a, b in zip(lo, hi)]
    sites = tuple(itertools.product(*axes))  # lexicographic by construction
    index = {s: i for i, s in enumerate(sites)}
    return BoxPartition(d=d, lengths=lengths, radius=radius, sites=sites, site_index=index)


def box_sites(partition: BoxPartition, n: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Sites of box n, sorted lexicographically."""
    if len(n) != partition.d or any(abs(ni) > partition.radius for ni in n):
        raise VolumeError(f"box {n} outside radius {partition.radius}")
    axes = [range(ni * l + 1, (ni + 1) * l + 1) for ni, l in zip(n, partition.lengths)]
    return list(itertools.product(*axes))


def box_mask(partition: BoxPartition, n: tuple[int, ...]) -> np.ndarray:
    """Boolean site mask of box n (the diagonal of the projection P_n)."""
    mask = np.zeros(partition.n_sites, dtype=bool)
    for s in box_sites(partition, n):
        mask[partition.site_index[s]] = True
    return mask


def projection(partition: BoxPartition, n: tuple[int, ...]) -> np.ndarray:
    """The box projection P_n as an integer diagonal matrix."""
    return np.diag(box_mask(partition, n).astype(np.int64))


def build_laplacian(partition: BoxPartition) -> LatticeOperator:
    """Nearest-neighbour 0/1 adjacency with Dirichlet truncation.

    Edges leaving the truncated volume are dropped; the matrix is integer and
    exactly symmetric.
    """
    m = partition.n_sites
    a = np.zeros((m, m), dtype=np.int64)
    for s, i in partition.site_index.items():
        for axis in range(partition.d):
            nb = list(s)
            nb[axis] += 1
            j = partition.site_index.get(tuple(nb))
            if j is not None:
                a[i, j] = 1
                a[j, i] = 1
    return LatticeOperator(sites=partition.sites, entries=a, partition=partition)


def build_hamiltonian(
    partition: BoxPartition,
    disorder: DisorderSample,
    boosts: dict[int, float] | None = None,
) -> LatticeOperator:
    """H = Laplacian + sum_n omega_n P_n + sum_i lambda_i P_{e_i}.

    ``boosts`` maps coordinate directions 1..d to an extra coupling added on
    the unit box e_i.  The diagonal at site x is omega_{box(x)} plus the boost
    when box(x) is a boosted unit box.
    """
    boosts = boosts or {}
    lap = build_laplacian(partition)
    h = lap.entries.astype(np.float64)
    diag = np.zeros(partition.n_sites, dtype=np.float64)
    for s, i in partition.site_index.items():
        n = partition.box_of(s)
        if n not in disorder.values:
            raise IncompleteSampleError(f"disorder sample has no value for box {n}")
        diag[i] = disorder.values[n]
    for direction, lam in boosts.items():
        if not 1 <= direction <= partition.d:
            raise VolumeError(f"boost direction {direction} outside 1..{partition.d}")
        e = tuple(1 if k == direction - 1 else 0 for k in range(partition.d))
        diag[box_mask(partition, e)] += lam
    h[np.diag_indices_from(h)] += diag
    return LatticeOperator(sites=partition.sites, entries=h, partition=partition)


def zero_disorder(partition: BoxPartition) -> DisorderSample:
    """The omega == 0 sample (handy for structural checks)."""
    return DisorderSample(
        values={n: 0.0 for n in partition.boxes}, distribution=(0.0, 0.0), seed=0
    )


def face_product(
    partition: BoxPartition, direction: int
) -> tuple[np.ndarray, np.ndarray]:
    """The triple product P_0 L P_n L P_0 for the unit box n = sign(direction)*e_|direction|.

    ``direction`` is +-(1..d).  Returns the computed product restricted to the
    rows/columns of box 0 alongside the 0/1 diagonal indicator of the face
    {x in box 0 : x_i = l_i} (for +e_i) or {x in box 0 : x_i = 1} (for -e_i);
    the caller asserts their equality.  Both matrices are integer.
    """
    if direction == 0 or abs(direction) > partition.d:
        raise VolumeError(f"direction must be +-(1..{partition.d}), got {direction}")
    if partition.radius < 1:
        raise VolumeError("face products need radius >= 1")
    axis = abs(direction) - 1
    sign = 1 if direction > 0 else -1
    n = tuple(sign if k == axis else 0 for k in range(partition.d))

    lap = build_laplacian(partition).entries
    m0 = box_mask(partition, (0,) * partition.d)
    mn = box_mask(partition, n)
    product = lap[np.ix_(m0, mn)] @ lap[np.ix_(mn, m0)]

    sites0 = box_sites(partition, (0,) * partition.d)
    edge = partition.lengths[axis] if sign > 0 else 1
    indicator = np.diag(
        np.array([1 if s[axis] == edge else 0 for s in sites0], dtype=np.int64)
    )
    return product, indicator


def neighbor_sum_identity(partition: BoxPartition) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of  P_0 L (I - P_0) L P_0 = sum_{|n|_1 = 1} P_0 L P_n L P_0.

    Returned as integer matrices restricted to box 0; equality is exact for
    radius >= 1 because the Laplacian only couples adjacent boxes.
    """
    lap = build_laplacian(partition).entries
    m0 = box_mask(partition, (0,) * partition.d)
    comp = ~m0
    lhs = lap[np.ix_(m0, comp)] @ lap[np.ix_(comp, m0)]
    rhs = np.zeros_like(lhs)
    for axis in range(partition.d):
        for sign in (+1, -1):
            n = tuple(sign if k == axis else 0 for k in range(partition.d))
            mn = box_mask(partition, n)
            rhs += lap[np.ix_(m0, mn)] @ lap[np.ix_(mn, m0)]
    return lhs, rhs


def partition_of_unity_holds(partition: BoxPartition) -> bool:
    """Exact check that the box masks tile the volume: sum_n P_n = I."""
    total = np.zeros(partition.n_sites, dtype=np.int64)
    for n in partition.boxes:
        total += box_mask(partition, n).astype(np.int64)
    return bool(np.all(total == 1))

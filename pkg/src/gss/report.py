"""Spectrum reports and grouping of eigenvalues into multiplicities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_GROUP = 1e-8


@dataclass(frozen=True)
class Mismatch:
    kind: str  # "missing", "spurious" or "multiplicity"
    eigenvalue: float
    expected: int
    found: int

    def __str__(self):
        return f"{self.kind} at {self.eigenvalue:.12g} (expected {self.expected}, found {self.found})"


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    method: str
    residuals: tuple[float, ...] = ()
    mismatches: tuple[Mismatch, ...] = ()
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.multiplicities):
            raise ValueError("eigenvalues and multiplicities differ in length")
        if any(m < 1 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")
        if list(self.eigenvalues) != sorted(self.eigenvalues):
            raise ValueError("eigenvalues must be ascending")

    @property
    def total_multiplicity(self) -> int:
        return sum(self.multiplicities)

    def as_dict(self) -> dict[float, int]:
        return dict(zip(self.eigenvalues, self.multiplicities))

    def flat(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(np.asarray(self.eigenvalues, float), self.multiplicities)


def group_values(values, tol=TOL_GROUP):
    """Cluster sorted reals whose consecutive gaps are <= tol.

    Returns ``(centers, counts, members)`` where ``members`` holds the index
    lists into the sorted input.
    """
    values = np.sort(np.asarray(values, dtype=float))
    centers, counts, members = [], [], []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > tol:
            chunk = values[start:k]
            centers.append(float(chunk.mean()))
            counts.append(k - start)
            members.append(list(range(start, k)))
            start = k
    return centers, counts, members

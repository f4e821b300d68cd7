"""Squared distance restricted to observed components, and winner selection.

The distance between an observation and a code vector is the sum of squared
differences over the observation's observed components only; a row with no
observed component is at distance 0 from every unit (empty sum) and therefore
has no meaningful winner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import _readonly
from .topology import GridTopology


class UnclassifiableRowError(ValueError):
    """Row with no observed component: every unit is at distance zero."""


@dataclass(frozen=True)
class CodeBook:
    """One fully-defined code vector per grid unit; the trained model."""

    codes: np.ndarray
    topology: GridTopology
    col_names: tuple[str, ...]

    def __post_init__(self) -> None:
        codes = np.array(self.codes, dtype=float)
        if codes.ndim != 2:
            raise ValueError(f"codes must be 2-D, got shape {codes.shape}")
        if codes.shape[0] != self.topology.n_units:
            raise ValueError(
                f"{codes.shape[0]} code vectors for a grid of {self.topology.n_units} units"
            )
        if not np.isfinite(codes).all():
            raise ValueError("every code component must be finite")
        names = tuple(str(s) for s in self.col_names)
        if len(names) != codes.shape[1]:
            raise ValueError(f"expected {codes.shape[1]} column names, got {len(names)}")
        object.__setattr__(self, "codes", _readonly(codes))
        object.__setattr__(self, "col_names", names)

    @property
    def n_units(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return self.codes.shape[1]

    def with_codes(self, codes: np.ndarray) -> "CodeBook":
        return CodeBook(codes, self.topology, self.col_names)


def masked_sq_distance(x: np.ndarray, observed: np.ndarray, code: np.ndarray) -> float:
    """Sum of squared differences over observed components.

    Accumulates sequentially in ascending component order; that summation
    order is part of the contract.  Returns 0.0 for a fully-missing row
    (empty sum).
    """
    x = np.asarray(x, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    code = np.asarray(code, dtype=float)
    if x.shape != observed.shape or x.shape != code.shape or x.ndim != 1:
        raise ValueError(
            f"x, observed and code must be 1-D of equal length, got {x.shape}, "
            f"{observed.shape}, {code.shape}"
        )
    total = 0.0
    for k in range(x.shape[0]):
        if observed[k]:
            d = x[k] - code[k]
            total += d * d
    return float(total)


def masked_sq_distances(x: np.ndarray, observed: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Masked squared distance from one row to every code vector at once.

    Same terms as :func:`masked_sq_distance`, reduced with numpy's vectorized
    summation.
    """
    x = np.asarray(x, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    codes = np.asarray(codes, dtype=float)
    if codes.ndim != 2 or codes.shape[1] != x.shape[0] or observed.shape != x.shape:
        raise ValueError(
            f"shape mismatch: x {x.shape}, observed {observed.shape}, codes {codes.shape}"
        )
    obs_idx = np.flatnonzero(observed)
    if obs_idx.size == 0:
        return np.zeros(codes.shape[0])
    diff = codes[:, obs_idx] - x[obs_idx]
    return (diff**2).sum(axis=1)


def winner(x: np.ndarray, observed: np.ndarray, codebook: CodeBook) -> int:
    """Index of the unit minimizing the masked squared distance.

    Ties break to the lowest unit index.  Raises UnclassifiableRowError for
    a row with no observed component.
    """
    observed = np.asarray(observed, dtype=bool)
    if not observed.any():
        raise UnclassifiableRowError("row has no observed component; cannot pick a winner")
    return int(np.argmin(masked_sq_distances(x, observed, codebook.codes)))

"""Empirical quantile maps between sample distributions and normal/uniform targets.

A fitted map sends a value x to G^-1(F(x)), where F is the empirical CDF of
the fitted sample and G is the target CDF (standard normal or uniform(0,1)).
F is estimated at the plotting positions (rank - 0.5)/n with linear
interpolation between sorted sample points; outside the sample range the
quantile level clamps to 0.5/n and 1 - 0.5/n, which keeps normal targets
finite. The inverse goes back through F^-1(G(y)) over the same grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import SchemaError

TARGETS = ("normal", "uniform")


@dataclass(frozen=True)
class EmpiricalQuantileMap:
    """Monotone map between an empirical distribution and a target law.

    ``reference`` is the fitted sample sorted ascending; ``levels`` are its
    plotting positions. Instances are immutable and safe to share.
    """

    reference: np.ndarray
    target: str

    @property
    def n(self) -> int:
        return self.reference.shape[0]

    @property
    def levels(self) -> np.ndarray:
        n = self.n
        return (np.arange(n) + 0.5) / n

    def transform(self, x):
        """Map value(s) from the fitted distribution onto the target law."""
        scalar = np.isscalar(x) or np.ndim(x) == 0
        xs = np.asarray(x, dtype=np.float64)
        # Two-sided interpolation: at a run of tied reference values the
        # lower- and upper-end levels average to the midpoint of the tie
        # span; elsewhere both sides agree. np.interp clamps outside the
        # sample range, which realizes the boundary levels 0.5/n and
        # 1 - 0.5/n.
        ref, lev = self.reference, self.levels
        q = 0.5 * (np.interp(xs, ref, lev)
                   - np.interp(-xs, -ref[::-1], -lev[::-1]))
        out = ndtri(q) if self.target == "normal" else q
        return float(out) if scalar else out

    def inverse_transform(self, y):
        """Map target-law value(s) back into the fitted distribution."""
        scalar = np.isscalar(y) or np.ndim(y) == 0
        ys = np.asarray(y, dtype=np.float64)
        if not np.all(np.isfinite(ys)):
            raise ValueError("inverse_transform requires finite inputs")
        q = ndtr(ys) if self.target == "normal" else ys
        out = np.interp(q, self.levels, self.reference)
        return float(out) if scalar else out


def fit(values, target: str = "normal") -> EmpiricalQuantileMap:
    """Fit a quantile map on a sample of at least two finite values."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    if vals.shape[0] < 2:
        raise ValueError("need at least 2 values to fit a quantile map")
    if not np.all(np.isfinite(vals)):
        raise ValueError("sample contains non-finite values")
    return EmpiricalQuantileMap(reference=np.sort(vals), target=target)


def save_map(path, qmap: EmpiricalQuantileMap) -> None:
    lines = [f"target={qmap.target} n={qmap.n}"]
    lines.extend(repr(float(v)) for v in qmap.reference)
    Path(path).write_text("\n".join(lines) + "\n")


def load_map(path) -> EmpiricalQuantileMap:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty quantile map file")
    header = lines[0].split()
    try:
        fields = dict(part.split("=", 1) for part in header)
        target = fields["target"]
        n = int(fields["n"])
    except (ValueError, KeyError) as exc:
        raise SchemaError(f"{path} line 1: bad header {lines[0]!r}") from exc
    if target not in TARGETS:
        raise SchemaError(f"{path} line 1: unknown target {target!r}")
    if len(lines) - 1 != n:
        raise SchemaError(f"{path}: header says n={n} but {len(lines) - 1} values follow")
    try:
        values = np.array([float(s) for s in lines[1:]], dtype=np.float64)
    except ValueError as exc:
        raise SchemaError(f"{path}: unparseable value ({exc})") from exc
    return EmpiricalQuantileMap(reference=values, target=target)


def parse_map_lines(lines: list[str], where: str) -> EmpiricalQuantileMap:
    """Parse the save_map format from already-split lines (used by bundles)."""
    if not lines:
        raise SchemaError(f"{where}: empty quantile map section")
    header = lines[0].split()
    try:
        fields = dict(part.split("=", 1) for part in header)
        target = fields["target"]
        n = int(fields["n"])
    except (ValueError, KeyError) as exc:
        raise SchemaError(f"{where}: bad map header {lines[0]!r}") from exc
    if len(lines) - 1 != n:
        raise SchemaError(f"{where}: header says n={n} but {len(lines) - 1} values follow")
    values = np.array([float(s) for s in lines[1:]], dtype=np.float64)
    return EmpiricalQuantileMap(reference=values, target=target)


def map_to_lines(qmap: EmpiricalQuantileMap) -> list[str]:
    """Inverse of parse_map_lines."""
    return [f"target={qmap.target} n={qmap.n}"] + [repr(float(v)) for v in qmap.reference]

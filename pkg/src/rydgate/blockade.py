"""Blockade shift models B(R) and the collective Rabi enhancement.

All shifts are angular frequencies (rad/s); separations are in metres.
A :class:`Constant` model with ``B = inf`` represents perfect blockade and is
what the dynamics module uses for its ideal limit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, RydgateError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constant:
    B: float

    def __post_init__(self):
        if not self.B > 0:
            raise ConfigError("blockade.b_mhz", f"blockade shift must be > 0, got {self.B}")


@dataclass(frozen=True)
class VanDerWaals:
    C6: float  # rad/s * m^6

    def __post_init__(self):
        if not (self.C6 > 0 and math.isfinite(self.C6)):
            raise ConfigError("blockade.c6_ghz_um6", f"C6 must be finite and > 0, got {self.C6}")

    @classmethod
    def anchored(cls, B, R):
        """Model passing through the point ``B(R) = B``."""
        return cls(C6=B * R**6)


@dataclass(frozen=True)
class Table:
    R: tuple
    B: tuple

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if R.ndim != 1 or R.shape != B.shape or R.size < 2:
            raise ConfigError("blockade.table_csv", "table needs at least two (R, B) samples")
        if np.any(np.diff(R) <= 0) or R[0] <= 0:
            raise ConfigError("blockade.table_csv", "R samples must be positive and strictly increasing")
        if np.any(B <= 0) or not np.all(np.isfinite(B)):
            raise ConfigError("blockade.table_csv", "B samples must be finite and > 0")
        object.__setattr__(self, "R", tuple(float(r) for r in R))
        object.__setattr__(self, "B", tuple(float(b) for b in B))

    @classmethod
    def from_csv(cls, path):
        """Read a two-column CSV of ``R`` in um and ``B/2pi`` in MHz.

        Blank lines, ``#`` comments and a non-numeric header row are skipped.
        """
        rows = []
        with open(Path(path), newline="") as fh:
            for line_no, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    r_um, b_mhz = (float(x) for x in row[:2])
                except ValueError:
                    if not rows and line_no == 1:
                        continue  # header
                    raise ConfigError("blockade.table_csv", f"{path}:{line_no}: unparseable row {row!r}")
                rows.append((r_um * 1e-6, TWO_PI * b_mhz * 1e6))
        if not rows:
            raise ConfigError("blockade.table_csv", f"{path}: no samples")
        R, B = zip(*rows)
        return cls(R=R, B=B)

    def to_csv(self, path):
        with open(Path(path), "w", newline="") as fh:
            fh.write("# R_um,B_over_2pi_MHz\n")
            for r, b in zip(self.R, self.B):
                fh.write(f"{r * 1e6!r},{b / TWO_PI / 1e6!r}\n")


BlockadeModel = Constant | VanDerWaals | Table


def blockade_shift(model: BlockadeModel, R: float) -> float:
    """Blockade shift B (rad/s) at separation ``R`` (m).

    Tables are interpolated linearly in (log R, log B) and never extrapolated.
    """
    if not R > 0:
        raise ValueError(f"separation must be > 0, got {R}")
    if isinstance(model, Constant):
        return model.B
    if isinstance(model, VanDerWaals):
        return model.C6 / R**6
    if isinstance(model, Table):
        R_s = np.asarray(model.R)
        if R < R_s[0] or R > R_s[-1]:
            raise RydgateError(
                f"R = {R * 1e6:g} um outside blockade table range "
                f"[{R_s[0] * 1e6:g}, {R_s[-1] * 1e6:g}] um"
            )
        i = int(np.searchsorted(R_s, R))
        if R_s[min(i, R_s.size - 1)] == R:
            return model.B[min(i, R_s.size - 1)]
        r0, r1 = math.log(model.R[i - 1]), math.log(model.R[i])
        b0, b1 = math.log(model.B[i - 1]), math.log(model.B[i])
        w = (math.log(R) - r0) / (r1 - r0)
        return math.exp(b0 + w * (b1 - b0))
    raise TypeError(f"unknown blockade model {model!r}")


def collective_rabi(N: int, Omega: float) -> float:
    """Rabi frequency between |g...g> and the symmetric singly excited state of
    ``N`` fully blockaded atoms."""
    if int(N) != N or N < 1:
        raise ValueError(f"atom number must be a positive integer, got {N}")
    if not Omega > 0:
        raise ValueError(f"Rabi frequency must be > 0, got {Omega}")
    return math.sqrt(N) * Omega

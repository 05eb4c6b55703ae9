"""Spectral data of the reference elliptic operator on the two model geometries.

Both models use the (positive) Laplacian as reference operator, elliptic
order nu = 2:

* ``torus2`` -- frequencies are characters (xi, eta) in Z^2 with eigenvalue
  xi^2 + eta^2 and one-dimensional blocks.  Indexing is per character, not
  per eigenvalue shell; shell grouping is available as a view.
* ``su2``    -- frequencies are representation levels ell in (1/2) N_0 with
  eigenvalue ell(ell+1) and block dimension (2 ell + 1)^2.  Half-integers
  are stored doubled (``twice_ell``) so arithmetic stays exact.

Enumeration is in nondecreasing eigenvalue order with lexicographic label
tie-breaks, so ordinals are stable across cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError

NU = 2.0

__all__ = [
    "NU",
    "Torus2Label",
    "Su2Label",
    "Label",
    "FrequencyIndex",
    "SpectralModel",
    "TORUS2",
    "SU2",
    "enumerate_frequencies",
    "frequency_for_label",
    "torus_lattice",
    "su2_levels",
    "bracket",
    "eigenvalue_shells",
]


@dataclass(frozen=True, order=True)
class Torus2Label:
    xi: int
    eta: int

    def eigenvalue(self) -> int:
        return self.xi * self.xi + self.eta * self.eta

    def block_dim(self) -> int:
        return 1

    def __str__(self):
        return f"({self.xi},{self.eta})"


@dataclass(frozen=True, order=True)
class Su2Label:
    twice_ell: int

    def __post_init__(self):
        if self.twice_ell < 0:
            raise ValueError("twice_ell must be nonnegative")

    @property
    def ell(self) -> Fraction:
        return Fraction(self.twice_ell, 2)

    def eigenvalue(self) -> Fraction:
        t = self.twice_ell
        return Fraction(t * (t + 2), 4)

    def block_dim(self) -> int:
        # full eigenspace dimension (2 ell + 1)^2
        return (self.twice_ell + 1) ** 2

    def rep_dim(self) -> int:
        # dimension 2 ell + 1 of a single representation block
        return self.twice_ell + 1

    def __str__(self):
        if self.twice_ell % 2 == 0:
            return f"l={self.twice_ell // 2}"
        return f"l={self.twice_ell}/2"


Label = Torus2Label | Su2Label


@dataclass(frozen=True)
class FrequencyIndex:
    """One spectral block: ordinal, eigenvalue, block dimension, label."""

    j: int
    lam: float
    dim: int
    label: Label

    def lam_exact(self):
        return self.label.eigenvalue()


@dataclass(frozen=True)
class SpectralModel:
    kind: str
    nu: float = NU

    def __post_init__(self):
        if self.kind not in ("torus2", "su2"):
            raise PreconditionError(f"unknown model kind {self.kind!r}")
        if self.nu <= 0:
            raise PreconditionError("elliptic order must be positive")


TORUS2 = SpectralModel("torus2")
SU2 = SpectralModel("su2")


def torus_lattice(lambda_cutoff: float):
    """All (xi, eta) with xi^2 + eta^2 <= cutoff, in enumeration order.

    Returns int64 arrays (xi, eta, lam) sorted by (lam, xi, eta); the heavy
    scans work on these arrays directly instead of FrequencyIndex objects.
    """
    if lambda_cutoff < 0:
        raise PreconditionError("lambda cutoff must be nonnegative")
    r = math.isqrt(int(lambda_cutoff))
    side = np.arange(-r, r + 1, dtype=np.int64)
    xi, eta = np.meshgrid(side, side, indexing="ij")
    xi, eta = xi.ravel(), eta.ravel()
    lam = xi * xi + eta * eta
    keep = lam <= lambda_cutoff
    xi, eta, lam = xi[keep], eta[keep], lam[keep]
    order = np.lexsort((eta, xi, lam))
    return xi[order], eta[order], lam[order]


def su2_levels(lambda_cutoff: float) -> np.ndarray:
    """twice_ell values with ell(ell+1) <= cutoff, ascending."""
    if lambda_cutoff < 0:
        raise PreconditionError("lambda cutoff must be nonnegative")
    # t(t+2)/4 <= c  <=>  t <= sqrt(4c+1) - 1
    tmax = int(math.isqrt(int(4 * lambda_cutoff) + 1)) - 1
    while (tmax + 1) * (tmax + 3) <= 4 * lambda_cutoff:
        tmax += 1
    while tmax >= 0 and tmax * (tmax + 2) > 4 * lambda_cutoff:
        tmax -= 1
    return np.arange(0, tmax + 1, dtype=np.int64)


def enumerate_frequencies(model: SpectralModel, lambda_cutoff: float) -> list[FrequencyIndex]:
    """Exactly the frequencies with eigenvalue <= cutoff, in canonical order."""
    if lambda_cutoff < 0:
        raise PreconditionError("lambda cutoff must be nonnegative")
    out: list[FrequencyIndex] = []
    if model.kind == "torus2":
        xi, eta, lam = torus_lattice(lambda_cutoff)
        for j in range(len(xi)):
            out.append(
                FrequencyIndex(
                    j=j,
                    lam=float(lam[j]),
                    dim=1,
                    label=Torus2Label(int(xi[j]), int(eta[j])),
                )
            )
    else:
        for j, t in enumerate(su2_levels(lambda_cutoff)):
            lab = Su2Label(int(t))
            out.append(
                FrequencyIndex(
                    j=j, lam=float(lab.eigenvalue()), dim=lab.block_dim(), label=lab
                )
            )
    return out


def frequency_for_label(model: SpectralModel, label: Label) -> FrequencyIndex:
    """Materialize the FrequencyIndex of a label (ordinal found by counting)."""
    lam = label.eigenvalue()
    if model.kind == "torus2":
        if not isinstance(label, Torus2Label):
            raise PreconditionError("label does not match model")
        xi, eta, lams = torus_lattice(float(lam))
        rows = np.flatnonzero((xi == label.xi) & (eta == label.eta) & (lams == int(lam)))
        if len(rows) != 1:
            raise PreconditionError(f"label {label} not enumerable")
        return FrequencyIndex(int(rows[0]), float(lam), 1, label)
    if not isinstance(label, Su2Label):
        raise PreconditionError("label does not match model")
    return FrequencyIndex(label.twice_ell, float(lam), label.block_dim(), label)


def bracket(freq: FrequencyIndex) -> float:
    """The Japanese bracket (1 + lambda)^{1/2} of a frequency."""
    return math.sqrt(1.0 + freq.lam)


def eigenvalue_shells(freqs: list[FrequencyIndex]):
    """Group an enumeration by eigenvalue (shell view of the torus indexing)."""
    shells: list[tuple[float, list[FrequencyIndex]]] = []
    for f in freqs:
        if shells and shells[-1][0] == f.lam:
            shells[-1][1].append(f)
        else:
            shells.append((f.lam, [f]))
    return shells

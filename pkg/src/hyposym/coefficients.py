"""Coefficient sequences: distributions as per-frequency vectors.

A distribution or smooth function enters the analysis only through its
coefficient vectors u_hat(j) in C^{dim_j}.  This module provides the field
type (finitely supported or rule-based), Sobolev norms on truncations,
decay-based regularity classification, symbol application, and the
counterexample constructor that turns a failing gain bound into an
explicit non-smooth field with smooth image.

Floating-point reductions run in fixed frequency order so repeated runs
reproduce bit-for-bit on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .errors import PreconditionError, SearchExhaustedError, WindowTooSmallError
from .spectral import (
    FrequencyIndex,
    Label,
    SpectralModel,
    enumerate_frequencies,
    frequency_for_label,
)
from .symbols import MatrixSymbol

__all__ = [
    "CoefficientField",
    "RegularityReport",
    "CounterexampleCertificate",
    "Counterexample",
    "sobolev_norm",
    "classify_regularity",
    "apply_symbol",
    "build_counterexample",
    "random_field",
]


class CoefficientField:
    """A coefficient sequence, finitely supported or rule-based.

    Explicit fields map labels to complex vectors (lengths must match the
    block dimension); rule fields evaluate a pure function of the frequency
    and are valid up to a stated eigenvalue cutoff.
    """

    def __init__(self, explicit=None, rule=None, valid_to=None):
        if (explicit is None) == (rule is None):
            raise PreconditionError("field needs exactly one of explicit/rule")
        self._rule: Callable[[FrequencyIndex], np.ndarray] | None = rule
        self.valid_to = valid_to
        if rule is not None and valid_to is None:
            raise PreconditionError("rule fields need a validity cutoff")
        self._explicit: dict[Label, np.ndarray] | None = None
        if explicit is not None:
            store = {}
            for label, vec in explicit.items():
                arr = np.array(vec, dtype=complex).reshape(-1)
                if arr.shape[0] != label.block_dim():
                    raise PreconditionError(
                        f"vector at {label} has length {arr.shape[0]}, "
                        f"expected {label.block_dim()}"
                    )
                if np.any(arr != 0):
                    arr.setflags(write=False)
                    store[label] = arr
            self._explicit = store

    @staticmethod
    def zero() -> "CoefficientField":
        return CoefficientField(explicit={})

    @staticmethod
    def from_dict(data: Mapping[Label, np.ndarray]) -> "CoefficientField":
        return CoefficientField(explicit=data)

    @staticmethod
    def from_rule(rule, valid_to: float) -> "CoefficientField":
        return CoefficientField(rule=rule, valid_to=valid_to)

    @property
    def is_explicit(self) -> bool:
        return self._explicit is not None

    def support_labels(self):
        """Explicit support in canonical (eigenvalue, label) order."""
        if self._explicit is None:
            raise PreconditionError("rule fields have no finite support list")
        return sorted(self._explicit, key=lambda lab: (float(lab.eigenvalue()), lab))

    def coeff(self, freq: FrequencyIndex) -> np.ndarray:
        if self._explicit is not None:
            vec = self._explicit.get(freq.label)
            if vec is None:
                return np.zeros(freq.dim, dtype=complex)
            return vec
        if self.valid_to is not None and freq.lam > self.valid_to:
            raise PreconditionError(
                f"rule field valid to lambda={self.valid_to}, asked for {freq.lam}"
            )
        arr = np.asarray(self._rule(freq), dtype=complex).reshape(-1)
        if arr.shape[0] != freq.dim:
            raise PreconditionError("rule returned a vector of the wrong length")
        return arr

    def window(self, model: SpectralModel, cutoff: float):
        """(freq, vector) pairs with lam <= cutoff, canonical order, zeros skipped."""
        if self._explicit is not None:
            for label in self.support_labels():
                lam = float(label.eigenvalue())
                if lam <= cutoff:
                    yield frequency_for_label(model, label), self._explicit[label]
        else:
            if self.valid_to is not None and cutoff > self.valid_to:
                raise PreconditionError(
                    f"cutoff {cutoff} exceeds the rule's validity {self.valid_to}"
                )
            for freq in enumerate_frequencies(model, cutoff):
                vec = self.coeff(freq)
                if np.any(vec != 0):
                    yield freq, vec


def sobolev_norm(
    u: CoefficientField, s: float, model: SpectralModel, cutoff: float
) -> float:
    """Sobolev norm on the truncation: sqrt of the weighted coefficient sum.

    The weight per frequency is (1 + lambda_j)^{2s/nu}; summation runs in
    canonical frequency order.
    """
    total = 0.0
    for freq, vec in u.window(model, cutoff):
        w = (1.0 + freq.lam) ** (2.0 * s / model.nu)
        total += w * float(np.vdot(vec, vec).real)
    return math.sqrt(total)


@dataclass(frozen=True)
class RegularityReport:
    """Decay classification of a coefficient field on a finite window.

    kinds: ``smooth_evidence`` (every probed decay rate validated),
    ``distribution_order`` (smallest validated polynomial growth bound),
    ``indeterminate``.  Desk-scale smoothness is evidence up to n_probe,
    never proof; the window travels with the report so claims stay
    falsifiable.
    """

    kind: str
    exponent: int | None
    n_probe: int
    cutoff: float
    constant: float | None = None
    note: str | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "n_probe": self.n_probe, "cutoff": self.cutoff}
        if self.exponent is not None:
            out["exponent"] = self.exponent
        if self.constant is not None:
            out["constant"] = self.constant
        if self.note:
            out["note"] = self.note
        return out


def _stabilized(lam: np.ndarray, values: np.ndarray, cutoff: float) -> bool:
    """True when the max of ``values`` is already attained in the lower
    half of the eigenvalue window (relative tolerance 1e-9)."""
    top = float(np.max(values))
    lower = values[lam <= cutoff / 2.0]
    if len(lower) == 0:
        return False
    return float(np.max(lower)) >= top * (1.0 - 1e-9)


def classify_regularity(
    u: CoefficientField, model: SpectralModel, cutoff: float, n_probe: int = 10
) -> RegularityReport:
    """Classify decay/growth of ||u_hat(j)|| against powers of (1+lambda).

    A rate is accepted only when the extremal constant has stabilized in the
    lower half of the window, so finite windows cannot fake asymptotics.
    The identically-zero field is smooth exactly; otherwise at least 8
    nonzero frequencies are required.
    """
    pairs = list(u.window(model, cutoff))
    if not pairs:
        return RegularityReport(
            kind="smooth_evidence",
            exponent=n_probe,
            n_probe=n_probe,
            cutoff=cutoff,
            constant=0.0,
            note="field vanishes on the window",
        )
    if len(pairs) < 8:
        raise WindowTooSmallError(
            f"classification needs at least 8 nonzero frequencies, found {len(pairs)}"
        )
    lam = np.array([f.lam for f, _ in pairs])
    norms = np.array([float(np.linalg.norm(v)) for _, v in pairs])

    smooth = True
    for n in range(1, n_probe + 1):
        scaled = norms * (1.0 + lam) ** n
        if not _stabilized(lam, scaled, cutoff):
            smooth = False
            break
    if smooth:
        c = float(np.max(norms * (1.0 + lam) ** n_probe))
        return RegularityReport(
            kind="smooth_evidence",
            exponent=n_probe,
            n_probe=n_probe,
            cutoff=cutoff,
            constant=c,
        )

    for n in range(0, n_probe + 1):
        scaled = norms * (1.0 + lam) ** (-n)
        if _stabilized(lam, scaled, cutoff):
            return RegularityReport(
                kind="distribution_order",
                exponent=n,
                n_probe=n_probe,
                cutoff=cutoff,
                constant=float(np.max(scaled)),
            )
    return RegularityReport(
        kind="indeterminate",
        exponent=None,
        n_probe=n_probe,
        cutoff=cutoff,
        note=f"no growth bound up to (1+lambda)^{n_probe} stabilized on the window",
    )


def apply_symbol(
    symbol: MatrixSymbol, u: CoefficientField, cutoff: float
) -> CoefficientField:
    """The coefficient field of P u: per frequency, the block product.

    The result is explicit and valid on the truncation lambda <= cutoff.
    """
    model = symbol.model
    out: dict[Label, np.ndarray] = {}
    for freq, vec in u.window(model, cutoff):
        out[freq.label] = symbol.apply_to_vector(freq, vec)
    return CoefficientField(explicit=out)


@dataclass(frozen=True)
class CounterexampleCertificate:
    """One verified step of the counterexample construction."""

    k: int
    ordinal: int
    label: Label
    lam: float
    image_norm: float
    bound: float
    exact: bool


@dataclass(frozen=True)
class Counterexample:
    field: CoefficientField
    frequencies: tuple[FrequencyIndex, ...]
    certificates: tuple[CounterexampleCertificate, ...]


def _unit_null_vector(block: np.ndarray) -> np.ndarray:
    """Right singular vector of the smallest singular value, phase-fixed so
    the first nonzero component is positive real."""
    _, _, vh = np.linalg.svd(block)
    v = vh[-1].conj()
    for comp in v:
        if abs(comp) > 1e-14:
            v = v * (comp.conjugate() / abs(comp))
            break
    return v


def build_counterexample(
    symbol: MatrixSymbol, model: SpectralModel, k_steps: int, search_cutoff: float
) -> Counterexample:
    """Construct a field whose image decays faster than every probed rate.

    For each k the search finds a frequency whose gain is below
    (1+lambda)^{-k}; the field takes the corresponding least-gain unit
    vector there, zero elsewhere.  The search starts past ordinal 1 (the
    first step of the induction takes threshold ordinal R = 1) and advances
    with strictly increasing eigenvalue.  The strict inequality is checked
    in exact arithmetic when the symbol evaluates rationally, otherwise
    with a 1e-12 relative guard band.  Raises SearchExhaustedError when no
    admissible frequency exists within the window.
    """
    if k_steps < 1:
        raise PreconditionError("need at least one step")
    freqs = enumerate_frequencies(model, search_cutoff)
    support: dict[Label, np.ndarray] = {}
    chosen: list[FrequencyIndex] = []
    certs: list[CounterexampleCertificate] = []
    lam_prev = 0.0
    idx = 0
    for k in range(1, k_steps + 1):
        found = None
        while idx < len(freqs):
            freq = freqs[idx]
            if freq.j < 2 or freq.lam <= lam_prev:
                idx += 1
                continue
            exact_entries = symbol.exact_diagonal(freq)
            if exact_entries is not None:
                lam_exact = freq.lam_exact()
                bound_sq = Fraction(1, 1) / (1 + lam_exact) ** (2 * k)
                min_sq = min(re * re + im * im for re, im in exact_entries)
                ok = min_sq < bound_sq
                if ok:
                    entry_idx = min(
                        range(len(exact_entries)),
                        key=lambda i: exact_entries[i][0] ** 2
                        + exact_entries[i][1] ** 2,
                    )
                    found = (freq, entry_idx, None, True)
                    break
            else:
                bound = (1.0 + freq.lam) ** (-k)
                gain = symbol.gain(freq)
                if gain < bound * (1.0 - 1e-12):
                    diag = symbol.diagonal(freq)
                    if diag is not None:
                        entry_idx = int(np.argmin(np.abs(diag)))
                        found = (freq, entry_idx, None, False)
                    else:
                        found = (freq, None, _unit_null_vector(symbol.block(freq)), False)
                    break
            idx += 1
        if found is None:
            raise SearchExhaustedError(k, search_cutoff)

        freq, entry_idx, block_vec, exact = found
        bdim = symbol.block_dim(freq)
        if block_vec is None:
            block_vec = np.zeros(bdim, dtype=complex)
            block_vec[entry_idx] = 1.0
        full = np.zeros(freq.dim, dtype=complex)
        full[: bdim] = block_vec  # first representation block carries the vector
        image = symbol.apply_to_vector(freq, full)
        image_norm = float(np.linalg.norm(image))
        bound = (1.0 + freq.lam) ** (-k)
        certs.append(
            CounterexampleCertificate(
                k=k,
                ordinal=freq.j,
                label=freq.label,
                lam=freq.lam,
                image_norm=image_norm,
                bound=bound,
                exact=exact,
            )
        )
        support[freq.label] = full
        chosen.append(freq)
        lam_prev = freq.lam
        idx += 1

    return Counterexample(
        field=CoefficientField(explicit=support),
        frequencies=tuple(chosen),
        certificates=tuple(certs),
    )


def random_field(
    model: SpectralModel,
    cutoff: float,
    rng: np.random.Generator,
    n_support: int = 6,
    exclude: set[Label] | None = None,
) -> CoefficientField:
    """A finitely supported field with standard-normal complex entries on a
    random subset of the window (probe generator for estimate checks)."""
    freqs = enumerate_frequencies(model, cutoff)
    if exclude:
        freqs = [f for f in freqs if f.label not in exclude]
    if not freqs:
        raise PreconditionError("no frequencies available for a probe")
    count = min(n_support, len(freqs))
    picks = rng.choice(len(freqs), size=count, replace=False)
    data = {}
    for i in sorted(int(p) for p in picks):
        f = freqs[i]
        vec = rng.standard_normal(f.dim) + 1j * rng.standard_normal(f.dim)
        data[f.label] = vec
    return CoefficientField(explicit=data)

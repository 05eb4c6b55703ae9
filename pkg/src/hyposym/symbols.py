"""Matrix symbols of invariant operators.

An invariant operator acts on the coefficient vector of each frequency
through one matrix per frequency; this module represents those matrices,
evaluates them (in float and, where the coefficients allow, exactly in
rational arithmetic), measures their gain (smallest singular value) and
operator norm, combines them pointwise, and fits the polynomial order of
their norm growth.

Structure short-circuits keep the cost honest: the SU(2) symbol is a
block-diagonal replication of one representation block, so gains, norms,
kernels, and products are always computed on the block, never on the
replicated matrix; diagonal blocks skip the SVD entirely (gain is the
smallest |entry|, norm the largest).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .errors import PreconditionError, WindowTooSmallError
from .exact import Surd
from .fitting import envelope_fit
from .spectral import (
    FrequencyIndex,
    Label,
    SpectralModel,
    Su2Label,
    Torus2Label,
    su2_levels,
    torus_lattice,
)

__all__ = [
    "Coefficient",
    "TorusPoly",
    "Su2DiagPoly",
    "MatrixTable",
    "OperatorSpec",
    "MatrixSymbol",
    "GainSample",
    "GainTable",
    "OrderEstimate",
    "model_kind_of",
    "build_symbol",
    "identity_symbol",
    "eval_symbol",
    "smallest_gain",
    "operator_norm",
    "combine",
    "gain_table",
    "estimate_order",
]

RealPart = Fraction | Surd | float


@dataclass(frozen=True)
class Coefficient:
    """A complex scalar whose parts are exact (Fraction/Surd) or float.

    Exactness is declared, not inferred: a float part keeps the whole
    coefficient off every certification path even when its value happens
    to be rational (every float is), while int/Fraction/Surd parts are
    treated as exact statements about the operator.
    """

    re: RealPart
    im: RealPart

    @staticmethod
    def make(re=0, im=0) -> "Coefficient":
        def norm(x):
            if isinstance(x, bool):
                raise PreconditionError("boolean is not a coefficient part")
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, (Fraction, Surd, float)):
                return x
            raise PreconditionError(f"unsupported coefficient part {x!r}")

        return Coefficient(norm(re), norm(im))

    @staticmethod
    def from_complex(z: complex) -> "Coefficient":
        return Coefficient(float(z.real), float(z.imag))

    @property
    def is_exact(self) -> bool:
        return not (isinstance(self.re, float) or isinstance(self.im, float))

    def rational_parts(self) -> tuple[Fraction, Fraction] | None:
        if isinstance(self.re, Fraction) and isinstance(self.im, Fraction):
            return self.re, self.im
        return None

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def is_zero(self) -> bool:
        if self.is_exact:
            return self.re == 0 and self.im == 0
        return float(self.re) == 0.0 and float(self.im) == 0.0

    def add(self, other: "Coefficient") -> "Coefficient":
        try:
            return Coefficient.make(self.re + other.re, self.im + other.im)
        except (ValueError, TypeError):
            # incompatible exact kinds (e.g. mixed radicands): fall back to float
            return Coefficient.from_complex(self.to_complex() + other.to_complex())


def _merge_terms(terms, make_coeff=True):
    merged: dict[tuple[int, int], Coefficient] = {}
    order: list[tuple[int, int]] = []
    for coeff, a, b in terms:
        if not isinstance(coeff, Coefficient):
            coeff = Coefficient.from_complex(complex(coeff))
        if a < 0 or b < 0:
            raise PreconditionError("degrees must be nonnegative")
        key = (a, b)
        if key in merged:
            merged[key] = merged[key].add(coeff)
        else:
            merged[key] = coeff
            order.append(key)
    return tuple(
        (merged[k], k[0], k[1]) for k in sorted(order) if not merged[k].is_zero()
    )


@dataclass(frozen=True)
class TorusPoly:
    """Polynomial in the torus derivatives d_t, d_x.

    The symbol at (xi, eta) is sum of coeff * (i xi)^deg_t (i eta)^deg_x.
    Terms are keyed by degree; duplicates merge on construction.
    """

    terms: tuple[tuple[Coefficient, int, int], ...]

    @staticmethod
    def make(terms) -> "TorusPoly":
        return TorusPoly(_merge_terms(terms))

    def coefficient(self, deg_t: int, deg_x: int) -> Coefficient | None:
        for c, a, b in self.terms:
            if (a, b) == (deg_t, deg_x):
                return c
        return None


@dataclass(frozen=True)
class Su2DiagPoly:
    """Polynomial in the SU(2) tokens d0 (-> i m) and negLap (-> l(l+1)).

    The representation block at level l is diagonal with entries
    sum of coeff * (i m)^deg_d0 * (l(l+1))^deg_neglap, m = -l..l in unit steps.
    """

    terms: tuple[tuple[Coefficient, int, int], ...]

    @staticmethod
    def make(terms) -> "Su2DiagPoly":
        return Su2DiagPoly(_merge_terms(terms))

    def coefficient(self, deg_d0: int, deg_neglap: int) -> Coefficient | None:
        for c, a, b in self.terms:
            if (a, b) == (deg_d0, deg_neglap):
                return c
        return None


class MatrixTable:
    """Explicit per-frequency blocks loaded from a table.

    Torus entries are 1x1; SU(2) entries are the (2l+1)x(2l+1)
    representation block (replication across the eigenspace is implicit).
    """

    def __init__(self, model_kind: str, entries: Mapping[Label, np.ndarray]):
        if model_kind not in ("torus2", "su2"):
            raise PreconditionError(f"unknown model kind {model_kind!r}")
        self.model_kind = model_kind
        table = {}
        for label, mat in entries.items():
            arr = np.array(mat, dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise PreconditionError(f"table block for {label} is not square")
            expected = 1 if isinstance(label, Torus2Label) else label.rep_dim()
            if arr.shape[0] != expected:
                raise PreconditionError(
                    f"table block for {label} has size {arr.shape[0]}, expected {expected}"
                )
            arr.setflags(write=False)
            table[label] = arr
        self.entries = table

    def block(self, label: Label) -> np.ndarray:
        try:
            return self.entries[label]
        except KeyError:
            raise PreconditionError(f"matrix table missing frequency {label}")

    def __eq__(self, other):
        if not isinstance(other, MatrixTable):
            return NotImplemented
        return (
            self.model_kind == other.model_kind
            and set(self.entries) == set(other.entries)
            and all(
                np.array_equal(self.entries[k], other.entries[k])
                for k in self.entries
            )
        )


OperatorSpec = TorusPoly | Su2DiagPoly | MatrixTable


def model_kind_of(op: OperatorSpec) -> str:
    if isinstance(op, TorusPoly):
        return "torus2"
    if isinstance(op, Su2DiagPoly):
        return "su2"
    return op.model_kind


# ---------------------------------------------------------------------------
# evaluation (float and exact)

# powers of i as exact (re, im) pairs
_I_POW = (
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
)


def _cmul(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def torus_values(op: TorusPoly, xi, eta) -> np.ndarray:
    """Vectorized symbol values sum c (i xi)^a (i eta)^b."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    out = np.zeros(np.broadcast(xi, eta).shape, dtype=complex)
    for coeff, a, b in op.terms:
        out += coeff.to_complex() * (1j * xi) ** a * (1j * eta) ** b
    return out


def torus_value_exact(op: TorusPoly, xi: int, eta: int):
    """Exact (re, im) of the symbol, or None if a coefficient is inexact."""
    acc = (Fraction(0), Fraction(0))
    for coeff, a, b in op.terms:
        parts = coeff.rational_parts()
        if parts is None:
            return None
        mag = Fraction(xi**a * eta**b)
        term = _cmul(parts, _I_POW[(a + b) % 4])
        acc = (acc[0] + term[0] * mag, acc[1] + term[1] * mag)
    return acc


def su2_m_values(twice_ell: int) -> np.ndarray:
    """The weights m = -l .. l in unit steps, as floats."""
    return np.arange(-twice_ell, twice_ell + 1, 2, dtype=float) / 2.0


def su2_diag_values(op: Su2DiagPoly, twice_ell: int) -> np.ndarray:
    """Diagonal of the representation block at level l = twice_ell / 2."""
    m = su2_m_values(twice_ell)
    lam = twice_ell * (twice_ell + 2) / 4.0
    out = np.zeros(m.shape, dtype=complex)
    for coeff, a, b in op.terms:
        out += coeff.to_complex() * (1j * m) ** a * lam**b
    return out


def su2_diag_exact(op: Su2DiagPoly, twice_ell: int):
    """Exact diagonal entries as (re, im) pairs, or None if inexact."""
    lam = Fraction(twice_ell * (twice_ell + 2), 4)
    entries = []
    for t in range(-twice_ell, twice_ell + 1, 2):
        m = Fraction(t, 2)
        acc = (Fraction(0), Fraction(0))
        for coeff, a, b in op.terms:
            parts = coeff.rational_parts()
            if parts is None:
                return None
            mag = m**a * lam**b
            term = _cmul(parts, _I_POW[a % 4])
            acc = (acc[0] + term[0] * mag, acc[1] + term[1] * mag)
        entries.append(acc)
    return entries


# ---------------------------------------------------------------------------
# the symbol object


def smallest_gain(matrix) -> float:
    """Smallest singular value: inf over unit vectors of ||A v||."""
    a = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("gain needs a square matrix")
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def operator_norm(matrix) -> float:
    """Largest singular value."""
    a = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("operator norm needs a square matrix")
    return float(np.linalg.svd(a, compute_uv=False)[0])


class MatrixSymbol:
    """Per-frequency matrix of an invariant operator.

    ``replicated`` marks the SU(2) layout where the full matrix is
    block_dim copies of one representation block; every computation then
    happens at block level.  A symbol carries a diagonal evaluator, a dense
    block evaluator, or both; exact evaluators are optional and feed the
    certification paths.
    """

    def __init__(
        self,
        model: SpectralModel,
        *,
        replicated: bool,
        diag_fn: Callable[[FrequencyIndex], np.ndarray] | None = None,
        mat_fn: Callable[[FrequencyIndex], np.ndarray] | None = None,
        exact_diag_fn=None,
        torus_bulk=None,
    ):
        if diag_fn is None and mat_fn is None:
            raise PreconditionError("symbol needs an evaluator")
        self.model = model
        self.nu = model.nu
        self.replicated = replicated
        self.diag_fn = diag_fn
        self.mat_fn = mat_fn
        self.exact_diag_fn = exact_diag_fn
        self.torus_bulk = torus_bulk

    @property
    def is_diagonal(self) -> bool:
        return self.diag_fn is not None

    @property
    def structure(self) -> str:
        if self.replicated:
            return "su2_block"
        return "diagonal" if self.is_diagonal else "dense"

    def _check(self, freq: FrequencyIndex):
        want_su2 = self.model.kind == "su2"
        if want_su2 != isinstance(freq.label, Su2Label):
            raise PreconditionError("frequency does not match the symbol's model")

    def block_dim(self, freq: FrequencyIndex) -> int:
        if self.replicated:
            return freq.label.rep_dim()
        return freq.dim

    def diagonal(self, freq: FrequencyIndex) -> np.ndarray | None:
        """Diagonal of the representation block, when diagonal."""
        if self.diag_fn is None:
            return None
        self._check(freq)
        return np.asarray(self.diag_fn(freq), dtype=complex)

    def block(self, freq: FrequencyIndex) -> np.ndarray:
        """The representation block (equals the full matrix off SU(2))."""
        self._check(freq)
        if self.diag_fn is not None:
            return np.diag(np.asarray(self.diag_fn(freq), dtype=complex))
        return np.asarray(self.mat_fn(freq), dtype=complex)

    def exact_diagonal(self, freq: FrequencyIndex):
        """Exact (re, im) diagonal entries, or None when unavailable."""
        if self.exact_diag_fn is None:
            return None
        self._check(freq)
        return self.exact_diag_fn(freq)

    def full_matrix(self, freq: FrequencyIndex) -> np.ndarray:
        """The dim x dim matrix (replicates the block on SU(2))."""
        b = self.block(freq)
        if not self.replicated:
            return b
        copies = freq.label.rep_dim()
        return np.kron(np.eye(copies, dtype=complex), b)

    def gain(self, freq: FrequencyIndex) -> float:
        """Smallest gain m(sigma(j)); block-level, diagonal short-circuit."""
        d = self.diagonal(freq)
        if d is not None:
            return float(np.min(np.abs(d)))
        return smallest_gain(self.block(freq))

    def opnorm(self, freq: FrequencyIndex) -> float:
        d = self.diagonal(freq)
        if d is not None:
            return float(np.max(np.abs(d)))
        return operator_norm(self.block(freq))

    def apply_to_vector(self, freq: FrequencyIndex, v: np.ndarray) -> np.ndarray:
        """Multiply a full coefficient vector by the symbol at one frequency."""
        self._check(freq)
        v = np.asarray(v, dtype=complex)
        if v.shape != (freq.dim,):
            raise PreconditionError(
                f"coefficient vector has length {v.shape}, expected ({freq.dim},)"
            )
        if not self.replicated:
            d = self.diagonal(freq)
            if d is not None:
                return d * v
            return self.block(freq) @ v
        rep = freq.label.rep_dim()
        chunks = v.reshape(rep, rep)
        d = self.diagonal(freq)
        if d is not None:
            out = chunks * d[None, :]
        else:
            out = chunks @ self.block(freq).T
        return out.reshape(freq.dim)


def build_symbol(op: OperatorSpec, model: SpectralModel) -> MatrixSymbol:
    """Build the evaluable symbol of an operator spec for a model."""
    if model_kind_of(op) != model.kind:
        raise PreconditionError(
            f"operator is for model {model_kind_of(op)!r}, not {model.kind!r}"
        )
    if isinstance(op, TorusPoly):

        def exact_diag(f):
            v = torus_value_exact(op, f.label.xi, f.label.eta)
            return None if v is None else [v]

        return MatrixSymbol(
            model,
            replicated=False,
            diag_fn=lambda f: torus_values(op, f.label.xi, f.label.eta).reshape(1),
            exact_diag_fn=exact_diag,
            torus_bulk=lambda xi, eta: torus_values(op, xi, eta),
        )
    if isinstance(op, Su2DiagPoly):
        return MatrixSymbol(
            model,
            replicated=True,
            diag_fn=lambda f: su2_diag_values(op, f.label.twice_ell),
            exact_diag_fn=lambda f: su2_diag_exact(op, f.label.twice_ell),
        )
    if isinstance(op, MatrixTable):
        if model.kind == "torus2":
            return MatrixSymbol(
                model,
                replicated=False,
                mat_fn=lambda f: op.block(f.label),
            )
        return MatrixSymbol(
            model,
            replicated=True,
            mat_fn=lambda f: op.block(f.label),
        )
    raise PreconditionError(f"unknown operator spec {op!r}")


def identity_symbol(model: SpectralModel) -> MatrixSymbol:
    if model.kind == "torus2":
        return MatrixSymbol(
            model,
            replicated=False,
            diag_fn=lambda f: np.ones(1, dtype=complex),
            exact_diag_fn=lambda f: [(Fraction(1), Fraction(0))],
            torus_bulk=lambda xi, eta: np.ones(np.broadcast(xi, eta).shape, complex),
        )
    return MatrixSymbol(
        model,
        replicated=True,
        diag_fn=lambda f: np.ones(f.label.rep_dim(), dtype=complex),
        exact_diag_fn=lambda f: [(Fraction(1), Fraction(0))] * f.label.rep_dim(),
    )


def eval_symbol(op: OperatorSpec, model: SpectralModel, freq: FrequencyIndex) -> np.ndarray:
    """The full dim x dim symbol matrix at one frequency."""
    return build_symbol(op, model).full_matrix(freq)


# ---------------------------------------------------------------------------
# pointwise algebra


def _exact_combine(a, b, op):
    if a is None or b is None:
        return None

    def fn(freq):
        da, db = a(freq), b(freq)
        if da is None or db is None:
            return None
        if op == "add":
            return [(x[0] + y[0], x[1] + y[1]) for x, y in zip(da, db)]
        return [_cmul(x, y) for x, y in zip(da, db)]

    return fn


def _exact_scale(a, parts):
    if a is None or parts is None:
        return None

    def fn(freq):
        da = a(freq)
        if da is None:
            return None
        return [_cmul(parts, x) for x in da]

    return fn


def combine(operation: str, symbols, scalar=None) -> MatrixSymbol:
    """Pointwise algebra on symbols: 'add', 'scale', or 'compose'.

    All symbols must share a model.  'scale' takes one symbol plus a scalar
    (complex or Coefficient); 'add' and 'compose' fold left over two or more.
    """
    symbols = list(symbols)
    if not symbols:
        raise PreconditionError("combine needs at least one symbol")
    model = symbols[0].model
    for s in symbols[1:]:
        if s.model.kind != model.kind:
            raise PreconditionError("cannot combine symbols from different models")

    if operation == "scale":
        if len(symbols) != 1 or scalar is None:
            raise PreconditionError("scale takes one symbol and one scalar")
        coeff = scalar if isinstance(scalar, Coefficient) else Coefficient.from_complex(complex(scalar))
        z = coeff.to_complex()
        a = symbols[0]
        return MatrixSymbol(
            model,
            replicated=a.replicated,
            diag_fn=None if a.diag_fn is None else (lambda f: z * a.diag_fn(f)),
            mat_fn=None if a.diag_fn is not None or a.mat_fn is None else (lambda f: z * a.mat_fn(f)),
            exact_diag_fn=_exact_scale(a.exact_diag_fn, coeff.rational_parts()),
            torus_bulk=None if a.torus_bulk is None else (lambda xi, eta: z * a.torus_bulk(xi, eta)),
        )

    if operation not in ("add", "compose"):
        raise PreconditionError(f"unknown combine operation {operation!r}")
    if len(symbols) < 2:
        raise PreconditionError(f"{operation} takes at least two symbols")

    def fold(a: MatrixSymbol, b: MatrixSymbol) -> MatrixSymbol:
        if a.replicated != b.replicated:
            raise PreconditionError("cannot combine mismatched block structures")
        both_diag = a.diag_fn is not None and b.diag_fn is not None
        if operation == "add":
            diag = (lambda f: a.diag_fn(f) + b.diag_fn(f)) if both_diag else None
            mat = None if both_diag else (lambda f: a.block(f) + b.block(f))
            bulk = (
                (lambda xi, eta: a.torus_bulk(xi, eta) + b.torus_bulk(xi, eta))
                if a.torus_bulk is not None and b.torus_bulk is not None
                else None
            )
        else:
            diag = (lambda f: a.diag_fn(f) * b.diag_fn(f)) if both_diag else None
            mat = None if both_diag else (lambda f: a.block(f) @ b.block(f))
            bulk = (
                (lambda xi, eta: a.torus_bulk(xi, eta) * b.torus_bulk(xi, eta))
                if a.torus_bulk is not None and b.torus_bulk is not None
                else None
            )
        return MatrixSymbol(
            model,
            replicated=a.replicated,
            diag_fn=diag,
            mat_fn=mat,
            exact_diag_fn=_exact_combine(
                a.exact_diag_fn, b.exact_diag_fn, "add" if operation == "add" else "mul"
            )
            if both_diag
            else None,
            torus_bulk=bulk,
        )

    out = symbols[0]
    for s in symbols[1:]:
        out = fold(out, s)
    return out


# ---------------------------------------------------------------------------
# gain sampling over a window


@dataclass(frozen=True)
class GainSample:
    """Gain and operator norm of the symbol at one frequency."""

    freq: FrequencyIndex
    gain: float
    opnorm: float


class GainTable:
    """Vectorized gain/opnorm samples over an enumeration window.

    Heavy scans keep everything in arrays; FrequencyIndex objects are
    materialized on demand (singular hits, small windows, reports).
    """

    def __init__(self, model, ordinals, lam, gain, opnorm, label_data):
        self.model = model
        self.ordinals = ordinals
        self.lam = lam
        self.gain = gain
        self.opnorm = opnorm
        self._label_data = label_data

    def __len__(self):
        return len(self.ordinals)

    def label(self, i: int) -> Label:
        kind, *data = self._label_data
        if kind == "torus":
            return Torus2Label(int(data[0][i]), int(data[1][i]))
        return Su2Label(int(data[0][i]))

    def freq(self, i: int) -> FrequencyIndex:
        label = self.label(i)
        return FrequencyIndex(
            j=int(self.ordinals[i]),
            lam=float(self.lam[i]),
            dim=label.block_dim(),
            label=label,
        )

    def samples(self) -> list[GainSample]:
        return [
            GainSample(self.freq(i), float(self.gain[i]), float(self.opnorm[i]))
            for i in range(len(self))
        ]


def gain_table(symbol: MatrixSymbol, model: SpectralModel, cutoff: float) -> GainTable:
    """Gains and operator norms of all frequencies with eigenvalue <= cutoff."""
    if symbol.model.kind != model.kind:
        raise PreconditionError("symbol does not match the model")
    if model.kind == "torus2":
        xi, eta, lam = torus_lattice(cutoff)
        ordinals = np.arange(len(xi), dtype=np.int64)
        if symbol.torus_bulk is not None:
            vals = np.abs(symbol.torus_bulk(xi, eta))
            return GainTable(model, ordinals, lam.astype(float), vals, vals.copy(),
                             ("torus", xi, eta))
        gains = np.empty(len(xi))
        norms = np.empty(len(xi))
        for i in range(len(xi)):
            f = FrequencyIndex(int(ordinals[i]), float(lam[i]), 1,
                               Torus2Label(int(xi[i]), int(eta[i])))
            gains[i] = symbol.gain(f)
            norms[i] = symbol.opnorm(f)
        return GainTable(model, ordinals, lam.astype(float), gains, norms,
                         ("torus", xi, eta))

    levels = su2_levels(cutoff)
    ordinals = np.arange(len(levels), dtype=np.int64)
    lam = levels * (levels + 2) / 4.0
    gains = np.empty(len(levels))
    norms = np.empty(len(levels))
    for i, t in enumerate(levels):
        lab = Su2Label(int(t))
        f = FrequencyIndex(int(ordinals[i]), float(lab.eigenvalue()),
                           lab.block_dim(), lab)
        gains[i] = symbol.gain(f)
        norms[i] = symbol.opnorm(f)
    return GainTable(model, ordinals, lam, gains, norms, ("su2", levels))


# ---------------------------------------------------------------------------
# order estimation


@dataclass(frozen=True)
class OrderEstimate:
    """Envelope fit of log ||sigma|| against log (1+lambda)^{1/nu}.

    order_hat is the fitted polynomial order; c_hat makes
    ||sigma(j)|| <= c_hat (1+lambda_j)^{order_hat/nu} hold on every sample.
    """

    order_hat: float
    c_hat: float
    n_envelope: int


def estimate_order(symbol: MatrixSymbol, model: SpectralModel, cutoff: float) -> OrderEstimate:
    table = gain_table(symbol, model, cutoff)
    positive_lam = table.lam > 0
    if positive_lam.sum() < 8:
        raise WindowTooSmallError(
            "order estimation needs at least 8 frequencies with positive eigenvalue"
        )
    norms = table.opnorm
    nz = norms > 0
    if not nz.any():
        return OrderEstimate(float("-inf"), 0.0, 0)
    x = np.log1p(table.lam[nz]) / model.nu
    y = np.log(norms[nz])
    slope, _, npts = envelope_fit(x, y, mode="max")
    weights = np.exp(np.log1p(table.lam[nz]) * (slope / model.nu))
    c_hat = float(np.max(norms[nz] / weights))
    return OrderEstimate(float(slope), c_hat, npts)

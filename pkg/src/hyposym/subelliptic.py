"""A-priori inequalities on spectral truncations.

On a truncation the subelliptic estimates become exact finite-dimensional
linear algebra: the kernel is frequency-local (the symbol acts blockwise),
the per-frequency constants are smallest nonzero singular values, and the
optimal constant in

    ||P f||_s >= C ||f||_{s+m}      (f orthogonal to the kernel)

is an explicit minimum over frequencies of weighted singular values --
independent of s, which the report records and asserts.  The companion
inequality

    ||f||_{s+m} <= K (||f||_s + ||P f||_s)

holds with K = max(K1, 1/C*) where K1 is the norm-equivalence constant of
the (finite-dimensional) truncated kernel.  Reports carry the cutoff so
truncation-level statements are never passed off as asymptotic ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField, apply_symbol, sobolev_norm
from .errors import PreconditionError
from .spectral import (
    FrequencyIndex,
    Label,
    SpectralModel,
    enumerate_frequencies,
    frequency_for_label,
)
from .symbols import MatrixSymbol

KERNEL_TOL = 1e-12

__all__ = [
    "KERNEL_TOL",
    "TruncatedKernel",
    "SubellipticReport",
    "AlphaCheck",
    "BetaCheck",
    "kernel_on_truncation",
    "per_frequency_constant",
    "best_alpha_constant",
    "extremal_field",
    "check_alpha",
    "check_beta",
]


def _block_nullspace(symbol: MatrixSymbol, freq: FrequencyIndex, tol: float):
    """Orthonormal basis (columns) of the block's numerical nullspace."""
    diag = symbol.diagonal(freq)
    if diag is not None:
        scale = max(1.0, float(np.max(np.abs(diag))))
        idx = np.flatnonzero(np.abs(diag) <= tol * scale)
        basis = np.zeros((len(diag), len(idx)), dtype=complex)
        for col, i in enumerate(idx):
            basis[i, col] = 1.0
        return basis
    block = symbol.block(freq)
    _, svals, vh = np.linalg.svd(block)
    scale = max(1.0, float(svals[0]) if len(svals) else 0.0)
    null_rows = np.flatnonzero(svals <= tol * scale)
    return vh[null_rows].conj().T


@dataclass(frozen=True)
class TruncatedKernel:
    """Per-frequency nullspaces of the symbol up to a cutoff.

    Bases are stored at block level; on SU(2) the kernel of the full
    replicated matrix is the block kernel repeated in every chunk, so
    ``total_dim`` counts block nullity times the number of copies.
    ``boundary_singular`` flags kernel frequencies in the top fifth of the
    window -- evidence that the kernel keeps growing with the cutoff (as
    with rational torus resonances).
    """

    model: SpectralModel
    cutoff: float
    tol: float
    blocks: dict
    replicated: bool
    total_dim: int
    boundary_singular: bool

    def nullity(self, label: Label) -> int:
        basis = self.blocks.get(label)
        if basis is None:
            return 0
        copies = label.block_dim() // basis.shape[0] if self.replicated else 1
        return basis.shape[1] * copies

    def project_out(self, freq: FrequencyIndex, vec: np.ndarray) -> np.ndarray:
        """Remove the kernel component of a full coefficient vector.

        Kernel orthogonality in any s-weighted inner product agrees with the
        Euclidean one: the weight is a per-frequency scalar.
        """
        basis = self.blocks.get(freq.label)
        if basis is None:
            return vec
        if not self.replicated:
            return vec - basis @ (basis.conj().T @ vec)
        rep = freq.label.rep_dim()
        chunks = vec.reshape(rep, rep)
        coefs = chunks @ basis.conj()  # (copies x nullity)
        return (chunks - coefs @ basis.T).reshape(freq.dim)


def kernel_on_truncation(
    symbol: MatrixSymbol,
    model: SpectralModel,
    cutoff: float,
    tol: float = KERNEL_TOL,
) -> TruncatedKernel:
    """Null vectors of every block with eigenvalue <= cutoff."""
    if cutoff <= 0:
        raise PreconditionError("cutoff must be positive")
    blocks = {}
    total = 0
    boundary = False
    for freq in enumerate_frequencies(model, cutoff):
        basis = _block_nullspace(symbol, freq, tol)
        if basis.shape[1] == 0:
            continue
        basis.setflags(write=False)
        blocks[freq.label] = basis
        copies = freq.label.rep_dim() if symbol.replicated else 1
        total += basis.shape[1] * copies
        if freq.lam > 0.8 * cutoff:
            boundary = True
    return TruncatedKernel(
        model=model,
        cutoff=cutoff,
        tol=tol,
        blocks=blocks,
        replicated=symbol.replicated,
        total_dim=total,
        boundary_singular=boundary,
    )


def per_frequency_constant(
    symbol: MatrixSymbol, freq: FrequencyIndex, tol: float = KERNEL_TOL
) -> float:
    """Smallest nonzero singular value of the block (the constant C_j in
    ||sigma(j) v|| >= C_j ||v|| off the kernel); +inf for an all-kernel block."""
    diag = symbol.diagonal(freq)
    if diag is not None:
        mags = np.abs(diag)
        scale = max(1.0, float(np.max(mags)))
        nz = mags[mags > tol * scale]
        return float(np.min(nz)) if len(nz) else float("inf")
    svals = np.linalg.svd(symbol.block(freq), compute_uv=False)
    scale = max(1.0, float(svals[0]))
    nz = svals[svals > tol * scale]
    return float(np.min(nz)) if len(nz) else float("inf")


@dataclass(frozen=True)
class SubellipticReport:
    """Exact constants of the truncated a-priori inequalities.

    c_star is attained at the recorded witness; k_star = max(k1, 1/c_star)
    is a sufficient constant for the companion inequality, with k1 the
    norm-equivalence constant of the truncated kernel.
    """

    s: float
    m: float
    cutoff: float
    c_star: float
    k_star: float
    k1: float
    witness_label: Label
    witness_index: int
    witness_lam: float
    kernel_dim: int
    boundary_singular: bool

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "m": self.m,
            "cutoff": self.cutoff,
            "c_star": self.c_star,
            "k_star": self.k_star,
            "k1": self.k1,
            "witness": {
                "label": str(self.witness_label),
                "entry_index": self.witness_index,
                "lambda": self.witness_lam,
            },
            "kernel_dim": self.kernel_dim,
            "boundary_singular": self.boundary_singular,
        }


def best_alpha_constant(
    symbol: MatrixSymbol,
    model: SpectralModel,
    s: float,
    m: float,
    cutoff: float,
    tol: float = KERNEL_TOL,
) -> SubellipticReport:
    """Exact optimal C in ||P f||_s >= C ||f||_{s+m} on the truncation.

    C* is the minimum over frequencies and nonzero singular values of
    s_r(j) (1+lambda_j)^{-m/nu}; the witness achieves it.  The value does
    not depend on s (the weights cancel), which callers can assert by
    recomputation.
    """
    kernel = kernel_on_truncation(symbol, model, cutoff, tol)
    best = None
    for freq in enumerate_frequencies(model, cutoff):
        diag = symbol.diagonal(freq)
        weight = (1.0 + freq.lam) ** (-m / model.nu)
        if diag is not None:
            mags = np.abs(diag)
            scale = max(1.0, float(np.max(mags)))
            nz = np.flatnonzero(mags > tol * scale)
            if len(nz) == 0:
                continue
            i = nz[np.argmin(mags[nz])]
            cand = float(mags[i]) * weight
            entry = int(i)
        else:
            svals = np.linalg.svd(symbol.block(freq), compute_uv=False)
            scale = max(1.0, float(svals[0]))
            nz_vals = svals[svals > tol * scale]
            if len(nz_vals) == 0:
                continue
            # svals descend, so the smallest nonzero sits at the prefix end
            cand = float(nz_vals[-1]) * weight
            entry = int(len(nz_vals) - 1)
        if best is None or cand < best[0]:
            best = (cand, freq, entry)
    if best is None:
        raise PreconditionError("every block is entirely kernel on the truncation")

    c_star, freq, entry = best
    if kernel.blocks:
        k1 = max(
            (1.0 + float(lab.eigenvalue())) ** (m / model.nu) for lab in kernel.blocks
        )
    else:
        k1 = 0.0
    k_star = max(k1, 1.0 / c_star) if c_star > 0 else float("inf")
    return SubellipticReport(
        s=s,
        m=m,
        cutoff=cutoff,
        c_star=c_star,
        k_star=k_star,
        k1=k1,
        witness_label=freq.label,
        witness_index=entry,
        witness_lam=freq.lam,
        kernel_dim=kernel.total_dim,
        boundary_singular=kernel.boundary_singular,
    )


def extremal_field(
    report: SubellipticReport, symbol: MatrixSymbol, model: SpectralModel
) -> CoefficientField:
    """The witness vector of a report, as a coefficient field.

    For diagonal blocks this is the basis vector of the extremal entry; for
    dense blocks the right singular vector of the extremal singular value.
    Placed in the first representation chunk on SU(2).
    """
    label = report.witness_label
    freq = frequency_for_label(model, label)
    bdim = symbol.block_dim(freq)
    diag = symbol.diagonal(freq)
    if diag is not None:
        block_vec = np.zeros(bdim, dtype=complex)
        block_vec[report.witness_index] = 1.0
    else:
        _, svals, vh = np.linalg.svd(symbol.block(freq))
        block_vec = vh[report.witness_index].conj()
    full = np.zeros(freq.dim, dtype=complex)
    full[:bdim] = block_vec
    return CoefficientField(explicit={label: full})


@dataclass(frozen=True)
class AlphaCheck:
    passed: bool
    ratio: float | None
    margin: float | None
    vacuous: bool
    projected_norm: float

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "ratio": self.ratio,
            "margin": self.margin,
            "vacuous": self.vacuous,
            "projected_norm": self.projected_norm,
        }


def check_alpha(
    symbol: MatrixSymbol,
    model: SpectralModel,
    f: CoefficientField,
    s: float,
    m: float,
    c: float,
    cutoff: float,
    kernel: TruncatedKernel | None = None,
) -> AlphaCheck:
    """Verify ||P f||_s >= c ||f||_{s+m} after projecting f off the kernel.

    A field living entirely in the kernel passes vacuously (flagged).
    """
    if kernel is None:
        kernel = kernel_on_truncation(symbol, model, cutoff)
    projected = {}
    for freq, vec in f.window(model, cutoff):
        w = kernel.project_out(freq, vec)
        # numerical kernels (dense SVD bases) leave roundoff residue; treat
        # a relatively vanished projection as gone so it flags vacuous
        if np.linalg.norm(w) > 1e-12 * np.linalg.norm(vec):
            projected[freq.label] = w
    f_perp = CoefficientField(explicit=projected)
    denom = sobolev_norm(f_perp, s + m, model, cutoff)
    if denom == 0.0:
        return AlphaCheck(passed=True, ratio=None, margin=None, vacuous=True,
                          projected_norm=0.0)
    num = sobolev_norm(apply_symbol(symbol, f_perp, cutoff), s, model, cutoff)
    ratio = num / denom
    return AlphaCheck(
        passed=ratio >= c * (1.0 - 1e-12),
        ratio=ratio,
        margin=ratio - c,
        vacuous=False,
        projected_norm=denom,
    )


@dataclass(frozen=True)
class BetaCheck:
    passed: bool
    achieved_k: float | None
    margin: float | None

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "achieved_k": self.achieved_k,
            "margin": self.margin,
        }


def check_beta(
    symbol: MatrixSymbol,
    model: SpectralModel,
    f: CoefficientField,
    s: float,
    m: float,
    k: float,
    cutoff: float,
) -> BetaCheck:
    """Verify ||f||_{s+m} <= k (||f||_s + ||P f||_s) on the truncation.

    No orthogonality is required; ``achieved_k`` is the smallest constant
    this probe admits.
    """
    lhs = sobolev_norm(f, s + m, model, cutoff)
    rhs0 = sobolev_norm(f, s, model, cutoff) + sobolev_norm(
        apply_symbol(symbol, f, cutoff), s, model, cutoff
    )
    if rhs0 == 0.0:
        return BetaCheck(passed=lhs == 0.0, achieved_k=None, margin=None)
    achieved = lhs / rhs0
    return BetaCheck(
        passed=lhs <= k * rhs0 * (1.0 + 1e-12),
        achieved_k=achieved,
        margin=k - achieved,
    )

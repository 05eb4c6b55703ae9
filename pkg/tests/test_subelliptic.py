import math

import numpy as np
import pytest

from hyposym import (
    SU2,
    TORUS2,
    CoefficientField,
    MatrixTable,
    Su2Label,
    Torus2Label,
    best_alpha_constant,
    build_symbol,
    check_alpha,
    check_beta,
    enumerate_frequencies,
    extremal_field,
    frequency_for_label,
    identity_symbol,
    kernel_on_truncation,
    per_frequency_constant,
    random_field,
)
from hyposym.errors import PreconditionError
from hyposym.symbols import Coefficient, TorusPoly

from conftest import torus_translation


# ---------------------------------------------------------------------------
# truncated kernels


def test_kernel_torus_antidiagonal(torus_resonant_symbol):
    kernel = kernel_on_truncation(torus_resonant_symbol, TORUS2, 50)
    # (t, -t) with 2 t^2 <= 50 plus the origin: t = -5..5
    assert kernel.total_dim == 11
    assert kernel.boundary_singular  # lambda = 50 sits at the window edge


def test_kernel_su2_gap_only_origin(su2_gap_symbol):
    kernel = kernel_on_truncation(su2_gap_symbol, SU2, 10 * 11)
    assert kernel.total_dim == 1
    assert set(kernel.blocks) == {Su2Label(0)}
    assert not kernel.boundary_singular


def test_kernel_identity_empty():
    kernel = kernel_on_truncation(identity_symbol(TORUS2), TORUS2, 100)
    assert kernel.total_dim == 0


def test_kernel_counts_zero_singular_values(su2_pell_symbol):
    # total_dim equals the zero singular values of the replicated matrices
    cutoff = 10 * 11
    kernel = kernel_on_truncation(su2_pell_symbol, SU2, cutoff)
    direct = 0
    for freq in enumerate_frequencies(SU2, cutoff):
        svals = np.linalg.svd(su2_pell_symbol.full_matrix(freq), compute_uv=False)
        direct += int(np.sum(svals <= 1e-12 * max(1.0, svals[0])))
    assert kernel.total_dim == direct
    # l = 1 block has two vanishing weights replicated across three chunks
    assert kernel.nullity(Su2Label(2)) == 6


def test_kernel_projection_removes_kernel_component(su2_pell_symbol):
    kernel = kernel_on_truncation(su2_pell_symbol, SU2, 30)
    freq = frequency_for_label(SU2, Su2Label(2))
    rng = np.random.default_rng(1)
    vec = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    proj = kernel.project_out(freq, vec)
    # the image under the symbol is unchanged, and projecting twice is stable
    assert np.allclose(
        su2_pell_symbol.apply_to_vector(freq, proj),
        su2_pell_symbol.apply_to_vector(freq, vec),
        atol=1e-12,
    )
    assert np.allclose(kernel.project_out(freq, proj), proj, atol=1e-12)
    diag = su2_pell_symbol.diagonal(freq)
    zero_cols = np.flatnonzero(np.abs(diag) <= 1e-12)
    chunks = proj.reshape(3, 3)
    assert np.allclose(chunks[:, zero_cols], 0, atol=1e-12)


# ---------------------------------------------------------------------------
# per-frequency constants


def test_kernel_orthogonality_is_weight_independent(su2_pell_symbol):
    # the Sobolev weight is one scalar per frequency, so orthogonality to the
    # kernel in the s-weighted inner product coincides with the Euclidean one
    kernel = kernel_on_truncation(su2_pell_symbol, SU2, 30)
    freq = frequency_for_label(SU2, Su2Label(2))
    rng = np.random.default_rng(4)
    vec = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    proj = kernel.project_out(freq, vec)
    basis = kernel.blocks[Su2Label(2)]
    chunks = proj.reshape(3, 3)
    for s in (-2.0, 0.0, 1.5):
        weight = (1 + freq.lam) ** (2 * s / 2)
        inner = weight * (chunks @ basis.conj())
        assert np.allclose(inner, 0, atol=1e-12)


def test_per_frequency_constant_diagonal_cases(su2_gap_symbol, su2_pell_symbol):
    assert per_frequency_constant(
        su2_gap_symbol, frequency_for_label(SU2, Su2Label(2))
    ) == pytest.approx(1.0, abs=1e-14)
    assert per_frequency_constant(
        su2_pell_symbol, frequency_for_label(SU2, Su2Label(4))
    ) == pytest.approx(2.0, abs=1e-14)


def test_per_frequency_constant_table_block():
    table = MatrixTable("su2", {Su2Label(2): np.diag([0.0, 2.0, 5.0])})
    sym = build_symbol(table, SU2)
    assert per_frequency_constant(
        sym, frequency_for_label(SU2, Su2Label(2))
    ) == pytest.approx(2.0, abs=1e-12)


def test_per_frequency_constant_all_kernel_block(torus_resonant_symbol):
    freq = frequency_for_label(TORUS2, Torus2Label(1, -1))
    assert per_frequency_constant(torus_resonant_symbol, freq) == float("inf")


# ---------------------------------------------------------------------------
# optimal constants


def test_best_alpha_su2_gap_is_inverse_sqrt_seven(su2_gap_symbol):
    report = best_alpha_constant(su2_gap_symbol, SU2, 0.0, 1.0, 50 * 51)
    assert report.c_star == pytest.approx(1 / math.sqrt(7), rel=1e-12)
    assert report.witness_label == Su2Label(1)
    assert report.kernel_dim == 1
    assert report.k1 == pytest.approx(1.0, rel=1e-12)
    assert report.k_star == pytest.approx(math.sqrt(7), rel=1e-12)


def test_best_alpha_independent_of_s(su2_gap_symbol):
    values = [
        best_alpha_constant(su2_gap_symbol, SU2, s, 1.0, 50 * 51).c_star
        for s in (-1.0, 0.0, 2.0)
    ]
    assert max(values) - min(values) <= 1e-12 * max(values)


def test_best_alpha_identity():
    report = best_alpha_constant(identity_symbol(SU2), SU2, 0.0, 0.0, 30)
    assert report.c_star == pytest.approx(1.0, rel=1e-12)
    assert report.k_star == pytest.approx(1.0, rel=1e-12)


def test_best_alpha_torus_imaginary_coefficient():
    sym = build_symbol(torus_translation(Coefficient.make(0, 1)), TORUS2)
    report = best_alpha_constant(sym, TORUS2, 0.0, 0.0, 900)
    assert report.c_star == pytest.approx(1.0, rel=1e-12)
    assert report.witness_lam == 1.0


def test_best_alpha_rejects_all_kernel():
    zero = TorusPoly.make([(Coefficient.make(0), 1, 0)])
    with pytest.raises(PreconditionError):
        best_alpha_constant(build_symbol(zero, TORUS2), TORUS2, 0.0, 1.0, 40)


def test_witness_achieves_c_star(su2_gap_symbol):
    report = best_alpha_constant(su2_gap_symbol, SU2, 0.0, 1.0, 50 * 51)
    witness = extremal_field(report, su2_gap_symbol, SU2)
    chk = check_alpha(su2_gap_symbol, SU2, witness, 0.0, 1.0, report.c_star, 50 * 51)
    assert chk.passed and not chk.vacuous
    assert chk.ratio == pytest.approx(report.c_star, rel=1e-9)
    # the inflated constant must fail on the witness
    inflated = check_alpha(
        su2_gap_symbol, SU2, witness, 0.0, 1.0, report.c_star * (1 + 1e-6), 50 * 51
    )
    assert not inflated.passed


def test_alpha_never_fails_below_c_star(su2_gap_symbol):
    cutoff = 20 * 21
    report = best_alpha_constant(su2_gap_symbol, SU2, 0.0, 1.0, cutoff)
    kernel = kernel_on_truncation(su2_gap_symbol, SU2, cutoff)
    rng = np.random.default_rng(7)
    for _ in range(50):
        probe = random_field(SU2, cutoff, rng)
        chk = check_alpha(
            su2_gap_symbol, SU2, probe, 0.0, 1.0, report.c_star, cutoff, kernel=kernel
        )
        assert chk.passed


def test_alpha_kernel_vector_is_vacuous(torus_resonant_symbol):
    f = CoefficientField.from_dict({Torus2Label(1, -1): [1.0]})
    chk = check_alpha(torus_resonant_symbol, TORUS2, f, 0.0, 1.0, 0.5, 50)
    assert chk.passed and chk.vacuous


def test_alpha_numerical_kernel_vector_is_vacuous():
    # a dense table block with a genuine null direction: the SVD basis only
    # zeroes it to roundoff, which must still count as vacuous
    entries = {Su2Label(t): np.eye(t + 1, dtype=complex) for t in range(6)}
    entries[Su2Label(1)] = np.array([[1.0, 1.0j], [-1.0j, 1.0]])  # rank 1
    sym = build_symbol(MatrixTable("su2", entries), SU2)
    null_vec = np.array([1.0, 1.0j, 0, 0]) / math.sqrt(2)  # kernel of the block
    f = CoefficientField.from_dict({Su2Label(1): null_vec})
    chk = check_alpha(sym, SU2, f, 0.0, 1.0, 0.5, 8)
    assert chk.passed and chk.vacuous


def test_beta_kernel_supported_needs_bracket_power(torus_resonant_symbol):
    # kernel frequencies force ||f||_{s+m} / ||f||_s = (1+lambda)^{m/nu}
    f = CoefficientField.from_dict({Torus2Label(5, -5): [1.0]})  # lambda 50
    needed = (1 + 50) ** 0.5
    ok = check_beta(torus_resonant_symbol, TORUS2, f, 0.0, 1.0, needed, 50)
    assert ok.passed
    assert ok.achieved_k == pytest.approx(needed, rel=1e-12)
    tight = check_beta(
        torus_resonant_symbol, TORUS2, f, 0.0, 1.0, needed * (1 - 1e-6), 50
    )
    assert not tight.passed


def test_beta_identity_with_unit_constant():
    rng = np.random.default_rng(3)
    for _ in range(20):
        probe = random_field(SU2, 30, rng)
        chk = check_beta(identity_symbol(SU2), SU2, probe, 0.0, 0.0, 1.0, 30)
        assert chk.passed


def test_beta_su2_gap_sufficient_constant(su2_gap_symbol):
    cutoff = 20 * 21
    report = best_alpha_constant(su2_gap_symbol, SU2, 0.0, 1.0, cutoff)
    k = max(report.k1, 1.0 / report.c_star)
    rng = np.random.default_rng(11)
    for _ in range(50):
        probe = random_field(SU2, cutoff, rng)
        chk = check_beta(su2_gap_symbol, SU2, probe, 0.0, 1.0, k, cutoff)
        assert chk.passed

from fractions import Fraction

import pytest

from hyposym import (
    SU2,
    TORUS2,
    Su2DiagPoly,
    TorusPoly,
    build_symbol,
    certify,
    estimate_h,
    fit_growth,
    gain_table,
    identity_symbol,
    parse_real,
    singular_scan,
    verdict,
)
from hyposym.errors import NoFitError, PreconditionError
from hyposym.symbols import Coefficient

from conftest import (
    su2_laplace_minus_axis_sq,
    su2_neutral_plus,
    su2_pell_operator,
    torus_translation,
)
from oracles import brute_pell_su2_levels


# ---------------------------------------------------------------------------
# singular scans (brute-force derived expectations)


def test_scan_torus_antidiagonal(torus_resonant_symbol):
    hits = singular_scan(torus_resonant_symbol, TORUS2, 200)
    labels = {(f.label.xi, f.label.eta) for f in hits}
    expected = {(0, 0)} | {(t, -t) for t in range(-10, 11) if t}
    assert labels == expected
    lams = [f.lam for f in hits]
    assert lams == sorted(lams)


def test_scan_su2_pell_levels(su2_pell_symbol):
    hits = singular_scan(su2_pell_symbol, SU2, 300 * 301)
    assert [f.label.twice_ell for f in hits] == [0, 2, 16, 98, 576]
    # positive levels cross-checked against the exact weight-lattice scan
    assert [f.label.twice_ell for f in hits if f.lam > 0] == brute_pell_su2_levels(600)


def test_scan_su2_gap_only_origin(su2_gap_symbol):
    hits = singular_scan(su2_gap_symbol, SU2, 100 * 101)
    assert [f.label.twice_ell for f in hits] == [0]


def test_scan_requires_positive_cutoff(su2_gap_symbol):
    with pytest.raises(PreconditionError):
        singular_scan(su2_gap_symbol, SU2, 0)


# ---------------------------------------------------------------------------
# growth fits


def test_fit_identity_constant_gain():
    fit = fit_growth(gain_table(identity_symbol(TORUS2), TORUS2, 300), 2.0)
    assert fit.m == pytest.approx(0.0, abs=1e-9)
    assert fit.L == pytest.approx(1.0, rel=1e-9)
    assert fit.R == 0
    assert fit.residual <= 1e-12


def test_fit_su2_gap_exponent_one(su2_gap_symbol):
    fit = fit_growth(gain_table(su2_gap_symbol, SU2, 200 * 201), 2.0)
    assert 0.9 <= fit.m <= 1.05
    assert fit.R == 1  # past the singular origin


def test_fit_satisfies_lower_bound_on_samples(su2_gap_symbol):
    table = gain_table(su2_gap_symbol, SU2, 200 * 201)
    fit = fit_growth(table, 2.0)
    for i in range(len(table)):
        if table.ordinals[i] >= fit.R:
            bound = fit.L * (1 + table.lam[i]) ** (fit.m / 2.0)
            assert table.gain[i] >= bound * (1 - 1e-9)


def test_fit_golden_ratio_slope_minus_one():
    phi = parse_real("(1+1*sqrt(5))/2")
    sym = build_symbol(torus_translation(phi), TORUS2)
    fit = fit_growth(gain_table(sym, TORUS2, 10_000), 2.0)
    assert fit.m == pytest.approx(-1.0, abs=0.1)


def test_fit_rejects_all_singular():
    zero = TorusPoly.make([(Coefficient.make(0), 1, 0)])
    with pytest.raises(NoFitError):
        fit_growth(gain_table(build_symbol(zero, TORUS2), TORUS2, 100), 2.0)


def test_fit_accepts_sample_lists(su2_gap_symbol):
    samples = gain_table(su2_gap_symbol, SU2, 40 * 41).samples()
    fit = fit_growth(samples, 2.0)
    assert 0.85 <= fit.m <= 1.1


# ---------------------------------------------------------------------------
# exponent estimation


def test_estimate_h_su2_neutral_shift():
    assert estimate_h(su2_neutral_plus(1), SU2, 200 * 201) == pytest.approx(0.0, abs=0.05)


def test_estimate_h_certified_family_is_minus_inf():
    assert estimate_h(su2_pell_operator(), SU2, 300 * 301) == float("-inf")


def test_estimate_h_identity_zero():
    ident = TorusPoly.make([(Coefficient.make(1), 0, 0)])
    assert estimate_h(ident, TORUS2, 300) == pytest.approx(0.0, abs=0.05)


# ---------------------------------------------------------------------------
# certificates


def test_certify_rational_resonance():
    from hyposym import eval_symbol, frequency_for_label, smallest_gain

    op = torus_translation(Fraction(3, 7))
    cert = certify(op)
    assert cert.family == "rational_resonance"
    assert [(w.label.xi, w.label.eta) for w in cert.witnesses] == [
        (-3, 7), (-6, 14), (-9, 21)
    ]
    assert all(w.exact_zero for w in cert.witnesses)
    # witnesses are singular under direct evaluation too (float roundoff
    # stays below the relative singular threshold; exactness lives in the
    # rational path asserted by exact_zero)
    for w in cert.witnesses:
        freq = frequency_for_label(TORUS2, w.label)
        assert smallest_gain(eval_symbol(op, TORUS2, freq)) <= 1e-12


def test_certify_pure_time_derivative():
    cert = certify(TorusPoly.make([(Coefficient.make(1), 1, 0)]))
    assert cert.family == "rational_resonance"
    assert [(w.label.xi, w.label.eta) for w in cert.witnesses] == [
        (0, 1), (0, 2), (0, 3)
    ]


def test_certify_imaginary_half_integer():
    cert = certify(su2_neutral_plus(Coefficient.make(0, Fraction(-1, 2))))
    assert cert.family == "imaginary_half_integer"
    assert [w.label.twice_ell for w in cert.witnesses] == [1, 3, 5]


def test_certify_plain_neutral_derivative():
    cert = certify(Su2DiagPoly.make([(Coefficient.make(1), 1, 0)]))
    assert cert.family == "imaginary_half_integer"
    assert [w.label.twice_ell for w in cert.witnesses] == [0, 2, 4]


def test_certify_pell_family():
    cert = certify(su2_pell_operator())
    assert cert.family == "pell_family"
    assert [w.label.twice_ell for w in cert.witnesses] == [2, 16, 98]
    assert all(w.exact_zero for w in cert.witnesses)


def test_certify_negative_cases():
    assert certify(su2_neutral_plus(1)) is None  # real shift: hypoelliptic
    assert certify(su2_neutral_plus(Coefficient.make(0, Fraction(1, 3)))) is None
    assert certify(su2_laplace_minus_axis_sq()) is None  # ratio 1, not 2
    phi = parse_real("(1+1*sqrt(5))/2")
    assert certify(torus_translation(phi)) is None  # irrational ratio
    assert certify(torus_translation(2 + 3j)) is None  # independent rows


def test_certify_floats_never_certify():
    # 0.42857... is rational as a float, but floats are declared inexact
    assert certify(torus_translation(3 / 7)) is None
    assert certify(su2_neutral_plus(Coefficient.make(0.0, -0.5))) is None


def test_certify_scaled_families_still_fire():
    scaled = TorusPoly.make(
        [(Coefficient.make(Fraction(27, 10)), 1, 0),
         (Coefficient.make(Fraction(27, 10) * Fraction(3, 7)), 0, 1)]
    )
    cert = certify(scaled)
    assert cert is not None and cert.family == "rational_resonance"
    pell_scaled = Su2DiagPoly.make(
        [(Coefficient.make(Fraction(5, 3)), 0, 1),
         (Coefficient.make(Fraction(10, 3)), 2, 0)]
    )
    assert certify(pell_scaled).family == "pell_family"


# ---------------------------------------------------------------------------
# verdicts


def test_verdict_su2_real_shift_empirical():
    v = verdict(su2_neutral_plus(1), SU2, 200 * 201)
    assert v.kind == "empirical_gh"
    assert v.h_hat == pytest.approx(0.0, abs=0.05)


def test_verdict_torus_imaginary_coefficient_empirical():
    v = verdict(torus_translation(Coefficient.make(0, 1)), TORUS2, 3_000)
    assert v.kind == "empirical_gh"
    # gain sqrt(lambda) off the origin: the bound holds with every m <= 1
    assert v.h_hat >= 0.0


def test_verdict_rational_certified():
    liouville_prefix = sum(Fraction(1, 10**k) for k in (1, 2, 6, 24, 120, 720))
    v = verdict(torus_translation(liouville_prefix), TORUS2, 500)
    assert v.kind == "certified_not_gh"
    assert v.certificate.family == "rational_resonance"
    assert v.h_hat == float("-inf")


def test_verdict_float_rational_inconclusive_when_singular_persist():
    v = verdict(torus_translation(3 / 7), TORUS2, 10_000)
    assert v.kind == "inconclusive"
    assert any((f.label.xi, f.label.eta) == (-3, 7) for f in v.singular)


def test_verdict_scale_invariance_certified():
    base = torus_translation(Fraction(3, 7))
    scaled = TorusPoly.make(
        [(Coefficient.make(Fraction(-5, 2)), 1, 0),
         (Coefficient.make(Fraction(-5, 2) * Fraction(3, 7)), 0, 1)]
    )
    va = verdict(base, TORUS2, 400)
    vb = verdict(scaled, TORUS2, 400)
    assert va.kind == vb.kind == "certified_not_gh"
    assert va.certificate.family == vb.certificate.family


def test_verdict_scale_invariance_empirical():
    base = verdict(su2_neutral_plus(1), SU2, 100 * 101)
    scaled_op = Su2DiagPoly.make(
        [(Coefficient.make(2.7), 1, 0), (Coefficient.make(2.7), 0, 0)]
    )
    scaled = verdict(scaled_op, SU2, 100 * 101)
    assert base.kind == scaled.kind == "empirical_gh"
    assert scaled.h_hat == pytest.approx(base.h_hat, abs=1e-6)
    assert scaled.fit.L == pytest.approx(2.7 * base.fit.L, rel=1e-9)


def test_verdict_tiny_window_inconclusive():
    # singular origin plus only three usable levels: no fit is possible,
    # and the verdict must say so rather than extrapolate
    v = verdict(su2_laplace_minus_axis_sq(), SU2, 4)
    assert v.kind == "inconclusive"
    assert "samples" in v.reason


def test_verdict_model_mismatch():
    with pytest.raises(PreconditionError):
        verdict(torus_translation(1), SU2, 100)

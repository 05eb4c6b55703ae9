"""Command-line interface.

Commands: analyze, singular-scan, fit-exponent, counterexample,
diophantine, pell, torus-gain, subelliptic.  Reports are JSON on stdout
(or --out FILE, with gain samples / coefficient dumps as CSV sidecars).

Exit codes: 0 ok, 2 schema violation, 3 precondition violation,
4 search exhausted, 5 precision (widen the enclosure).

Reports are deterministic: identical spec, arguments, and seed reproduce
byte-identical output on one platform.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .coefficients import (
    apply_symbol,
    build_counterexample,
    classify_regularity,
    random_field,
)
from .diophantine import (
    classify_coefficient,
    continued_fraction,
    liouville_witnesses,
    pell_solutions,
    torus_min_gain,
)
from .errors import HyposymError, PreconditionError, WindowTooSmallError
from .exact import Fraction, Surd, format_real, parse_real
from .hypo import certify, fit_growth, singular_scan, verdict
from .specfile import emit_spec, parse_spec
from .subelliptic import (
    best_alpha_constant,
    check_alpha,
    check_beta,
    extremal_field,
    kernel_on_truncation,
)
from .symbols import build_symbol, estimate_order, gain_table


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_gains_csv(path: str, table) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ordinal", "label", "lambda", "dim", "gain", "opnorm"])
        for i in range(len(table)):
            f = table.freq(i)
            writer.writerow([f.j, str(f.label), repr(f.lam), f.dim,
                             repr(float(table.gain[i])), repr(float(table.opnorm[i]))])


def _write_coeffs_csv(path: str, field, model, cutoff: float) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ordinal", "label", "component_index", "re", "im"])
        for freq, vec in field.window(model, cutoff):
            for k, z in enumerate(vec):
                writer.writerow(
                    [freq.j, str(freq.label), k, repr(float(z.real)), repr(float(z.imag))]
                )


def _require_cutoff(args, parsed) -> float:
    cutoff = args.cutoff if args.cutoff is not None else parsed.options.get("cutoff")
    if cutoff is None:
        raise PreconditionError("no cutoff given (flag --cutoff or spec options.cutoff)")
    if cutoff <= 0:
        raise PreconditionError("cutoff must be positive")
    return float(cutoff)


def _real_spec_doc(value) -> dict:
    if isinstance(value, (Fraction, Surd)):
        return {"exact": format_real(value), "float": float(value)}
    return {"lo": float(value.lo), "hi": float(value.hi)}


def _cmd_analyze(args) -> None:
    parsed = parse_spec(args.spec)
    cutoff = _require_cutoff(args, parsed)
    tol = args.tol if args.tol is not None else parsed.options.get("tol", 1e-12)
    symbol = build_symbol(parsed.operator, parsed.model)
    v = verdict(parsed.operator, parsed.model, cutoff, tol)
    try:
        order = estimate_order(symbol, parsed.model, cutoff)
        order_doc = {"order_hat": order.order_hat, "c_hat": order.c_hat}
    except HyposymError as exc:
        order_doc = {"error": str(exc)}
    gains_path = None
    if args.out:
        gains_path = args.out + ".gains.csv"
        _write_gains_csv(gains_path, gain_table(symbol, parsed.model, cutoff))
    doc = {
        "spec_echo": emit_spec(parsed),
        "cutoff": cutoff,
        "tol": tol,
        "verdict": v.as_dict(),
        "order": order_doc,
        "gain_samples_path": gains_path,
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_singular_scan(args) -> None:
    parsed = parse_spec(args.spec)
    cutoff = _require_cutoff(args, parsed)
    tol = args.tol if args.tol is not None else parsed.options.get("tol", 1e-12)
    symbol = build_symbol(parsed.operator, parsed.model)
    hits = singular_scan(symbol, parsed.model, cutoff, tol)
    doc = {
        "spec_echo": emit_spec(parsed),
        "cutoff": cutoff,
        "tol": tol,
        "singular": [
            {"ordinal": f.j, "label": str(f.label), "lambda": f.lam, "dim": f.dim}
            for f in hits
        ],
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_fit_exponent(args) -> None:
    parsed = parse_spec(args.spec)
    cutoff = _require_cutoff(args, parsed)
    if certify(parsed.operator) is not None:
        # a certified family has no empirical fit; its exponent is -inf
        doc = {
            "spec_echo": emit_spec(parsed),
            "cutoff": cutoff,
            "fit": None,
            "h_hat": "-inf",
            "tool_version": __version__,
            "seed": args.seed,
        }
        _emit(doc, args.out)
        return
    symbol = build_symbol(parsed.operator, parsed.model)
    fit = fit_growth(gain_table(symbol, parsed.model, cutoff), parsed.model.nu)
    doc = {
        "spec_echo": emit_spec(parsed),
        "cutoff": cutoff,
        "fit": fit.as_dict(),
        "h_hat": fit.m,
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_counterexample(args) -> None:
    parsed = parse_spec(args.spec)
    cutoff = _require_cutoff(args, parsed)
    k_steps = args.k if args.k is not None else parsed.options.get("k", 5)
    symbol = build_symbol(parsed.operator, parsed.model)
    result = build_counterexample(symbol, parsed.model, k_steps, cutoff)
    # regularity evidence is judged on the construction's own span: past the
    # support every finite field looks smooth, which says nothing here
    span = max(f.lam for f in result.frequencies)

    def classify(field):
        try:
            return classify_regularity(field, parsed.model, span).as_dict()
        except WindowTooSmallError as exc:
            return {"error": str(exc)}

    f_report = classify(result.field)
    image_report = classify(apply_symbol(symbol, result.field, span))
    coeffs_path = None
    if args.out:
        coeffs_path = args.out + ".coeffs.csv"
        _write_coeffs_csv(coeffs_path, result.field, parsed.model, cutoff)
    doc = {
        "spec_echo": emit_spec(parsed),
        "cutoff": cutoff,
        "k": k_steps,
        "certificates": [
            {
                "k": c.k,
                "ordinal": c.ordinal,
                "label": str(c.label),
                "lambda": c.lam,
                "image_norm": c.image_norm,
                "bound": c.bound,
                "exact": c.exact,
            }
            for c in result.certificates
        ],
        "field_regularity": f_report,
        "image_regularity": image_report,
        "coefficients_path": coeffs_path,
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_diophantine(args) -> None:
    c = parse_real(args.c)
    cf = continued_fraction(c, args.cf_terms)
    doc = {
        "c": _real_spec_doc(c),
        "continued_fraction": {
            "quotients": list(cf.quotients),
            "convergents": [[p, q] for p, q in cf.convergents],
            "period": list(cf.period) if cf.period else None,
            "complete": cf.complete,
            "limited_by_precision": cf.limited_by_precision,
        },
        "classification": classify_coefficient(c).as_dict(),
        "tool_version": __version__,
        "seed": args.seed,
    }
    if args.liouville_nmax is not None:
        if isinstance(c, Fraction):
            doc["liouville_witnesses"] = {"error": "rational coefficient"}
        else:
            doc["liouville_witnesses"] = liouville_witnesses(
                c, args.liouville_nmax, args.q_bound
            )
    _emit(doc, args.out)


def _cmd_pell(args) -> None:
    sols = pell_solutions(args.d, args.count)
    doc = {
        "d": args.d,
        "solutions": [
            {
                "u": s.u,
                "m": s.m,
                "singular_level_twice_ell": s.singular_twice_ell() if args.d == 8 else None,
            }
            for s in sols
        ],
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_torus_gain(args) -> None:
    c = parse_real(args.c)
    result = torus_min_gain(c, args.radius, args.exp)
    doc = {
        "c": _real_spec_doc(c),
        "radius": args.radius,
        "exponent": args.exp,
        "argmin": list(result.argmin),
        "objective": {
            "lo": float(result.objective_lo),
            "hi": float(result.objective_hi),
            "exact": format_real(result.exact_objective)
            if result.exact_objective is not None
            else None,
        },
        "gain": {
            "lo": float(result.gain_lo),
            "hi": float(result.gain_hi),
            "exact": format_real(result.exact_gain)
            if result.exact_gain is not None
            else None,
        },
        "is_exact_zero": result.is_zero(),
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _cmd_subelliptic(args) -> None:
    parsed = parse_spec(args.spec)
    cutoff = _require_cutoff(args, parsed)
    s = args.s if args.s is not None else parsed.options.get("s", 0.0)
    m = args.m if args.m is not None else parsed.options.get("m", 1.0)
    symbol = build_symbol(parsed.operator, parsed.model)
    report = best_alpha_constant(symbol, parsed.model, s, m, cutoff)
    witness = extremal_field(report, symbol, parsed.model)
    witness_check = check_alpha(
        symbol, parsed.model, witness, s, m, report.c_star, cutoff
    )
    rng = np.random.default_rng(args.seed)
    alpha_failures = beta_failures = 0
    min_alpha_margin = min_beta_margin = float("inf")
    kernel = kernel_on_truncation(symbol, parsed.model, cutoff)
    for _ in range(args.probes):
        probe = random_field(parsed.model, cutoff, rng)
        a = check_alpha(symbol, parsed.model, probe, s, m, report.c_star, cutoff,
                        kernel=kernel)
        b = check_beta(symbol, parsed.model, probe, s, m, report.k_star, cutoff)
        if not a.passed:
            alpha_failures += 1
        elif not a.vacuous:
            min_alpha_margin = min(min_alpha_margin, a.margin)
        if not b.passed:
            beta_failures += 1
        elif b.margin is not None:
            min_beta_margin = min(min_beta_margin, b.margin)
    doc = {
        "spec_echo": emit_spec(parsed),
        "cutoff": cutoff,
        "report": report.as_dict(),
        "witness_check": witness_check.as_dict(),
        "probes": {
            "count": args.probes,
            "alpha_failures": alpha_failures,
            "beta_failures": beta_failures,
            "min_alpha_margin": None
            if min_alpha_margin == float("inf")
            else min_alpha_margin,
            "min_beta_margin": None
            if min_beta_margin == float("inf")
            else min_beta_margin,
        },
        "tool_version": __version__,
        "seed": args.seed,
    }
    _emit(doc, args.out)


def _add_common(p: argparse.ArgumentParser, spec: bool = True) -> None:
    if spec:
        p.add_argument("--spec", required=True, help="operator spec file (JSON)")
        p.add_argument("--cutoff", type=float, help="eigenvalue cutoff of the window")
        p.add_argument("--tol", type=float, help="relative singular threshold")
    p.add_argument("--out", help="write the JSON report here (CSV sidecars next to it)")
    p.add_argument("--seed", type=int, default=0, help="probe RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyposym",
        description="Matrix-symbol hypoellipticity analysis on the 2-torus and SU(2)",
    )
    parser.add_argument("--version", action="version", version=f"hyposym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full verdict + order report")
    _add_common(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("singular-scan", help="list in-window singular frequencies")
    _add_common(p)
    p.set_defaults(fn=_cmd_singular_scan)

    p = sub.add_parser("fit-exponent", help="growth fit of the gain envelope")
    _add_common(p)
    p.set_defaults(fn=_cmd_fit_exponent)

    p = sub.add_parser("counterexample", help="construct the slow-decay witness field")
    _add_common(p)
    p.add_argument("--k", type=int, help="number of construction steps")
    p.set_defaults(fn=_cmd_counterexample)

    p = sub.add_parser("diophantine", help="continued fraction and classification")
    p.add_argument("--c", required=True, help="real spec literal")
    p.add_argument("--cf-terms", type=int, default=24, dest="cf_terms")
    p.add_argument("--liouville-nmax", type=int, dest="liouville_nmax")
    p.add_argument("--q-bound", type=int, default=10**6, dest="q_bound")
    _add_common(p, spec=False)
    p.set_defaults(fn=_cmd_diophantine)

    p = sub.add_parser("pell", help="solutions of u^2 - D m^2 = 1")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--count", type=int, default=4)
    _add_common(p, spec=False)
    p.set_defaults(fn=_cmd_pell)

    p = sub.add_parser("torus-gain", help="certified lattice minimum of |xi + c eta|")
    p.add_argument("--c", required=True, help="real spec literal")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--exp", type=int, default=0)
    _add_common(p, spec=False)
    p.set_defaults(fn=_cmd_torus_gain)

    p = sub.add_parser("subelliptic", help="exact truncation constants and probes")
    _add_common(p)
    p.add_argument("--s", type=float, help="Sobolev base index")
    p.add_argument("--m", type=float, help="estimate exponent")
    p.add_argument("--probes", type=int, default=100)
    p.set_defaults(fn=_cmd_subelliptic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except HyposymError as exc:
        payload = {"error": str(exc), "kind": type(exc).__name__}
        violations = getattr(exc, "violations", None)
        if violations:
            payload["violations"] = violations
        sys.stderr.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())

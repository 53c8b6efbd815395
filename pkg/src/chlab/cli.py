"""Command-line front end for the contact-homology toolkit.

Three subcommands:

``orbits``
    Render the closed-orbit table of a group below the level-N action
    threshold, sorted by grading, then base point, then multiplicity.

``homology``
    Compute filtered homology ranks, compare them against the closed form,
    and exit nonzero on mismatch.

``verify``
    Run one named verification battery (or ``all`` of them) and print one
    summary line per check.  Exit status 0 means every check passed, 1 means
    a violation or mismatch was found, 2 a parse/usage error, and 3 a
    numeric-tolerance abort (a check could not complete to its tolerance).

Output formats are ``markdown`` (default), ``json``, and ``csv``.  All output
is deterministic: a fixed (command, seed, version) triple yields byte-identical
bytes.  JSON documents carry a versioned ``schema`` tag.  Rational numbers
render as ``p/q``, formal one-sided perturbations as ``a + b·eps``, and the
constant pi is factored out of every action column.

``verify all`` fans the checks out across worker threads (``CHLAB_THREADS``
overrides the pool size); the report is assembled in a fixed order, so
threading never changes the output bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import czengine, homology, morse, orbits
from .groups import ParseError, parse_group_spec

#: JSON schema tag stamped on every JSON document this tool emits
SCHEMA = "chlab/v1"

#: the group battery exercised when no -g/--group is given to verify
BATTERY = tuple(
    [f"C:{n}" for n in range(2, 13)]
    + [f"D:{n}" for n in range(2, 9)]
    + ["T", "O", "I"]
)

#: canonical order of the verification checks
CHECK_NAMES = (
    "monotonicity",
    "cz-engine",
    "spectral-flow",
    "axioms",
    "sign-lemma",
    "morse",
    "seifert",
    "mckay",
)

DEFAULT_SEED = 2026
DEFAULT_NMAX = 4
DEFAULT_FOURIER_MODES = 32
DEFAULT_TOLERANCE = 1e-3


# ---------------------------------------------------------------------------
# rendering helpers


def format_formal(x):
    """Render a formal scalar as 'a', 'a + b·eps', or 'a - b·eps'."""
    if x.b == 0:
        return str(x.a)
    sign = "+" if x.b > 0 else "-"
    return f"{x.a} {sign} {abs(x.b)}·eps"


def _markdown_table(headers, rows):
    def fmt(row):
        return "| " + " | ".join(str(c) for c in row) + " |"

    lines = [fmt(headers), "|" + "|".join(" --- " for _ in headers) + "|"]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def _csv_text(headers, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _json_text(document):
    return json.dumps(document, indent=2)


# ---------------------------------------------------------------------------
# orbits command


_BASE_ORDER_CACHE = {}


def _base_position(spec, name):
    key = spec.label
    if key not in _BASE_ORDER_CACHE:
        _BASE_ORDER_CACHE[key] = {e.name: i for i, e in enumerate(orbits.base_table(spec))}
    return _BASE_ORDER_CACHE[key][name]


def _sorted_orbits(spec, levels):
    rows = orbits.enumerate_orbits(spec, levels)
    return sorted(rows, key=lambda o: (o.grading, _base_position(spec, o.base.name), o.k))


def cmd_orbits(group, levels, fmt):
    """Render the orbit table for one group below the level-N threshold."""
    spec = parse_group_spec(group)
    rows = _sorted_orbits(spec, levels)
    headers = ("grading", "name", "base", "k", "type", "good",
               "action/pi", "rotation", "cz", "class", "contractible")
    table = [
        (o.grading, o.name, o.base.name, o.k, o.orbit_type,
         "yes" if o.good else "no", format_formal(o.action),
         format_formal(o.rotation), o.cz, o.class_label,
         "yes" if o.contractible else "no")
        for o in rows
    ]
    if fmt == "json":
        document = {
            "schema": SCHEMA,
            "version": __version__,
            "command": "orbits",
            "group": spec.label,
            "levels": levels,
            "count": len(rows),
            "rows": [orbits.orbit_row(o) for o in rows],
        }
        return _json_text(document), 0
    if fmt == "csv":
        return _csv_text(headers, table), 0
    title = f"Closed orbits of {spec.label} below the level-{levels} threshold ({len(rows)} rows)"
    return title + "\n\n" + _markdown_table(headers, table), 0


# ---------------------------------------------------------------------------
# homology command


def cmd_homology(group, levels, fmt):
    """Compute filtered homology ranks and compare with the closed form."""
    spec = parse_group_spec(group)
    report = homology.homology_report(spec, levels)
    match = bool(report["match"])
    status = 0 if match else 1
    degrees = sorted(int(d) for d in report["ranks"])
    headers = ("degree", "rank", "closed_form")
    table = [(d, report["ranks"][str(d)], report["closed_form"][str(d)]) for d in degrees]
    if fmt == "json":
        document = {
            "schema": SCHEMA,
            "version": __version__,
            "command": "homology",
            "group": spec.label,
            "levels": levels,
            "ranks": report["ranks"],
            "closed_form": report["closed_form"],
            "match": match,
        }
        return _json_text(document), status
    if fmt == "csv":
        return _csv_text(headers, table), status
    title = (f"Filtered homology of {spec.label} at level {levels} — "
             f"match: {'true' if match else 'false'}")
    return title + "\n\n" + _markdown_table(headers, table), status


# ---------------------------------------------------------------------------
# verification batteries


@dataclass
class CheckResult:
    name: str
    ok: bool
    summary: str
    details: tuple
    report: dict
    failure_kind: str = ""  # "", "violation", or "numeric"


def _family_from_paths(gen0, gen1):
    """Linear interpolation family between two loop generators."""
    def family(s, t):
        lo = np.asarray(gen0(t), dtype=float)
        hi = np.asarray(gen1(t), dtype=float)
        return 0.5 * (1.0 - s) * lo + 0.5 * (1.0 + s) * hi
    return family


def canonical_flow_family():
    """The reference family: diag(1, -1) flowing to 2·Id, flow +1."""
    lo = np.diag([1.0, -1.0])
    hi = 2.0 * np.eye(2)
    return czengine.AsymptoticFamily(
        _family_from_paths(lambda t: lo, lambda t: hi), n=1, name="canonical")


def seeded_flow_families(seed, count):
    """Deterministic interpolation families with nondegenerate endpoints."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        path0 = czengine._random_nondegenerate_path(rng, 1)
        path1 = czengine._random_nondegenerate_path(rng, 1)
        fam = czengine.AsymptoticFamily(
            _family_from_paths(path0.generator.at, path1.generator.at), n=1)
        out.append((fam, czengine.cz_crossing_form(path0), czengine.cz_crossing_form(path1)))
    return out


def resonance_family():
    """Family c(s)·Id sweeping c across 2π: one kernel-dimension-2 crossing."""
    lo = 5.0 * np.eye(2)
    hi = 7.0 * np.eye(2)

    def family(s, t):
        return 0.5 * (1.0 - s) * lo + 0.5 * (1.0 + s) * hi

    return czengine.AsymptoticFamily(family, n=1, name="resonance")


def _battery(group):
    return (group,) if group else BATTERY


def check_monotonicity(opts):
    details = []
    total_pairs = 0
    specs = _battery(opts.group)
    for label in specs:
        report = orbits.verify_monotonicity(label, opts.nmax)
        total_pairs += report["pairs"]
        details.append(f"  {label}: {report['orbits']} orbits, {report['pairs']} pairs, ok")
    summary = (f"monotonicity: PASS ({len(specs)} specs, {total_pairs} same-class pairs, "
               f"N_max={opts.nmax}, 0 violations)")
    report = {"check": "monotonicity", "specs": len(specs),
              "pairs": total_pairs, "n_max": opts.nmax, "violations": 0}
    return CheckResult("monotonicity", True, summary, tuple(details), report)


def check_cz_engine(opts):
    details = []
    total = 0
    specs = _battery(opts.group)
    eps = opts.tolerance
    for label in specs:
        count = 0
        for orbit in orbits.enumerate_orbits(label, 3):
            path = czengine.local_model_for(orbit, eps=eps)
            crossing = czengine.cz_crossing_form(path)
            _theta, rotation = czengine.rotation_cz_sp2(path)
            if crossing != orbit.cz or rotation != orbit.cz:
                raise czengine.AxiomViolation(
                    f"{label}/{orbit.name}: crossing {crossing}, rotation {rotation}, "
                    f"closed form {orbit.cz}")
            count += 1
        total += count
        details.append(f"  {label}: {count} orbits, three routes agree")
    summary = (f"cz-engine: PASS ({total} orbits below the level-3 threshold, "
               f"crossing form == closed formula == rotation index, eps={eps:g})")
    report = {"check": "cz_engine", "specs": len(specs), "orbits": total,
              "epsilon": eps, "violations": 0}
    return CheckResult("cz-engine", True, summary, tuple(details), report)


def check_spectral_flow(opts):
    order = opts.fourier_modes
    cases = [("canonical", canonical_flow_family(), 1)]
    for i, (fam, cz0, cz1) in enumerate(seeded_flow_families(opts.seed, 8)):
        cases.append((f"seeded-{i}", fam, cz1 - cz0))
    details = []
    for name, fam, expected in cases:
        flow = czengine.spectral_flow(fam, order=order)
        flow2 = czengine.spectral_flow(fam, order=2 * order)
        if flow != expected or flow2 != expected:
            raise czengine.AxiomViolation(
                f"{name}: flow {flow} (K={order}) / {flow2} (K={2 * order}), "
                f"expected {expected}")
        details.append(f"  {name}: flow {flow} == cz difference, stable K={order}->{2 * order}")
    summary = (f"spectral-flow: PASS ({len(cases)} families, flow == cz difference, "
               f"stable K={order}->{2 * order})")
    report = {"check": "spectral_flow", "families": len(cases),
              "fourier_modes": order, "violations": 0}
    return CheckResult("spectral-flow", True, summary, tuple(details), report)


def check_axioms(opts):
    report = czengine.cz_axiom_suite(opts.seed, instances=50)
    summary = (f"axioms: PASS ({report['instances']} checks across 50 seeded paths, "
               f"max residual {report['max_residual']:.3e})")
    return CheckResult("axioms", True, summary, (), report)


def check_sign_lemma(opts):
    families = [("canonical", canonical_flow_family()), ("resonance", resonance_family())]
    for i, (fam, _c0, _c1) in enumerate(seeded_flow_families(opts.seed + 1, 8)):
        families.append((f"seeded-{i}", fam))
    details = []
    crossings = 0
    worst = 0.0
    for name, fam in families:
        report = czengine.verify_crossing_sign_lemma(fam)
        if report["failures"]:
            raise czengine.AxiomViolation(f"{name}: {report['failures'][:2]}")
        crossings += report["instances"]
        worst = max(worst, report["max_residual"])
        details.append(f"  {name}: {report['instances']} crossings, opposite signs match")
    summary = (f"sign-lemma: PASS ({len(families)} families, {crossings} crossings, "
               f"max relative residual {worst:.3e})")
    report = {"check": "crossing_sign_lemma", "families": len(families),
              "crossings": crossings, "max_residual": worst, "violations": 0}
    return CheckResult("sign-lemma", True, summary, tuple(details), report)


def check_morse(opts):
    details = []
    specs = _battery(opts.group)
    for label in specs:
        complex_ = morse.orbifold_complex(label)
        flows = {f"{a}->{b}": (fl.downstairs, list(fl.weights))
                 for (a, b), fl in complex_.flow_counts.items()}
        details.append(f"  {label}: ranks {complex_.ranks}, flows {flows}")
    summary = f"morse: PASS ({len(specs)} specs, orbifold homology ranks (1, 0, 1))"
    report = {"check": "orbifold_morse", "specs": len(specs),
              "ranks": [1, 0, 1], "violations": 0}
    return CheckResult("morse", True, summary, tuple(details), report)


def check_seifert(opts):
    details = []
    pairs = 0
    specs = _battery(opts.group)
    for label in specs:
        report = morse.seifert_index_check(label)
        pairs += report["instances"]
        details.append(f"  {label}: {report['instances']} ordered pairs, ok")
    summary = f"seifert: PASS ({len(specs)} specs, {pairs} ordered pairs, index gaps agree)"
    report = {"check": "seifert_index", "specs": len(specs),
              "pairs": pairs, "violations": 0}
    return CheckResult("seifert", True, summary, tuple(details), report)


def check_mckay(opts):
    details = []
    specs = _battery(opts.group)
    for label in specs:
        report = homology.mckay_check(label)
        details.append(f"  {label}: vertices == classes - 1 == rank {report['triple'][2]}")
    summary = f"mckay: PASS ({len(specs)} specs, Dynkin vertices == class count - 1 == degree-0 rank)"
    report = {"check": "mckay", "specs": len(specs), "violations": 0}
    return CheckResult("mckay", True, summary, tuple(details), report)


_CHECKS = {
    "monotonicity": check_monotonicity,
    "cz-engine": check_cz_engine,
    "spectral-flow": check_spectral_flow,
    "axioms": check_axioms,
    "sign-lemma": check_sign_lemma,
    "morse": check_morse,
    "seifert": check_seifert,
    "mckay": check_mckay,
}

#: numeric-tolerance aborts: the computation could not complete as posed
_NUMERIC_ERRORS = (
    czengine.DriftExceeded,
    czengine.DegenerateEndpoint,
    czengine.IrregularCrossing,
    czengine.UnwrapFailure,
    czengine.EndpointDegenerate,
    czengine.TrackingAmbiguity,
    morse.SpuriousCriticalPoint,
    morse.NonConvergentTrajectory,
)


def _run_check(name, opts):
    try:
        return _CHECKS[name](opts)
    except _NUMERIC_ERRORS as err:
        return CheckResult(name, False, f"{name}: ABORT ({err})", (),
                           {"check": name, "error": str(err)}, "numeric")
    except AssertionError as err:
        return CheckResult(name, False, f"{name}: FAIL ({err})", (),
                           {"check": name, "error": str(err)}, "violation")


def _thread_count():
    raw = os.environ.get("CHLAB_THREADS", "")
    if raw.strip():
        return max(1, int(raw))
    return min(8, os.cpu_count() or 1)


def cmd_verify(which, opts, fmt):
    """Run one verification battery (or all) and render the report."""
    names = list(CHECK_NAMES) if which == "all" else [which]
    if which == "all" and len(names) > 1:
        with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
            futures = {name: pool.submit(_run_check, name, opts) for name in names}
        results = [futures[name].result() for name in names]
    else:
        results = [_run_check(name, opts) for name in names]

    ok = all(r.ok for r in results)
    any_violation = any(r.failure_kind == "violation" for r in results)
    any_numeric = any(r.failure_kind == "numeric" for r in results)
    status = 0 if ok else (1 if any_violation else 3)

    if fmt == "json":
        document = {
            "schema": SCHEMA,
            "version": __version__,
            "command": "verify",
            "which": which,
            "seed": opts.seed,
            "ok": ok,
            "checks": [
                {"name": r.name, "ok": r.ok, "summary": r.summary, "report": r.report}
                for r in results
            ],
        }
        return _json_text(document), status
    if fmt == "csv":
        headers = ("check", "status", "summary")
        table = [(r.name, "pass" if r.ok else "fail", r.summary) for r in results]
        return _csv_text(headers, table), status
    lines = []
    for r in results:
        if which != "all" and r.ok:
            lines.extend(r.details)
        if not r.ok:
            lines.extend(r.details)
        lines.append(r.summary)
    verdict = "OK" if ok else ("VIOLATION" if any_violation else "NUMERIC ABORT")
    lines.append(f"verify {which}: {verdict} (seed {opts.seed})")
    return "\n".join(lines), status


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="chlab",
        description="Filtered contact homology of spherical space forms: "
                    "orbit tables, homology ranks, verification batteries.")
    parser.add_argument("--version", action="version", version=f"chlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_levels=True):
        p.add_argument("-g", "--group", metavar="SPEC",
                       help="group spec: C:<n>, D:<n>, T, O, or I")
        if with_levels:
            p.add_argument("-N", "--levels", type=int, default=1, metavar="N",
                           help="action-threshold level (default 1)")
        p.add_argument("-f", "--format", choices=("markdown", "json", "csv"),
                       default="markdown", help="output format (default markdown)")

    p_orbits = sub.add_parser("orbits", help="render the closed-orbit table")
    add_common(p_orbits)

    p_hom = sub.add_parser("homology", help="filtered homology ranks vs the closed form")
    add_common(p_hom)

    p_ver = sub.add_parser("verify", help="run a verification battery")
    p_ver.add_argument("which", choices=CHECK_NAMES + ("all",),
                       help="which battery to run")
    add_common(p_ver, with_levels=False)
    p_ver.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"random seed for the stochastic batteries (default {DEFAULT_SEED})")
    p_ver.add_argument("--nmax", type=int, default=DEFAULT_NMAX,
                       help=f"threshold level for monotonicity (default {DEFAULT_NMAX})")
    p_ver.add_argument("--fourier-modes", type=int, default=DEFAULT_FOURIER_MODES,
                       help=f"truncation order for spectral flow (default {DEFAULT_FOURIER_MODES})")
    p_ver.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                       help=f"numeric epsilon for local models (default {DEFAULT_TOLERANCE:g})")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "orbits":
            if not args.group:
                parser.error("orbits requires -g/--group")
            text, status = cmd_orbits(args.group, args.levels, args.format)
        elif args.command == "homology":
            if not args.group:
                parser.error("homology requires -g/--group")
            text, status = cmd_homology(args.group, args.levels, args.format)
        else:
            if args.group:
                parse_group_spec(args.group)  # surface bad specs as exit 2
            text, status = cmd_verify(args.which, args, args.format)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

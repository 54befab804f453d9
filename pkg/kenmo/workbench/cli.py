"""The ``kenmo`` command line.

Exit codes: 0 when every check passes, 1 when a check fails (or the metric
is singular, or a computation hits a degenerate structure or a pole), 2 on
usage or manifest errors.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path
from typing import Callable, Optional, Sequence

from kenmo import __version__
from kenmo.base import (
    DegeneratePlaneError,
    KenmoError,
    ManifestError,
    PoleError,
    SingularMetricError,
    StructureError,
    VerdictReport,
)
from kenmo.contact import (
    StructureSettings,
    check_almost_contact,
    check_almost_kenmotsu,
    check_kenmotsu,
    check_phi_holomorphic_curvature,
    eta_einstein_decompose,
    nijenhuis_normality,
)
from kenmo.curvature import (
    check_connection_properties,
    check_curvature_properties,
    compare_curvature_table,
    frame_curvature_entries,
)
from kenmo.registry import FIXTURES, ManifoldCase, load_fixture
from kenmo.solitons import (
    check_collinear,
    check_contact_transformation,
    check_einstein_theorems,
    check_lemma_identities,
    check_reeb_invariant_scalar,
    check_trivial,
    solve_constants,
    solve_gradient_constants,
    verify_soliton,
)
from kenmo.tensors import check_positive_definite
from kenmo.workbench.manifest import dump_manifest, load_manifest
from kenmo.workbench.oracle import OracleSettings, run_oracle
from kenmo.workbench.reports import RunReport, digest, write_report


class UsageError(KenmoError):
    """Command misuse detected after argument parsing; exit code 2"""


def _load(source: str) -> tuple[ManifoldCase, str]:
    """Case and manifest text from a path, or from a fixture name when no
    such file exists"""
    path = Path(source)
    if not path.exists() and source in FIXTURES:
        case = load_fixture(source)
        return case, dump_manifest(case)
    case = load_manifest(path)
    return case, path.read_text()


def _require_structure(case: ManifoldCase):
    if case.structure is None:
        raise UsageError("the manifest has no [structure] section")
    return case.structure


def _structure_settings(case: ManifoldCase) -> StructureSettings:
    return StructureSettings(points=case.sample_points or None)


def _components(T, label: str, skip=None) -> dict[str, str]:
    out = {}
    for index, value in T.nonzero_items():
        if skip is not None and skip(index):
            continue
        names = T.labels(index)
        upper = "".join(names[: T.contravariant_rank])
        lower = "".join(names[T.contravariant_rank :])
        key = f"{label}^{upper}_{lower}" if upper else f"{label}_{lower}"
        out[key] = str(value)
    return out


# commands ---------------------------------------------------------------------


def cmd_check_structure(case: ManifoldCase, report: RunReport, args):
    s = _require_structure(case)
    conn, bundle = case.analysis()
    settings = _structure_settings(case)
    verdicts = []
    if case.selected("positive_definite"):
        verdicts.append(check_positive_definite(case.metric, settings.sample(case.chart)))
    if case.selected("almost_contact"):
        verdicts += check_almost_contact(s, settings)
    if case.selected("normal"):
        verdicts.append(nijenhuis_normality(s))
    if case.selected("almost_kenmotsu"):
        verdicts += check_almost_kenmotsu(s)
    if case.selected("kenmotsu"):
        verdicts.append(check_kenmotsu(s, conn, bundle))
    report.verdicts = verdicts


def cmd_curvature(case: ManifoldCase, report: RunReport, args):
    conn, bundle = case.analysis()
    report.data["christoffel"] = _components(conn.as_tensor(), "Gamma")
    report.data["riemann"] = _components(bundle.riemann, "R", skip=lambda idx: idx[1] >= idx[2])
    report.data["ricci"] = _components(bundle.ricci, "Ric", skip=lambda idx: idx[0] > idx[1])
    report.data["scalar_curvature"] = str(bundle.scalar)
    verdicts = report.verdicts
    if case.selected("connection"):
        verdicts += check_connection_properties(conn, case.metric)
    if case.selected("curvature_properties"):
        verdicts += check_curvature_properties(bundle, case.metric, conn)
    s = case.structure
    if s is not None:
        if case.selected("eta_einstein"):
            decomposition = eta_einstein_decompose(bundle, s)
            report.data["eta_einstein"] = {
                "alpha": str(decomposition.alpha),
                "beta": str(decomposition.beta),
                "exact": decomposition.exact,
            }
        if case.selected("phi_holomorphic"):
            holomorphic = check_phi_holomorphic_curvature(bundle, s)
            entry = {"H": holomorphic.label, "sampled": str(holomorphic.sampled)}
            if holomorphic.ricci_consequence is not None:
                entry["ricci_form_holds"] = holomorphic.ricci_consequence.passed
            report.data["phi_holomorphic"] = entry
    if case.frame is not None:
        report.data["frame_riemann"] = [
            f"R(e{i},e{j})e{k} = {vector}"
            for (i, j, k), vector in frame_curvature_entries(bundle, case.frame)
        ]
        if case.table is not None and case.selected("curvature_table"):
            comparison = compare_curvature_table(bundle, case.frame, case.table)
            report.data["reference_table"] = comparison.notes or ["agrees"]


def cmd_soliton(case: ManifoldCase, report: RunReport, args):
    s = _require_structure(case)
    spec = case.soliton
    if spec is None:
        raise UsageError("the manifest has no [soliton] section")
    given = spec.lam is not None or spec.mu is not None
    if args.solve and given:
        raise UsageError("--solve solves for lambda and mu; remove them from [soliton]")
    if args.verify and (spec.lam is None or spec.mu is None):
        raise UsageError("--verify needs lambda and mu in [soliton]")
    conn, bundle = case.analysis()

    if args.solve:
        if spec.is_gradient:
            lam, mu, verdict = solve_gradient_constants(s, bundle, conn, spec.f)
        else:
            lam, mu, verdict = solve_constants(
                s, bundle, spec.V, require_constant=spec.mode == "eta_soliton"
            )
        solved = spec.with_constants(lam, mu)
    else:
        solved = spec
        verdict = verify_soliton(s, bundle, conn, spec)
        lam, mu = verdict.solved["lambda"], verdict.solved["mu"]

    report.data["soliton"] = {
        "mode": spec.mode,
        "lambda": str(lam),
        "mu": str(mu),
        "classification": verdict.classification,
    }
    V = solved.potential_field(s.metric)
    subchecks: list[VerdictReport] = check_lemma_identities(s, bundle, conn, solved)
    if verdict.passed:
        subchecks += check_einstein_theorems(s, bundle, conn, solved)
    subchecks += [
        check_contact_transformation(s, V),
        check_collinear(s, V),
        check_trivial(V, s.metric),
        check_reeb_invariant_scalar(bundle, s),
    ]
    verdict.subchecks = subchecks
    report.verdicts = [verdict]


def cmd_oracle(case: ManifoldCase, report: RunReport, args):
    settings = OracleSettings(
        points=args.points, tol=args.tol, step=args.step, seed=args.seed
    )
    conn, bundle = case.analysis()
    result = run_oracle(conn, bundle, settings, case.sample_points or None)
    if not result.usable:
        raise UsageError("every sample point was skipped; give points away from the poles")
    report.data["oracle"] = result.as_dict()
    report.verdicts = [result.as_verdict()]


def cmd_fixtures(args, out) -> int:
    if args.action == "list":
        width = max(len(name) for name in FIXTURES)
        for fixture in FIXTURES.values():
            out.write(f"{fixture.name.ljust(width)}  {fixture.description}\n")
        return 0
    if args.name is None:
        raise UsageError("fixtures dump needs a fixture name")
    out.write(dump_manifest(load_fixture(args.name)))
    return 0


COMMANDS: dict[str, Callable] = {
    "check-structure": cmd_check_structure,
    "curvature": cmd_curvature,
    "soliton": cmd_soliton,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kenmo",
        description="Exact tensor calculus for Kenmotsu manifolds and eta-Ricci solitons",
    )
    parser.add_argument("--version", action="version", version=f"kenmo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("manifest", help="manifest path, or the name of a built-in fixture")
        p.add_argument("--format", choices=("text", "json"), default="text")
        return p

    add("check-structure", "almost contact, normality and Kenmotsu checks")
    add("curvature", "Christoffel symbols, curvature, eta-Einstein and H")
    soliton = add("soliton", "solve or verify the soliton equation")
    mode = soliton.add_mutually_exclusive_group(required=True)
    mode.add_argument("--solve", action="store_true", help="solve for lambda and mu")
    mode.add_argument("--verify", action="store_true", help="verify the given lambda and mu")
    oracle = add("oracle", "finite-difference cross-check of the curvature")
    defaults = OracleSettings()
    oracle.add_argument("--points", type=int, default=defaults.points)
    oracle.add_argument("--tol", type=float, default=defaults.tol)
    oracle.add_argument("--step", type=float, default=defaults.step)
    oracle.add_argument("--seed", type=int, default=defaults.seed)

    fixtures = sub.add_parser("fixtures", help="list built-in fixtures or dump one as a manifest")
    fixtures.add_argument("action", choices=("list", "dump"))
    fixtures.add_argument("name", nargs="?")
    return parser


def _run(args, out) -> int:
    if args.command == "fixtures":
        return cmd_fixtures(args, out)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        start = time.perf_counter()
        case, text = _load(args.manifest)
        loaded = time.perf_counter()
        report = RunReport(args.command, args.manifest, digest(text), __version__)
        try:
            COMMANDS[args.command](case, report, args)
        except (StructureError, DegeneratePlaneError, PoleError) as err:
            report.verdicts.append(VerdictReport(args.command, False, notes=[str(err)]))
        report.timing = {"load": loaded - start, "compute": time.perf_counter() - loaded}
    messages = []
    for w in caught:
        message = f"{w.category.__name__}: {w.message}"
        if message not in messages:
            messages.append(message)
    report.warnings = messages
    write_report(report, args.format, out)
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return _run(args, sys.stdout)
    except SingularMetricError as err:
        print(f"kenmo: {err}", file=sys.stderr)
        return 1
    except (ManifestError, UsageError) as err:
        print(f"kenmo: {err}", file=sys.stderr)
        return 2
    except KenmoError as err:
        print(f"kenmo: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

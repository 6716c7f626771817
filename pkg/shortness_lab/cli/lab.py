#!/usr/bin/env python3

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from shortness_lab.analysis import bounds
from shortness_lab.analysis.gluelab import (
    check_glue_preservation,
    find_weak_lemma_counterexample,
    run_constr3_harness,
    run_glue_harness,
    spec_from_payload,
)
from shortness_lab.analysis.oracle import (
    CycleWitness,
    PathWitness,
    SearchBudget,
    cycle_search,
    export_toughness_lp,
    longest_path_exact,
    toughness_exact,
    toughness_search,
)
from shortness_lab.analysis.witness import (
    REQUIRED_BASE_CASES,
    certify_longest_cycle,
    build_path_witness,
    verify_base_cases,
    verify_witness,
)
from shortness_lab.cli import harness
from shortness_lab.errors import LabError, UndefinedForDepth, VerificationFailed, error_payload
from shortness_lab.graphs.assembly import FamilyId, build_family, check_order
from shortness_lab.graphs.exports import from_json, to_dot, to_edge_list, to_json
from shortness_lab.settings import LabSettings, load_settings, parse_fraction

logger = logging.getLogger("shortness_lab")

EXIT_OK = 0
EXIT_FAILED = 2


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding='utf-8')
        print(f"✅ Wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _read_graph(path: str):
    try:
        text = Path(path).read_text(encoding='utf-8')
    except FileNotFoundError:
        raise FileNotFoundError(f"Graph file not found: {path}")
    return from_json(text, Path(path).stem)


def _budget(args: argparse.Namespace, settings: LabSettings, seed: int) -> SearchBudget:
    return settings.search_budget(getattr(args, 'budget_nodes', None), getattr(args, 'budget_secs', None), seed)


def _max_vertices(args: argparse.Namespace, settings: LabSettings) -> int:
    if getattr(args, 'max_vertices', None) is None:
        return settings.max_vertices
    return settings.validate_build_config({'max_vertices': args.max_vertices})


def render_table(header: Sequence[str], rows: List[Sequence[Any]], fmt: str) -> str:
    if fmt == 'csv':
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(str(cell) for cell in row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def theorem_rows(n_max: int, precision: int = 30) -> List[List[Any]]:
    rows = []
    for i in (1, 2, 3):
        for n in range(n_max + 1):
            try:
                path = bounds.p(i, n)
            except UndefinedForDepth:
                path = f"{len(build_path_witness(FamilyId(i, n)))} (path search)"
            estimate = bounds.shortness_estimate(i, n, precision)
            rows.append([f"F{i},{n}", bounds.f(i, n), bounds.c(i, n), path,
                         f"{estimate.value:.6f}", f"{estimate.limit:.6f}"])
    return rows


def cmd_build(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    block = build_family(FamilyId(args.family, args.n), _max_vertices(args, settings))
    renderers = {'json': to_json, 'dot': to_dot, 'edges': to_edge_list}
    _write(renderers[args.format](block), args.out)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    fid = FamilyId(args.family, args.n)
    max_vertices = _max_vertices(args, settings)
    check_order(fid, max_vertices)
    ledger = verify_base_cases(_budget(args, settings, seed), names=REQUIRED_BASE_CASES[fid.family])
    certificate = certify_longest_cycle(fid, ledger, max_vertices)
    _write(_dump(certificate.to_payload()), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    block = _read_graph(args.input)
    data = json.loads(Path(args.witness).read_text(encoding='utf-8'))
    if "path" in data:
        witness = PathWitness(tuple(data["path"]))
    else:
        witness = CycleWitness(tuple(data.get("witness", data.get("cycle", ()))))
    if not verify_witness(block, witness):
        raise VerificationFailed(f"Witness in {args.witness} is not a valid walk of {args.input}")
    if "bound" in data and data["bound"] != len(witness):
        raise VerificationFailed(f"Witness has {len(witness)} vertices but the certificate claims {data['bound']}")
    print(f"✅ Witness of {len(witness)} vertices is valid")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    block = _read_graph(args.input)
    budget = _budget(args, settings, seed)
    if args.problem == 'export-lp':
        if args.threshold is None:
            raise ValueError("export-lp needs --threshold p/q")
        _write(export_toughness_lp(block, parse_fraction(args.threshold)), args.out)
        return EXIT_OK
    if args.problem in ('longest-cycle', 'max-white'):
        objective = 'length' if args.problem == 'longest-cycle' else 'white'
        result = cycle_search(block, objective, args.outer_edges, budget)
        payload: Dict[str, Any] = {"value": result.value, "witness": list(result.witness.vertices),
                                   "nodes": result.nodes, "seconds": round(result.seconds, 3)}
    elif args.problem == 'longest-path':
        length, witness = longest_path_exact(block, budget)
        payload = {"value": length, "witness": list(witness.vertices)}
    elif args.threshold is not None:
        payload = toughness_search(block, parse_fraction(args.threshold), budget).to_dict()
    else:
        payload = toughness_exact(block, budget, threads=settings.threads).to_dict()
    payload["budget"] = budget.describe()
    _write(_dump(payload), args.out)
    return EXIT_OK


def cmd_gluelab(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    t = parse_fraction(args.t) if args.t else settings.gluelab.t
    if args.action == 'check':
        if not args.spec:
            raise ValueError("gluelab check needs --spec FILE")
        spec = spec_from_payload(json.loads(Path(args.spec).read_text(encoding='utf-8')))
        payload = check_glue_preservation(spec, t, _budget(args, settings, seed)).to_dict()
    elif args.action == 'hunt':
        size_cap = args.size_cap or settings.gluelab.size_cap
        found = find_weak_lemma_counterexample(t, size_cap, _budget(args, settings, seed), seed)
        payload = found.to_dict()
    else:
        instances = args.instances or settings.gluelab.instances
        glue_report = run_glue_harness(instances, seed, settings.gluelab.cuts_per_instance, threads=settings.threads)
        verdicts = run_constr3_harness(max(1, instances // 10), seed)
        payload = {
            "gluing": {"instances": glue_report.instances, "holds": glue_report.holds,
                       "not_applicable": glue_report.not_applicable, "refuted": glue_report.refuted,
                       "cut_checks": glue_report.cut_checks, "cut_failures": glue_report.cut_failures},
            "replacement": [verdict.to_dict() for verdict in verdicts],
        }
        if not glue_report.passed or any(verdict['status'] == 'refuted' for verdict in payload["replacement"]):
            _write(_dump(payload), args.out)
            raise VerificationFailed("A preservation harness reported a refuted instance")
    _write(_dump(payload), args.out)
    return EXIT_OK


def cmd_formulas(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    n_max = args.n_max if args.n_max is not None else settings.report.n_max
    fmt = args.format or settings.report.table
    rows = []
    for n in range(n_max + 1):
        s0, s1, s2 = bounds.s_values(n)
        rows.append([n, s0, s1, s2, bounds.c(3, n)])
    text = render_table(["n", "s0", "s1", "s2", "c3"], rows, fmt)
    argmin, table = bounds.minimize_fan_exponent(args.r_max)
    fan_rows = [[r, bounds.fan_white_bound(r), 3 * r, f"{value:.6f}"] for r, value in sorted(table.items())]
    text += "\n" + render_table(["r", "whites per cycle", "whites", "exponent"], fan_rows, fmt)
    text += f"\nminimum at r = {argmin}\n"
    _write(text, args.out)
    return EXIT_OK


def cmd_report(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    n_max = args.n_max if args.n_max is not None else settings.report.n_max
    fmt = args.format or settings.report.table
    rows = theorem_rows(n_max, args.precision)
    header = ["graph", "vertices", "longest cycle", "longest path", "exponent estimate", "limit"]
    _write(render_table(header, rows, fmt), args.out)
    if args.summary:
        summary = {'n_max': n_max, 'budget': settings.budget.describe(),
                   'rows': [dict(zip(header, (str(cell) for cell in row))) for row in rows]}
        with open(args.summary, 'w', encoding='utf-8') as f:
            yaml.safe_dump(summary, f, sort_keys=False)
    return EXIT_OK


def cmd_verify_all(args: argparse.Namespace, settings: LabSettings, seed: int) -> int:
    print("🧪 Running acceptance checks" + (" (quick)" if args.quick else ""))
    only = [int(item) for item in args.only.split(',')] if args.only else None
    results = harness.run_checks(args.quick, only)
    budget = harness.QUICK_BUDGET if args.quick else harness.FULL_BUDGET
    harness.format_results(results, budget)
    if args.summary:
        harness.write_summary(args.summary, results, budget, args.quick)
    failed = any(not result['success'] and not result['skipped'] for result in results.values())
    return EXIT_FAILED if failed else EXIT_OK


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--budget-nodes', type=int, help='Node limit for exhaustive searches')
    parser.add_argument('--budget-secs', type=float, help='Wall-clock limit in seconds')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='shortness-lab',
                                     description='Tough non-Hamiltonian maximal planar graph families')
    parser.add_argument('--config', default='config.toml', help='Configuration file (default: config.toml)')
    parser.add_argument('--threads', type=int, help='Worker processes for parallel searches')
    parser.add_argument('--seed', type=int, help='Random seed (overrides SHORTNESS_LAB_SEED)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    build = sub.add_parser('build', help='Build F_{i,n} and export it')
    build.add_argument('--family', type=int, choices=(1, 2, 3), required=True)
    build.add_argument('--n', type=int, required=True)
    build.add_argument('--format', choices=('json', 'dot', 'edges'), default='json')
    build.add_argument('--max-vertices', type=int, help='Refuse builds above this order (default from config)')
    build.add_argument('--out')
    build.set_defaults(handler=cmd_build)

    certify = sub.add_parser('certify', help='Certify the longest cycle of F_{i,n}')
    certify.add_argument('--family', type=int, choices=(1, 2, 3), required=True)
    certify.add_argument('--n', type=int, required=True)
    certify.add_argument('--max-vertices', type=int, help='Refuse builds above this order (default from config)')
    certify.add_argument('--out')
    _add_budget_flags(certify)
    certify.set_defaults(handler=cmd_certify)

    verify = sub.add_parser('verify', help='Validate a witness against a graph')
    verify.add_argument('--in', dest='input', required=True)
    verify.add_argument('--witness', required=True)
    verify.set_defaults(handler=cmd_verify)

    oracle = sub.add_parser('oracle', help='Exact searches on a graph file')
    oracle.add_argument('problem', choices=('longest-cycle', 'longest-path', 'max-white', 'toughness', 'export-lp'))
    oracle.add_argument('--in', dest='input', required=True)
    oracle.add_argument('--threshold', help='Rational p/q for toughness searches and LP export')
    oracle.add_argument('--outer-edges', type=int, choices=(0, 1, 2))
    oracle.add_argument('--out')
    _add_budget_flags(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    gluelab = sub.add_parser('gluelab', help='Toughness preservation checks')
    gluelab.add_argument('action', choices=('check', 'hunt', 'harness'))
    gluelab.add_argument('--spec')
    gluelab.add_argument('--t')
    gluelab.add_argument('--size-cap', type=int)
    gluelab.add_argument('--instances', type=int)
    gluelab.add_argument('--out')
    _add_budget_flags(gluelab)
    gluelab.set_defaults(handler=cmd_gluelab)

    formulas = sub.add_parser('formulas', help='Region recurrence and fan exponent tables')
    formulas.add_argument('--n-max', type=int)
    formulas.add_argument('--r-max', type=int, default=30)
    formulas.add_argument('--format', choices=('md', 'csv'))
    formulas.add_argument('--out')
    formulas.set_defaults(handler=cmd_formulas)

    report = sub.add_parser('report', help='Theorem table of orders, cycles, paths and exponents')
    report.add_argument('--theorem-table', action='store_true', help='Emit the theorem table (default)')
    report.add_argument('--n-max', type=int)
    report.add_argument('--precision', type=int, default=30)
    report.add_argument('--format', choices=('md', 'csv'))
    report.add_argument('--summary', help='Write a YAML summary to this path')
    report.add_argument('--out')
    report.set_defaults(handler=cmd_report)

    verify_all = sub.add_parser('verify-all', help='Run the acceptance checks')
    verify_all.add_argument('--quick', action='store_true')
    verify_all.add_argument('--only', help='Comma-separated check numbers')
    verify_all.add_argument('--summary', help='Write a YAML summary to this path')
    verify_all.set_defaults(handler=cmd_verify_all)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args.config)
        if args.threads is not None:
            if args.threads < 1:
                raise ValueError(f"Invalid threads: {args.threads}. Must be a positive integer")
            settings.threads = args.threads
        seed = settings.resolve_seed(args.seed)
        return args.handler(args, settings, seed)
    except (LabError, FileNotFoundError, ValueError) as e:
        if args.verbose:
            print(f"❌ {e}", file=sys.stderr)
        print(json.dumps(error_payload(e)), file=sys.stderr)
        return getattr(e, 'exit_code', EXIT_FAILED)


if __name__ == "__main__":
    sys.exit(main())

"""
Acceptance checks for the whole laboratory, runnable from ``verify-all`` and
from ``init.py``. Each check raises AssertionError (or a LabError) on failure
and returns detail lines on success.
"""

import contextlib
import io
import logging
import random
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import yaml

from shortness_lab.analysis import bounds
from shortness_lab.analysis.gluelab import (
    HOLDS,
    NOT_APPLICABLE,
    check_glue_preservation,
    find_weak_lemma_counterexample,
    run_constr3_harness,
    run_glue_harness,
)
from shortness_lab.analysis.oracle import (
    SearchBudget,
    longest_cycle_exact,
    longest_path_exact,
    toughness_exact,
    toughness_search,
    strip_simplicial,
)
from shortness_lab.analysis.witness import (
    REQUIRED_BASE_CASES,
    build_path_witness,
    certify_longest_cycle,
    family_witness,
    s_profile_witnesses,
    verify_base_cases,
    verify_witness,
)
from shortness_lab.graphs.assembly import FamilyId, build_family
from shortness_lab.graphs.blocks import add_apex, build_F10, build_F20, build_T
from shortness_lab.graphs.exports import from_json, to_json
from shortness_lab.graphs.generators import random_triangulation, relabel_randomly
from shortness_lab.graphs.graphcore import is_maximal_planar, simplicial_vertices

logger = logging.getLogger(__name__)

QUICK_BUDGET = SearchBudget(10 ** 6, 60.0)
FULL_BUDGET = SearchBudget(10 ** 8, 1800.0)


@dataclass(frozen=True)
class AcceptanceCheck:
    number: int
    name: str
    run: Callable[[bool], List[str]]


def _budget(quick: bool) -> SearchBudget:
    return QUICK_BUDGET if quick else FULL_BUDGET


def check_block_structure(quick: bool) -> List[str]:
    t_block, f20, f10 = build_T(), build_F20(), build_F10()
    assert (t_block.n_vertices, len(t_block.graph.edges()), len(simplicial_vertices(t_block.graph))) == (9, 21, 3)
    assert (f20.n_vertices, len(f20.whites)) == (15, 6)
    assert (f10.n_vertices, len(f10.whites)) == (102, 30)
    f20_plus = add_apex(f20)
    assert len(f20_plus.regions) == 1 and len(f20.regions) == 2
    for block in (t_block, f20, f10, f20_plus):
        assert is_maximal_planar(block.graph), f"{block.name} is not maximal planar"
    return ["T: 9 vertices, 21 edges, 3 simplicial", "F2,0: 15 vertices, 6 white", "F1,0: 102 vertices, 30 white"]


def check_longest_cycles(quick: bool) -> List[str]:
    budget = _budget(quick)
    names = ['s_profile_T'] if quick else ['s_profile_T', 's_profile_F31']
    ledger = verify_base_cases(budget, names=names)
    length, witness = longest_cycle_exact(build_F20(), budget)
    assert length == 14 and verify_witness(build_F20(), witness)
    details = [f"T s-profile {ledger.observed['s_profile_T']}", "F2,0 longest cycle 14"]
    if not quick:
        details.append(f"F3,1 s-profile {ledger.observed['s_profile_F31']}")
    return details


def check_certificates(quick: bool) -> List[str]:
    budget = _budget(quick)
    depths = {1: 1, 2: 1, 3: 2} if quick else {1: 1, 2: 2, 3: 4}
    names = set()
    for family in (1, 2) if quick else (1, 2, 3):
        names.update(REQUIRED_BASE_CASES[family])
    ledger = verify_base_cases(budget, names=sorted(names))
    details = []
    for family, top in depths.items():
        for n in range(top + 1):
            fid = FamilyId(family, n)
            if family == 3 and quick:
                _, witness = family_witness(fid)
                assert len(witness) == bounds.s_values(n)[0] == bounds.c(3, n)
                continue
            certificate = certify_longest_cycle(fid, ledger)
            assert certificate.bound == bounds.c(family, n), f"{fid}: {certificate.bound}"
        details.append(f"family {family}: n <= {top} certified")
    return details


def check_white_bound(quick: bool) -> List[str]:
    ledger = verify_base_cases(_budget(quick), names=['max_white_F20', 'fan_r2', 'fan_r3'])
    return [f"{name} = {value}" for name, value in sorted(ledger.observed.items())]


def check_exact_toughness(quick: bool) -> List[str]:
    budget = _budget(quick)
    t_value = toughness_exact(build_T(), budget).value
    assert t_value == Fraction(3, 2), f"toughness(T) = {t_value}"
    f20 = toughness_exact(build_F20(), budget).value
    f20_plus = toughness_exact(add_apex(build_F20()), budget).value
    assert f20 >= Fraction(8, 7) and f20_plus >= Fraction(8, 7)
    f31 = toughness_exact(build_family(FamilyId(3, 1)), budget).value
    assert f31 > 1, f"toughness(F3,1) = {f31}"
    return [f"T: {t_value}", f"F2,0: {f20}", f"F+2,0: {f20_plus}", f"F3,1: {f31}"]


def check_bounded_toughness(quick: bool) -> List[str]:
    budget = _budget(quick)
    f10 = build_F10()
    details = []
    for block in (f10, add_apex(f10)):
        report = toughness_search(block, Fraction(5, 4), budget)
        assert report.kind == 'no_violation_found', f"{block.name}: {report.kind}"
        details.append(f"{block.name} at 5/4: no violation ({report.nodes} nodes, complete={report.complete})")
    violation = toughness_search(f10, Fraction(3, 2), budget)
    assert violation.kind == 'violation' and violation.value <= Fraction(5, 4)
    details.append(f"F1,0 at 3/2: violation with ratio {violation.value}")
    return details


def check_formulas(quick: bool) -> List[str]:
    for n in range(13):
        for i in (1, 2, 3):
            assert bounds.f(i, n) == bounds.f_closed(i, n)
            assert bounds.c(i, n) == bounds.c_closed(i, n)
        assert bounds.s_values(n) == bounds.s_closed(n)
        assert bounds.c(3, n) == bounds.s_values(n)[0]
        assert bounds.c(1, n) == bounds.lemma_cyc_bound(102, 30, 22, n)
        assert bounds.c(2, n) == bounds.lemma_cyc_bound(15, 6, 5, n)
    argmin, _ = bounds.minimize_fan_exponent(100)
    assert argmin == 10
    assert bounds.log_ratio(8, 9).value > bounds.log_ratio(22, 30).value
    values = [bounds.shortness_estimate(1, n).value for n in range(21)]
    assert all(a > b for a, b in zip(values, values[1:]))
    limit = bounds.log_ratio(22, 30).value
    assert 0 < values[20] - limit < Decimal("0.01")
    return [f"fan exponent minimised at r = {argmin}", f"estimate at n = 20: {values[20]:.6f}"]


def check_paths(quick: bool) -> List[str]:
    budget = _budget(quick)
    t_length, _ = longest_path_exact(build_T(), budget)
    assert t_length == 9 == bounds.p(3, 0)
    f31_length, _ = longest_path_exact(build_family(FamilyId(3, 1)), budget)
    assert f31_length == 24 == bounds.p(3, 1)
    f20_length, _ = longest_path_exact(build_F20(), budget)
    assert f20_length == len(build_path_witness(FamilyId(2, 0)))
    return [f"T: {t_length}", f"F3,1: {f31_length}", f"F2,0: {f20_length} (recorded for p2(0))"]


def check_lemma_harnesses(quick: bool) -> List[str]:
    glue_report = run_glue_harness(20 if quick else 200, seed=0, cuts=20 if quick else 100)
    assert glue_report.passed, f"refuted seeds {glue_report.refuted}, cut failures {glue_report.cut_failures}"
    verdicts = run_constr3_harness(5 if quick else 20, seed=0)
    assert all(verdict.status == HOLDS for verdict in verdicts)
    size_cap = 6 if quick else 12
    hunt_budget = SearchBudget(10 ** 5, 60.0) if quick else SearchBudget(None, 3600.0)
    found = find_weak_lemma_counterexample(Fraction(3, 2), size_cap, hunt_budget, seed=0)
    verdict = check_glue_preservation(found.spec, found.t)
    assert verdict.status == NOT_APPLICABLE and verdict.min_degree < verdict.required_degree
    return [f"gluing: {glue_report.holds} hold, {glue_report.not_applicable} not applicable",
            f"K4 replacement: {len(verdicts)} hold",
            f"counterexample: cut of {len(found.cut)} leaves {found.components} components"]


def check_properties(quick: bool) -> List[str]:
    rng = random.Random(0)
    for fid in (FamilyId(1, 0), FamilyId(2, 1), FamilyId(3, 2)):
        block = build_family(fid)
        again = from_json(to_json(block))
        assert again.graph == block.graph and again.colors == block.colors
    for fid in (FamilyId(2, 1), FamilyId(3, 1)):
        graph, witness = family_witness(fid)
        assert verify_witness(graph, witness)
    for witness in s_profile_witnesses(build_T()):
        assert verify_witness(build_T(), witness)
    samples = 8 if quick else 30
    for _ in range(samples):
        block = random_triangulation(rng.randint(5, 9 if quick else 12), seed=rng.randrange(2 ** 31))
        pruned = toughness_exact(block, prune=True, reduction='none').value
        assert pruned == toughness_exact(block, prune=False, reduction='none').value
        relabeled = relabel_randomly(block.to_networkx(), seed=rng.randrange(2 ** 31))
        assert toughness_exact(relabeled, reduction='none').value == pruned
    for _ in range(10 if quick else 50):
        block = random_triangulation(rng.randint(5, 10), seed=rng.randrange(2 ** 31))
        whole = toughness_exact(block, reduction='none').value
        for v in sorted(simplicial_vertices(block.graph)):
            part = toughness_exact(strip_simplicial(block, v), reduction='none').value
            assert part is None or (whole is not None and whole <= part)
    return [f"{samples} random graphs: pruning sound, relabeling invariant"]


CHECKS = [
    AcceptanceCheck(1, "block structure", check_block_structure),
    AcceptanceCheck(2, "exhaustive longest cycles", check_longest_cycles),
    AcceptanceCheck(3, "certified longest cycles", check_certificates),
    AcceptanceCheck(4, "white bound", check_white_bound),
    AcceptanceCheck(5, "exact toughness", check_exact_toughness),
    AcceptanceCheck(6, "bounded toughness evidence", check_bounded_toughness),
    AcceptanceCheck(7, "formula suite", check_formulas),
    AcceptanceCheck(8, "longest paths", check_paths),
    AcceptanceCheck(9, "lemma harnesses", check_lemma_harnesses),
    AcceptanceCheck(10, "property suites", check_properties),
]


def run_check(check: AcceptanceCheck, quick: bool) -> Dict[str, Any]:
    try:
        captured_output = io.StringIO()
        with contextlib.redirect_stdout(captured_output):
            details = check.run(quick)
        return {'success': True, 'error': None, 'skipped': False, 'details': details}
    except AssertionError as e:
        return {'success': False, 'error': str(e) or 'assertion failed', 'skipped': False, 'details': []}
    except Exception as e:
        return {'success': False, 'error': f"{type(e).__name__}: {e}", 'skipped': False, 'details': []}


def run_checks(quick: bool = False, only: Optional[List[int]] = None) -> Dict[str, Dict[str, Any]]:
    results = {}
    for check in CHECKS:
        name = f"{check.number}. {check.name}"
        if only is not None and check.number not in only:
            results[name] = {'success': False, 'error': None, 'skipped': True, 'details': []}
            continue
        logger.info("Running acceptance check %s", name)
        results[name] = run_check(check, quick)
        status = "✅" if results[name]['success'] else "❌"
        print(f"   {status} {name}")
    return results


def format_results(results: Dict[str, Dict[str, Any]], budget: SearchBudget) -> None:
    print("\n" + "=" * 60)
    print("🧪 SHORTNESS LAB ACCEPTANCE RESULTS")
    print("=" * 60)

    passed = [name for name, result in results.items() if result['success']]
    skipped = [name for name, result in results.items() if result['skipped']]
    failed = [(name, result['error']) for name, result in results.items()
              if not result['success'] and not result['skipped']]

    if passed:
        print(f"\n✅ PASSED ({len(passed)}):")
        for name in passed:
            print(f"   ✓ {name}")
            for line in results[name]['details']:
                print(f"      • {line}")

    if skipped:
        print(f"\n⏭️  SKIPPED ({len(skipped)}):")
        for name in skipped:
            print(f"   - {name}")

    if failed:
        print(f"\n❌ FAILED ({len(failed)}):")
        for name, error in failed:
            print(f"   ✗ {name}: {error}")

    print(f"\n📊 SUMMARY:")
    print(f"   Total: {len(results)}")
    print(f"   Passed: {len(passed)}")
    print(f"   Skipped: {len(skipped)}")
    print(f"   Failed: {len(failed)}")
    print(f"   Budget: {budget.describe()}")

    if failed:
        print(f"\n⚠️  {len(failed)} check(s) failed.")
    elif passed:
        print(f"\n🎉 {len(passed)} check(s) passed!")


def write_summary(path: str, results: Dict[str, Dict[str, Any]], budget: SearchBudget, quick: bool) -> None:
    summary = {
        'quick': quick,
        'budget': {'nodes': budget.nodes, 'seconds': budget.seconds},
        'checks': {name: {'passed': result['success'], 'skipped': result['skipped'],
                          'error': result['error'], 'details': list(result['details'])}
                   for name, result in results.items()},
    }
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(summary, f, sort_keys=False, allow_unicode=True)

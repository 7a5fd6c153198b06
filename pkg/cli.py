#!/usr/bin/env python3
"""
Kommandozeile fuer Analyse- und Reproduktionslaeufe.

Aufruf:
    python cli.py classify instances/contiguous.json
    python cli.py check instances/example1.json --allocation "1,2|3" --notion super-strong
    python cli.py solve instances/centralized.json --notion centralized
    python cli.py refute example2 --samples 1000
    python cli.py reproduce --seed 2024 --samples 50
    python cli.py hierarchy-demo --agents 4
    python cli.py export-fixture contiguous --out instances/contiguous.json

Exit-Codes: 0 = stabil / ok, 1 = instabil / keine Loesung / Zelle fehlgeschlagen, 2 = Fehler.
"""
import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from config import REPRODUCE_SAMPLES, REPRODUCE_SEED
from exceptions import RsgError
from game_model import derive_rsg
from coalition_structures import Notion, format_coalition, hierarchy_demo, structure_for_notion
from stability import is_C_stable
from construction import construct_nash
from counterexamples import (
    FIXTURE_NAMES,
    check_example2_constraints,
    certify_no_equilibrium,
    get_fixture,
    refute_example2,
    verify_no_equilibrium,
)
from reproduction import COLUMNS, ROWS, example2_nash_sample, reproduce_existence_matrix
from instance_service import (
    certificate_record,
    classify_instance,
    dump_instance,
    fixture_to_instance,
    load_instance,
    parse_allocation,
    report_record,
    solve_instance,
    solve_record,
    existence_record,
)

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _write_out(args, payload) -> None:
    if not args.out:
        return
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(f"[OK] geschrieben: {args.out}")


def _header(args, command: str) -> None:
    print(f"[*] {command} seed={args.seed}")


# === KOMMANDOS ===

def cmd_classify(args) -> int:
    _header(args, "classify")
    report = classify_instance(load_instance(args.instance))
    for line in report.lines:
        print(line)
    _write_out(args, report.model_dump(mode="json"))
    return EXIT_OK


def cmd_check(args) -> int:
    _header(args, "check")
    instance = load_instance(args.instance)
    g = instance.game
    a = parse_allocation(args.allocation, g)
    C = instance.structure
    if args.notion:
        C = structure_for_notion(Notion(args.notion), C, instance.path, instance.embedding)
    report = is_C_stable(g, a, C, args.budget)
    print(f"{a}: {report}")
    if not report.stable:
        print(f"  Kosten vorher {list(map(str, report.before))}, nachher {list(map(str, report.after))}")
    _write_out(args, report_record(report).model_dump(mode="json"))
    return EXIT_OK if report.stable else EXIT_NEGATIVE


def cmd_solve(args) -> int:
    _header(args, "solve")
    instance = load_instance(args.instance)
    outcome = solve_instance(instance, Notion(args.notion), args.budget)
    if outcome.found:
        print(f"{outcome.method}: {outcome.allocation}")
        print(f"  Pruefung: {outcome.report}")
        if outcome.steps:
            print(f"  Schritte: {outcome.steps}")
    else:
        certificate = outcome.certificate
        print(f"none: {len(certificate.lines)}/{certificate.total} Allokationen widerlegt")
        print(certificate.text())
    _write_out(args, solve_record(outcome).model_dump(mode="json"))
    return EXIT_OK if outcome.found else EXIT_NEGATIVE


def _refute_example2(args) -> int:
    fixture = get_fixture("example2")
    d = derive_rsg(fixture.game)
    problems = check_example2_constraints(fixture, d)
    if problems:
        for problem in problems:
            print(f"[FEHLER] {problem}")
        return EXIT_NEGATIVE
    print(f"[OK] Bedingungen erfuellt: alpha={d.alpha}, low-Ressourcen={d.low_count}")
    rng = random.Random(args.seed)
    steps = {}
    for index in range(args.samples + 1):
        a = construct_nash(fixture.game, d) if index == 0 else example2_nash_sample(fixture, d, rng, index % 3)
        refutation = refute_example2(fixture, a, d)
        steps[refutation.step] = steps.get(refutation.step, 0) + 1
        if index == 0:
            print(f"  construct_nash: Schritt {refutation.step}, Koalition mit {len(refutation.coalition)} Agenten,"
                  f" {refutation.deviation.describe()}")
    summary = ", ".join(f"Schritt {step}: {count}" for step, count in sorted(steps.items()))
    print(f"[OK] {args.samples + 1} Nash-Allokationen widerlegt ({summary})")
    _write_out(args, {"refuted": args.samples + 1, "steps": {str(k): v for k, v in sorted(steps.items())}})
    return EXIT_OK


def cmd_refute(args) -> int:
    _header(args, "refute")
    if args.target == "example2":
        return _refute_example2(args)
    if args.target in FIXTURE_NAMES:
        certificate = verify_no_equilibrium(get_fixture(args.target), args.budget)
    else:
        instance = load_instance(args.target)
        C = instance.structure
        if args.notion:
            C = structure_for_notion(Notion(args.notion), C, instance.path, instance.embedding)
        certificate = certify_no_equilibrium(instance.game, C, args.budget)
    print(certificate.text())
    if certificate.holds:
        print(f"[OK] alle {certificate.total} Allokationen widerlegt")
    else:
        print(f"[FEHLER] stabile Allokation {certificate.stable_allocation}")
    _write_out(args, certificate_record(certificate).model_dump(mode="json"))
    return EXIT_OK if certificate.holds else EXIT_NEGATIVE


def cmd_reproduce(args) -> int:
    _header(args, "reproduce")
    only = None
    if args.cell:
        row, _, column = args.cell.partition(":")
        if row not in ROWS or column not in COLUMNS:
            print(f"[FEHLER] Zelle '{args.cell}' unbekannt (Zeile:Spalte, z.B. laminar:general)", file=sys.stderr)
            return EXIT_ERROR
        only = (row, column)
    report = reproduce_existence_matrix(args.seed, args.samples, only)
    print(f"{'':12}" + "".join(f"{column:>15}" for column in COLUMNS))
    matrix = report.matrix()
    for row in ROWS:
        if matrix[row]:
            print(f"{row:12}" + "".join(f"{matrix[row].get(column, ''):>15}" for column in COLUMNS))
    for cell in report.cells:
        status = "OK" if cell.passed else "FEHLER"
        evidence = cell.evidence
        print(f"[{status}] {cell.row} x {cell.column} ({cell.expected}): {evidence.name}"
              f" {evidence.passed}/{evidence.total}")
        for failure in evidence.failures:
            print(f"    {failure}")
    for extra in report.extras:
        print(f"[{'OK' if extra.ok else 'FEHLER'}] {extra.name} {extra.passed}/{extra.total}")
    print(f"{report.passed}/{len(report.cells)} Zellen konsistent ({report.seconds:.1f}s)")
    _write_out(args, existence_record(report).model_dump(mode="json"))
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_hierarchy_demo(args) -> int:
    _header(args, "hierarchy-demo")
    claims = hierarchy_demo(args.agents)
    for claim in claims:
        status = "OK" if claim.ok else "FEHLER"
        coalitions = ",".join(format_coalition(c) for c in claim.structure)
        verdict = "in" if claim.observed else "nicht in"
        print(f"[{status}] [{coalitions or '-'}] {verdict} {claim.notion.value}: {claim.evidence}")
    failed = sum(not claim.ok for claim in claims)
    print(f"{len(claims) - failed}/{len(claims)} Aussagen bestaetigt")
    return EXIT_OK if failed == 0 else EXIT_NEGATIVE


def cmd_export_fixture(args) -> int:
    instance = fixture_to_instance(get_fixture(args.name))
    text = dump_instance(instance)
    if args.out:
        _write_out(args, text)
    else:
        print(text)
    return EXIT_OK


# === PARSER ===

def build_parser() -> argparse.ArgumentParser:
    # gemeinsame Optionen, an jedem Unterkommando erlaubt
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="DEBUG-Logging auf stderr")
    common.add_argument("--seed", type=int, default=REPRODUCE_SEED)
    common.add_argument("--budget", type=int, default=None, help="Obergrenze fuer Aufzaehlungen")
    common.add_argument("--out", default=None, help="Ergebnis als JSON schreiben")

    parser = argparse.ArgumentParser(prog="rsg", description="Koalitionsstabile Gleichgewichte in Resource Selection Games")
    notions = [notion.value for notion in Notion]
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Strukturklassen und Zeugen einer Instanz")
    p.add_argument("instance")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("check", parents=[common], help="Stabilitaet einer Allokation pruefen")
    p.add_argument("instance")
    p.add_argument("--allocation", required=True, help='Agenten je Ressource, z.B. "1,2|3"')
    p.add_argument("--notion", choices=notions, default=None)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="Gleichgewicht konstruieren oder Nichtexistenz zertifizieren")
    p.add_argument("instance")
    p.add_argument("--notion", choices=notions, default=Notion.CONTIGUOUS.value)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("refute", parents=[common], help="Nichtexistenz fuer eine mitgelieferte Instanz oder Datei zeigen")
    p.add_argument("target", help=f"{', '.join(FIXTURE_NAMES)} oder Pfad zu einer Instanzdatei")
    p.add_argument("--notion", choices=notions, default=None)
    p.add_argument("--samples", type=int, default=1000, help="Zufaellige Nash-Allokationen (nur example2)")
    p.set_defaults(handler=cmd_refute)

    p = sub.add_parser("reproduce", parents=[common], help="Existenztabelle nachrechnen")
    p.add_argument("--samples", type=int, default=REPRODUCE_SAMPLES)
    p.add_argument("--cell", default=None, help="nur eine Zelle, z.B. laminar:general")
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("hierarchy-demo", parents=[common], help="Zeugen der Strukturhierarchie pruefen")
    p.add_argument("--agents", "-n", type=int, default=4)
    p.set_defaults(handler=cmd_hierarchy_demo)

    p = sub.add_parser("export-fixture", parents=[common], help="Mitgelieferte Instanz im Dateiformat ausgeben")
    p.add_argument("name", choices=FIXTURE_NAMES)
    p.set_defaults(handler=cmd_export_fixture)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except RsgError as exc:
        logger.debug("Abbruch", exc_info=True)
        print(f"[FEHLER] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

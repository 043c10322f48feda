"""Batch command line: ``estit check|validate|translate|axioms|puzzle``.

Exit codes: 0 success, 1 a check came out negative (false judgment,
violations, mismatches, counterexamples), 2 an error, reported with the stage
that failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings
from typing import List, Optional

from . import axioms as ax
from .btmodel import BTModel, ModelError, Situation, validate_bt
from .formula import ParseError, parse, render
from .kripke import KripkeModel, associated_bt, validate_kripke, verify_truth_preservation
from .puzzles import VARIANTS, PuzzleSpec, build_puzzle, verify_puzzle
from .semantics import EvalMode, Evaluator, Judgment

OK, NEGATIVE, ERROR = 0, 1, 2


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ModelError, ParseError, ValueError, KeyError, OSError) as exc:
        raise StageError(stage, str(exc)) from None


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


def _plot_tree(args, model: BTModel, title: str, highlight=()) -> None:
    if getattr(args, "plot", None):
        from .plotting import plot_tree
        _stage("plot", plot_tree, model, args.plot, title, highlight)


# -- commands ---------------------------------------------------------------


def cmd_check(args) -> int:
    model = _stage("parse", BTModel.load, args.model)
    formula = _stage("parse", parse, args.formula)
    at = [_stage("parse", Situation.parse, s) for s in args.at or []]
    if not args.no_validate:
        problems = validate_bt(model)
        if problems:
            raise StageError("validate", f"model violates {problems[0].constraint}: {problems[0].detail}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ev = Evaluator(model, EvalMode(args.mode), relativized=args.relativized)
        if args.all or not at:
            at = ev.sits
        rows = [Judgment(s, formula, ev.mode, _stage("evaluate", ev.holds, s, formula)) for s in at]
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    failing = [j.situation for j in rows if not j.value]
    lines = [j.line() for j in rows]
    if args.all:
        lines.append(f"counterexample: {failing[0]}" if failing else "valid in model")
    doc = {"judgments": [j.to_json() for j in rows],
           "counterexample": str(failing[0]) if failing else None}
    _emit(args, doc, "\n".join(lines))
    _plot_tree(args, model, render(formula), failing)
    return NEGATIVE if failing else OK


def cmd_validate(args) -> int:
    if args.kind == "bt":
        model = _stage("parse", BTModel.load, args.model)
        problems = validate_bt(model)
    else:
        model = _stage("parse", KripkeModel.load, args.model)
        problems = validate_kripke(model)
    text = "\n".join(str(p) for p in problems) or "no violations"
    _emit(args, {"kind": args.kind, "violations": [p.to_json() for p in problems]}, text)
    return NEGATIVE if problems else OK


def cmd_translate(args) -> int:
    k = _stage("parse", KripkeModel.load, args.kripke)
    tree = _stage("validate", associated_bt, k)
    _stage("write", tree.dump, args.out)
    doc = {"out": args.out, "moments": len(tree.moments), "histories": len(tree.histories)}
    lines = [f"wrote {args.out}: {len(tree.moments)} moments, {len(tree.histories)} histories"]
    status = OK
    if args.verify:
        params = _stage("parse", ax.GeneratorParams, seed=args.seed, formula_depth=args.depth)
        rng = random.Random(args.seed)
        atoms = sorted(k.valuation) or ["p"]
        formulas = [ax.random_formula(params, rng, k.agents, atoms) for _ in range(args.verify)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bad = _stage("evaluate", verify_truth_preservation, k, formulas, EvalMode(args.mode))
        doc.update(formulas=len(formulas), mismatches=[
            {"world": m.world, "formula": render(m.formula), "kripke": m.kripke, "bt": m.bt} for m in bad])
        lines.append(f"checked {len(formulas)} formulas at {len(k.worlds)} worlds: {len(bad)} mismatches")
        lines += [m.line() for m in bad]
        status = NEGATIVE if bad else OK
    _emit(args, doc, "\n".join(lines))
    _plot_tree(args, tree, f"associated tree of {args.kripke}")
    return status


def cmd_axioms(args) -> int:
    params = _stage("parse", ax.GeneratorParams, seed=args.seed, class_count=args.classes,
                    agent_count=args.agents, cells_per_agent=args.cells, formula_depth=args.depth,
                    vary_shape=not args.fixed_shape)
    mode = EvalMode(args.mode)
    report = _stage("evaluate", ax.soundness_sweep, params, args.models, args.instances, args.semantics,
                    mode, args.schema, args.mutation)
    _emit(args, report.to_json(), report.table())
    if args.plot:
        from .plotting import plot_sweep
        _stage("plot", plot_sweep, report, args.plot)
    # optimal-mode findings are informational only
    return NEGATIVE if report.counterexamples and mode is EvalMode.DOMINANCE else OK


def cmd_puzzle_run(args) -> int:
    spec = _stage("parse", PuzzleSpec, args.id, args.variant)
    judged, mismatches = verify_puzzle(spec, EvalMode(args.mode))
    lines = [j.line() for j in judged] + [m.line() for m in mismatches]
    lines.append(f"puzzle {spec.id} ({spec.variant}, {args.mode}): {len(mismatches)} mismatches")
    doc = {"puzzle": spec.id, "variant": spec.variant, "mode": args.mode,
           "judgments": [j.to_json() for j in judged],
           "mismatches": [{"expected": m.expected.to_json(), "actual": m.actual} for m in mismatches]}
    _emit(args, doc, "\n".join(lines))
    _plot_tree(args, build_puzzle(spec), f"puzzle {spec.id}, {spec.variant} variant",
               [m.expected.situation for m in mismatches])
    return NEGATIVE if mismatches else OK


def cmd_puzzle_export(args) -> int:
    spec = _stage("parse", PuzzleSpec, args.id, args.variant)
    model = build_puzzle(spec)
    if args.out:
        _stage("write", model.dump, args.out)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(model.to_json(), indent=2))
    _plot_tree(args, model, f"puzzle {spec.id}, {spec.variant} variant")
    return OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--plot", metavar="FILE", help="also render a figure to FILE (png, pdf, svg)")
    modes = [m.value for m in EvalMode]

    p = argparse.ArgumentParser(prog="estit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="evaluate a formula on a BT model")
    c.add_argument("--model", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--at", action="append", metavar="M/H", help="situation to evaluate at (repeatable)")
    c.add_argument("--all", action="store_true", help="evaluate everywhere and report the first counterexample")
    c.add_argument("--mode", choices=modes, default="optimal")
    c.add_argument("--relativized", action="store_true", help="state-relativized orderings in optimal mode")
    c.add_argument("--no-validate", action="store_true", help="skip the frame-constraint check")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", parents=[common], help="check a model against the frame constraints")
    v.add_argument("--model", required=True)
    v.add_argument("--kind", choices=["bt", "kripke"], default="bt")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("translate", parents=[common], help="build the BT model associated with a Kripke model")
    t.add_argument("--kripke", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--verify", type=int, default=0, metavar="N", help="compare truth on N random formulas")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--depth", type=int, default=3)
    t.add_argument("--mode", choices=modes, default="optimal")
    t.set_defaults(func=cmd_translate)

    a = sub.add_parser("axioms", parents=[common], help="soundness sweep over random models")
    a.add_argument("--seed", type=int, default=1)
    a.add_argument("--models", type=int, default=200)
    a.add_argument("--instances", type=int, default=20)
    a.add_argument("--mode", choices=modes, default="dominance")
    a.add_argument("--semantics", choices=[ax.KRIPKE, ax.BT, ax.BOTH], default=ax.BOTH)
    a.add_argument("--classes", type=int, default=3)
    a.add_argument("--agents", type=int, default=3)
    a.add_argument("--cells", type=int, default=3)
    a.add_argument("--depth", type=int, default=2)
    a.add_argument("--fixed-shape", action="store_true", help="use the counts exactly instead of as bounds")
    a.add_argument("--schema", action="append", help="restrict to a schema or group (repeatable)")
    a.add_argument("--mutation", choices=ax.MUTATIONS)
    a.set_defaults(func=cmd_axioms)

    pz = sub.add_parser("puzzle", help="the coin puzzles")
    psub = pz.add_subparsers(dest="action", required=True)
    run = psub.add_parser("run", parents=[common], help="check the expected verdicts")
    run.add_argument("id", type=int)
    run.add_argument("--variant", choices=VARIANTS, default="situation")
    run.add_argument("--mode", choices=modes, default="optimal")
    run.set_defaults(func=cmd_puzzle_run)
    ex = psub.add_parser("export", parents=[common], help="write a puzzle model as JSON")
    ex.add_argument("id", type=int)
    ex.add_argument("variant", nargs="?", choices=VARIANTS, default="situation")
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_puzzle_export)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria, one test each.

Every criterion prints a single ``PASS``/``FAIL`` line.  Under pytest the
lines are also collected into an "acceptance criteria" summary section;
``python tests/test_acceptance.py`` runs them standalone.
"""

import os
import random
import sys
import time
import warnings

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from estit.axioms import BOTH, GeneratorParams, random_formula, random_kripke, schema_groups, soundness_sweep  # noqa: E402
from estit.btmodel import OBJECTIVE, SUBJECTIVE, Situation, compare, s_optimal_set  # noqa: E402
from estit.formula import Box, Implies, Knows, Not, ObjOught, Stit, SubjOught, parse, subformulas  # noqa: E402
from estit.kripke import associated_bt, class_moment, kripke_leq, validate_kripke, verify_truth_preservation  # noqa: E402
from estit.puzzles import SITUATION, VARIANTS, PuzzleSpec, build_puzzle, expected_judgments, verify_puzzle  # noqa: E402
from estit.semantics import EvalMode, Evaluator, check_validity  # noqa: E402

RESULTS = {}

# classes, agents and cells each drawn up to 3
SWEEP = GeneratorParams(seed=1, class_count=3, agent_count=3, cells_per_agent=3, formula_depth=2, atom_count=2,
                        vary_shape=True)
FORMULAS = GeneratorParams(seed=1, class_count=3, agent_count=3, cells_per_agent=3, formula_depth=3,
                           atom_count=3, vary_shape=True)


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def random_models(n, params=FORMULAS):
    return [random_kripke(params.with_seed(params.seed + i)) for i in range(n)]


# -- 1 ----------------------------------------------------------------------------


def names(actions):
    return {a.name for a in actions}


def criterion_1():
    start = time.perf_counter()
    problems = []
    for i in (1, 2, 3):
        spec = PuzzleSpec(i, SITUATION)
        _, mismatches = verify_puzzle(spec, EvalMode.OPTIMAL)
        problems += [m.line() for m in mismatches]
    wanted = {1: ({"L3", "L4", "L5"}, {"L6", "L7", "L8"}), 2: ({"L5"}, {"L8"})}
    for i, (at_m2, at_m3) in wanted.items():
        m = build_puzzle(PuzzleSpec(i, SITUATION))
        got = (names(s_optimal_set(m, "a", "m2")), names(s_optimal_set(m, "a", "m3")))
        if got != (at_m2, at_m3):
            problems.append(f"puzzle {i} S-Optimal {got}")
    rows = sum(len(expected_judgments(PuzzleSpec(i, SITUATION))) for i in (1, 2, 3))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 1.0
    return record(1, ok, f"{rows} golden judgments and 4 S-Optimal sets, {len(problems)} mismatches, "
                         f"{elapsed:.2f}s (limit 1s)" + ("" if ok else f"; {problems[:3]}"))


# -- 2 ----------------------------------------------------------------------------


def criterion_2():
    cases = [(3, "O[a] W -> <> K[a] [a] W"), (3, "O[a] W -> Os[a] W"), (2, "Os[a] ~G -> O[a] ~G")]
    got = [check_validity(build_puzzle(PuzzleSpec(i, SITUATION)), parse(f)) for i, f in cases]
    ok = all(s == Situation("m2", "h1") for s in got)
    return record(2, ok, "first falsifiers " + ", ".join(str(s) for s in got) + " (expected m2/h1 each)")


# -- 3 ----------------------------------------------------------------------------


def criterion_3():
    start = time.perf_counter()
    report = soundness_sweep(SWEEP, models=200, instances_per_model=20, semantics=BOTH, mode=EvalMode.DOMINANCE)
    elapsed = time.perf_counter() - start
    groups = set(schema_groups())
    ok = report.passed and len(groups) == 17 and elapsed < 60
    return record(3, ok, f"{report.models_tested} models, {report.instances_tested} instances over "
                         f"{len(groups)} groups, {len(report.counterexamples)} counterexamples, "
                         f"{elapsed:.1f}s (limit 60s)")


# -- 4 ----------------------------------------------------------------------------


def criterion_4():
    start = time.perf_counter()
    mismatches = checked = 0
    for i, k in enumerate(random_models(100)):
        rng = random.Random(f"truth:{i}")
        fs = [random_formula(FORMULAS, rng, k.agents) for _ in range(100)]
        for mode in EvalMode:
            mismatches += len(verify_truth_preservation(k, fs, mode))
        checked += len(fs) * len(k.worlds) * len(EvalMode)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 30
    return record(4, ok, f"100 models x 100 formulas (depth <= 3, both modes), {checked} world checks, "
                         f"{mismatches} mismatches, {elapsed:.1f}s (limit 30s)")


# -- 5 ----------------------------------------------------------------------------


def criterion_5():
    violations = pairs = 0
    for k in random_models(100):
        t = associated_bt(k)
        for a in k.agents:
            for ci in range(len(k.box_classes)):
                cells = k.cells(a, ci)
                for x in cells:
                    for y in cells:
                        for subjective, flavor in ((False, OBJECTIVE), (True, SUBJECTIVE)):
                            for rel in (False, True):
                                pairs += 1
                                want = kripke_leq(k, a, ci, x, y, subjective, rel)
                                if compare(t, a, class_moment(ci), x, y, flavor, rel).leq != want:
                                    violations += 1
    return record(5, violations == 0, f"{pairs} cell-pair comparisons on 100 models, {violations} violations")


# -- 6 ----------------------------------------------------------------------------


def _s5(agent, f, g):
    out = []
    for wrap in (Box, lambda x: Stit(agent, x), lambda x: Knows(agent, x)):
        out += [Implies(wrap(Implies(f, g)), Implies(wrap(f), wrap(g))), Implies(wrap(f), f),
                Implies(wrap(f), wrap(wrap(f))), Implies(Not(wrap(f)), wrap(Not(wrap(f))))]
    return out


def _settled_by_moment(ev, f):
    mask = ev.extension_mask(f)
    return all(mask & mm in (0, mm) for mm in ev.moment_mask.values())


def criterion_6():
    models = [build_puzzle(PuzzleSpec(i, v)) for i in (1, 2, 3) for v in VARIANTS]
    models += [associated_bt(k) for k in random_models(100)]
    failures = {"S5": 0, "determinacy": 0, "Cl": 0, "monotonicity": 0}
    checks = 0
    for i, m in enumerate(models):
        rng = random.Random(f"props:{i}")
        fs = [random_formula(FORMULAS, rng, m.agents, sorted(m.valuation)) for _ in range(6)]
        plain = [f for f in fs if not any(isinstance(g, (ObjOught, SubjOught)) for g in subformulas(f))]
        opt_rel = Evaluator(m, EvalMode.OPTIMAL, relativized=True)
        for mode in EvalMode:
            ev = Evaluator(m, mode)
            for a in m.agents:
                for f, g in zip(fs, fs[1:]):
                    for inst in _s5(a, f, g):
                        checks += 1
                        failures["S5"] += ev.extension_mask(inst) != ev.full
                for f in fs:
                    for g in (Box(f), ObjOught(a, f), SubjOught(a, f)):
                        checks += 1
                        failures["determinacy"] += not _settled_by_moment(ev, g)
                    os = SubjOught(a, f)
                    checks += 1
                    failures["Cl"] += ev.extension_mask(Implies(os, Knows(a, Box(os)))) != ev.full
                if mode is EvalMode.DOMINANCE:
                    for f in plain:
                        for op in (ObjOught, SubjOught):
                            checks += 1
                            g = op(a, f)
                            failures["monotonicity"] += bool(ev.extension_mask(g) & ~opt_rel.extension_mask(g))
    ok = not any(failures.values())
    detail = ", ".join(f"{k} {v}" for k, v in failures.items())
    return record(6, ok, f"{len(models)} models, {checks} property checks; violations: {detail}")


# -- 7 ----------------------------------------------------------------------------


def criterion_7():
    parts, ok = [], True
    for mutation, schema, constraint in (("oac", "OAC", "OAC_K"), ("unif-h", "Unif-H", "Unif-H_K"),
                                         ("ia", "IA", "IA_K")):
        caught = sum(any(v.constraint == constraint for v in validate_kripke(random_kripke(SWEEP.with_seed(s),
                                                                                            mutation)))
                     for s in range(SWEEP.seed, SWEEP.seed + 200))
        report = soundness_sweep(SWEEP, 200, 20, BOTH, EvalMode.DOMINANCE, [schema], mutation)
        hits = len(report.counterexamples)
        ok &= caught == 200 and hits >= 1
        parts.append(f"{mutation}: validator {caught}/200, {schema} counterexamples {hits}")
    return record(7, ok, "; ".join(parts))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert criterion(), RESULTS.get(int(criterion.__name__.rsplit("_", 1)[1]))


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)

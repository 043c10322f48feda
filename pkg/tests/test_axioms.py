import json
import random

import pytest

from conftest import WIDE
from estit.axioms import (BOTH, BT, KRIPKE, MUTATIONS, GeneratorParams, axiom_schemata, expanded_schemata,
                          instantiate, model_digest, random_formula, random_kripke, schema_by_name,
                          schema_groups, soundness_sweep)
from estit.formula import INDEXED, agents, atoms, depth, parse
from estit.kripke import validate_kripke
from estit.semantics import EvalMode

GROUPS = ["Taut", "S5box", "S5stit", "S5know", "A1", "A2", "A3", "A4", "Oic", "A5", "A6", "OAC", "Unif-H",
          "s.N", "s.Oic", "Cl", "IA"]


def test_catalog_groups():
    assert schema_groups() == GROUPS
    assert len(GROUPS) == 17


def test_every_template_parses():
    for s in axiom_schemata():
        n = 2 if s.family == INDEXED else None
        template, fvars, avars = s.expand(n)
        assert atoms(template) == set(fvars), s.name
        assert agents(template) == set(avars), s.name


@pytest.mark.parametrize("name, text", [
    ("A1", "O[A] (p -> q) -> O[A] p -> O[A] q"),
    ("A2", "[] p -> [A] p & O[A] p"),
    ("A3", "[] O[A] p | [] ~O[A] p"),
    ("A4", "O[A] p -> O[A] [A] p"),
    ("Oic", "O[A] p -> <> [A] p"),
    ("A5", "Os[A] (p -> q) -> Os[A] p -> Os[A] q"),
    ("A6", "Os[A] p -> Os[A] K[A] p"),
    ("OAC", "K[A] p -> [A] p"),
    ("Unif-H", "<> K[A] p -> K[A] <> p"),
    ("s.N", "K[A] [] p -> Os[A] p"),
    ("s.Oic", "Os[A] p -> <> K[A] p"),
    ("Cl", "Os[A] p -> K[A] [] Os[A] p"),
    # ~x -> y and x | y share one core term
    ("S5know.5", "K[A] p | K[A] ~K[A] p"),
    ("S5box.T", "[] p -> p"),
])
def test_templates_frozen(name, text):
    assert str(schema_by_name(name).expand()[0]) == text


def test_ia_expansion():
    ia = schema_by_name("IA")
    assert str(ia.expand(3)[0]) == "<> [A1] p1 & <> [A2] p2 & <> [A3] p3 -> <> ([A1] p1 & [A2] p2 & [A3] p3)"
    assert [n for s, n in expanded_schemata(2) if s.name == "IA"] == [1, 2]
    with pytest.raises(KeyError):
        schema_by_name("nope")


def test_params_validation():
    for bad in [dict(class_count=0), dict(agent_count=4), dict(cells_per_agent=0), dict(atom_count=9),
                dict(formula_depth=7), dict(value_range=(3, 0)), dict(epistemic_block_bias=2.0),
                dict(profile_multiplicity=0)]:
        with pytest.raises(ValueError):
            GeneratorParams(**bad)


def test_random_formula_depth_and_vocabulary():
    p = GeneratorParams(formula_depth=3, atom_count=2, agent_count=2)
    rng = random.Random(0)
    fs = [random_formula(p, rng) for _ in range(300)]
    assert max(map(depth, fs)) == 3
    assert min(map(depth, fs)) == 0
    assert set().union(*map(atoms, fs)) == {"p", "q"}
    assert set().union(*map(agents, fs)) == {"a", "b"}
    assert random_formula(p) == random_formula(p)
    assert atoms(random_formula(p, random.Random(1), ["a"], ["G"])) == {"G"}


def test_profile_multiplicity():
    k = random_kripke(GeneratorParams(seed=2, class_count=1, agent_count=2, cells_per_agent=2,
                                      profile_multiplicity=3))
    assert len(k.worlds) == 12
    assert validate_kripke(k) == []


def test_instantiate_ia_uses_distinct_agents():
    rng = random.Random(0)
    ia = schema_by_name("IA")
    for _ in range(20):
        f, binding = instantiate(rng, ia, 3, WIDE, ["a", "b", "c"])
        bound = [v for k, v in binding if k.startswith("A")]
        assert sorted(bound) == ["a", "b", "c"]


def test_sweep_is_deterministic_and_serializable():
    params = WIDE.with_seed(5)
    r1 = soundness_sweep(params, 5, 2)
    r2 = soundness_sweep(params, 5, 2)
    assert json.dumps(r1.to_json(), sort_keys=True) == json.dumps(r2.to_json(), sort_keys=True)
    assert r1.models_tested == 5 and r1.passed
    assert set(r1.per_schema) == {s.name for s in axiom_schemata()}
    assert "PASS" in r1.table().splitlines()[-1]


@pytest.mark.parametrize("semantics", [KRIPKE, BT, BOTH])
@pytest.mark.parametrize("mode", list(EvalMode))
def test_small_sweeps_pass(semantics, mode):
    assert soundness_sweep(WIDE, 15, 3, semantics, mode).passed


def test_schema_filter_by_group():
    r = soundness_sweep(WIDE, 2, 1, schemas=["S5know", "Cl"])
    assert list(r.per_schema) == ["S5know.K", "S5know.T", "S5know.4", "S5know.5", "Cl"]


def test_bad_semantics():
    with pytest.raises(ValueError):
        soundness_sweep(WIDE, 1, 1, "telepathy")


@pytest.mark.parametrize("mutation, schema", list(zip(MUTATIONS, ["OAC", "Unif-H", "IA"])))
def test_mutants_falsify_matched_schema(mutation, schema):
    r = soundness_sweep(WIDE, 60, 20, BOTH, EvalMode.DOMINANCE, [schema], mutation)
    assert r.counterexamples
    assert r.bt_skipped == 60
    ce = r.counterexamples[0]
    assert ce.schema == schema and ce.semantics == KRIPKE
    k = random_kripke(WIDE.with_seed(ce.model_seed), mutation)
    assert model_digest(k) == ce.model_digest
    f = parse(dict(ce.binding)["p1" if schema == "IA" else "p"])
    assert f is not None


def test_counterexample_json():
    r = soundness_sweep(WIDE, 20, 5, KRIPKE, EvalMode.DOMINANCE, ["OAC"], "oac", stop_at_first=True)
    assert len(r.counterexamples) == 1
    doc = r.to_json()["counterexamples"][0]
    assert set(doc) == {"model_seed", "model_digest", "schema", "binding", "semantics", "at"}
    assert "FAIL" in r.table()

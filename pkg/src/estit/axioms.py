"""Axiom catalog, random model and formula generators, and the soundness sweep."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .btmodel import ModelError, Situation
from .formula import (INDEXED, And, Atom, Box, Formula, Knows, Not, ObjOught, Schema, Stit,
                      SubjOught, render, substitute)
from .kripke import KripkeEvaluator, KripkeModel, associated_bt
from .semantics import EvalMode, Evaluator

# ---------------------------------------------------------------------------
# Catalog

_S5 = {"K": "{o}(p -> q) -> ({o}p -> {o}q)", "T": "{o}p -> p", "4": "{o}p -> {o}{o}p",
       "5": "~{o}p -> {o}~{o}p"}
_S5_OPERATORS = (("box", "[] "), ("stit", "[A] "), ("know", "K[A] "))

_INTERACTION = [
    ("A1", "O[A] (p -> q) -> (O[A] p -> O[A] q)", ("p", "q")),
    ("A2", "[] p -> [A] p & O[A] p", ("p",)),
    ("A3", "[] O[A] p | [] ~O[A] p", ("p",)),
    ("A4", "O[A] p -> O[A] [A] p", ("p",)),
    ("Oic", "O[A] p -> <> [A] p", ("p",)),
    ("A5", "Os[A] (p -> q) -> (Os[A] p -> Os[A] q)", ("p", "q")),
    ("A6", "Os[A] p -> Os[A] K[A] p", ("p",)),
    ("OAC", "K[A] p -> [A] p", ("p",)),
    ("Unif-H", "<> K[A] p -> K[A] <> p", ("p",)),
    ("s.N", "K[A] [] p -> Os[A] p", ("p",)),
    ("s.Oic", "Os[A] p -> <> K[A] p", ("p",)),
    ("Cl", "Os[A] p -> K[A] [] Os[A] p", ("p",)),
]

# a Hilbert basis for the propositional tautologies
_TAUTOLOGIES = [
    ("PL1", "p -> (q -> p)", ("p", "q")),
    ("PL2", "(p -> (q -> r)) -> ((p -> q) -> (p -> r))", ("p", "q", "r")),
    ("PL3", "(~p -> ~q) -> (q -> p)", ("p", "q")),
]


def axiom_schemata() -> List[Schema]:
    """Every schema of the proof system; IA is a single indexed entry."""
    out = [Schema(name, "Taut", text, fvars, ()) for name, text, fvars in _TAUTOLOGIES]
    for group, op in _S5_OPERATORS:
        agent_vars = ("A",) if "A" in op else ()
        for ax, text in _S5.items():
            fvars = ("p", "q") if ax == "K" else ("p",)
            out.append(Schema(f"S5{group}.{ax}", f"S5{group}", text.format(o=op), fvars, agent_vars))
    for name, text, fvars in _INTERACTION:
        out.append(Schema(name, name, text, fvars, ("A",)))
    out.append(Schema("IA", "IA", "", (), (), family=INDEXED))
    return out


def schema_groups() -> List[str]:
    seen = []
    for s in axiom_schemata():
        if s.group not in seen:
            seen.append(s.group)
    return seen


def expanded_schemata(n_agents: int) -> List[Tuple[Schema, Optional[int]]]:
    """Catalog with IA expanded for n = 1..n_agents."""
    out = []
    for s in axiom_schemata():
        if s.family == INDEXED:
            out.extend((s, n) for n in range(1, n_agents + 1))
        else:
            out.append((s, None))
    return out


def schema_by_name(name: str) -> Schema:
    for s in axiom_schemata():
        if s.name == name:
            return s
    raise KeyError(f"no schema named {name!r}")


# ---------------------------------------------------------------------------
# Generators

MUTATIONS = ("oac", "unif-h", "ia")


@dataclass(frozen=True)
class GeneratorParams:
    """Shape of random Kripke-estit models and formulas.

    With ``vary_shape`` the counts below act as upper bounds and the actual
    class count, agent count, per-class cell counts and profile multiplicity
    are drawn from the seed.
    """

    seed: int = 0
    class_count: int = 2
    agent_count: int = 2
    cells_per_agent: int = 2
    value_range: Tuple[int, int] = (0, 3)
    atom_count: int = 2
    formula_depth: int = 2
    epistemic_block_bias: float = 0.5
    profile_multiplicity: int = 1
    vary_shape: bool = False

    def __post_init__(self):
        if not 1 <= self.class_count <= 4:
            raise ValueError("class_count must be in 1..4")
        if not 1 <= self.agent_count <= 3:
            raise ValueError("agent_count must be in 1..3")
        if not 1 <= self.cells_per_agent <= 3:
            raise ValueError("cells_per_agent must be in 1..3")
        if not 1 <= self.atom_count <= 4:
            raise ValueError("atom_count must be in 1..4")
        if not 0 <= self.formula_depth <= 3:
            raise ValueError("formula_depth must be in 0..3")
        if self.value_range[0] > self.value_range[1]:
            raise ValueError("value_range must be (low, high) with low <= high")
        if not 0.0 <= self.epistemic_block_bias <= 1.0:
            raise ValueError("epistemic_block_bias must be a probability")
        if self.profile_multiplicity < 1:
            raise ValueError("profile_multiplicity must be positive")

    def with_seed(self, seed: int) -> "GeneratorParams":
        return dataclasses.replace(self, seed=seed)


AGENT_NAMES = ("a", "b", "c")
ATOM_NAMES = ("p", "q", "r", "s")


def _surjection(rng: random.Random, items: Sequence, k: int) -> List[List]:
    """Split ``items`` (len >= k) into ``k`` nonempty random groups."""
    items = list(items)
    rng.shuffle(items)
    groups = [[x] for x in items[:k]]
    for x in items[k:]:
        groups[rng.randrange(k)].append(x)
    return groups


def random_kripke(params: GeneratorParams, mutation: Optional[str] = None) -> KripkeModel:
    """Draw a Kripke-estit model satisfying every frame constraint.

    Each box class is a grid of worlds, one per profile of cell indices (one
    index per agent), which forces independence of agency.  Epistemic blocks
    are built from whole choice cells, and every epistemic group of a block
    takes at least one cell from each member class.

    ``mutation`` deliberately breaks one constraint: ``"oac"`` splits a
    choice cell across epistemic groups, ``"unif-h"`` leaves a group without
    cells from one member class, ``"ia"`` deletes one grid profile.  The
    shape is bumped where the mutation needs room for it.
    """
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    rng = random.Random(params.seed)
    draw = (lambda hi: rng.randint(1, hi)) if params.vary_shape else (lambda hi: hi)
    n_classes = draw(params.class_count)
    n_agents = draw(params.agent_count)
    if mutation == "unif-h":
        n_classes = max(n_classes, 2)
    if mutation == "ia":
        n_agents = max(n_agents, 2)
    agents = AGENT_NAMES[:n_agents]
    n_cells = {(a, c): draw(params.cells_per_agent) for c in range(n_classes) for a in agents}
    if mutation == "ia":
        for c in range(n_classes):
            for a in agents[:2]:
                n_cells[(a, c)] = max(n_cells[(a, c)], 2)
    if mutation == "unif-h":
        n_cells[(agents[0], 0)] = max(n_cells[(agents[0], 0)], 2)
    multiplicity = params.profile_multiplicity
    if mutation == "oac":
        multiplicity = max(multiplicity, 2)

    worlds: List[str] = []
    box_classes: List[List[str]] = []
    cells: Dict[Tuple[str, int], List[List[str]]] = {}
    for c in range(n_classes):
        profiles = list(_profiles([n_cells[(a, c)] for a in agents]))
        if mutation == "ia" and c == 0:
            profiles.remove(rng.choice([p for p in profiles if _removable(p, profiles)]))
        members = []
        for a in agents:
            cells[(a, c)] = [[] for _ in range(n_cells[(a, c)])]
        for prof in profiles:
            copies = draw(multiplicity) if mutation != "oac" else multiplicity
            for _ in range(copies):
                w = f"w{len(worlds)}"
                worlds.append(w)
                members.append(w)
                for a, idx in zip(agents, prof):
                    cells[(a, c)][idx].append(w)
        box_classes.append(members)

    epistemic: Dict[str, List[List[str]]] = {}
    for ai, a in enumerate(agents):
        blocks = _blocks(rng, n_classes, params.epistemic_block_bias)
        if mutation == "unif-h" and ai == 0:
            blocks = [[c for c in b if c > 1] for b in blocks]
            blocks = [b for b in blocks if b] + [[0, 1]]
        groups_out: List[List[str]] = []
        for block in blocks:
            if mutation == "unif-h" and ai == 0 and block == [0, 1]:
                # group 1 gets cells from class 0 only
                first = cells[(a, 0)]
                g0 = list(first[0]) + [w for cell in cells[(a, 1)] for w in cell]
                g1 = [w for cell in first[1:] for w in cell]
                groups_out.extend([g0, g1])
                continue
            if mutation == "oac" and ai == 0 and block == blocks[0]:
                groups_out.extend(_split_worlds(rng, block, [cells[(a, c)] for c in block]))
                continue
            t = rng.randint(1, min(len(cells[(a, c)]) for c in block))
            groups = [[] for _ in range(t)]
            for c in block:
                for gi, part in enumerate(_surjection(rng, range(len(cells[(a, c)])), t)):
                    for idx in part:
                        groups[gi].extend(cells[(a, c)][idx])
            groups_out.extend(groups)
        epistemic[a] = groups_out

    lo, hi = params.value_range
    value_o = {w: rng.randint(lo, hi) for w in worlds}
    value_s = {w: rng.randint(lo, hi) for w in worlds}
    valuation = {p: [w for w in worlds if rng.random() < 0.5] for p in ATOM_NAMES[:params.atom_count]}
    choice = {(a, c): cells[(a, c)] for (a, c) in cells}
    return KripkeModel(agents, worlds, box_classes, choice, epistemic, value_o, value_s, valuation)


def _profiles(sizes: List[int]):
    if not sizes:
        yield ()
        return
    for i in range(sizes[0]):
        for rest in _profiles(sizes[1:]):
            yield (i,) + rest


def _removable(profile, profiles) -> bool:
    """Removing ``profile`` keeps every cell of every agent nonempty."""
    for pos, idx in enumerate(profile):
        if not any(p != profile and p[pos] == idx for p in profiles):
            return False
    return True


def _blocks(rng: random.Random, n_classes: int, bias: float) -> List[List[int]]:
    blocks = [[0]]
    for c in range(1, n_classes):
        if rng.random() < bias:
            rng.choice(blocks).append(c)
        else:
            blocks.append([c])
    return blocks


def _split_worlds(rng: random.Random, block: List[int], class_cells) -> List[List[str]]:
    """Two epistemic groups that share every member class but cut some cell in half."""
    g0, g1 = [], []
    for cell_list in class_cells:
        ws = [w for cell in cell_list for w in cell]
        target = next(cell for cell in cell_list if len(cell) >= 2)
        g0.append(target[0])
        g1.append(target[1])
        for w in ws:
            if w not in (target[0], target[1]):
                (g0 if rng.random() < 0.5 else g1).append(w)
    return [g0, g1]


def random_formula(params: GeneratorParams, rng: Optional[random.Random] = None,
                   agents: Sequence[str] = None, atoms: Sequence[str] = None) -> Formula:
    """A random core formula of depth at most ``params.formula_depth``.

    Without an explicit ``rng`` the formula is determined by ``params.seed``.
    """
    rng = rng if rng is not None else random.Random(params.seed)
    agents = list(agents or AGENT_NAMES[:params.agent_count])
    atoms = list(atoms or ATOM_NAMES[:params.atom_count])
    return _grow(rng, rng.randint(0, params.formula_depth), atoms, agents)


def _grow(rng: random.Random, d: int, atoms, agents) -> Formula:
    if d == 0:
        return Atom(rng.choice(atoms))
    kind = rng.randrange(8)
    sub = lambda: _grow(rng, rng.randint(0, d - 1), atoms, agents)  # noqa: E731
    if kind == 0:
        return Not(_grow(rng, d - 1, atoms, agents))
    if kind == 1:
        return And(_grow(rng, d - 1, atoms, agents), sub())
    if kind == 2:
        return Box(_grow(rng, d - 1, atoms, agents))
    op = (Stit, Knows, ObjOught, SubjOught, Not)[kind - 3]
    if op is Not:
        return Not(And(sub(), Not(_grow(rng, d - 1, atoms, agents))))
    return op(rng.choice(agents), _grow(rng, d - 1, atoms, agents))


# ---------------------------------------------------------------------------
# Soundness sweep

KRIPKE, BT, BOTH = "kripke", "bt", "both"


def model_digest(k: KripkeModel) -> str:
    blob = json.dumps(k.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class Counterexample:
    model_seed: int
    model_digest: str
    schema: str
    binding: Tuple[Tuple[str, str], ...]
    semantics: str
    point: str

    def to_json(self) -> dict:
        return {"model_seed": self.model_seed, "model_digest": self.model_digest, "schema": self.schema,
                "binding": dict(self.binding), "semantics": self.semantics, "at": self.point}


@dataclass
class SoundnessReport:
    mode: str
    semantics: str
    models_tested: int = 0
    instances_tested: int = 0
    per_schema: Dict[str, List[int]] = field(default_factory=dict)
    counterexamples: List[Counterexample] = field(default_factory=list)
    empty_optimal_sets: int = 0
    bt_skipped: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {"mode": self.mode, "semantics": self.semantics, "models_tested": self.models_tested,
                "instances_tested": self.instances_tested, "passed": self.passed,
                "empty_optimal_sets": self.empty_optimal_sets, "bt_skipped": self.bt_skipped,
                "per_schema": {k: {"instances": v[0], "falsified": v[1]} for k, v in self.per_schema.items()},
                "counterexamples": [c.to_json() for c in self.counterexamples]}

    def table(self) -> str:
        width = max([len(k) for k in self.per_schema] + [6])
        lines = [f"{'schema':<{width}}  instances  falsified"]
        for name, (n, bad) in self.per_schema.items():
            lines.append(f"{name:<{width}}  {n:>9}  {bad:>9}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"models={self.models_tested} instances={self.instances_tested} "
                     f"counterexamples={len(self.counterexamples)} mode={self.mode} "
                     f"semantics={self.semantics} {verdict}")
        return "\n".join(lines)


def instantiate(rng: random.Random, schema: Schema, n: Optional[int], params: GeneratorParams,
                agents: Sequence[str]):
    """Random instance of ``schema``; returns ``(formula, binding pairs)``."""
    _, fvars, avars = schema.expand(n)
    fb = {v: random_formula(params, rng, agents) for v in fvars}
    picked = rng.sample(list(agents), len(avars)) if schema.family == INDEXED else \
        [rng.choice(agents) for _ in avars]
    ab = dict(zip(avars, picked))
    binding = tuple((v, render(f)) for v, f in fb.items()) + tuple(ab.items())
    return substitute(schema, fb, ab, n), binding


def soundness_sweep(params: GeneratorParams, models: int = 200, instances_per_model: int = 20,
                    semantics: str = BOTH, mode: EvalMode = EvalMode.DOMINANCE,
                    schemas: Optional[Sequence[str]] = None, mutation: Optional[str] = None,
                    stop_at_first: bool = False) -> SoundnessReport:
    """Instantiate every schema on ``models`` random models and collect falsifications.

    Model ``i`` is drawn with seed ``params.seed + i``.  ``schemas`` restricts
    the sweep to the named schemas (or groups).
    """
    mode = EvalMode(mode)
    if semantics not in (KRIPKE, BT, BOTH):
        raise ValueError(f"unknown semantics {semantics!r}")
    report = SoundnessReport(mode.value, semantics)
    for s in axiom_schemata():
        if schemas is None or s.name in schemas or s.group in schemas:
            report.per_schema[s.name] = [0, 0]
    for i in range(models):
        seed = params.seed + i
        k = random_kripke(params.with_seed(seed), mutation)
        digest = model_digest(k)
        rng = random.Random(f"instances:{seed}")
        kev = KripkeEvaluator(k, mode) if semantics in (KRIPKE, BOTH) else None
        tree = None
        if semantics in (BT, BOTH):
            try:
                tree = associated_bt(k)
            except ModelError:
                # invalid models (mutants) have no associated tree
                report.bt_skipped += 1
        bev = Evaluator(tree, mode) if tree is not None else None
        report.models_tested += 1
        if bev is not None:
            report.empty_optimal_sets += _count_empty_optimal(bev)
        for schema, n in expanded_schemata(len(k.agents)):
            if schema.name not in report.per_schema:
                continue
            for _ in range(instances_per_model):
                f, binding = instantiate(rng, schema, n, params, k.agents)
                report.instances_tested += 1
                report.per_schema[schema.name][0] += 1
                found = []
                if kev is not None:
                    bad = sorted(set(k.worlds) - kev.truth_set(f), key=k.worlds.index)
                    if bad:
                        found.append((KRIPKE, bad[0]))
                if bev is not None:
                    mask = bev.extension_mask(f)
                    bad = [s for idx, s in enumerate(bev.sits) if not mask >> idx & 1]
                    if bad:
                        found.append((BT, str(bad[0])))
                if found:
                    report.per_schema[schema.name][1] += 1
                for sem, point in found:
                    report.counterexamples.append(Counterexample(seed, digest, schema.name, binding, sem, point))
                if found and stop_at_first:
                    return report
    return report


def _count_empty_optimal(ev: Evaluator) -> int:
    empty = 0
    for a in ev.model.agents:
        for mo in ev.model.moments:
            for flavor in ("objective", "subjective"):
                if not ev.table(a, mo, flavor).optimal:
                    empty += 1
    return empty


def situation_of(k: KripkeModel, w: str) -> Situation:
    from .kripke import class_moment
    return Situation(class_moment(k.class_of(w)), w)

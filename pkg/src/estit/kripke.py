"""Kripke-estit models: worlds grouped into box classes instead of a tree.

The evaluator here works directly on sets of worlds and is written
independently of the bitmask labeller in :mod:`estit.semantics`, so that the
translation to a BT model (:func:`associated_bt`) can be checked against it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .btmodel import BTModel, ModelError, Situation, Violation, format_value, to_value
from .formula import And, Atom, Box, Formula, Knows, Not, ObjOught, Stit, SubjOught, render
from .semantics import EvalMode, Evaluator

ROOT = "__W"


def class_moment(k: int) -> str:
    return f"cls_{k}"


class KripkeModel:
    """Worlds, box classes, per-class choice partitions, epistemic partitions and values.

    ``choice`` maps ``(agent, class index)`` to a list of cells; a missing
    entry is the vacuous partition.  ``epistemic`` maps an agent to a list of
    blocks; unlisted worlds form singleton blocks.
    """

    def __init__(self, agents: Iterable[str], worlds: Iterable[str], box_classes: Iterable[Iterable[str]],
                 choice: Mapping[Tuple[str, int], Iterable[Iterable[str]]] = None,
                 epistemic: Mapping[str, Iterable[Iterable[str]]] = None,
                 value_o: Mapping[str, object] = None, value_s: Mapping[str, object] = None,
                 valuation: Mapping[str, Iterable[str]] = None):
        self.agents: Tuple[str, ...] = tuple(agents)
        if not self.agents or len(set(self.agents)) != len(self.agents):
            raise ModelError("agents must be a nonempty list of distinct names")
        self.worlds: Tuple[str, ...] = tuple(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world ids")
        known = set(self.worlds)
        self.box_classes: Tuple[frozenset, ...] = tuple(frozenset(c) for c in box_classes)
        self._class_index: Dict[str, int] = {}
        for k, c in enumerate(self.box_classes):
            for w in c:
                self._need(w, known)
                if w in self._class_index:
                    raise ModelError(f"world {w!r} lies in two box classes")
                self._class_index[w] = k
        for w in self.worlds:
            if w not in self._class_index:
                raise ModelError(f"world {w!r} lies in no box class")
        self.choice: Dict[Tuple[str, int], Tuple[frozenset, ...]] = {}
        for (a, k), cells in (choice or {}).items():
            if a not in self.agents:
                raise ModelError(f"unknown agent {a!r}")
            if not 0 <= k < len(self.box_classes):
                raise ModelError(f"unknown box class {k!r}")
            cells = tuple(frozenset(c) for c in cells)
            for c in cells:
                for w in c:
                    self._need(w, known)
            self.choice[(a, k)] = cells
        self.epistemic: Dict[str, Tuple[frozenset, ...]] = {a: () for a in self.agents}
        for a, blocks in (epistemic or {}).items():
            if a not in self.agents:
                raise ModelError(f"unknown agent {a!r}")
            blocks = tuple(frozenset(b) for b in blocks)
            for b in blocks:
                for w in b:
                    self._need(w, known)
            self.epistemic[a] = blocks
        self.value_o: Dict[str, Fraction] = {w: to_value(v) for w, v in (value_o or {}).items()}
        raw_s = value_s if value_s is not None else value_o
        self.value_s: Dict[str, Fraction] = {w: to_value(v) for w, v in (raw_s or {}).items()}
        for w in itertools.chain(self.value_o, self.value_s):
            self._need(w, known)
        self.valuation: Dict[str, frozenset] = {}
        for p, ws in (valuation or {}).items():
            ws = frozenset(ws)
            for w in ws:
                self._need(w, known)
            self.valuation[p] = ws

    @staticmethod
    def _need(w: str, known) -> None:
        if w not in known:
            raise ModelError(f"unknown world {w!r}")

    def class_of(self, w: str) -> int:
        return self._class_index[w]

    def box_class(self, w: str) -> frozenset:
        return self.box_classes[self._class_index[w]]

    def cells(self, agent: str, k: int) -> Tuple[frozenset, ...]:
        return self.choice.get((agent, k), (self.box_classes[k],))

    def cell(self, agent: str, w: str) -> frozenset:
        for c in self.cells(agent, self.class_of(w)):
            if w in c:
                return c
        return frozenset()

    def block(self, agent: str, w: str) -> frozenset:
        for b in self.epistemic[agent]:
            if w in b:
                return b
        return frozenset((w,))

    def related_classes(self, agent: str, k: int) -> List[int]:
        """Box classes holding a world indistinguishable from some world of class ``k``."""
        found = set()
        for w in self.box_classes[k]:
            found.update(self.class_of(u) for u in self.block(agent, w))
        return sorted(found)

    def cluster(self, agent: str, cell: Iterable[str], k: int) -> frozenset:
        """Worlds of class ``k`` indistinguishable from some world of ``cell``."""
        out = set()
        for o in cell:
            out.update(u for u in self.block(agent, o) if self.class_of(u) == k)
        return frozenset(out)

    def states(self, agent: str, k: int) -> List[frozenset]:
        others = [self.cells(b, k) for b in self.agents if b != agent]
        out = []
        for profile in itertools.product(*others):
            s = self.box_classes[k].intersection(*profile)
            if s and s not in out:
                out.append(s)
        return out

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, doc: Mapping) -> "KripkeModel":
        try:
            choice = {}
            for entry in doc.get("choice", []):
                key = (entry["agent"], int(entry["class"]))
                if key in choice:
                    raise ModelError(f"duplicate choice entry for {key}")
                choice[key] = entry["cells"]
            return cls(doc["agents"], doc["worlds"], doc["box_classes"], choice,
                       doc.get("epistemic", {}), doc.get("value_o", {}), doc.get("value_s"),
                       doc.get("valuation", {}))
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"malformed Kripke model document: {exc!r}") from None

    def to_json(self) -> dict:
        pos = {w: i for i, w in enumerate(self.worlds)}
        srt = lambda ws: sorted(ws, key=pos.get)  # noqa: E731
        return {
            "agents": list(self.agents),
            "worlds": list(self.worlds),
            "box_classes": [srt(c) for c in self.box_classes],
            "choice": [{"agent": a, "class": k, "cells": [srt(c) for c in cells]}
                       for (a, k), cells in sorted(self.choice.items())],
            "epistemic": {a: [srt(b) for b in blocks] for a, blocks in self.epistemic.items()},
            "value_o": {w: format_value(self.value_o[w]) for w in self.worlds if w in self.value_o},
            "value_s": {w: format_value(self.value_s[w]) for w in self.worlds if w in self.value_s},
            "valuation": {p: srt(ws) for p, ws in sorted(self.valuation.items())},
        }

    @classmethod
    def load(cls, path) -> "KripkeModel":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelError(f"{path}: not valid JSON: {exc}") from None
        return cls.from_json(doc)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# Validation


def validate_kripke(k: KripkeModel) -> List[Violation]:
    out: List[Violation] = []
    for (a, ci), cells in k.choice.items():
        cls = k.box_classes[ci]
        union = frozenset().union(*cells) if cells else frozenset()
        if any(not c for c in cells):
            out.append(Violation("partition", (a, ci), f"{a} has an empty cell in class {ci}"))
        if sum(len(c) for c in cells) != len(union):
            out.append(Violation("partition", (a, ci), f"{a}'s cells overlap in class {ci}"))
        if union != cls:
            out.append(Violation("partition", (a, ci),
                                 f"{a}'s cells in class {ci} do not cover exactly that class"))
    for a in k.agents:
        seen = set()
        for b in k.epistemic[a]:
            if not b:
                out.append(Violation("epistemic", (a,), f"{a} has an empty epistemic block"))
            if seen & b:
                out.append(Violation("epistemic", (a,) + tuple(sorted(seen & b)),
                                     f"{a}'s epistemic blocks overlap"))
            seen |= b
    for w in k.worlds:
        if w not in k.value_o or w not in k.value_s:
            out.append(Violation("values", (w,), f"world {w} lacks a value"))
    if out:
        return out

    for ci, cls in enumerate(k.box_classes):
        for profile in itertools.product(*(k.cells(a, ci) for a in k.agents)):
            if not cls.intersection(*profile):
                witness = tuple(sorted(c)[0] for c in profile)
                out.append(Violation("IA_K", (ci,) + witness,
                                     f"a joint choice in class {ci} is empty (cells containing {', '.join(witness)})"))

    for a in k.agents:
        for v in k.worlds:
            blk = k.block(a, v)
            for v2 in sorted(k.cell(a, v)):
                if v2 not in blk:
                    u = sorted(blk)[0]
                    out.append(Violation("OAC_K", (a, v, u, v2),
                                         f"{v} ~{a} {u} but {v2}, in the same {a}-cell as {v}, is not ~{a} {u}"))
                    break

    for a in k.agents:
        for ci, cls in enumerate(k.box_classes):
            for cj in k.related_classes(a, ci):
                for v in sorted(cls):
                    if not any(k.class_of(u) == cj for u in k.block(a, v)):
                        out.append(Violation("Unif-H_K", (a, v, cj),
                                             f"class {ci} relates to class {cj} for {a}, but {v} relates to no world there"))
    return out


# ---------------------------------------------------------------------------
# Orderings


def _values_leq(xs, ys, values) -> bool:
    return all(values[x] <= values[y] for x in xs for y in ys)


def kripke_leq(k: KripkeModel, agent: str, ci: int, first, second, subjective: bool,
               relativized: bool = True) -> bool:
    first, second = frozenset(first), frozenset(second)
    values = k.value_s if subjective else k.value_o
    targets = k.related_classes(agent, ci) if subjective else [ci]
    for t in targets:
        x = k.cluster(agent, first, t) if subjective else first
        y = k.cluster(agent, second, t) if subjective else second
        pieces = [(x & s, y & s) for s in k.states(agent, t)] if relativized else [(x, y)]
        if not all(_values_leq(px, py, values) for px, py in pieces):
            return False
    return True


# ---------------------------------------------------------------------------
# Evaluation


class KripkeEvaluator:
    def __init__(self, k: KripkeModel, mode: EvalMode = EvalMode.OPTIMAL, relativized: bool = False):
        self.k = k
        self.mode = EvalMode(mode)
        self.relativized = relativized or self.mode is EvalMode.DOMINANCE
        self.all = frozenset(k.worlds)
        self._memo: Dict[Formula, frozenset] = {}
        self._order: Dict[Tuple[str, int, bool], tuple] = {}

    def _orders(self, agent: str, ci: int, subjective: bool):
        key = (agent, ci, subjective)
        if key not in self._order:
            cells = self.k.cells(agent, ci)
            leq = {(i, j): kripke_leq(self.k, agent, ci, cells[i], cells[j], subjective, self.relativized)
                   for i in range(len(cells)) for j in range(len(cells))}
            self._order[key] = (cells, leq)
        return self._order[key]

    def _guarantee(self, agent: str, ci: int, cell, subjective: bool) -> frozenset:
        if not subjective:
            return cell
        out = set()
        for t in self.k.related_classes(agent, ci):
            out |= self.k.cluster(agent, cell, t)
        return frozenset(out)

    def _ought(self, agent: str, ci: int, truth: frozenset, subjective: bool) -> bool:
        cells, leq = self._orders(agent, ci, subjective)
        n = len(cells)
        fine = [self._guarantee(agent, ci, c, subjective) <= truth for c in cells]
        better = lambda i, j: leq[(i, j)] and not leq[(j, i)]  # noqa: E731
        if self.mode is EvalMode.OPTIMAL:
            return all(fine[i] for i in range(n) if not any(better(i, j) for j in range(n)))
        for i in range(n):
            if fine[i]:
                continue
            if not any(better(i, j) and fine[j] and all(fine[l] for l in range(n) if leq[(j, l)])
                       for j in range(n)):
                return False
        return True

    def truth_set(self, f: Formula) -> frozenset:
        if f in self._memo:
            return self._memo[f]
        k = self.k
        if isinstance(f, Atom):
            out = k.valuation.get(f.name, frozenset())
        elif isinstance(f, Not):
            out = self.all - self.truth_set(f.operand)
        elif isinstance(f, And):
            out = self.truth_set(f.left) & self.truth_set(f.right)
        elif isinstance(f, Box):
            sub = self.truth_set(f.operand)
            out = frozenset(w for w in k.worlds if k.box_class(w) <= sub)
        elif f.agent not in k.agents:
            raise ModelError(f"formula mentions unknown agent {f.agent!r}")
        elif isinstance(f, Stit):
            sub = self.truth_set(f.operand)
            out = frozenset(w for w in k.worlds if k.cell(f.agent, w) <= sub)
        elif isinstance(f, Knows):
            sub = self.truth_set(f.operand)
            out = frozenset(w for w in k.worlds if k.block(f.agent, w) <= sub)
        elif isinstance(f, (ObjOught, SubjOught)):
            sub = self.truth_set(f.operand)
            subjective = isinstance(f, SubjOught)
            good = [ci for ci in range(len(k.box_classes)) if self._ought(f.agent, ci, sub, subjective)]
            out = frozenset().union(*(k.box_classes[ci] for ci in good))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._memo[f] = out
        return out

    def holds(self, w: str, f: Formula) -> bool:
        if w not in self.all:
            raise ModelError(f"unknown world {w!r}")
        return w in self.truth_set(f)


def evaluate_kripke(k: KripkeModel, world: str, f: Formula, mode: EvalMode = EvalMode.OPTIMAL,
                    **options) -> bool:
    return KripkeEvaluator(k, mode, **options).holds(world, f)


# ---------------------------------------------------------------------------
# Associated BT model


def associated_bt(k: KripkeModel) -> BTModel:
    """Three-level tree: a root, one moment per box class, one leaf per world."""
    problems = validate_kripke(k)
    if problems:
        raise ModelError("cannot translate an invalid Kripke model: " + "; ".join(map(str, problems[:3])))
    reserved = {ROOT} | {class_moment(i) for i in range(len(k.box_classes))}
    clash = reserved & set(k.worlds)
    if clash:
        raise ModelError(f"world ids collide with reserved moment ids: {sorted(clash)}")
    parent: Dict[str, Optional[str]] = {ROOT: None}
    for ci in range(len(k.box_classes)):
        parent[class_moment(ci)] = ROOT
    # leaves in class order so every class's histories are contiguous
    for ci, cls in enumerate(k.box_classes):
        for w in k.worlds:
            if w in cls:
                parent[w] = class_moment(ci)
    choice = {}
    for (a, ci), cells in k.choice.items():
        choice[(a, class_moment(ci))] = {f"c{i}": sorted(c) for i, c in enumerate(cells)}
    up = lambda w: Situation(class_moment(k.class_of(w)), w)  # noqa: E731
    epistemic = {}
    for a in k.agents:
        blocks = list(k.epistemic[a])
        covered = frozenset().union(*blocks) if blocks else frozenset()
        blocks += [frozenset((w,)) for w in k.worlds if w not in covered]
        epistemic[a] = [[up(w) for w in b] for b in blocks]
        epistemic[a].append([Situation(ROOT, w) for w in k.worlds])
    valuation = {p: [up(w) for w in ws] for p, ws in k.valuation.items()}
    names = {w: w for w in k.worlds}
    return BTModel(k.agents, parent, choice, epistemic, dict(k.value_o), dict(k.value_s), valuation, names)


@dataclass(frozen=True)
class TruthMismatch:
    world: str
    formula: Formula
    kripke: bool
    bt: bool

    def line(self) -> str:
        return f"{self.world}  kripke={str(self.kripke).lower()}  bt={str(self.bt).lower()}  {render(self.formula)}"


def verify_truth_preservation(k: KripkeModel, formulas: Sequence[Formula],
                              mode: EvalMode = EvalMode.OPTIMAL, **options) -> List[TruthMismatch]:
    """Compare Kripke truth at ``w`` with BT truth at the situation of ``w`` in the associated model."""
    tree = associated_bt(k)
    kev = KripkeEvaluator(k, mode, **options)
    bev = Evaluator(tree, mode, **options)
    out = []
    for f in formulas:
        for w in k.worlds:
            kv = kev.holds(w, f)
            bv = bev.holds(Situation(class_moment(k.class_of(w)), w), f)
            if kv != bv:
                out.append(TruthMismatch(w, f, kv, bv))
    return out

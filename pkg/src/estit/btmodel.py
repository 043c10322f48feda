"""Finite epistemic act-utilitarian bi-valued branching-time models.

A model is a rooted tree of moments given by a parent map.  Histories are
root-to-leaf chains; each is named after its leaf moment unless the model file
names it explicitly.  Utilities are kept as :class:`fractions.Fraction` so
dominance comparisons never meet float ties.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple

OBJECTIVE = "objective"
SUBJECTIVE = "subjective"
VACUOUS_CELL = "all"


class ModelError(ValueError):
    """Structurally malformed model input (unknown ids, cycles, bad numbers)."""


class Situation(NamedTuple):
    moment: str
    history: str

    def __str__(self) -> str:
        return f"{self.moment}/{self.history}"

    @classmethod
    def parse(cls, text: str) -> "Situation":
        moment, sep, history = text.partition("/")
        if not sep or not moment or not history:
            raise ValueError(f"situation must look like MOMENT/HISTORY, got {text!r}")
        return cls(moment, history)


@dataclass(frozen=True)
class Action:
    """One cell of an agent's choice partition at a moment."""

    moment: str
    agent: str
    name: str
    cell: frozenset

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class OrderOutcome:
    leq: bool
    geq: bool

    @property
    def strict(self) -> bool:
        return self.leq and not self.geq


@dataclass(frozen=True)
class Violation:
    constraint: str
    witness: tuple
    detail: str

    def __str__(self) -> str:
        return f"[{self.constraint}] {self.detail}"

    def to_json(self) -> dict:
        return {"constraint": self.constraint, "witness": [str(w) for w in self.witness],
                "detail": self.detail}


def to_value(raw) -> Fraction:
    if isinstance(raw, bool):
        raise ModelError(f"not a number: {raw!r}")
    try:
        return Fraction(str(raw).strip())
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"not a decimal number: {raw!r}") from None


def format_value(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return str(v)


class BTModel:
    """A finite bi-valued epistemic BT model with a valuation.

    ``choice`` maps ``(agent, moment)`` to ``{cell name: history ids}``;
    missing entries mean the vacuous partition.  ``epistemic`` maps an agent
    to its information sets; situations not listed are related only to
    themselves.  ``value_s`` defaults to ``value_o``.
    """

    def __init__(self, agents: Iterable[str], parent: Mapping[str, Optional[str]],
                 choice: Mapping[Tuple[str, str], Mapping[str, Iterable[str]]] = None,
                 epistemic: Mapping[str, Iterable[Iterable[Situation]]] = None,
                 value_o: Mapping[str, object] = None,
                 value_s: Mapping[str, object] = None,
                 valuation: Mapping[str, Iterable[Situation]] = None,
                 history_names: Mapping[str, str] = None):
        self.agents: Tuple[str, ...] = tuple(agents)
        if len(set(self.agents)) != len(self.agents) or not self.agents:
            raise ModelError("agents must be a nonempty list of distinct names")
        self.moments: Tuple[str, ...] = tuple(parent)
        self.parent: Dict[str, Optional[str]] = dict(parent)
        for m, p in self.parent.items():
            if p is not None and p not in self.parent:
                raise ModelError(f"moment {m!r} has unknown parent {p!r}")
        self.children: Dict[str, List[str]] = {m: [] for m in self.moments}
        for m in self.moments:
            if self.parent[m] is not None:
                self.children[self.parent[m]].append(m)
        self.roots = [m for m in self.moments if self.parent[m] is None]
        self._check_acyclic()

        # histories: one per leaf, ordered by leaf position in the moment list
        leaf_to_name = {leaf: name for name, leaf in (history_names or {}).items()}
        for leaf in leaf_to_name:
            if leaf not in self.parent or self.children[leaf]:
                raise ModelError(f"history leaf {leaf!r} is not a leaf moment")
        self.history_chain: Dict[str, Tuple[str, ...]] = {}
        for m in self.moments:
            if not self.children[m]:
                name = leaf_to_name.get(m, m)
                if name in self.history_chain:
                    raise ModelError(f"duplicate history id {name!r}")
                self.history_chain[name] = tuple(reversed(self._ancestry(m)))
        self.histories: Tuple[str, ...] = tuple(self.history_chain)
        self._through: Dict[str, Tuple[str, ...]] = {m: () for m in self.moments}
        for h, chain in self.history_chain.items():
            for m in chain:
                self._through[m] += (h,)
        self._on = {h: frozenset(chain) for h, chain in self.history_chain.items()}

        self.choice: Dict[Tuple[str, str], Dict[str, frozenset]] = {}
        for (a, m), cells in (choice or {}).items():
            self._check_agent(a)
            self._check_moment(m)
            named = {}
            for name, hs in cells.items():
                hs = frozenset(hs)
                for h in hs:
                    if h not in self.history_chain:
                        raise ModelError(f"choice cell {name!r} of {a} at {m} names unknown history {h!r}")
                named[str(name)] = hs
            self.choice[(a, m)] = named

        self.epistemic: Dict[str, Tuple[frozenset, ...]] = {a: () for a in self.agents}
        for a, classes in (epistemic or {}).items():
            self._check_agent(a)
            out = []
            for cls in classes:
                cls = frozenset(Situation(*s) for s in cls)
                for s in cls:
                    self._check_situation_ids(s)
                out.append(cls)
            self.epistemic[a] = tuple(out)

        self.value_o: Dict[str, Fraction] = {h: to_value(v) for h, v in (value_o or {}).items()}
        raw_s = value_s if value_s is not None else value_o
        self.value_s: Dict[str, Fraction] = {h: to_value(v) for h, v in (raw_s or {}).items()}
        for h in itertools.chain(self.value_o, self.value_s):
            if h not in self.history_chain:
                raise ModelError(f"value assigned to unknown history {h!r}")

        self.valuation: Dict[str, frozenset] = {}
        for p, sits in (valuation or {}).items():
            sits = frozenset(Situation(*s) for s in sits)
            for s in sits:
                self._check_situation_ids(s)
            self.valuation[p] = sits

        self._cell_of: Dict[Tuple[str, str, str], str] = {}
        for (a, m), cells in self.choice.items():
            for name, hs in cells.items():
                for h in hs:
                    self._cell_of.setdefault((a, m, h), name)
        self._class_of: Dict[Tuple[str, Situation], frozenset] = {}
        for a, classes in self.epistemic.items():
            for cls in classes:
                for s in cls:
                    self._class_of.setdefault((a, s), cls)

    # -- structure ---------------------------------------------------------

    def _ancestry(self, m: str) -> List[str]:
        out = []
        while m is not None:
            out.append(m)
            m = self.parent[m]
        return out

    def _check_acyclic(self) -> None:
        for start in self.moments:
            seen = set()
            m = start
            while m is not None:
                if m in seen:
                    raise ModelError(f"parent map has a cycle through {m!r}")
                seen.add(m)
                m = self.parent[m]

    def _check_agent(self, a: str) -> None:
        if a not in self.agents:
            raise ModelError(f"unknown agent {a!r}")

    def _check_moment(self, m: str) -> None:
        if m not in self.parent:
            raise ModelError(f"unknown moment {m!r}")

    def _check_situation_ids(self, s: Situation) -> None:
        self._check_moment(s.moment)
        if s.history not in self.history_chain:
            raise ModelError(f"unknown history {s.history!r}")

    def is_situation(self, s: Situation) -> bool:
        return s.history in self._on and s.moment in self._on[s.history]

    def check_situation(self, s: Situation) -> Situation:
        s = Situation(*s)
        if not self.is_situation(s):
            raise ModelError(f"{s} is not a situation: moment not on history")
        return s

    def situations(self) -> List[Situation]:
        """All situations, moments in file order and histories in canonical order."""
        return [Situation(m, h) for m in self.moments for h in self._through[m]]

    def histories_at(self, moment: str) -> Tuple[str, ...]:
        self._check_moment(moment)
        return self._through[moment]

    def precedes(self, m1: str, m2: str) -> bool:
        """Strict tree order: ``m1`` is a proper ancestor of ``m2``."""
        return m1 != m2 and m1 in self._ancestry(m2)

    # -- choice and knowledge ---------------------------------------------

    def partition(self, agent: str, moment: str) -> Dict[str, frozenset]:
        self._check_agent(agent)
        self._check_moment(moment)
        if (agent, moment) in self.choice:
            return self.choice[(agent, moment)]
        return {VACUOUS_CELL: frozenset(self._through[moment])}

    def actions(self, agent: str, moment: str) -> List[Action]:
        return [Action(moment, agent, name, cell)
                for name, cell in self.partition(agent, moment).items()]

    def action(self, agent: str, moment: str, name: str) -> Action:
        cells = self.partition(agent, moment)
        if name not in cells:
            raise ModelError(f"{name!r} is not a cell of {agent} at {moment}")
        return Action(moment, agent, name, cells[name])

    def cell(self, agent: str, moment: str, history: str) -> frozenset:
        """The choice cell of ``agent`` at ``moment`` containing ``history``."""
        if (agent, moment) not in self.choice:
            return frozenset(self._through[moment])
        name = self._cell_of.get((agent, moment, history))
        return self.choice[(agent, moment)][name] if name is not None else frozenset()

    def info_set(self, agent: str, s: Situation) -> frozenset:
        """The ``~agent`` class of ``s``."""
        return self._class_of.get((agent, s), frozenset((s,)))

    def related(self, agent: str, m1: str, m2: str) -> bool:
        """Moment-level relatedness: some situation at ``m1`` ~ some at ``m2``."""
        for h in self._through[m1]:
            if any(s.moment == m2 for s in self.info_set(agent, Situation(m1, h))):
                return True
        return False

    def related_moments(self, agent: str, moment: str) -> List[str]:
        self._check_moment(moment)
        found = set()
        for h in self._through[moment]:
            found.update(s.moment for s in self.info_set(agent, Situation(moment, h)))
        return [m for m in self.moments if m in found]

    def values(self, flavor: str) -> Dict[str, Fraction]:
        return self.value_o if flavor == OBJECTIVE else self.value_s

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, doc: Mapping) -> "BTModel":
        try:
            parent = {}
            for entry in doc["moments"]:
                mid = str(entry["id"])
                if mid in parent:
                    raise ModelError(f"duplicate moment id {mid!r}")
                parent[mid] = entry.get("parent")
            names = {str(h["id"]): str(h["leaf"]) for h in doc.get("histories", [])}
            choice = {}
            for entry in doc.get("choice", []):
                key = (entry["agent"], entry["moment"])
                if key in choice:
                    raise ModelError(f"duplicate choice entry for {key}")
                choice[key] = entry["cells"]
            epistemic = {}
            for entry in doc.get("epistemic", []):
                classes = [[Situation(s["moment"], s["history"]) for s in c] for c in entry["classes"]]
                epistemic.setdefault(entry["agent"], []).extend(classes)
            valuation = {p: [Situation(s["moment"], s["history"]) for s in sits]
                         for p, sits in doc.get("valuation", {}).items()}
            return cls(doc["agents"], parent, choice, epistemic, doc.get("value_o", {}),
                       doc.get("value_s"), valuation, names)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ModelError(f"malformed BT model document: {exc!r}") from None

    def to_json(self) -> dict:
        sit = lambda s: {"moment": s.moment, "history": s.history}  # noqa: E731
        order = {s: i for i, s in enumerate(self.situations())}
        leaf = {h: chain[-1] for h, chain in self.history_chain.items()}
        doc = {
            "agents": list(self.agents),
            "moments": [{"id": m, "parent": self.parent[m]} for m in self.moments],
            "histories": [{"id": h, "leaf": leaf[h]} for h in self.histories],
            "choice": [{"agent": a, "moment": m,
                        "cells": {n: self._sorted_histories(c) for n, c in cells.items()}}
                       for (a, m), cells in self.choice.items()],
            "epistemic": [{"agent": a,
                           "classes": [[sit(s) for s in sorted(c, key=order.get)] for c in classes]}
                          for a, classes in self.epistemic.items() if classes],
            "value_o": {h: format_value(self.value_o[h]) for h in self.histories if h in self.value_o},
            "value_s": {h: format_value(self.value_s[h]) for h in self.histories if h in self.value_s},
            "valuation": {p: [sit(s) for s in sorted(sits, key=order.get)]
                          for p, sits in sorted(self.valuation.items())},
        }
        return doc

    def _sorted_histories(self, hs: Iterable[str]) -> List[str]:
        pos = {h: i for i, h in enumerate(self.histories)}
        return sorted(hs, key=pos.get)

    @classmethod
    def load(cls, path) -> "BTModel":
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


def validate_bt(m: BTModel) -> List[Violation]:
    """Check every frame constraint; an empty list means the model is legal."""
    out: List[Violation] = []
    if len(m.roots) != 1:
        out.append(Violation("tree", tuple(m.roots), f"expected exactly one root, found {len(m.roots)}"))

    for (a, mo), cells in m.choice.items():
        hm = frozenset(m.histories_at(mo))
        seen: Dict[str, str] = {}
        for name, cell in cells.items():
            if not cell:
                out.append(Violation("partition", (a, mo, name), f"cell {name} of {a} at {mo} is empty"))
            for h in sorted(cell - hm):
                out.append(Violation("partition", (a, mo, name, h),
                                     f"cell {name} of {a} at {mo} contains {h}, which does not pass through {mo}"))
            for h in sorted(cell & hm):
                if h in seen:
                    out.append(Violation("partition", (a, mo, h),
                                         f"{h} lies in both {seen[h]} and {name} for {a} at {mo}"))
                seen[h] = name
        for h in hm - set(seen):
            out.append(Violation("partition", (a, mo, h), f"{h} is in no cell of {a} at {mo}"))

    for (a, mo) in m.choice:
        for child in m.children[mo]:
            below = m.histories_at(child)
            owners = {m._cell_of.get((a, mo, h)) for h in below}
            if len(owners) > 1:
                out.append(Violation("NC", (a, mo, child),
                                     f"histories through {child} are split by {a}'s choice at {mo}"))

    for mo in m.moments:
        partitions = [list(m.partition(a, mo).items()) for a in m.agents]
        for profile in itertools.product(*partitions):
            meet = frozenset.intersection(*(cell for _, cell in profile))
            if not meet:
                names = tuple(f"{a}:{n}" for a, (n, _) in zip(m.agents, profile))
                out.append(Violation("IA", (mo,) + names,
                                     f"joint action {', '.join(names)} at {mo} is empty"))

    for h in m.histories:
        if h not in m.value_o or h not in m.value_s:
            out.append(Violation("values", (h,), f"history {h} lacks an objective or subjective value"))

    for a in m.agents:
        owner: Dict[Situation, int] = {}
        for i, cls in enumerate(m.epistemic[a]):
            if not cls:
                out.append(Violation("epistemic", (a, i), f"empty information set #{i} for {a}"))
            for s in cls:
                if not m.is_situation(s):
                    out.append(Violation("epistemic", (a, s), f"{s} in {a}'s information set is not a situation"))
                if s in owner:
                    out.append(Violation("epistemic", (a, s),
                                         f"{s} lies in two information sets of {a} (#{owner[s]} and #{i})"))
                owner.setdefault(s, i)
    if any(v.constraint in ("epistemic", "partition") for v in out):
        return out
    out.extend(_check_oac(m))
    out.extend(_check_unif_h(m))
    return out


def _check_oac(m: BTModel) -> List[Violation]:
    out = []
    for a in m.agents:
        for s in m.situations():
            cls = m.info_set(a, s)
            for h in m.cell(a, s.moment, s.history):
                mate = Situation(s.moment, h)
                if mate not in cls:
                    other = next(iter(sorted(cls - {s})), s)
                    out.append(Violation("OAC", (a, s, mate, other),
                                         f"{s} ~{a} {other} but its cell-mate {mate} is not in the same information set"))
                    break
    return out


def _check_unif_h(m: BTModel) -> List[Violation]:
    out = []
    for a in m.agents:
        for mo in m.moments:
            for target in m.related_moments(a, mo):
                for h in m.histories_at(mo):
                    s = Situation(mo, h)
                    if not any(t.moment == target for t in m.info_set(a, s)):
                        out.append(Violation("Unif-H", (a, s, target),
                                             f"{mo} ~{a} {target} but {s} relates to no situation at {target}"))
    return out


# ---------------------------------------------------------------------------
# Derived combinatorics


def histories_through(m: BTModel, moment: str) -> frozenset:
    return frozenset(m.histories_at(moment))


def states(m: BTModel, agent: str, moment: str) -> List[frozenset]:
    """Intersections of one cell per agent other than ``agent``, empty ones dropped."""
    m._check_agent(agent)
    hm = frozenset(m.histories_at(moment))
    others = [list(m.partition(b, moment).values()) for b in m.agents if b != agent]
    out: List[frozenset] = []
    for profile in itertools.product(*others):
        s = hm.intersection(*profile)
        if s and s not in out:
            out.append(s)
    return out


def _source_cell(source) -> Tuple[str, frozenset]:
    if isinstance(source, Action):
        return source.moment, source.cell
    moment, cell = source
    return moment, frozenset(cell)


def epistemic_cluster(m: BTModel, agent: str, source, target: str) -> frozenset:
    """Histories at ``target`` indistinguishable for ``agent`` from some history of ``source``.

    ``source`` is an :class:`Action` or a ``(moment, histories)`` pair.
    """
    m_star, cell = _source_cell(source)
    if not m.related(agent, m_star, target):
        raise ModelError(f"{target} is not epistemically related to {m_star} for {agent}")
    out = set()
    for h_star in cell:
        for s in m.info_set(agent, Situation(m_star, h_star)):
            if s.moment == target:
                out.add(s.history)
    return frozenset(out)


def set_leq(xs: Iterable[str], ys: Iterable[str], values: Mapping[str, Fraction]) -> bool:
    """Every history of ``xs`` is worth at most every history of ``ys``; vacuous if either is empty."""
    xs, ys = list(xs), list(ys)
    if not xs or not ys:
        return True
    return max(values[h] for h in xs) <= min(values[h] for h in ys)


def _leq(m: BTModel, agent: str, moment: str, first: frozenset, second: frozenset,
         flavor: str, relativized: bool) -> bool:
    values = m.values(flavor)
    if flavor == OBJECTIVE:
        pieces = [((first, second), moment)]
    else:
        pieces = [((epistemic_cluster(m, agent, (moment, first), t),
                    epistemic_cluster(m, agent, (moment, second), t)), t)
                  for t in m.related_moments(agent, moment)]
    for (x, y), at in pieces:
        if relativized:
            for s in states(m, agent, at):
                if not set_leq(x & s, y & s, values):
                    return False
        elif not set_leq(x, y, values):
            return False
    return True


def _as_action(m: BTModel, agent: str, moment: str, x) -> Action:
    if isinstance(x, Action):
        cell = x.cell
    elif isinstance(x, str):
        return m.action(agent, moment, x)
    else:
        cell = frozenset(x)
    for a in m.actions(agent, moment):
        if a.cell == cell:
            return a
    raise ModelError(f"{sorted(cell)} is not a cell of {agent} at {moment}")


def compare(m: BTModel, agent: str, moment: str, first, second, flavor: str = OBJECTIVE,
            relativized: bool = False) -> OrderOutcome:
    """Compare two of ``agent``'s actions at ``moment``.

    ``leq`` is ``first`` dominated-or-equal by ``second``; ``geq`` the converse.
    Actions may be :class:`Action` objects, cell names, or history sets.
    """
    if flavor not in (OBJECTIVE, SUBJECTIVE):
        raise ValueError(f"unknown flavor {flavor!r}")
    x = _as_action(m, agent, moment, first).cell
    y = _as_action(m, agent, moment, second).cell
    return OrderOutcome(_leq(m, agent, moment, x, y, flavor, relativized),
                        _leq(m, agent, moment, y, x, flavor, relativized))


def _undominated(m: BTModel, agent: str, moment: str, flavor: str, relativized: bool) -> List[Action]:
    acts = m.actions(agent, moment)
    out = []
    for a in acts:
        if not any(compare(m, agent, moment, a, b, flavor, relativized).strict for b in acts):
            out.append(a)
    return out


def optimal_set(m: BTModel, agent: str, moment: str, relativized: bool = False) -> List[Action]:
    return _undominated(m, agent, moment, OBJECTIVE, relativized)


def s_optimal_set(m: BTModel, agent: str, moment: str, relativized: bool = False) -> List[Action]:
    return _undominated(m, agent, moment, SUBJECTIVE, relativized)

"""Truth evaluation on BT models.

Evaluation labels every subformula with the set of situations where it holds,
encoded as an integer bitmask over :meth:`BTModel.situations`.  Two readings
of the ought operators are available:

``optimal``
    an ought holds when every optimal (resp. subjectively optimal) action
    guarantees the formula; orderings are unrelativized unless asked otherwise.
``dominance``
    sure-thing reading: every action that fails the formula is strictly
    dominated by an action which, together with everything at least as good
    as it, guarantees the formula.  Orderings are always state-relativized.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import btmodel as bt
from .btmodel import BTModel, Situation
from .formula import And, Atom, Box, Formula, Knows, Not, ObjOught, Stit, SubjOught, render


class EvalMode(str, enum.Enum):
    OPTIMAL = "optimal"
    DOMINANCE = "dominance"

    def __str__(self) -> str:
        return self.value


class UnknownAtomWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Judgment:
    situation: Situation
    formula: Formula
    mode: EvalMode
    value: bool

    def line(self) -> str:
        return f"{self.situation}  {EvalMode(self.mode).value}  {str(self.value).lower()}  {render(self.formula)}"

    def to_json(self) -> dict:
        return {"situation": str(self.situation), "formula": render(self.formula),
                "mode": EvalMode(self.mode).value, "value": self.value}


@dataclass
class _OughtTable:
    """Per (agent, moment) data for one flavor of ought.

    ``masks[i]`` is the set of situations an action must make true: the cell
    itself for objective oughts, the union of its epistemic clusters over all
    related moments for subjective ones.
    """

    masks: List[int]
    optimal: List[int]
    strictly_above: List[List[int]]
    up_set: List[List[int]]


class Evaluator:
    """Memoizing evaluator bound to one model and one reading.

    ``relativized`` selects state-relativized orderings in optimal mode.
    ``literal_objective_clause`` switches the objective dominance clause to the
    verbatim condition "L'' = L or L' <= L''" instead of "L'' = L' or ...".
    """

    def __init__(self, model: BTModel, mode: EvalMode = EvalMode.OPTIMAL, relativized: bool = False,
                 literal_objective_clause: bool = False):
        self.model = model
        self.mode = EvalMode(mode)
        self.relativized = relativized or self.mode is EvalMode.DOMINANCE
        self.literal = literal_objective_clause
        self.sits = model.situations()
        self.index = {s: i for i, s in enumerate(self.sits)}
        self.full = (1 << len(self.sits)) - 1
        self.moment_mask: Dict[str, int] = {}
        for s, i in self.index.items():
            self.moment_mask[s.moment] = self.moment_mask.get(s.moment, 0) | (1 << i)
        self._cells: Dict[Tuple[str, str], List[int]] = {}
        self._classes: Dict[str, List[int]] = {}
        self._tables: Dict[Tuple[str, str, str], _OughtTable] = {}
        self._cache: Dict[Formula, int] = {}
        self.unknown_atoms: set = set()

    # -- masks -------------------------------------------------------------

    def mask_of(self, sits) -> int:
        out = 0
        for s in sits:
            out |= 1 << self.index[s]
        return out

    def cell_masks(self, agent: str, moment: str) -> List[int]:
        key = (agent, moment)
        if key not in self._cells:
            self._cells[key] = [self.mask_of(Situation(moment, h) for h in cell)
                                for cell in self.model.partition(agent, moment).values()]
        return self._cells[key]

    def class_masks(self, agent: str) -> List[int]:
        if agent not in self._classes:
            listed = [self.mask_of(c) for c in self.model.epistemic[agent]]
            covered = 0
            for c in listed:
                covered |= c
            singles = [1 << i for i in range(len(self.sits)) if not covered >> i & 1]
            self._classes[agent] = listed + singles
        return self._classes[agent]

    def table(self, agent: str, moment: str, flavor: str) -> _OughtTable:
        key = (agent, moment, flavor)
        if key in self._tables:
            return self._tables[key]
        m = self.model
        acts = m.actions(agent, moment)
        if flavor == bt.OBJECTIVE:
            masks = self.cell_masks(agent, moment)
        else:
            masks = []
            targets = m.related_moments(agent, moment)
            for act in acts:
                mask = 0
                for t in targets:
                    cluster = bt.epistemic_cluster(m, agent, act, t)
                    mask |= self.mask_of(Situation(t, h) for h in cluster)
                masks.append(mask)
        n = len(acts)
        order = [[bt.compare(m, agent, moment, acts[i], acts[j], flavor, self.relativized)
                  for j in range(n)] for i in range(n)]
        strictly_above = [[j for j in range(n) if order[i][j].strict] for i in range(n)]
        up_set = [[j for j in range(n) if order[i][j].leq] for i in range(n)]
        optimal = [i for i in range(n) if not strictly_above[i]]
        tab = _OughtTable(masks, optimal, strictly_above, up_set)
        self._tables[key] = tab
        return tab

    # -- evaluation ----------------------------------------------------------

    def extension_mask(self, f: Formula) -> int:
        cached = self._cache.get(f)
        if cached is not None:
            return cached
        out = self._compute(f)
        self._cache[f] = out
        return out

    def _compute(self, f: Formula) -> int:
        m = self.model
        if isinstance(f, Atom):
            if f.name not in m.valuation:
                if f.name not in self.unknown_atoms:
                    self.unknown_atoms.add(f.name)
                    warnings.warn(f"atom {f.name!r} has no valuation; treated as false everywhere",
                                  UnknownAtomWarning, stacklevel=4)
                return 0
            return self.mask_of(s for s in m.valuation[f.name] if s in self.index)
        if isinstance(f, Not):
            return self.full & ~self.extension_mask(f.operand)
        if isinstance(f, And):
            return self.extension_mask(f.left) & self.extension_mask(f.right)
        sub = self.extension_mask(f.operand)
        if isinstance(f, Box):
            return self._settled(sub, self.moment_mask.values())
        if isinstance(f, Stit):
            self._check_agent(f.agent)
            return self._settled(sub, (c for mo in m.moments for c in self.cell_masks(f.agent, mo)))
        if isinstance(f, Knows):
            self._check_agent(f.agent)
            return self._settled(sub, self.class_masks(f.agent))
        if isinstance(f, (ObjOught, SubjOught)):
            self._check_agent(f.agent)
            flavor = bt.OBJECTIVE if isinstance(f, ObjOught) else bt.SUBJECTIVE
            out = 0
            for mo in m.moments:
                if self._ought_holds(f.agent, mo, flavor, sub):
                    out |= self.moment_mask[mo]
            return out
        raise TypeError(f"not a formula: {f!r}")

    def _check_agent(self, agent: str) -> None:
        if agent not in self.model.agents:
            raise bt.ModelError(f"formula mentions unknown agent {agent!r}")

    @staticmethod
    def _settled(sub: int, blocks) -> int:
        out = 0
        for b in blocks:
            if sub & b == b:
                out |= b
        return out

    def _ought_holds(self, agent: str, moment: str, flavor: str, sub: int) -> bool:
        tab = self.table(agent, moment, flavor)
        ok = [sub & mk == mk for mk in tab.masks]
        if self.mode is EvalMode.OPTIMAL:
            return all(ok[i] for i in tab.optimal)
        for i, good in enumerate(ok):
            if good:
                continue
            witnessed = False
            for j in tab.strictly_above[i]:
                anchor = i if (self.literal and flavor == bt.OBJECTIVE) else j
                if ok[anchor] and all(ok[k] for k in tab.up_set[j]):
                    witnessed = True
                    break
            if not witnessed:
                return False
        return True

    def holds(self, s: Situation, f: Formula) -> bool:
        s = self.model.check_situation(s)
        return bool(self.extension_mask(f) >> self.index[s] & 1)


def evaluate(m: BTModel, s: Situation, f: Formula, mode: EvalMode = EvalMode.OPTIMAL, **options) -> bool:
    return Evaluator(m, mode, **options).holds(s, f)


def extension(m: BTModel, moment: str, f: Formula, mode: EvalMode = EvalMode.OPTIMAL, **options) -> frozenset:
    """The histories through ``moment`` along which ``f`` holds at ``moment``."""
    hs = m.histories_at(moment)
    ev = Evaluator(m, mode, **options)
    mask = ev.extension_mask(f)
    return frozenset(h for h in hs if mask >> ev.index[Situation(moment, h)] & 1)


def check_validity(m: BTModel, f: Formula, mode: EvalMode = EvalMode.OPTIMAL,
                   **options) -> Optional[Situation]:
    """First situation falsifying ``f`` in canonical order, or None."""
    ev = Evaluator(m, mode, **options)
    mask = ev.extension_mask(f)
    for i, s in enumerate(ev.sits):
        if not mask >> i & 1:
            return s
    return None


def judge(m: BTModel, f: Formula, mode: EvalMode = EvalMode.OPTIMAL, at=None, **options) -> List[Judgment]:
    """Judgments for ``f`` at the given situations (default: all of them)."""
    ev = Evaluator(m, mode, **options)
    sits = ev.sits if at is None else [m.check_situation(s) for s in at]
    return [Judgment(s, f, ev.mode, ev.holds(s, f)) for s in sits]

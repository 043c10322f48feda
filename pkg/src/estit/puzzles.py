"""The three coin-betting puzzles and their expected verdicts.

Agent ``b`` hides a coin heads (cell L1, leading to m2) or tails (L2, leading
to m3).  Agent ``a`` then bets heads, bets tails or refrains: L3/L4/L5 at m2
and L6/L7/L8 at m3, one history each (h1..h6).

Two epistemic readings are available for ``a``:

* ``moment``: ``a`` cannot tell m2 from m3 at all, so every situation at m2
  is indistinguishable from every situation at m3.
* ``situation``: information sets pair up the same bet at both moments,
  {m2/h1, m3/h4}, {m2/h2, m3/h5}, {m2/h3, m3/h6}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .btmodel import BTModel, Situation
from .formula import parse
from .semantics import EvalMode, Evaluator, Judgment

MOMENT = "moment"
SITUATION = "situation"
VARIANTS = (MOMENT, SITUATION)

ALPHA, BETA = "a", "b"
HISTORIES = ("h1", "h2", "h3", "h4", "h5", "h6")
M2_HISTORIES = ("h1", "h2", "h3")
M3_HISTORIES = ("h4", "h5", "h6")

VALUES = {
    1: (10, 0, 5, 0, 10, 5),
    2: (10, 0, 10, 0, 10, 10),
    3: (10, 0, 0, 0, 10, 0),
}


@dataclass(frozen=True)
class PuzzleSpec:
    id: int
    variant: str = SITUATION

    def __post_init__(self):
        if self.id not in VALUES:
            raise ValueError(f"no puzzle {self.id}; choose 1, 2 or 3")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose {' or '.join(VARIANTS)}")


def _atoms(puzzle: int) -> dict:
    at = {"H": M2_HISTORIES, "T": M3_HISTORIES}
    at["BH"] = ("h1", "h4")
    at["BT"] = ("h2", "h5")
    at["G"] = ("h1", "h2", "h4", "h5")
    if puzzle == 3:
        at["W"] = ("h1", "h5")
    where = {h: "m2" if h in M2_HISTORIES else "m3" for h in HISTORIES}
    return {p: [Situation(where[h], h) for h in hs] for p, hs in at.items()}


def build_puzzle(spec: PuzzleSpec) -> BTModel:
    parent = {"m1": None, "m2": "m1", "m3": "m1"}
    parent.update({h: "m2" for h in M2_HISTORIES})
    parent.update({h: "m3" for h in M3_HISTORIES})
    choice = {
        (BETA, "m1"): {"L1": M2_HISTORIES, "L2": M3_HISTORIES},
        (ALPHA, "m2"): {"L3": ("h1",), "L4": ("h2",), "L5": ("h3",)},
        (ALPHA, "m3"): {"L6": ("h4",), "L7": ("h5",), "L8": ("h6",)},
    }
    sits = lambda mo, hs: [Situation(mo, h) for h in hs]  # noqa: E731
    if spec.variant == SITUATION:
        alpha_upper = [[Situation("m2", x), Situation("m3", y)] for x, y in zip(M2_HISTORIES, M3_HISTORIES)]
    else:
        alpha_upper = [sits("m2", M2_HISTORIES) + sits("m3", M3_HISTORIES)]
    epistemic = {
        # a's vacuous choice at m1 forces one information set there
        ALPHA: [sits("m1", HISTORIES)] + alpha_upper,
        BETA: [sits("m1", M2_HISTORIES), sits("m1", M3_HISTORIES),
               sits("m2", M2_HISTORIES), sits("m3", M3_HISTORIES)],
    }
    values = dict(zip(HISTORIES, VALUES[spec.id]))
    return BTModel((ALPHA, BETA), parent, choice, epistemic, values, None, _atoms(spec.id))


def _all(moments=("m2", "m3")) -> List[Situation]:
    out = []
    for mo in moments:
        out += [Situation(mo, h) for h in (M2_HISTORIES if mo == "m2" else M3_HISTORIES)]
    return out


def expected_judgments(spec: PuzzleSpec) -> List[Judgment]:
    """Golden verdicts under the optimal reading for the given puzzle and variant."""
    rows = []

    def add(text, value, where=None):
        f = parse(text)
        for s in where or _all():
            rows.append(Judgment(s, f, EvalMode.OPTIMAL, value))

    h1 = [Situation("m2", "h1")]
    if spec.id == 1:
        add("K[a] O[a] G", True)
        if spec.variant == SITUATION:
            add("Os[a] G", False)
            add("K[a] Os[a] G", False)
    elif spec.id == 2:
        add("K[a] O[a] ~G", False)
        add("O[a] ~G", False, h1)
        if spec.variant == SITUATION:
            add("Os[a] ~G", True)
            add("K[a] Os[a] ~G", True)
            add("Os[a] ~G -> O[a] ~G", False, h1)
    else:
        add("K[a] O[a] W", True)
        add("<> K[a] [a] W", False, h1)
        add("K[a] O[a] W -> <> K[a] [a] W", False)
        if spec.variant == SITUATION:
            add("Os[a] W", False)
            add("K[a] Os[a] W", False)
            add("O[a] W -> <> K[a] [a] W", False, h1)
            add("O[a] W -> Os[a] W", False, h1)
    return rows


@dataclass(frozen=True)
class Mismatch:
    expected: Judgment
    actual: bool

    def line(self) -> str:
        e = self.expected
        return f"MISMATCH {e.situation}  {e.mode.value}  expected {str(e.value).lower()}  {e.formula}"


def verify_puzzle(spec: PuzzleSpec, mode: EvalMode = EvalMode.OPTIMAL, **options):
    """Evaluate every golden judgment under ``mode``.

    Returns ``(judgments, mismatches)``; the judgments carry the actual truth
    values and the requested mode.
    """
    model = build_puzzle(spec)
    ev = Evaluator(model, mode, **options)
    judged, mismatches = [], []
    for row in expected_judgments(spec):
        value = ev.holds(row.situation, row.formula)
        judged.append(Judgment(row.situation, row.formula, ev.mode, value))
        if value != row.value:
            mismatches.append(Mismatch(row, value))
    return judged, mismatches

"""
Permutation worlds: card decks, abstract symmetric and cyclic schemata, and the
two-colour world used to illustrate grue and bleen.

Deck arrangements are tuples of card labels 0..n-1, ``arrangement[i]`` being
the card at position i.  A shuffle pi acts by gathering positions:
``D_pi(a)[i] = a[pi[i]]``.  States are listed in lexicographic order of the
arrangements.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .schema_core import (
    FiniteStateSpace,
    KinematicMap,
    SchemaError,
    SizeGuardError,
    TheorySchema,
)
from .similarity_engine import ExtendedSimilarity, Proposition, PropositionKind, builtin_propositions

logger = logging.getLogger(__name__)

DEFAULT_MAX_CARDS = 5
HARD_MAX_CARDS = 8
# K is verified to be a group on construction only up to this size.
GROUP_CHECK_LIMIT = 120


class DeckKind(Enum):
    FULL = "FULL"
    HALF = "HALF"


class ColorKind(Enum):
    FIXED = "FIXED"
    RECOLORABLE = "RECOLORABLE"


@dataclass(frozen=True)
class DeckState:
    """An arrangement of n cards, optionally split into two half-decks."""

    arrangement: Tuple[int, ...]
    split: bool = False

    def __post_init__(self):
        arrangement = tuple(self.arrangement)
        if sorted(arrangement) != list(range(len(arrangement))):
            raise SchemaError(f"{arrangement} is not an arrangement of cards 0..{len(arrangement) - 1}")
        if self.split and len(arrangement) % 2:
            raise SchemaError("A split deck needs an even number of cards")
        object.__setattr__(self, "arrangement", arrangement)

    @property
    def halves(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        h = len(self.arrangement) // 2
        return self.arrangement[:h], self.arrangement[h:]

    def __str__(self) -> str:
        if not self.split:
            return ",".join(str(c) for c in self.arrangement)
        top, bottom = self.halves
        return ",".join(str(c) for c in top) + "|" + ",".join(str(c) for c in bottom)


def _deck_states(n: int) -> List[Tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def _shuffle_table(pi: Sequence[int], states: List[Tuple[int, ...]],
                   index: Dict[Tuple[int, ...], int]) -> Tuple[int, ...]:
    return tuple(index[tuple(a[i] for i in pi)] for a in states)


def _check_deck_size(n: int, max_cards: int):
    if n < 2:
        raise SchemaError(f"A deck needs at least 2 cards, got {n}")
    if n > min(max_cards, HARD_MAX_CARDS):
        raise SizeGuardError(f"Deck of {n} cards exceeds the guard n <= {min(max_cards, HARD_MAX_CARDS)}")


def _half_shuffles(n: int) -> List[Tuple[int, ...]]:
    h = n // 2
    return [
        tuple(top) + tuple(h + i for i in bottom)
        for top in itertools.permutations(range(h))
        for bottom in itertools.permutations(range(h))
    ]


def _shuffle_name(pi: Sequence[int], split: bool) -> str:
    if not split:
        return "shuffle(" + ",".join(str(i) for i in pi) + ")"
    h = len(pi) // 2
    return (
        "halves("
        + ",".join(str(i) for i in pi[:h])
        + "|"
        + ",".join(str(i) for i in pi[h:])
        + ")"
    )


def build_deck_schema(n: int, kind: DeckKind = DeckKind.FULL, n_steps: int = 1,
                      max_cards: int = DEFAULT_MAX_CARDS) -> TheorySchema:
    """
    Build the full-deck or half-deck schema on all n! arrangements.

    FULL allows every shuffle; HALF allows the (n/2)!^2 shuffles that rearrange
    each half-deck separately.

    Raises:
        SizeGuardError: If n exceeds ``max_cards``
        SchemaError: If n < 2, or n is odd for HALF
    """
    kind = DeckKind(kind)
    _check_deck_size(n, max_cards)
    if kind is DeckKind.HALF and n % 2:
        raise SchemaError(f"Half-deck schema needs an even number of cards, got {n}")
    states = _deck_states(n)
    index = {a: i for i, a in enumerate(states)}
    split = kind is DeckKind.HALF
    shuffles = _half_shuffles(n) if split else _deck_states(n)
    maps = tuple(
        KinematicMap(_shuffle_name(pi, split), _shuffle_table(pi, states, index)) for pi in shuffles
    )
    logger.info(f"Built {kind.value} deck schema: n={n}, |S|={len(states)}, |K|={len(maps)}")
    return TheorySchema(
        states=FiniteStateSpace(tuple(states)),
        maps=maps,
        reversible=True,
        n_steps=n_steps,
        name=f"{kind.value.lower()}-deck-{n}",
        check_group=len(maps) <= GROUP_CHECK_LIMIT,
    )


def half_swap(n: int, max_cards: int = HARD_MAX_CARDS) -> KinematicMap:
    """The map X exchanging the two half-decks: (a|b) -> (b|a)."""
    if n % 2:
        raise SchemaError(f"Half swap needs an even number of cards, got {n}")
    _check_deck_size(n, max_cards)
    h = n // 2
    states = _deck_states(n)
    index = {a: i for i, a in enumerate(states)}
    pi = tuple(range(h, n)) + tuple(range(h))
    return KinematicMap("X", _shuffle_table(pi, states, index))


def half_deck_candidates(n: int, schema: Optional[TheorySchema] = None) -> List[KinematicMap]:
    """K together with X*K: the candidate-restricted similarity set for the half-deck."""
    if schema is None:
        schema = build_deck_schema(n, DeckKind.HALF, max_cards=HARD_MAX_CARDS)
    X = half_swap(n)
    swapped = [
        KinematicMap(f"X*{D.name}", schema.compose(X, D).perm) for D in schema.maps
    ]
    return list(schema.maps) + swapped


def marked_same_half(marks: Sequence[int], n: int) -> Proposition:
    """True iff all marked cards lie in one half-deck."""
    return builtin_propositions(PropositionKind.MARKED_SAME_HALF, {"marks": set(marks), "n": n})


def deck_index(schema: TheorySchema, arrangement: Sequence[int]) -> int:
    return schema.index_of(tuple(arrangement))


def build_symmetric_schema(size: int, n_steps: int = 1, max_states: int = 8) -> TheorySchema:
    """Abstract states s0..s{size-1} with every permutation kinematically possible."""
    if size < 1:
        raise SchemaError(f"Schema needs at least one state, got {size}")
    if size > max_states:
        raise SizeGuardError(f"Symmetric schema on {size} states exceeds the guard {max_states}")
    maps = tuple(
        KinematicMap("perm(" + ",".join(str(i) for i in pi) + ")", pi)
        for pi in itertools.permutations(range(size))
    )
    return TheorySchema(
        states=FiniteStateSpace(tuple(f"s{i}" for i in range(size))),
        maps=maps,
        reversible=True,
        n_steps=n_steps,
        name=f"symmetric-{size}",
        check_group=len(maps) <= GROUP_CHECK_LIMIT,
    )


def build_cyclic_schema(size: int, n_steps: int = 1) -> TheorySchema:
    """States s0..s{size-1} with the rotations c^m as K; c sends s_i to s_{i+1}."""
    if size < 1:
        raise SchemaError(f"Schema needs at least one state, got {size}")
    maps = tuple(
        KinematicMap("id" if m == 0 else f"c^{m}", tuple((i + m) % size for i in range(size)))
        for m in range(size)
    )
    return TheorySchema(
        states=FiniteStateSpace(tuple(f"s{i}" for i in range(size))),
        maps=maps,
        reversible=True,
        n_steps=n_steps,
        name=f"cyclic-{size}",
    )


COLORS = ("green", "blue")
_KEEP = KinematicMap("keep", (0, 1))
_RECOLOR = KinematicMap("recolor", (1, 0))


def build_color_schema(kind: ColorKind = ColorKind.RECOLORABLE, n_steps: int = 2) -> TheorySchema:
    """
    A single object that is green or blue.

    FIXED: its colour never changes.  RECOLORABLE: it may switch at any step.
    """
    kind = ColorKind(kind)
    maps = (_KEEP,) if kind is ColorKind.FIXED else (_KEEP, _RECOLOR)
    return TheorySchema(
        states=FiniteStateSpace(COLORS),
        maps=maps,
        reversible=True,
        n_steps=n_steps,
        name=f"color-{kind.value.lower()}",
    )


def grue_bleen_spectacles(switch_step: int, n_steps: int) -> ExtendedSimilarity:
    """Read green as green before ``switch_step`` and as blue from then on."""
    if not 1 <= switch_step <= n_steps:
        raise SchemaError(f"Switch step must lie in 1..{n_steps}, got {switch_step}")
    maps = tuple(_KEEP if k < switch_step else _RECOLOR for k in range(n_steps + 1))
    return ExtendedSimilarity(maps, f"grue-bleen@{switch_step}")

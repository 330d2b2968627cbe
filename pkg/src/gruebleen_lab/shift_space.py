"""
The binary full shift on a fixed-period surrogate.

A state is a binary word of length p standing for the bi-infinite sequence
that repeats it.  Words are stored raw (not up to rotation) so the shift acts
nontrivially, and two states are equal iff their words are equal.

Reflection is taken about an anchor index a: ``(rho x)_i = x_{(a - i) mod p}``.
The default anchor is p - 1, which reverses the stored word (0011 -> 1100);
anchor 0 reflects about the first letter instead (0011 -> 0110).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

from .schema_core import (
    FiniteStateSpace,
    KinematicMap,
    SchemaError,
    SimilarityGroup,
    SizeGuardError,
    TheorySchema,
    generate_group,
)

logger = logging.getLogger(__name__)

MAX_PERIOD = 16


class ShiftKind(Enum):
    SHIFT = "SHIFT"
    COMPLEMENT = "COMPLEMENT"
    REFLECT = "REFLECT"


def words(p: int) -> List[str]:
    """All binary words of length p in lexicographic order."""
    return [format(i, f"0{p}b") for i in range(2 ** p)]


def shift_word(word: str, m: int = 1) -> str:
    """(sigma^m x)_i = x_{i+m}: rotate the word left by m."""
    m %= len(word)
    return word[m:] + word[:m]


def complement_word(word: str) -> str:
    return word.translate(str.maketrans("01", "10"))


def reflect_word(word: str, anchor: Optional[int] = None) -> str:
    p = len(word)
    if anchor is None:
        anchor = p - 1
    return "".join(word[(anchor - i) % p] for i in range(p))


def is_constant_word(word: str) -> bool:
    return len(set(word)) <= 1


def _check_period(p: int, max_period: int):
    if p < 1:
        raise SchemaError(f"Period must be >= 1, got {p}")
    if p > min(max_period, MAX_PERIOD):
        raise SizeGuardError(f"Period {p} exceeds the guard p <= {min(max_period, MAX_PERIOD)}")


def _table(p: int, fn) -> tuple:
    all_words = words(p)
    return tuple(int(fn(w), 2) for w in all_words)


def build_shift_schema(p: int, n_steps: int = 1, generators_only: bool = False,
                       max_period: int = MAX_PERIOD) -> TheorySchema:
    """
    Build the period-p full shift.

    By default K is every finite shift sigma^m, a cyclic group of order p.  With
    ``generators_only`` K is just {sigma}, which is not closed under
    composition, so the schema is marked non-reversible.
    """
    _check_period(p, max_period)
    if generators_only:
        maps = (structural_map(ShiftKind.SHIFT, p, max_period=max_period),)
    else:
        maps = tuple(structural_map(ShiftKind.SHIFT, p, m, max_period=max_period) for m in range(p))
    return TheorySchema(
        states=FiniteStateSpace(tuple(words(p))),
        maps=maps,
        reversible=not generators_only,
        n_steps=n_steps,
        name=f"shift-{p}" + ("-generator" if generators_only else ""),
    )


def structural_map(kind: Any, p: int, m: int = 1, anchor: Optional[int] = None,
                   max_period: int = MAX_PERIOD) -> KinematicMap:
    """
    One of the structural bijections of the shift space.

    Args:
        kind: SHIFT (by ``m`` places), COMPLEMENT (beta) or REFLECT (rho about ``anchor``)
        p: Period of the words
    """
    kind = ShiftKind(kind.value if isinstance(kind, Enum) else str(kind).upper())
    _check_period(p, max_period)
    if kind is ShiftKind.SHIFT:
        m %= p
        name = "id" if m == 0 else ("sigma" if m == 1 else f"sigma^{m}")
        return KinematicMap(name, _table(p, lambda w: shift_word(w, m)))
    if kind is ShiftKind.COMPLEMENT:
        return KinematicMap("beta", _table(p, complement_word))
    return KinematicMap("rho", _table(p, lambda w: reflect_word(w, anchor)))


@dataclass(frozen=True)
class ExclusionCertificate:
    """
    Result of the constant-sequence criterion.

    When ``excluded`` is set, ``constant_word`` is fixed by every shift while its
    image is moved by sigma^shift, so the candidate cannot be a similarity.
    """

    excluded: bool
    constant_word: Optional[str] = None
    image: Optional[str] = None
    shift: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        if not self.excluded:
            return {"excluded": False}
        return {
            "excluded": True,
            "constant_word": self.constant_word,
            "image": self.image,
            "shift": self.shift,
        }


def certify_exclusion(V: Any, p: int) -> ExclusionCertificate:
    """
    Look for a constant word that V sends to a non-constant one.

    A PASS only means this criterion found nothing; it does not prove V is a
    similarity.
    """
    all_words = words(p)
    if not isinstance(V, KinematicMap):
        V = KinematicMap("candidate", tuple(V))
    table = V.perm
    if len(table) != len(all_words):
        raise SchemaError(f"Candidate has {len(table)} entries but period {p} has {len(all_words)} words")
    for constant in ("0" * p, "1" * p):
        image = all_words[table[int(constant, 2)]]
        if is_constant_word(image):
            continue
        n = next(n for n in range(1, p) if shift_word(image, n) != image)
        logger.debug(f"Candidate sends constant {constant} to {image}; sigma^{n} moves it")
        return ExclusionCertificate(True, constant, image, n)
    return ExclusionCertificate(False)


def shift_similarity_group(p: int, anchor: Optional[int] = None) -> SimilarityGroup:
    """The group generated by sigma, beta and rho."""
    schema = build_shift_schema(p)
    generators = [
        structural_map(ShiftKind.SHIFT, p),
        structural_map(ShiftKind.COMPLEMENT, p),
        structural_map(ShiftKind.REFLECT, p, anchor=anchor),
    ]
    maps = generate_group(generators, schema)
    logger.debug(f"sigma/beta/rho generate a group of order {len(maps)} at p={p}")
    return SimilarityGroup(maps, "generated", True)

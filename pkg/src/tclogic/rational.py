"""Rational closure over ALC with typicality: exceptionality strata, concept
ranks, defeasible TBox/ABox entailment, and whole-KB consistency.

Degrees are irrelevant here — only the set of typicality inclusions matters.
Rank-infinity inclusions are folded into the rigid part ("strictified") before
any classical query, since exceptionless typicality is effectively strict.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

from .alc import AlcEngine
from .concepts import And, Concept, Not, Or, TOP, conj, nnf
from .kb import ConceptAssertion, KnowledgeBase, RigidInclusion, TypicalityInclusion


@dataclass(frozen=True, order=True)
class Finite:
    n: int


@dataclass(frozen=True)
class Infinite:
    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, Infinite)

    def __gt__(self, other):
        return not isinstance(other, Infinite)

    def __ge__(self, other):
        return True


Rank = Union[Finite, Infinite]
INFINITE = Infinite()


def rank_lt(a: Rank, b: Rank) -> bool:
    if isinstance(a, Infinite):
        return False
    if isinstance(b, Infinite):
        return True
    return a.n < b.n


@dataclass(frozen=True)
class RankTable:
    strata: Tuple[Tuple[TypicalityInclusion, ...], ...]  # E_0, E_1, ... (last = fixpoint or empty)
    fixpoint: Tuple[TypicalityInclusion, ...]


def materialization(inclusions: Sequence[TypicalityInclusion]) -> Concept:
    """Conjunction of the classical stand-ins (not C or D) of the inclusions."""
    return conj(nnf(Or(Not(t.subject), t.predicate)) for t in inclusions)


class RankEngine:
    """Rational-closure reasoner for one KB; caches strata and concept ranks."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.rigid_engine = AlcEngine(kb.rigid)
        self._rank_cache: Dict[Concept, Rank] = {}
        self._lock = threading.Lock()
        self.table = self._compute_table()
        self._materializations = tuple(
            materialization(stratum) for stratum in self.table.strata
        )
        strict_rigid = tuple(kb.rigid) + tuple(
            RigidInclusion(t.subject, t.predicate) for t in self.table.fixpoint
        )
        self.strict_engine = AlcEngine(strict_rigid)
        self.strict_rigid = strict_rigid

    def _exceptional(self, subject: Concept, mat: Concept) -> bool:
        return not self.rigid_engine.satisfiable(And(mat, subject))

    def _compute_table(self) -> RankTable:
        strata = []
        current = tuple(self.kb.typical)
        while True:
            strata.append(current)
            mat = materialization(current)
            nxt = tuple(t for t in current if self._exceptional(t.subject, mat))
            if nxt == current:
                # fixpoint: these inclusions never become non-exceptional
                return RankTable(tuple(strata), current)
            current = nxt
            if not current:
                strata.append(current)
                return RankTable(tuple(strata), ())

    def concept_rank(self, c: Concept) -> Rank:
        c = nnf(c)
        with self._lock:
            if c in self._rank_cache:
                return self._rank_cache[c]
        result: Rank = INFINITE
        for i, mat in enumerate(self._materializations):
            if self.rigid_engine.satisfiable(And(mat, c)):
                result = Finite(i)
                break
        with self._lock:
            self._rank_cache[c] = result
        return result

    def entails_typicality(self, subject: Concept, predicate: Concept) -> bool:
        if isinstance(self.concept_rank(subject), Infinite):
            return True
        return rank_lt(
            self.concept_rank(And(subject, predicate)),
            self.concept_rank(And(subject, Not(predicate))),
        )

    def entails_assertion(self, individual: str, c: Concept) -> bool:
        gamma = self._gamma(individual)
        if self.strict_engine.subsumes(gamma, c):
            return True
        return self.entails_typicality(gamma, c)

    def _gamma(self, individual: str) -> Concept:
        if individual not in self.kb.signature.individuals:
            from .alc import UnknownIndividualError
            raise UnknownIndividualError(individual)
        concepts = self.kb.concept_assertions_for(individual)
        return conj(concepts) if concepts else TOP

    def consistent(self) -> bool:
        if not self.strict_engine.abox_consistent(self.kb.abox):
            return False
        return all(
            isinstance(self.concept_rank(self._gamma(a)), Finite)
            for a in self.kb.individuals()
        )


def compute_ranks(kb: KnowledgeBase) -> RankTable:
    return RankEngine(kb).table


def concept_rank(kb: KnowledgeBase, c: Concept) -> Rank:
    return RankEngine(kb).concept_rank(c)


def rc_entails_typicality(kb: KnowledgeBase, subject: Concept, predicate: Concept) -> bool:
    return RankEngine(kb).entails_typicality(subject, predicate)


def rc_entails_assertion(kb: KnowledgeBase, individual: str, c: Concept) -> bool:
    return RankEngine(kb).entails_assertion(individual, c)


def tcl_consistent(kb: KnowledgeBase) -> bool:
    return RankEngine(kb).consistent()

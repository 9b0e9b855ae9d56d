"""Building compound-revised KBs from a chosen scenario, probabilistic instance
queries on them, categorization scores, and iterated combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .concepts import Atom, Concept
from .kb import (
    ConceptAssertion, KnowledgeBase, Probability, RigidInclusion,
    TypicalityInclusion,
)
from .rational import RankEngine
from .scenarios import (
    CombinationSpec, ScenarioRecord, SelectionResult, STATUS_SELECTED,
    _same_concept, compound_concept, concept_aliases, relevant_inclusions,
    select_scenarios,
)

DEFAULT_PRIOR = Probability(Fraction(6, 10))


class NotSelectedError(ValueError):
    pass


@dataclass(frozen=True)
class RevisedKB:
    kb: KnowledgeBase
    compound: Concept
    compound_alias: Optional[str]
    provenance: Dict[int, int]  # added inclusion id -> source inclusion id

    def compound_inclusions(self) -> Tuple[TypicalityInclusion, ...]:
        """The typicality inclusions whose subject is the compound (or alias)."""
        aliases = concept_aliases(self.kb)
        return tuple(
            t for t in self.kb.typical
            if _same_concept(t.subject, self.compound, aliases)
        )

    @staticmethod
    def adopt(kb: KnowledgeBase, compound: Concept, alias: Optional[str] = None) -> "RevisedKB":
        """Treat an existing KB as already revised around ``compound``.

        Useful for KBs written out by hand or merged from two revisions;
        provenance is unknown and left empty.
        """
        return RevisedKB(kb, compound, alias, {})


def build_revised_kb(
    kb: KnowledgeBase,
    spec: CombinationSpec,
    chosen: ScenarioRecord,
    alias: Optional[str] = None,
) -> RevisedKB:
    if chosen.status != STATUS_SELECTED:
        raise NotSelectedError(
            f"revision requires a selected scenario, got status {chosen.status!r}"
        )
    aliases = concept_aliases(kb)
    relevant = relevant_inclusions(kb, spec)
    compound = compound_concept(spec)
    chosen_incls = [t for t, bit in zip(relevant, chosen.selection.bits) if bit]

    # One compound inclusion per distinct predicate.  When both a head and a
    # modifier contribute the same predicate, the head's degree wins.
    by_predicate: Dict[Concept, TypicalityInclusion] = {}
    order: List[Concept] = []
    for t in chosen_incls:
        from_head = _same_concept(t.subject, spec.head, aliases)
        if t.predicate not in by_predicate:
            by_predicate[t.predicate] = t
            order.append(t.predicate)
        elif from_head:
            by_predicate[t.predicate] = t

    rigid = list(kb.rigid)
    if alias is not None:
        rigid.append(RigidInclusion(Atom(alias), compound))
        rigid.append(RigidInclusion(compound, Atom(alias)))
    typical = list(kb.typical)
    provenance: Dict[int, int] = {}
    for predicate in order:
        source = by_predicate[predicate]
        new = TypicalityInclusion(len(typical), source.degree, compound, predicate)
        typical.append(new)
        provenance[new.id] = source.id
    revised = KnowledgeBase.build(
        rigid, typical, kb.abox, extra_signature=kb.signature
    )
    return RevisedKB(revised, compound, alias, provenance)


def query_probability(
    revised: RevisedKB,
    assertion: ConceptAssertion,
    prior: Probability = DEFAULT_PRIOR,
) -> Probability:
    if not (0 < prior.value <= 1):
        raise ValueError(f"prior must be in (0,1], got {prior.value}")
    engine = RankEngine(revised.kb)
    if not engine.entails_assertion(assertion.individual, assertion.concept):
        return Probability(Fraction(0))
    rigid_engine = engine.rigid_engine
    degrees = [
        t.degree.value
        for t in revised.compound_inclusions()
        if t.predicate == assertion.concept
        or rigid_engine.subsumes(t.predicate, assertion.concept)
    ]
    # Entailed but justified by no compound inclusion (e.g. purely rigid
    # consequences): the typicality machinery contributes no uncertainty.
    q = max(degrees) if degrees else Fraction(1)
    return Probability(prior.value * q)


def categorization_score(
    revised: RevisedKB,
    candidate: Concept,
    individual: str,
    facts: Sequence[Tuple[ConceptAssertion, Probability]],
) -> Fraction:
    """Sum of query probabilities with candidate(individual) assumed."""
    assumed = RevisedKB(
        revised.kb.with_assertion(ConceptAssertion(candidate, individual)),
        revised.compound,
        revised.compound_alias,
        revised.provenance,
    )
    return sum(
        (query_probability(assumed, assertion, prior).value for assertion, prior in facts),
        Fraction(0),
    )


def iterate_combine(
    revised: RevisedKB,
    spec: CombinationSpec,
    parallel: Optional[int] = None,
) -> SelectionResult:
    return select_scenarios(revised.kb, spec, parallel=parallel)

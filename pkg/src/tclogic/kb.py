"""Knowledge-base model: rigid inclusions, degree-tagged typicality inclusions,
assertions, and the signature bookkeeping that validation relies on.

Everything here is immutable; derived KBs are built with the ``with_*`` helpers
or ``KnowledgeBase.build`` rather than by mutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from .concepts import Concept, concept_names, role_names

FRESH_PREFIX = "_fresh"


class DegreeError(ValueError):
    """Degree outside the open-closed interval (0.5, 1]."""


@dataclass(frozen=True)
class Degree:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))
        if not (Fraction(1, 2) < self.value <= 1):
            raise DegreeError(f"degree must be in (0.5,1], got {self.value}")


@dataclass(frozen=True)
class Probability:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))
        if not (0 <= self.value <= 1):
            raise ValueError(f"probability must be in [0,1], got {self.value}")


@dataclass(frozen=True)
class RigidInclusion:
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True)
class TypicalityInclusion:
    id: int
    degree: Degree
    subject: Concept
    predicate: Concept


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    subject: str
    object: str


Assertion = Union[ConceptAssertion, RoleAssertion]


@dataclass(frozen=True)
class Signature:
    concepts: frozenset
    roles: frozenset
    individuals: frozenset

    @staticmethod
    def empty() -> "Signature":
        return Signature(frozenset(), frozenset(), frozenset())

    def union(self, other: "Signature") -> "Signature":
        return Signature(
            self.concepts | other.concepts,
            self.roles | other.roles,
            self.individuals | other.individuals,
        )


def _statement_signature(rigid, typical, abox) -> Signature:
    concepts, roles, individuals = set(), set(), set()
    for r in rigid:
        concepts |= concept_names(r.lhs) | concept_names(r.rhs)
        roles |= role_names(r.lhs) | role_names(r.rhs)
    for t in typical:
        concepts |= concept_names(t.subject) | concept_names(t.predicate)
        roles |= role_names(t.subject) | role_names(t.predicate)
    for a in abox:
        if isinstance(a, ConceptAssertion):
            concepts |= concept_names(a.concept)
            roles |= role_names(a.concept)
            individuals.add(a.individual)
        else:
            roles.add(a.role)
            individuals.add(a.subject)
            individuals.add(a.object)
    return Signature(frozenset(concepts), frozenset(roles), frozenset(individuals))


@dataclass(frozen=True)
class KnowledgeBase:
    rigid: Tuple[RigidInclusion, ...]
    typical: Tuple[TypicalityInclusion, ...]
    abox: Tuple[Assertion, ...]
    signature: Signature

    @staticmethod
    def build(
        rigid: Iterable[RigidInclusion] = (),
        typical: Iterable[TypicalityInclusion] = (),
        abox: Iterable[Assertion] = (),
        extra_signature: Optional[Signature] = None,
    ) -> "KnowledgeBase":
        """Construct a KB with the signature derived from its statements."""
        rigid = tuple(rigid)
        typical = tuple(typical)
        abox = tuple(abox)
        sig = _statement_signature(rigid, typical, abox)
        if extra_signature is not None:
            sig = sig.union(extra_signature)
        return KnowledgeBase(rigid, typical, abox, sig)

    def with_assertion(self, assertion: Assertion) -> "KnowledgeBase":
        return KnowledgeBase.build(
            self.rigid, self.typical, self.abox + (assertion,),
            extra_signature=self.signature,
        )

    def with_typical(self, typical: Iterable[TypicalityInclusion]) -> "KnowledgeBase":
        return KnowledgeBase.build(
            self.rigid, tuple(typical), self.abox, extra_signature=self.signature
        )

    def individuals(self) -> Tuple[str, ...]:
        seen = []
        for a in self.abox:
            names = [a.individual] if isinstance(a, ConceptAssertion) else [a.subject, a.object]
            for n in names:
                if n not in seen:
                    seen.append(n)
        return tuple(seen)

    def concept_assertions_for(self, individual: str) -> Tuple[Concept, ...]:
        return tuple(
            a.concept
            for a in self.abox
            if isinstance(a, ConceptAssertion) and a.individual == individual
        )


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: Tuple[ValidationIssue, ...] = ()

    def __bool__(self) -> bool:
        return not self.issues


def validate(kb: KnowledgeBase) -> ValidationReport:
    """Structural validity: degree ranges, declared names, no duplicate statements."""
    issues = []
    half = Fraction(1, 2)
    for t in kb.typical:
        if not (half < t.degree.value <= 1):
            issues.append(ValidationIssue(
                "degree-range",
                f"inclusion {t.id}: degree {t.degree.value} outside (0.5,1]",
            ))
    sig = kb.signature
    derived = _statement_signature(kb.rigid, kb.typical, kb.abox)
    for name in sorted(derived.concepts - sig.concepts):
        issues.append(ValidationIssue("undeclared-name", f"concept name {name!r} not in signature"))
    for name in sorted(derived.roles - sig.roles):
        issues.append(ValidationIssue("undeclared-name", f"role name {name!r} not in signature"))
    for name in sorted(derived.individuals - sig.individuals):
        issues.append(ValidationIssue("undeclared-name", f"individual {name!r} not in signature"))
    seen_rigid = set()
    for r in kb.rigid:
        key = (r.lhs, r.rhs)
        if key in seen_rigid:
            issues.append(ValidationIssue("duplicate", f"duplicate rigid inclusion {r.lhs!r} <= {r.rhs!r}"))
        seen_rigid.add(key)
    seen_typical = set()
    for t in kb.typical:
        key = (t.degree.value, t.subject, t.predicate)
        if key in seen_typical:
            issues.append(ValidationIssue(
                "duplicate", f"duplicate typicality inclusion T({t.subject!r}) <= {t.predicate!r}"
            ))
        seen_typical.add(key)
    ids = [t.id for t in kb.typical]
    if len(ids) != len(set(ids)):
        issues.append(ValidationIssue("duplicate", "typicality inclusion ids are not unique"))
    return ValidationReport(tuple(issues))


def fresh_individual(kb: KnowledgeBase) -> str:
    """Smallest name in the reserved witness namespace not already in the KB."""
    taken = kb.signature.individuals
    i = 0
    while f"{FRESH_PREFIX}{i}" in taken:
        i += 1
    return f"{FRESH_PREFIX}{i}"


def merge_kbs(a: KnowledgeBase, b: KnowledgeBase) -> KnowledgeBase:
    """Union of two KBs, dropping statements of ``b`` already present in ``a``.

    Typicality inclusions are re-indexed in order (all of ``a`` first).
    """
    rigid = list(a.rigid)
    for r in b.rigid:
        if r not in rigid:
            rigid.append(r)
    typ_keys = {(t.degree.value, t.subject, t.predicate) for t in a.typical}
    typical = list(a.typical)
    for t in b.typical:
        key = (t.degree.value, t.subject, t.predicate)
        if key not in typ_keys:
            typ_keys.add(key)
            typical.append(t)
    typical = [
        TypicalityInclusion(i, t.degree, t.subject, t.predicate)
        for i, t in enumerate(typical)
    ]
    abox = list(a.abox)
    for x in b.abox:
        if x not in abox:
            abox.append(x)
    return KnowledgeBase.build(
        rigid, typical, abox, extra_signature=a.signature.union(b.signature)
    )

"""Classical ALC decision procedures: concept satisfiability w.r.t. a rigid
TBox, KB consistency, subsumption, and instance checking.

The procedure is a tableau with internalized general inclusions (every node
carries nnf(not C or D) for each rigid C <= D) and subset blocking on ancestor
chains.  Named individuals from the ABox are expanded jointly; existential
witnesses hang off them as independent trees, which is sound for ALC thanks to
the tree-model property.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Sequence, Set, Tuple

from .concepts import (
    And, Atom, BOT, Bottom, Concept, Exists, Forall, Not, Or, TOP, neg, nnf,
)
from .kb import (
    Assertion, ConceptAssertion, RigidInclusion, RoleAssertion,
)

_neg = lru_cache(maxsize=None)(neg)
_nnf = lru_cache(maxsize=None)(nnf)


class UnknownIndividualError(KeyError):
    pass


@dataclass(frozen=True)
class StrictKB:
    """A KB with the typicality part stripped: rigid inclusions plus ABox."""
    rigid: Tuple[RigidInclusion, ...] = ()
    abox: Tuple[Assertion, ...] = ()


def _clash(label: Set[Concept]) -> bool:
    if BOT in label:
        return True
    for c in label:
        if isinstance(c, Not) and c.arg in label:  # NNF: c.arg is an atom
            return True
    return False


def _close_under_and(label: Set[Concept]) -> None:
    stack = list(label)
    while stack:
        c = stack.pop()
        if isinstance(c, And):
            for part in (c.left, c.right):
                if part not in label:
                    label.add(part)
                    stack.append(part)


def _disjunct_choices(label: Set[Concept], c: Or) -> Tuple[Concept, ...]:
    # A disjunct whose syntactic complement is already present cannot help.
    left_dead = _neg(c.left) in label
    right_dead = _neg(c.right) in label
    if left_dead and right_dead:
        return (c.left,)  # doomed either way; keep one branch to fail on
    if left_dead:
        return (c.right,)
    if right_dead:
        return (c.left,)
    return (c.left, c.right)


class AlcEngine:
    """Satisfiability oracle for one rigid TBox, with a synchronized cache."""

    def __init__(self, rigid: Sequence[RigidInclusion]):
        self.tbox: FrozenSet[Concept] = frozenset(
            _nnf(Or(Not(r.lhs), r.rhs)) for r in rigid
        )
        self._cache: Dict[Concept, bool] = {}
        self._lock = threading.Lock()

    # -- public queries -------------------------------------------------

    def satisfiable(self, c: Concept) -> bool:
        c = _nnf(c)
        with self._lock:
            if c in self._cache:
                return self._cache[c]
        result = self._tree_sat(set(self.tbox) | {c}, ())
        with self._lock:
            self._cache[c] = result
        return result

    def subsumes(self, sub: Concept, sup: Concept) -> bool:
        return not self.satisfiable(And(sub, Not(sup)))

    def abox_consistent(self, abox: Sequence[Assertion]) -> bool:
        labels: Dict[str, Set[Concept]] = {}
        edges: Dict[Tuple[str, str], Set[str]] = {}

        def node(name: str) -> Set[Concept]:
            if name not in labels:
                labels[name] = set(self.tbox)
            return labels[name]

        for a in abox:
            if isinstance(a, ConceptAssertion):
                node(a.individual).add(_nnf(a.concept))
            else:
                node(a.subject)
                node(a.object)
                edges.setdefault((a.subject, a.role), set()).add(a.object)
        if not labels:
            return True
        return self._core_sat(labels, edges)

    def instance_of(self, abox: Sequence[Assertion], individual: str, c: Concept) -> bool:
        known = set()
        for a in abox:
            if isinstance(a, ConceptAssertion):
                known.add(a.individual)
            else:
                known.update((a.subject, a.object))
        if individual not in known:
            raise UnknownIndividualError(individual)
        extended = tuple(abox) + (ConceptAssertion(_neg(c), individual),)
        return not self.abox_consistent(extended)

    # -- tableau core (named individuals, arbitrary role graph) ---------

    def _core_sat(self, labels: Dict[str, Set[Concept]], edges) -> bool:
        changed = True
        while changed:
            changed = False
            for label in labels.values():
                before = len(label)
                _close_under_and(label)
                changed = changed or len(label) != before
            for (x, role), ys in edges.items():
                for c in list(labels[x]):
                    if isinstance(c, Forall) and c.role == role:
                        for y in ys:
                            if c.filler not in labels[y]:
                                labels[y].add(c.filler)
                                changed = True
        for label in labels.values():
            if _clash(label):
                return False
        for x, label in labels.items():
            for c in label:
                if isinstance(c, Or) and c.left not in label and c.right not in label:
                    for choice in _disjunct_choices(label, c):
                        branched = {k: set(v) for k, v in labels.items()}
                        branched[x].add(choice)
                        if self._core_sat(branched, edges):
                            return True
                    return False
        # fully expanded and clash-free: discharge existentials as trees
        for x, label in labels.items():
            for c in label:
                if isinstance(c, Exists):
                    ys = edges.get((x, c.role), ())
                    if any(c.filler in labels[y] for y in ys):
                        continue
                    child = {c.filler} | set(self.tbox)
                    child |= {
                        d.filler for d in label
                        if isinstance(d, Forall) and d.role == c.role
                    }
                    if not self._tree_sat(child, (frozenset(label),)):
                        return False
        return True

    # -- tableau on anonymous tree nodes --------------------------------

    def _tree_sat(self, label: Set[Concept], ancestors: Tuple[FrozenSet[Concept], ...]) -> bool:
        label = set(label)
        _close_under_and(label)
        if _clash(label):
            return False
        for c in label:
            if isinstance(c, Or) and c.left not in label and c.right not in label:
                return any(
                    self._tree_sat(label | {choice}, ancestors)
                    for choice in _disjunct_choices(label, c)
                )
        if any(label <= ancestor for ancestor in ancestors):
            return True  # blocked: fold back onto the ancestor
        frozen = frozenset(label)
        for c in label:
            if isinstance(c, Exists):
                child = {c.filler} | set(self.tbox)
                child |= {
                    d.filler for d in label
                    if isinstance(d, Forall) and d.role == c.role
                }
                if not self._tree_sat(child, ancestors + (frozen,)):
                    return False
        return True


# -- spec-level convenience wrappers -----------------------------------

def concept_satisfiable(kb: StrictKB, c: Concept) -> bool:
    engine = AlcEngine(kb.rigid)
    if kb.abox and not engine.abox_consistent(kb.abox):
        return False
    return engine.satisfiable(c)


def subsumes(kb: StrictKB, sub: Concept, sup: Concept) -> bool:
    return AlcEngine(kb.rigid).subsumes(sub, sup)


def kb_consistent(kb: StrictKB) -> bool:
    return AlcEngine(kb.rigid).abox_consistent(kb.abox)


def instance_of(kb: StrictKB, individual: str, c: Concept) -> bool:
    return AlcEngine(kb.rigid).instance_of(kb.abox, individual, c)

"""Independent brute-force oracle for defeasible entailment at desk scale.

For a role-free KB over at most three atoms, every interpretation is (up to
bisimulation) a set of propositional valuations with a rank each, where a
valuation may also be absent from the domain.  We enumerate *all* rank
assignments over the rigidly-consistent valuations, keep the ones that satisfy
every typicality inclusion (no minimal subject-valuation violates the
predicate), and take the pointwise minimum — valid assignments are closed
under pointwise min, so that minimum is itself valid and is the unique
rank-minimal model over the full valuation set.  Queries are answered in it.

This is deliberately nothing like the stratification algorithm in
``rational``; the two are checked against each other in the test suite.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, List, Tuple

import numpy as np

from .concepts import (
    And, Atom, Bottom, Concept, Not, Or, Top, concept_names, is_role_free,
)
from .kb import KnowledgeBase


class OraclePreconditionError(ValueError):
    pass


def _eval(c: Concept, world: Dict[str, bool]) -> bool:
    if isinstance(c, Top):
        return True
    if isinstance(c, Bottom):
        return False
    if isinstance(c, Atom):
        return world[c.name]
    if isinstance(c, Not):
        return not _eval(c.arg, world)
    if isinstance(c, And):
        return _eval(c.left, world) and _eval(c.right, world)
    if isinstance(c, Or):
        return _eval(c.left, world) or _eval(c.right, world)
    raise OraclePreconditionError(f"oracle is propositional; got {c!r}")


class RankedWorldOracle:
    def __init__(self, kb: KnowledgeBase, atoms: Tuple[str, ...] = ()):
        """``atoms`` may widen the valuation universe beyond the KB's own
        names so that queries about unconstrained atoms are meaningful."""
        if kb.abox:
            raise OraclePreconditionError("oracle handles KBs without individuals")
        names = set(atoms)
        for r in kb.rigid:
            names |= concept_names(r.lhs) | concept_names(r.rhs)
            if not (is_role_free(r.lhs) and is_role_free(r.rhs)):
                raise OraclePreconditionError("oracle handles role-free KBs")
        for t in kb.typical:
            names |= concept_names(t.subject) | concept_names(t.predicate)
            if not (is_role_free(t.subject) and is_role_free(t.predicate)):
                raise OraclePreconditionError("oracle handles role-free KBs")
        if len(names) > 3:
            raise OraclePreconditionError("oracle handles at most 3 atoms")
        self.atoms = sorted(names)
        worlds = [
            dict(zip(self.atoms, bits))
            for bits in product([False, True], repeat=len(self.atoms))
        ]
        self.worlds = [
            w for w in worlds
            if all(not _eval(r.lhs, w) or _eval(r.rhs, w) for r in kb.rigid)
        ]
        self.absent = len(kb.typical) + 1
        self.canonical = self._canonical_ranks(kb)

    def _mask(self, c: Concept) -> np.ndarray:
        return np.array([_eval(c, w) for w in self.worlds], dtype=bool)

    def _canonical_ranks(self, kb: KnowledgeBase) -> np.ndarray:
        n_worlds = len(self.worlds)
        if n_worlds == 0:
            return np.zeros(0, dtype=np.int8)
        values = np.arange(self.absent + 1, dtype=np.int8)
        grids = np.meshgrid(*([values] * n_worlds), indexing="ij")
        assignments = np.stack([g.ravel() for g in grids], axis=1)
        valid = np.ones(len(assignments), dtype=bool)
        for t in kb.typical:
            subject = self._mask(t.subject)
            if not subject.any():
                continue
            failing = subject & ~self._mask(t.predicate)
            min_subject = assignments[:, subject].min(axis=1)
            if failing.any():
                hits_min = (assignments[:, failing] == min_subject[:, None]).any(axis=1)
                valid &= ~(hits_min & (min_subject != self.absent))
        # The all-absent assignment is always valid, so this is never empty.
        return assignments[valid].min(axis=0)

    def entails_typicality(self, subject: Concept, predicate: Concept) -> bool:
        mask = self._mask(subject)
        ranks = self.canonical[mask]
        present = ranks != self.absent
        if not present.any():
            return True  # no typical subjects exist; vacuously entailed
        min_rank = ranks[present].min()
        pred = self._mask(predicate)
        minimal = mask & (self.canonical == min_rank)
        return bool(pred[minimal].all())


def oracle_rc(kb: KnowledgeBase, subject: Concept, predicate: Concept) -> bool:
    return RankedWorldOracle(kb).entails_typicality(subject, predicate)

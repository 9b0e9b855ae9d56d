"""Shared corpus loaders and random-input strategies for the test suite."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from tclogic.concepts import And, Atom, Exists, Forall, Not, Or
from tclogic.kb import (
    ConceptAssertion, Degree, KnowledgeBase, RigidInclusion, RoleAssertion,
    TypicalityInclusion,
)
from tclogic.text import parse_kb

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# One line per acceptance criterion, echoed after the run so the verdicts are
# visible even when pytest captures test output.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


@pytest.fixture(scope="session")
def corpus_kbs():
    return {
        path.name: parse_kb(path.read_text())
        for path in sorted(CORPUS.glob("*.tcl"))
    }


def load_corpus(name: str) -> KnowledgeBase:
    return parse_kb((CORPUS / name).read_text())


ATOMS = ["A", "B", "C", "D"]
ROLES = ["r", "s"]
INDIVIDUALS = ["alice", "bob"]

atom_names = st.sampled_from(ATOMS)
role_free_atom = st.sampled_from(ATOMS[:3])

degrees = st.integers(min_value=51, max_value=100).map(
    lambda n: Degree(Fraction(n, 100))
)


def _compound(children):
    binary = st.tuples(children, children)
    return st.one_of(
        children.map(Not),
        binary.map(lambda p: And(*p)),
        binary.map(lambda p: Or(*p)),
        st.tuples(st.sampled_from(ROLES), children).map(lambda p: Exists(*p)),
        st.tuples(st.sampled_from(ROLES), children).map(lambda p: Forall(*p)),
    )


concepts = st.recursive(atom_names.map(Atom), _compound, max_leaves=6)

role_free_concepts = st.recursive(
    role_free_atom.map(Atom),
    lambda children: st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda p: And(*p)),
        st.tuples(children, children).map(lambda p: Or(*p)),
    ),
    max_leaves=5,
)


@st.composite
def knowledge_bases(draw):
    """Random KBs over a small vocabulary, with roles and individuals."""
    rigid = []
    for _ in range(draw(st.integers(0, 3))):
        r = RigidInclusion(draw(concepts), draw(concepts))
        if r not in rigid:
            rigid.append(r)
    typical = []
    seen = set()
    for _ in range(draw(st.integers(0, 4))):
        degree, subject, predicate = draw(degrees), draw(concepts), draw(concepts)
        key = (degree.value, subject, predicate)
        if key not in seen:
            seen.add(key)
            typical.append(TypicalityInclusion(len(typical), degree, subject, predicate))
    abox = []
    for _ in range(draw(st.integers(0, 2))):
        abox.append(ConceptAssertion(draw(concepts), draw(st.sampled_from(INDIVIDUALS))))
    if draw(st.booleans()):
        abox.append(RoleAssertion(draw(st.sampled_from(ROLES)), "alice", "bob"))
    return KnowledgeBase.build(rigid, typical, abox)


@st.composite
def role_free_kbs(draw):
    """Random role-free KBs small enough for the ranked-world oracle."""
    rigid = [
        RigidInclusion(draw(role_free_concepts), draw(role_free_concepts))
        for _ in range(draw(st.integers(0, 2)))
    ]
    typical = [
        TypicalityInclusion(
            i, draw(degrees), draw(role_free_concepts), draw(role_free_concepts)
        )
        for i in range(draw(st.integers(1, 4)))
    ]
    return KnowledgeBase.build(rigid, typical, [])

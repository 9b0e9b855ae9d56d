"""Defeasible entailment: stratification, concept ranks, ABox queries, and
agreement with the independent ranked-world oracle on random inputs."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tclogic.concepts import And, Atom, Not, TOP
from tclogic.kb import Degree, KnowledgeBase, RigidInclusion, TypicalityInclusion
from tclogic.oracle import RankedWorldOracle
from tclogic.rational import (
    Finite, INFINITE, RankEngine, compute_ranks, concept_rank,
    rc_entails_assertion, rc_entails_typicality, tcl_consistent,
)
from tclogic.text import parse_concept, parse_kb

from conftest import load_corpus, role_free_kbs


@pytest.fixture(scope="module")
def athletes():
    return load_corpus("athlete.tcl")


class TestStratification:
    def test_exception_chain_shrinks_to_empty(self, athletes):
        table = compute_ranks(athletes)
        assert [len(s) for s in table.strata] == [3, 1, 0]
        assert table.fixpoint == ()

    def test_ranks_reflect_exceptionality(self, athletes):
        assert concept_rank(athletes, Atom("Athlete")) == Finite(0)
        assert concept_rank(athletes, Atom("SumoWrestler")) == Finite(1)

    def test_unsatisfiable_concept_has_infinite_rank(self):
        kb = parse_kb("A <= bot\n0.8 :: T(A) <= B")
        assert concept_rank(kb, Atom("A")) == INFINITE

    def test_exceptionless_typicality_strictified(self):
        # With no way to be an exception, the inclusion behaves rigidly:
        # its subject still gets a finite rank and the predicate follows.
        kb = parse_kb("0.8 :: T(A) <= B\nA <= B")
        assert concept_rank(kb, Atom("A")) == Finite(0)
        assert rc_entails_typicality(kb, Atom("A"), Atom("B"))


class TestDefeasibleEntailment:
    def test_specificity_prefers_subclass_exception(self, athletes):
        assert rc_entails_typicality(
            athletes, Atom("SumoWrestler"), Not(Atom("Fit"))
        )
        assert not rc_entails_typicality(athletes, Atom("SumoWrestler"), Atom("Fit"))

    def test_irrelevant_conjunct_preserves_entailment(self, athletes):
        assert rc_entails_typicality(
            athletes, And(Atom("Athlete"), Atom("Bald")), Atom("Fit")
        )

    def test_base_class_keeps_its_typical_property(self, athletes):
        assert rc_entails_typicality(athletes, Atom("Athlete"), Atom("Fit"))

    def test_strict_consequences_are_entailed(self, athletes):
        assert rc_entails_typicality(athletes, Atom("SumoWrestler"), Atom("Athlete"))
        assert rc_entails_typicality(athletes, Atom("SumoWrestler"), Atom("HumanBeing"))

    def test_abox_members_inherit_typical_properties(self, athletes):
        assert rc_entails_assertion(athletes, "roberto", Atom("Fit"))
        assert rc_entails_assertion(athletes, "hiroyuki", Not(Atom("Fit")))
        assert not rc_entails_assertion(athletes, "roberto", Not(Atom("Fit")))

    def test_infinite_rank_subject_entails_vacuously(self):
        kb = parse_kb("A <= bot\n0.8 :: T(A) <= B\n0.9 :: T(C) <= D")
        assert rc_entails_typicality(kb, Atom("A"), Atom("B"))
        assert rc_entails_typicality(kb, Atom("A"), Not(Atom("B")))


class TestConsistency:
    def test_corpus_kbs_consistent(self, corpus_kbs):
        for name, kb in corpus_kbs.items():
            assert tcl_consistent(kb), name

    def test_individual_with_impossible_concept(self):
        kb = parse_kb("A and B <= bot\nA(x)\nB(x)")
        assert not tcl_consistent(kb)

    def test_individual_with_infinite_rank_membership(self):
        # x's asserted concept is exceptional at every level, so no ranked
        # model accommodates it even though the strict part is satisfiable.
        kb = parse_kb("0.8 :: T(A) <= not A\nA(x)")
        engine = RankEngine(kb)
        assert engine.rigid_engine.abox_consistent(kb.abox)
        assert engine.concept_rank(Atom("A")) == INFINITE
        assert not tcl_consistent(kb)

    def test_atypical_member_is_allowed(self):
        kb = parse_kb("0.8 :: T(A) <= B\nA(x)\n(not B)(x)")
        assert tcl_consistent(kb)


class TestRankProperties:
    @settings(max_examples=60, deadline=None)
    @given(role_free_kbs())
    def test_rank_monotone_under_conjunction(self, kb):
        # Strengthening a concept can only raise (or preserve) its rank.
        engine = RankEngine(kb)
        a, b = Atom("A"), Atom("B")
        assert engine.concept_rank(And(a, b)) >= engine.concept_rank(a)

    @settings(max_examples=60, deadline=None)
    @given(role_free_kbs())
    def test_top_has_minimal_rank(self, kb):
        engine = RankEngine(kb)
        rank = engine.concept_rank(TOP)
        assert rank == Finite(0) or rank == INFINITE


LITERALS = [Atom(n) for n in "ABC"] + [Not(Atom(n)) for n in "ABC"]


class TestOracleAgreement:
    @settings(max_examples=200, deadline=None)
    @given(role_free_kbs(), st.sampled_from(LITERALS), st.sampled_from(LITERALS))
    def test_matches_ranked_world_oracle(self, kb, subject, predicate):
        oracle = RankedWorldOracle(kb, atoms=("A", "B", "C"))
        expected = oracle.entails_typicality(subject, predicate)
        assert rc_entails_typicality(kb, subject, predicate) == expected

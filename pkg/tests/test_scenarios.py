"""Scenario enumeration and selection: exact probabilities, canonical order,
status assignment, and the documented combination results on the corpus."""

from fractions import Fraction

import pytest

from tclogic.concepts import And, Atom
from tclogic.kb import Degree
from tclogic.rational import RankEngine
from tclogic.scenarios import (
    CombinationSpec, STATUS_DOMINATED, STATUS_INCONSISTENT,
    STATUS_MODIFIER_PREFERRED, STATUS_SELECTED, STATUS_TRIVIAL,
    SizeLimitError, compound_concept, concept_aliases, enumerate_scenarios,
    relevant_inclusions, select_scenarios, selection_probability,
)
from tclogic.text import parse_concept, parse_kb

from conftest import load_corpus


def spec(head, *modifiers, **kwargs):
    return CombinationSpec(
        parse_concept(head), tuple(parse_concept(m) for m in modifiers), **kwargs
    )


def bit_strings(records):
    return [r.selection.bit_string() for r in records]


def by_bits(result, bits):
    return next(r for r in result.all if r.selection.bit_string() == bits)


class TestSelectionProbability:
    def test_two_kept_one_dropped(self):
        degrees = [Degree("0.8"), Degree("0.8"), Degree("0.95")]
        p = selection_probability(degrees, (1, 0, 1))
        assert p.value == Fraction("0.152")

    def test_all_kept(self):
        p = selection_probability(
            [Fraction("0.3"), Fraction("0.6"), Fraction("0.9")], (1, 1, 1)
        )
        assert p.value == Fraction("0.162")

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            selection_probability([Degree("0.8")], (1, 0))


class TestEnumeration:
    def test_counts_and_probability_sum(self, corpus_kbs):
        cases = {
            "petfish1.tcl": spec("Fish", "Pet"),
            "stone_lion.tcl": spec("Stone", "Lion"),
            "hero_villain.tcl": spec("Villain", "Hero"),
            "villain_chair.tcl": spec("Villain", "Chair"),
            "chimera.tcl": spec("Lion", "Goat", "Dragon"),
            "linda.tcl": spec("Feminist", "BankTeller"),
            "antihero_chimera.tcl": spec("Chimera", "AntiHero"),
        }
        for name, s in cases.items():
            kb = corpus_kbs[name]
            records = enumerate_scenarios(kb, s)
            n = len(relevant_inclusions(kb, s))
            assert len(records) == 2 ** n, name
            assert sum(r.selection.probability.value for r in records) == 1, name

    def test_canonical_order_probability_then_bits(self):
        kb = parse_kb("0.8 :: T(A) <= P\n0.8 :: T(B) <= Q")
        records = enumerate_scenarios(kb, spec("A", "B"))
        assert bit_strings(records) == ["11", "10", "01", "00"]
        # middle block: equal probabilities, higher bit value first
        assert records[1].block == records[2].block == 1
        assert records[0].block == 0 and records[3].block == 2

    def test_blocks_group_equal_probabilities(self, corpus_kbs):
        records = enumerate_scenarios(corpus_kbs["stone_lion.tcl"], spec("Stone", "Lion"))
        probabilities = {}
        for r in records:
            probabilities.setdefault(r.block, set()).add(r.selection.probability.value)
        assert all(len(values) == 1 for values in probabilities.values())
        assert sorted(probabilities) == list(range(len(probabilities)))

    def test_scenario_kb_rewrites_kept_inclusions_onto_compound(self, corpus_kbs):
        kb = corpus_kbs["stone_lion.tcl"]
        s = spec("Stone", "Lion")
        record = by_bits_enumerated(kb, s, "10001")
        compound = compound_concept(s)
        compound_subjects = [t for t in record.kb.typical if t.subject == compound]
        assert len(compound_subjects) == 2
        assert {t.degree.value for t in compound_subjects} == {
            Fraction("0.9"), Fraction("0.7")
        }
        assert all(t.subject != Atom("Stone") for t in record.kb.typical)

    def test_size_guard(self):
        lines = [f"0.8 :: T(A) <= P{i}" for i in range(5)]
        kb = parse_kb("\n".join(lines))
        with pytest.raises(SizeLimitError):
            enumerate_scenarios(kb, spec("A", "B", max_inclusions=4))


def by_bits_enumerated(kb, s, bits):
    return next(
        r for r in enumerate_scenarios(kb, s) if r.selection.bit_string() == bits
    )


@pytest.fixture(scope="module")
def petfish_result():
    return select_scenarios(load_corpus("petfish1.tcl"), spec("Fish", "Pet"))


class TestPetFish:

    def test_all_in_scenario_probability_and_status(self, petfish_result):
        record = by_bits(petfish_result, "1111111")
        assert record.selection.probability.value == Fraction("0.1990656")
        assert record.status == STATUS_INCONSISTENT

    def test_consistent_scenario_count(self, petfish_result):
        inconsistent = sum(1 for r in petfish_result.all if r.status == STATUS_INCONSISTENT)
        assert len(petfish_result.all) == 128
        assert len(petfish_result.all) - inconsistent == 36

    def test_unique_survivor(self, petfish_result):
        assert bit_strings(petfish_result.selected) == ["1011000"]
        assert petfish_result.selected[0].selection.probability.value == Fraction("0.0009216")

    def test_second_degree_assignment(self):
        petfish_result = select_scenarios(load_corpus("petfish2.tcl"), spec("Fish", "Pet"))
        all_in = by_bits(petfish_result, "1111111")
        assert all_in.selection.probability.value == Fraction("0.3545856")
        block = [
            r for r in petfish_result.all
            if r.selection.probability.value == Fraction("0.0001296")
        ]
        assert "1011000" in bit_strings(block)
        assert {r.selection.bit_string() for r in petfish_result.selected} <= {
            b for b in bit_strings(block)
        }


@pytest.fixture(scope="module")
def stone_lion_result():
    return select_scenarios(load_corpus("stone_lion.tcl"), spec("Stone", "Lion"))


class TestStoneLion:

    def test_thirty_two_scenarios(self, stone_lion_result):
        assert len(stone_lion_result.all) == 32

    def test_high_block_fully_discarded(self, stone_lion_result):
        block = [
            r for r in stone_lion_result.all
            if r.selection.probability.value == Fraction("0.07056")
        ]
        assert sorted(r.status for r in block) == [
            STATUS_MODIFIER_PREFERRED, STATUS_TRIVIAL
        ]

    def test_unique_survivor(self, stone_lion_result):
        assert bit_strings(stone_lion_result.selected) == ["11001"]
        assert stone_lion_result.selected[0].selection.probability.value == Fraction("0.03024")


@pytest.fixture(scope="module")
def hero_villain_result():
    return select_scenarios(load_corpus("hero_villain.tcl"), spec("Villain", "Hero"))


class TestHeroVillain:

    def test_trivial_scenario_discarded(self, hero_villain_result):
        record = by_bits(hero_villain_result, "1000111")
        assert record.selection.probability.value == Fraction("0.002565")
        assert record.status == STATUS_TRIVIAL

    def test_modifier_preferring_scenario_discarded(self, hero_villain_result):
        record = by_bits(hero_villain_result, "1001011")
        assert record.selection.probability.value == Fraction("0.0012825")
        assert record.status == STATUS_MODIFIER_PREFERRED

    def test_two_survivors_in_one_block(self, hero_villain_result):
        assert set(bit_strings(hero_villain_result.selected)) == {"1000110", "1000011"}
        assert all(
            r.selection.probability.value == Fraction("0.000855")
            for r in hero_villain_result.selected
        )
        assert len({r.block for r in hero_villain_result.selected}) == 1


@pytest.fixture(scope="module")
def chimera_result():
    return select_scenarios(load_corpus("chimera.tcl"), spec("Lion", "Goat", "Dragon"))


class TestChimera:

    def test_trivial_scenario_discarded(self, chimera_result):
        block = [
            r for r in chimera_result.all
            if r.selection.probability.value == Fraction("0.059521392")
        ]
        assert any(r.status == STATUS_TRIVIAL for r in block)

    def test_survivor_excludes_both_color_inclusions(self, chimera_result):
        assert bit_strings(chimera_result.selected) == ["0110111111"]
        assert chimera_result.selected[0].selection.probability.value == Fraction("0.025509168")
        # dropped bits are exactly the two coat-color inclusions
        kb = load_corpus("chimera.tcl")
        relevant = relevant_inclusions(kb, spec("Lion", "Goat", "Dragon"))
        dropped = [
            relevant[i].predicate
            for i, bit in enumerate(chimera_result.selected[0].selection.bits)
            if not bit
        ]
        assert dropped == [Atom("MainColorYellowish"), Atom("MainColorWhitish")]


class TestVillainChair:
    def test_survivor_block_drops_one_head_inclusion(self):
        result = select_scenarios(load_corpus("villain_chair.tcl"), spec("Villain", "Chair"))
        assert set(bit_strings(result.selected)) == {"110101111", "101101111"}
        assert all(
            r.selection.probability.value == Fraction("0.00233415")
            for r in result.selected
        )

    def test_exactly_k_constraint(self):
        result = select_scenarios(
            load_corpus("villain_chair.tcl"),
            spec("Villain", "Chair", exactly_k=6),
        )
        assert all(sum(r.selection.bits) == 6 for r in result.all)
        assert set(bit_strings(result.selected)) == {"110101011", "101101011"}
        assert all(
            r.selection.probability.value == Fraction("0.00125685")
            for r in result.selected
        )

    def test_exactly_k_reindexes_blocks(self):
        result = select_scenarios(
            load_corpus("villain_chair.tcl"), spec("Villain", "Chair", exactly_k=6)
        )
        blocks = sorted({r.block for r in result.all})
        assert blocks == list(range(len(blocks)))


class TestIteratedCombination:
    def test_chimera_head(self):
        result = select_scenarios(
            load_corpus("antihero_chimera.tcl"), spec("Chimera", "AntiHero")
        )
        trivial = by_bits(result, "1111111101")
        assert trivial.status == STATUS_TRIVIAL
        assert trivial.selection.probability.value == Fraction("0.071803584")
        assert set(bit_strings(result.selected)) == {"1111101111", "1011111111"}
        assert all(
            r.selection.probability.value == Fraction("0.053852688")
            for r in result.selected
        )

    def test_antihero_head(self):
        result = select_scenarios(
            load_corpus("antihero_chimera.tcl"), spec("AntiHero", "Chimera")
        )
        assert bit_strings(result.selected) == ["1111111101"]
        assert result.selected[0].selection.probability.value == Fraction("0.071803584")


class TestAliases:
    def test_mutual_rigid_inclusions_define_alias(self):
        kb = parse_kb(
            "X <= A and B\nA and B <= X\n0.8 :: T(A) <= P\n0.9 :: T(B) <= Q"
        )
        aliases = concept_aliases(kb)
        assert aliases[Atom("X")] == And(Atom("A"), Atom("B"))

    def test_alias_subject_counts_as_relevant(self):
        kb = parse_kb(
            "X <= A and B\nA and B <= X\n0.8 :: T(X) <= P\n0.9 :: T(C) <= Q"
        )
        relevant = relevant_inclusions(kb, spec("A and B", "C"))
        assert [t.predicate for t in relevant] == [Atom("P"), Atom("Q")]


class TestSelectionMechanics:
    def test_anti_monotone_consistency(self):
        # Exhaustively confirm the pruning assumption: every subset of a
        # consistent selection is itself consistent.
        kb = load_corpus("stone_lion.tcl")
        result = select_scenarios(kb, spec("Stone", "Lion"))
        consistent = {
            r.selection.bits: r.status != STATUS_INCONSISTENT for r in result.all
        }
        for bits, ok in consistent.items():
            if not ok:
                continue
            for other, other_ok in consistent.items():
                if all(b >= o for b, o in zip(bits, other)):
                    assert other_ok, (bits, other)

    def test_supersets_of_inconsistent_are_inconsistent(self):
        result = select_scenarios(load_corpus("stone_lion.tcl"), spec("Stone", "Lion"))
        inconsistent = [
            r.selection.bits for r in result.all if r.status == STATUS_INCONSISTENT
        ]
        consistent = [
            r.selection.bits for r in result.all if r.status != STATUS_INCONSISTENT
        ]
        for bad in inconsistent:
            for good in consistent:
                assert not all(g >= b for g, b in zip(good, bad)), (good, bad)

    @pytest.mark.parametrize("name,combination", [
        ("stone_lion.tcl", ("Stone", "Lion")),
        ("hero_villain.tcl", ("Villain", "Hero")),
        ("linda.tcl", ("Feminist", "BankTeller")),
    ])
    def test_parallel_and_serial_agree(self, name, combination):
        kb = load_corpus(name)
        s = spec(*combination)
        serial = select_scenarios(kb, s)
        parallel = select_scenarios(kb, s, parallel=4)
        assert [
            (r.selection.bits, r.status, r.block) for r in serial.all
        ] == [(r.selection.bits, r.status, r.block) for r in parallel.all]
        assert bit_strings(serial.selected) == bit_strings(parallel.selected)

    def test_selected_block_is_first_with_survivors(self, corpus_kbs):
        result = select_scenarios(corpus_kbs["linda.tcl"], spec("Feminist", "BankTeller"))
        selected_block = result.selected[0].block
        for r in result.all:
            if r.block < selected_block:
                assert r.status in (
                    STATUS_INCONSISTENT, STATUS_TRIVIAL, STATUS_MODIFIER_PREFERRED
                )
            if r.block > selected_block and r.status not in (
                STATUS_INCONSISTENT, STATUS_TRIVIAL, STATUS_MODIFIER_PREFERRED
            ):
                assert r.status == STATUS_DOMINATED

    def test_diagnostics_count_statuses(self):
        result = select_scenarios(load_corpus("stone_lion.tcl"), spec("Stone", "Lion"))
        assert sum(result.diagnostics.values()) == 32
        assert result.diagnostics[STATUS_SELECTED] == len(result.selected)

    def test_head_must_differ_from_modifiers(self):
        with pytest.raises(ValueError):
            spec("A", "A")

    def test_at_least_one_modifier_required(self):
        with pytest.raises(ValueError):
            CombinationSpec(Atom("A"), ())

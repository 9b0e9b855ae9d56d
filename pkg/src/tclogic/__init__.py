"""tclogic: reasoning engine and workbench for probability-weighted
typicality-based concept combination in the description logic ALC."""

from .concepts import (
    And, Atom, BOT, Bottom, Concept, Exists, Forall, Not, Or, TOP, Top,
    conj, disj, neg, nnf,
)
from .kb import (
    ConceptAssertion, Degree, DegreeError, KnowledgeBase, Probability,
    RigidInclusion, RoleAssertion, TypicalityInclusion, ValidationReport,
    fresh_individual, merge_kbs, validate,
)
from .text import (
    ParseError, parse_concept, parse_concept_assertion, parse_kb,
    parse_typicality_query, serialize_kb,
)
from .alc import (
    AlcEngine, StrictKB, concept_satisfiable, instance_of, kb_consistent,
    subsumes,
)
from .rational import (
    Finite, INFINITE, Infinite, Rank, RankEngine, RankTable, compute_ranks,
    concept_rank, rc_entails_assertion, rc_entails_typicality, tcl_consistent,
)
from .oracle import RankedWorldOracle, oracle_rc
from .scenarios import (
    CombinationSpec, ScenarioRecord, Selection, SelectionResult,
    SizeLimitError, enumerate_scenarios, is_trivial, conflict_head_modifier,
    relevant_inclusions, scenario_consistent, select_scenarios,
    selection_probability,
)
from .revision import (
    RevisedKB, build_revised_kb, categorization_score, iterate_combine,
    query_probability,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Scenario enumeration and selection for concept combination.

A combination names one HEAD concept and one or more MODIFIERs.  Every
typicality inclusion whose subject is the head or a modifier is either kept or
dropped, giving 2^n selections, each weighted by the exact product of degrees.
Selections are filtered by consistency, triviality (inheriting every
consistently-ascribable head property), and head preference (a kept modifier
property clashing with a dropped head property), block by block in descending
probability, exactly as the combination procedure prescribes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .concepts import And, Atom, Concept, concept_names, conj, role_names
from .kb import (
    ConceptAssertion, Degree, KnowledgeBase, Probability, RigidInclusion,
    RoleAssertion, TypicalityInclusion, fresh_individual,
)
from .rational import RankEngine

STATUS_PENDING = "pending"
STATUS_INCONSISTENT = "inconsistent"
STATUS_TRIVIAL = "trivial"
STATUS_MODIFIER_PREFERRED = "modifier_preferred"
STATUS_DOMINATED = "dominated"
STATUS_SELECTED = "selected"


class SizeLimitError(ValueError):
    def __init__(self, n: int, limit: int):
        super().__init__(
            f"{n} head/modifier inclusions exceed the scenario limit of {limit} "
            f"(2^{n} scenarios)"
        )
        self.n = n
        self.limit = limit


@dataclass(frozen=True)
class CombinationSpec:
    head: Concept
    modifiers: Tuple[Concept, ...]
    exactly_k: Optional[int] = None
    max_inclusions: int = 20

    def __post_init__(self):
        object.__setattr__(self, "modifiers", tuple(self.modifiers))
        if not self.modifiers:
            raise ValueError("at least one modifier is required")
        if self.head in self.modifiers:
            raise ValueError("head must not also be a modifier")


@dataclass(frozen=True)
class Selection:
    bits: Tuple[int, ...]
    probability: Probability

    def as_int(self) -> int:
        return int("".join(map(str, self.bits)), 2) if self.bits else 0

    def bit_string(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class ScenarioRecord:
    selection: Selection
    kb: KnowledgeBase
    status: str
    block: int


@dataclass(frozen=True)
class SelectionResult:
    all: Tuple[ScenarioRecord, ...]
    selected: Tuple[ScenarioRecord, ...]
    diagnostics: Dict[str, int] = field(default_factory=dict)


def selection_probability(degrees: Sequence, bits: Sequence[int]) -> Probability:
    """Exact product of kept degrees and dropped complements."""
    if len(degrees) != len(bits):
        raise ValueError("degrees and bits must have equal length")
    p = Fraction(1)
    for degree, bit in zip(degrees, bits):
        q = degree.value if isinstance(degree, Degree) else Fraction(degree)
        p *= q if bit else 1 - q
    return Probability(p)


def concept_aliases(kb: KnowledgeBase) -> Dict[Concept, Concept]:
    """Atoms defined as mutually included with some other concept.

    Revision can name a compound with a fresh atom tied to the conjunction by
    a pair of rigid inclusions; combination specs may then use either form.
    """
    pairs = {(r.lhs, r.rhs) for r in kb.rigid}
    aliases: Dict[Concept, Concept] = {}
    for lhs, rhs in pairs:
        if isinstance(lhs, Atom) and lhs != rhs and (rhs, lhs) in pairs:
            aliases[lhs] = rhs
    return aliases


def _same_concept(a: Concept, b: Concept, aliases: Dict[Concept, Concept]) -> bool:
    if a == b:
        return True
    ea = aliases.get(a, a)
    eb = aliases.get(b, b)
    return ea == b or a == eb or ea == eb


def relevant_inclusions(kb: KnowledgeBase, spec: CombinationSpec) -> Tuple[TypicalityInclusion, ...]:
    aliases = concept_aliases(kb)
    targets = (spec.head,) + spec.modifiers
    return tuple(
        t for t in kb.typical
        if any(_same_concept(t.subject, target, aliases) for target in targets)
    )


def compound_concept(spec: CombinationSpec) -> Concept:
    return conj((spec.head,) + spec.modifiers)


def _concept_tokens(c: Concept) -> set:
    return set(concept_names(c)) | {("role", r) for r in role_names(c)}


def _statement_tokens(stmt) -> set:
    if isinstance(stmt, RigidInclusion):
        return _concept_tokens(stmt.lhs) | _concept_tokens(stmt.rhs)
    if isinstance(stmt, TypicalityInclusion):
        return _concept_tokens(stmt.subject) | _concept_tokens(stmt.predicate)
    if isinstance(stmt, ConceptAssertion):
        return _concept_tokens(stmt.concept) | {("ind", stmt.individual)}
    if isinstance(stmt, RoleAssertion):
        return {("role", stmt.role), ("ind", stmt.subject), ("ind", stmt.object)}
    raise TypeError(f"unknown statement {stmt!r}")


class _ScenarioFactory:
    """Precomputed pieces shared by all 2^n scenario KBs of one combination."""

    def __init__(self, kb: KnowledgeBase, spec: CombinationSpec):
        self.kb = kb
        self.relevant = relevant_inclusions(kb, spec)
        self.compound = compound_concept(spec)
        self._core = None
        self._remainder_ok: Optional[bool] = None
        relevant_ids = {t.id for t in self.relevant}
        background = tuple(t for t in kb.typical if t.id not in relevant_ids)
        self.prefix = tuple(
            TypicalityInclusion(i, t.degree, t.subject, t.predicate)
            for i, t in enumerate(background)
        )
        n = len(self.relevant)
        base = len(self.prefix)
        # rewrite[position][k] = the compound inclusion for the k-th kept bit
        self.rewrites = [
            [
                TypicalityInclusion(base + k, t.degree, self.compound, t.predicate)
                for k in range(n)
            ]
            for t in self.relevant
        ]

    def build(self, bits: Sequence[int]) -> KnowledgeBase:
        typical = list(self.prefix)
        base = len(self.prefix)
        for i, bit in enumerate(bits):
            if bit:
                typical.append(self.rewrites[i][len(typical) - base])
        return KnowledgeBase(self.kb.rigid, tuple(typical), self.kb.abox, self.kb.signature)

    # -- focused consistency -------------------------------------------------
    # Every scenario KB splits along shared concept/role/individual names into
    # the part signature-connected to the compound and an untouched remainder.
    # Ranked models over disjoint signatures combine freely (no nominals), so
    # a scenario is consistent iff its compound component is consistent and
    # the constant remainder is consistent — the latter checked once.

    def _split(self):
        if self._core is None:
            parent: Dict[object, object] = {}

            def find(x):
                root = x
                while parent.get(root, root) != root:
                    root = parent[root]
                while parent.get(x, x) != x:
                    parent[x], x = root, parent[x]
                return root

            def union(tokens):
                tokens = iter(tokens)
                first = find(next(tokens))
                for t in tokens:
                    parent[find(t)] = first

            seed = _concept_tokens(self.compound)
            for t in self.relevant:
                seed |= _concept_tokens(t.predicate)
            statements = list(self.kb.rigid) + list(self.prefix) + list(self.kb.abox)
            groups = [seed] + [_statement_tokens(s) for s in statements]
            for tokens in groups:
                if tokens:
                    union(tokens)
            witness_root = find(next(iter(seed))) if seed else None

            def in_core(tokens):
                # name-free statements (e.g. TOP <= BOT) constrain everything
                if not tokens or witness_root is None:
                    return True
                return find(next(iter(tokens))) == witness_root

            core_flags = [in_core(tokens) for tokens in groups[1:]]
            core, rest = [], []
            for stmt, flag in zip(statements, core_flags):
                (core if flag else rest).append(stmt)
            self._core = (core, rest)
        return self._core

    def remainder_ok(self) -> bool:
        if self._remainder_ok is None:
            _, rest = self._split()
            if not rest:
                self._remainder_ok = True
            else:
                rigid = [s for s in rest if isinstance(s, RigidInclusion)]
                typical = [
                    TypicalityInclusion(i, s.degree, s.subject, s.predicate)
                    for i, s in enumerate(
                        s for s in rest if isinstance(s, TypicalityInclusion)
                    )
                ]
                abox = [
                    s for s in rest
                    if isinstance(s, (ConceptAssertion, RoleAssertion))
                ]
                self._remainder_ok = RankEngine(
                    KnowledgeBase.build(rigid, typical, abox)
                ).consistent()
        return self._remainder_ok

    def build_core(self, bits: Sequence[int]) -> KnowledgeBase:
        core, _ = self._split()
        rigid = tuple(s for s in core if isinstance(s, RigidInclusion))
        abox = tuple(
            s for s in core if isinstance(s, (ConceptAssertion, RoleAssertion))
        )
        typical = [
            TypicalityInclusion(i, s.degree, s.subject, s.predicate)
            for i, s in enumerate(
                s for s in core if isinstance(s, TypicalityInclusion)
            )
        ]
        for i, bit in enumerate(bits):
            if bit:
                t = self.relevant[i]
                typical.append(
                    TypicalityInclusion(len(typical), t.degree, self.compound, t.predicate)
                )
        return KnowledgeBase(rigid, tuple(typical), abox, self.kb.signature)


def enumerate_scenarios(kb: KnowledgeBase, spec: CombinationSpec) -> List[ScenarioRecord]:
    return _enumerate(_ScenarioFactory(kb, spec), spec)


def _enumerate(factory: _ScenarioFactory, spec: CombinationSpec) -> List[ScenarioRecord]:
    relevant = factory.relevant
    n = len(relevant)
    if n > spec.max_inclusions:
        raise SizeLimitError(n, spec.max_inclusions)

    # All probabilities share the denominator prod(d_i); working on integer
    # numerators keeps the 2^n products, the sort, and the block grouping out
    # of Fraction arithmetic.
    denominator = 1
    for t in relevant:
        denominator *= t.degree.value.denominator
    numerators = [1]
    for t in relevant:
        q = t.degree.value
        kept = q.numerator
        dropped = q.denominator - q.numerator
        numerators = [p * f for p in numerators for f in (dropped, kept)]
    # numerators[v] is the numerator for bits = big-endian digits of v

    order = sorted(range(2 ** n), key=lambda v: (-numerators[v], -v))
    records = []
    block = -1
    last = None
    for v in order:
        if numerators[v] != last:
            block += 1
            last = numerators[v]
        bits = tuple((v >> (n - 1 - i)) & 1 for i in range(n))
        selection = Selection(bits, Probability(Fraction(numerators[v], denominator)))
        records.append(ScenarioRecord(selection, factory.build(bits), STATUS_PENDING, block))
    return records


def _canonical_key(record: ScenarioRecord):
    return (-record.selection.probability.value, -record.selection.as_int())


def _with_blocks(records: Sequence[ScenarioRecord]) -> List[ScenarioRecord]:
    """Re-assign block indices: one block per distinct probability, 0 highest."""
    out = []
    block = -1
    last = None
    for record in records:
        p = record.selection.probability.value
        if p != last:
            block += 1
            last = p
        out.append(replace(record, block=block))
    return out


def scenario_consistent(record: ScenarioRecord, compound: Concept) -> bool:
    """Consistency of the scenario KB with a fresh witness of the compound."""
    kb = record.kb
    witness = ConceptAssertion(compound, fresh_individual(kb))
    return RankEngine(kb.with_assertion(witness)).consistent()


class _Combination:
    """Shared context for one select_scenarios run."""

    def __init__(self, kb: KnowledgeBase, spec: CombinationSpec):
        self.kb = kb
        self.spec = spec
        self.aliases = concept_aliases(kb)
        self.factory = _ScenarioFactory(kb, spec)
        self.relevant = self.factory.relevant
        self.compound = self.factory.compound
        self.head_positions = tuple(
            i for i, t in enumerate(self.relevant)
            if _same_concept(t.subject, spec.head, self.aliases)
        )
        self.strict_engine = RankEngine(kb).strict_engine
        self._conflict_cache: Dict[Tuple[Concept, Concept], bool] = {}
        self._conflict_pairs: Optional[Tuple[Tuple[int, int], ...]] = None

    def consistent(self, bits: Sequence[int]) -> bool:
        if not self.factory.remainder_ok():
            return False
        kb = self.factory.build_core(bits)
        witness = ConceptAssertion(self.compound, fresh_individual(kb))
        return RankEngine(kb.with_assertion(witness)).consistent()

    def ascribable_head_positions(self) -> Tuple[int, ...]:
        n = len(self.relevant)
        out = []
        for i in self.head_positions:
            singleton = tuple(1 if j == i else 0 for j in range(n))
            if self.consistent(singleton):
                out.append(i)
        return tuple(out)

    def predicates_conflict(self, d: Concept, e: Concept) -> bool:
        key = (d, e)
        if key not in self._conflict_cache:
            self._conflict_cache[key] = not self.strict_engine.satisfiable(And(d, e))
        return self._conflict_cache[key]

    def conflict_pairs(self) -> Tuple[Tuple[int, int], ...]:
        """Positions (modifier, head) whose predicates are jointly unsatisfiable."""
        if self._conflict_pairs is None:
            heads = set(self.head_positions)
            self._conflict_pairs = tuple(
                (m, h)
                for m in range(len(self.relevant)) if m not in heads
                for h in self.head_positions
                if self.predicates_conflict(
                    self.relevant[m].predicate, self.relevant[h].predicate
                )
            )
        return self._conflict_pairs

    def head_conflict(self, bits: Sequence[int]) -> bool:
        return any(bits[m] and not bits[h] for m, h in self.conflict_pairs())


def is_trivial(record: ScenarioRecord, spec: CombinationSpec, kb: KnowledgeBase) -> bool:
    ctx = _Combination(kb, spec)
    if not ctx.head_positions:
        return False
    ascribable = set(ctx.ascribable_head_positions())
    kept = {i for i, bit in enumerate(record.selection.bits) if bit}
    return ascribable <= kept


def conflict_head_modifier(record: ScenarioRecord, spec: CombinationSpec, kb: KnowledgeBase) -> bool:
    return _Combination(kb, spec).head_conflict(record.selection.bits)


def _consistency_flags(
    ctx: _Combination,
    records: Sequence[ScenarioRecord],
    parallel: Optional[int],
) -> List[bool]:
    if parallel:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(lambda r: ctx.consistent(r.selection.bits), records))

    # Serial path: consistency is anti-monotone in the selected set (removing
    # inclusions can only add models), so subsets of a consistent selection
    # and supersets of an inconsistent one need no reasoning at all.
    masks = [r.selection.as_int() for r in records]
    order = sorted(range(len(records)), key=lambda i: bin(masks[i]).count("1"), reverse=True)
    flags: List[Optional[bool]] = [None] * len(records)
    consistent_masks: List[int] = []
    inconsistent_masks: List[int] = []
    for i in order:
        mask = masks[i]
        if any(mask | m == m for m in consistent_masks):
            flags[i] = True
            continue
        if any(mask & m == m for m in inconsistent_masks):
            flags[i] = False
            continue
        ok = ctx.consistent(records[i].selection.bits)
        flags[i] = ok
        (consistent_masks if ok else inconsistent_masks).append(mask)
    return flags  # type: ignore[return-value]


def select_scenarios(
    kb: KnowledgeBase,
    spec: CombinationSpec,
    parallel: Optional[int] = None,
) -> SelectionResult:
    ctx = _Combination(kb, spec)
    n = len(ctx.relevant)
    if n > spec.max_inclusions:
        raise SizeLimitError(n, spec.max_inclusions)

    records = _enumerate(ctx.factory, spec)
    if spec.exactly_k is not None:
        records = _with_blocks(
            [r for r in records if sum(r.selection.bits) == spec.exactly_k]
        )

    flags = _consistency_flags(ctx, records, parallel)
    ascribable = set(ctx.ascribable_head_positions())
    has_head = bool(ctx.head_positions)

    finalized: List[Optional[ScenarioRecord]] = [None] * len(records)
    survivors_by_block: Dict[int, List[int]] = {}
    for i, record in enumerate(records):
        if not flags[i]:
            finalized[i] = replace(record, status=STATUS_INCONSISTENT)
            continue
        kept = {j for j, bit in enumerate(record.selection.bits) if bit}
        if has_head and ascribable <= kept:
            finalized[i] = replace(record, status=STATUS_TRIVIAL)
            continue
        if ctx.head_conflict(record.selection.bits):
            finalized[i] = replace(record, status=STATUS_MODIFIER_PREFERRED)
            continue
        survivors_by_block.setdefault(record.block, []).append(i)

    selected_block = min(survivors_by_block) if survivors_by_block else None
    selected = []
    for block, indices in survivors_by_block.items():
        status = STATUS_SELECTED if block == selected_block else STATUS_DOMINATED
        for i in indices:
            finalized[i] = replace(records[i], status=status)
            if status == STATUS_SELECTED:
                selected.append(finalized[i])
    selected.sort(key=_canonical_key)

    diagnostics: Dict[str, int] = {}
    for record in finalized:
        diagnostics[record.status] = diagnostics.get(record.status, 0) + 1
    return SelectionResult(tuple(finalized), tuple(selected), diagnostics)

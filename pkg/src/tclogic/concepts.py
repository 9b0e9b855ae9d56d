"""Concept expressions: the algebraic syntax tree shared by every other module.

Concepts are immutable and compared structurally, so they can be used directly
as dictionary keys and set members (the satisfiability cache relies on this).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Union


@dataclass(frozen=True)
class Top:
    def __repr__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bottom:
    def __repr__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Concept"

    def __repr__(self) -> str:
        return f"not({self.arg!r})"


@dataclass(frozen=True)
class And:
    left: "Concept"
    right: "Concept"

    def __repr__(self) -> str:
        return f"({self.left!r} and {self.right!r})"


@dataclass(frozen=True)
class Or:
    left: "Concept"
    right: "Concept"

    def __repr__(self) -> str:
        return f"({self.left!r} or {self.right!r})"


@dataclass(frozen=True)
class Exists:
    role: str
    filler: "Concept"

    def __repr__(self) -> str:
        return f"some({self.role}, {self.filler!r})"


@dataclass(frozen=True)
class Forall:
    role: str
    filler: "Concept"

    def __repr__(self) -> str:
        return f"all({self.role}, {self.filler!r})"


Concept = Union[Top, Bottom, Atom, Not, And, Or, Exists, Forall]

TOP = Top()
BOT = Bottom()


def conj(parts) -> Concept:
    """Left-associated conjunction of a non-empty iterable (top if empty)."""
    parts = list(parts)
    if not parts:
        return TOP
    return reduce(And, parts)


def disj(parts) -> Concept:
    parts = list(parts)
    if not parts:
        return BOT
    return reduce(Or, parts)


def nnf(c: Concept) -> Concept:
    """Push negations down to atoms (negation normal form)."""
    if isinstance(c, (Top, Bottom, Atom)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    # Negation: dispatch on the negated expression.
    a = c.arg
    if isinstance(a, Top):
        return BOT
    if isinstance(a, Bottom):
        return TOP
    if isinstance(a, Atom):
        return c
    if isinstance(a, Not):
        return nnf(a.arg)
    if isinstance(a, And):
        return Or(nnf(Not(a.left)), nnf(Not(a.right)))
    if isinstance(a, Or):
        return And(nnf(Not(a.left)), nnf(Not(a.right)))
    if isinstance(a, Exists):
        return Forall(a.role, nnf(Not(a.filler)))
    if isinstance(a, Forall):
        return Exists(a.role, nnf(Not(a.filler)))
    raise TypeError(f"not a concept: {c!r}")


def neg(c: Concept) -> Concept:
    """Negation, already in NNF."""
    return nnf(Not(c))


def concept_names(c: Concept) -> set:
    if isinstance(c, Atom):
        return {c.name}
    if isinstance(c, Not):
        return concept_names(c.arg)
    if isinstance(c, (And, Or)):
        return concept_names(c.left) | concept_names(c.right)
    if isinstance(c, (Exists, Forall)):
        return concept_names(c.filler)
    return set()


def role_names(c: Concept) -> set:
    if isinstance(c, Not):
        return role_names(c.arg)
    if isinstance(c, (And, Or)):
        return role_names(c.left) | role_names(c.right)
    if isinstance(c, (Exists, Forall)):
        return {c.role} | role_names(c.filler)
    return set()


def is_role_free(c: Concept) -> bool:
    return not role_names(c)

"""HTTP service exposing parsing, ranking, combination, revision, and queries
over a persistent on-disk workspace of knowledge bases with revision lineage.

Workspace layout: one ``<kb_id>.tcl`` per KB plus a single ``index.json``
holding names and parent links; ``kb_id`` is a content-hash prefix, so
re-uploading identical text is idempotent and restarts reproduce ids exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .cli import combine_result_json, detect_compound, parse_facts
from .kb import ConceptAssertion, DegreeError, KnowledgeBase, Probability
from .rational import Finite, RankEngine
from .revision import (
    DEFAULT_PRIOR, RevisedKB, build_revised_kb, categorization_score,
    query_probability,
)
from .scenarios import CombinationSpec, SizeLimitError, select_scenarios
from .text import (
    ParseError, format_decimal, parse_concept, parse_concept_assertion,
    parse_decimal, parse_kb, serialize_kb,
)

DEFAULT_PORT = 7421
ID_LENGTH = 12


@dataclass(frozen=True)
class WorkspaceEntry:
    kb_id: str
    name: str
    parent: Optional[str]
    created_at: str


class Workspace:
    """Directory-backed KB store; a single lock guards every mutation."""

    def __init__(self, root: Path):
        self.root = root
        self._lock = threading.Lock()
        self._entries: Dict[str, WorkspaceEntry] = {}
        self.root.mkdir(parents=True, exist_ok=True)
        index = self.root / "index.json"
        if index.exists():
            for kb_id, meta in json.loads(index.read_text()).items():
                self._entries[kb_id] = WorkspaceEntry(
                    kb_id=kb_id,
                    name=meta["name"],
                    parent=meta.get("parent"),
                    created_at=meta["created_at"],
                )

    def _write_index(self) -> None:
        payload = {
            kb_id: {
                "name": e.name,
                "parent": e.parent,
                "created_at": e.created_at,
            }
            for kb_id, e in sorted(self._entries.items())
        }
        (self.root / "index.json").write_text(json.dumps(payload, indent=2))

    @staticmethod
    def kb_id_for(source: str) -> str:
        return hashlib.sha256(source.encode()).hexdigest()[:ID_LENGTH]

    def add(self, name: str, source: str, parent: Optional[str] = None) -> WorkspaceEntry:
        kb_id = self.kb_id_for(source)
        with self._lock:
            if kb_id in self._entries:
                return self._entries[kb_id]
            entry = WorkspaceEntry(
                kb_id=kb_id,
                name=name,
                parent=parent,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            (self.root / f"{kb_id}.tcl").write_text(source)
            self._entries[kb_id] = entry
            self._write_index()
            return entry

    def entry(self, kb_id: str) -> WorkspaceEntry:
        try:
            return self._entries[kb_id]
        except KeyError:
            raise HTTPException(404, f"unknown kb id {kb_id!r}")

    def source(self, kb_id: str) -> str:
        self.entry(kb_id)
        return (self.root / f"{kb_id}.tcl").read_text()

    def entries(self) -> List[WorkspaceEntry]:
        return sorted(self._entries.values(), key=lambda e: (e.created_at, e.kb_id))

    def lineage(self, kb_id: str) -> List[WorkspaceEntry]:
        chain = []
        current: Optional[str] = kb_id
        while current is not None:
            entry = self.entry(current)
            chain.append(entry)
            current = entry.parent
        chain.reverse()
        return chain


class KbUpload(BaseModel):
    name: str
    source: str


class CombineRequest(BaseModel):
    head: str
    modifiers: List[str]
    exactly_k: Optional[int] = None
    include_all: bool = False
    max_inclusions: Optional[int] = None


class ReviseRequest(BaseModel):
    head: str
    modifiers: List[str]
    scenario_bits: str
    alias: Optional[str] = None
    exactly_k: Optional[int] = None


class QueryRequest(BaseModel):
    assertion: str
    prior: Optional[str] = None
    compound: Optional[str] = None


class ScoreRequest(BaseModel):
    individual: str
    candidate: str
    facts: str  # '<prior> :: <expr>(<ind>)' lines, the CLI facts-file format
    compound: Optional[str] = None


def _default_max_inclusions() -> int:
    raw = os.environ.get("TCL_MAX_INCLUSIONS")
    return int(raw) if raw else 20


def _parse_kb_or_422(source: str) -> KnowledgeBase:
    try:
        return parse_kb(source)
    except (ParseError, DegreeError) as exc:
        raise HTTPException(422, str(exc))


def _spec_or_422(head: str, modifiers: List[str], exactly_k, max_inclusions) -> CombinationSpec:
    try:
        return CombinationSpec(
            parse_concept(head),
            tuple(parse_concept(m) for m in modifiers),
            exactly_k=exactly_k,
            max_inclusions=max_inclusions,
        )
    except (ParseError, ValueError) as exc:
        raise HTTPException(422, str(exc))


def _select_or_413(kb: KnowledgeBase, spec: CombinationSpec):
    try:
        return select_scenarios(kb, spec)
    except SizeLimitError as exc:
        raise HTTPException(413, str(exc))


def _revised_for(kb: KnowledgeBase, compound_text: Optional[str]) -> RevisedKB:
    if compound_text:
        try:
            return RevisedKB.adopt(kb, parse_concept(compound_text))
        except ParseError as exc:
            raise HTTPException(422, str(exc))
    compound = detect_compound(kb)
    if compound is None:
        raise HTTPException(422, "cannot determine the compound concept; pass 'compound'")
    return RevisedKB.adopt(kb, compound)


def create_app(workspace_dir: Optional[str] = None) -> FastAPI:
    root = Path(workspace_dir or os.environ.get("TCL_WORKSPACE", "workspace"))
    workspace = Workspace(root)
    app = FastAPI(title="tclogic combine service")
    app.state.workspace = workspace

    @app.post("/api/kbs", status_code=201)
    def upload_kb(body: KbUpload):
        _parse_kb_or_422(body.source)
        entry = workspace.add(body.name, body.source)
        return {"kb_id": entry.kb_id, "warnings": []}

    @app.get("/api/kbs")
    def list_kbs():
        return {"kbs": [asdict(e) for e in workspace.entries()]}

    @app.get("/api/kbs/{kb_id}")
    def get_kb(kb_id: str):
        entry = workspace.entry(kb_id)
        source = workspace.source(kb_id)
        kb = _parse_kb_or_422(source)
        return {"entry": asdict(entry), "source": serialize_kb(kb)}

    @app.get("/api/kbs/{kb_id}/lineage")
    def get_lineage(kb_id: str):
        return {"lineage": [asdict(e) for e in workspace.lineage(kb_id)]}

    @app.post("/api/kbs/{kb_id}/combine")
    def combine(kb_id: str, body: CombineRequest):
        kb = _parse_kb_or_422(workspace.source(kb_id))
        spec = _spec_or_422(
            body.head, body.modifiers, body.exactly_k,
            body.max_inclusions or _default_max_inclusions(),
        )
        result = _select_or_413(kb, spec)
        return combine_result_json(spec, result, include_all=body.include_all)

    @app.post("/api/kbs/{kb_id}/revise", status_code=201)
    def revise(kb_id: str, body: ReviseRequest):
        kb = _parse_kb_or_422(workspace.source(kb_id))
        spec = _spec_or_422(
            body.head, body.modifiers, body.exactly_k, _default_max_inclusions()
        )
        result = _select_or_413(kb, spec)
        matches = [
            r for r in result.selected
            if r.selection.bit_string() == body.scenario_bits
        ]
        if not matches:
            raise HTTPException(
                409,
                f"scenario {body.scenario_bits!r} is not in the surviving block",
            )
        revised = build_revised_kb(kb, spec, matches[0], alias=body.alias)
        source = serialize_kb(revised.kb)
        name = body.alias or combine_result_json(spec, result)["compound"]
        entry = workspace.add(name, source, parent=kb_id)
        return {"kb_id": entry.kb_id}

    @app.post("/api/kbs/{kb_id}/query")
    def query(kb_id: str, body: QueryRequest):
        kb = _parse_kb_or_422(workspace.source(kb_id))
        revised = _revised_for(kb, body.compound)
        try:
            assertion = parse_concept_assertion(body.assertion)
            prior = (
                Probability(parse_decimal(body.prior)) if body.prior else DEFAULT_PRIOR
            )
        except (ParseError, ValueError) as exc:
            raise HTTPException(422, str(exc))
        if assertion.individual not in kb.individuals():
            revised = RevisedKB(
                revised.kb.with_assertion(
                    ConceptAssertion(revised.compound, assertion.individual)
                ),
                revised.compound,
                revised.compound_alias,
                revised.provenance,
            )
        p = query_probability(revised, assertion, prior)
        return {
            "probability": {"num": p.value.numerator, "den": p.value.denominator},
            "decimal": format_decimal(p.value),
        }

    @app.post("/api/kbs/{kb_id}/score")
    def score(kb_id: str, body: ScoreRequest):
        kb = _parse_kb_or_422(workspace.source(kb_id))
        revised = _revised_for(kb, body.compound)
        try:
            facts = parse_facts(body.facts)
            candidate = parse_concept(body.candidate)
        except (ParseError, ValueError) as exc:
            raise HTTPException(422, str(exc))
        value = categorization_score(revised, candidate, body.individual, facts)
        return {
            "score": {"num": value.numerator, "den": value.denominator},
            "decimal": format_decimal(value),
        }

    @app.get("/api/kbs/{kb_id}/rank")
    def rank(kb_id: str, concept: str):
        kb = _parse_kb_or_422(workspace.source(kb_id))
        try:
            target = parse_concept(concept)
        except ParseError as exc:
            raise HTTPException(422, str(exc))
        value = RankEngine(kb).concept_rank(target)
        return {"rank": value.n if isinstance(value, Finite) else "inf"}

    static_dir = _frontend_dir()
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def _frontend_dir() -> Optional[str]:
    override = os.environ.get("TCL_FRONTEND_DIR")
    candidates = [override] if override else []
    here = Path(__file__).resolve()
    for base in [Path.cwd()] + list(here.parents):
        candidates.append(str(base / "frontend" / "dist"))
    for candidate in candidates:
        if candidate and (Path(candidate) / "index.html").exists():
            return candidate
    return None


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(prog="tclogic-service")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--workspace", default=None)
    args = parser.parse_args(argv)
    import uvicorn

    uvicorn.run(create_app(args.workspace), host=args.host, port=args.port)


if __name__ == "__main__":
    main()

"""Reading and writing structure and chain documents.

Documents are YAML or JSON mappings (JSON is written).  A structure document::

    signature: {functions: ["add/2", "zero/0"], relations: ["le/2"]}
    size: 4
    functions: {add: [...], zero: [0]}     # flat tables, lexicographic inputs
    relations: {le: [[0, 0], [0, 1]]}
    names: {c: 2}                          # optional

A chain document has ``structures`` (a list of structure documents) and
``embeddings`` (one image list per consecutive pair), plus an optional
``name``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml

from .structure import ChainFamily, FiniteStructure, Signature, StructureError, validate_chain, validate_structure


class DocumentError(StructureError):
    pass


_STRUCTURE_KEYS = {"signature", "size", "functions", "relations", "names"}
_CHAIN_KEYS = {"structures", "embeddings", "name"}
_SIG_KEYS = {"functions", "relations"}


def _check_keys(doc, allowed, what):
    if not isinstance(doc, dict):
        raise DocumentError(f"{what} must be a mapping")
    extra = set(doc) - allowed
    if extra:
        raise DocumentError(f"unknown key(s) in {what}: {', '.join(sorted(map(str, extra)))}")


def _symbols(items, what):
    out = []
    for item in items or []:
        name, sep, arity = str(item).partition("/")
        if not sep or not arity.isdigit():
            raise DocumentError(f"{what} entry {item!r} is not of the form name/arity")
        out.append((name, int(arity)))
    return tuple(out)


def signature_from_doc(doc) -> Signature:
    _check_keys(doc or {}, _SIG_KEYS, "signature")
    doc = doc or {}
    return Signature(_symbols(doc.get("functions"), "function"), _symbols(doc.get("relations"), "relation"))


def signature_to_doc(sig: Signature) -> dict:
    return {
        "functions": [f"{n}/{a}" for n, a in sig.functions],
        "relations": [f"{n}/{a}" for n, a in sig.relations],
    }


def structure_from_doc(doc: Any, validate: bool = True) -> FiniteStructure:
    _check_keys(doc, _STRUCTURE_KEYS, "structure")
    if "size" not in doc:
        raise DocumentError("structure document lacks 'size'")
    sig = signature_from_doc(doc.get("signature"))
    funcs = doc.get("functions") or {}
    rels = doc.get("relations") or {}
    for key in funcs:
        if key not in sig.function_arity:
            raise DocumentError(f"table for undeclared function {key!r}")
    for key in rels:
        if key not in sig.relation_arity:
            raise DocumentError(f"tuples for undeclared relation {key!r}")
    s = FiniteStructure.from_tables(
        sig, int(doc["size"]), funcs, {r: [tuple(t) for t in ts] for r, ts in rels.items()}, doc.get("names") or {}
    )
    for fname, a in sig.functions:
        if len(list(funcs.get(fname, ()))) > s.size**a:
            raise DocumentError(f"table for {fname} has too many entries")
    if validate:
        rep = validate_structure(s)
        if not rep.ok:
            raise DocumentError("invalid structure: " + "; ".join(str(v) for v in rep.violations))
    return s


def structure_to_doc(s: FiniteStructure) -> dict:
    doc = {
        "signature": signature_to_doc(s.signature),
        "size": s.size,
        "functions": {f: list(s.table(f)) for f, _ in s.signature.functions},
        "relations": {r: [list(t) for t in sorted(s.relations[r])] for r, _ in s.signature.relations},
    }
    if s.names:
        doc["names"] = dict(sorted(s.names.items()))
    return doc


def chain_from_doc(doc: Any) -> ChainFamily:
    _check_keys(doc, _CHAIN_KEYS, "chain")
    members = tuple(structure_from_doc(d) for d in doc.get("structures") or [])
    if not members:
        raise DocumentError("chain document has no structures")
    sig = members[0].signature
    embs = tuple(tuple(e) for e in doc.get("embeddings") or [])
    chain = ChainFamily(sig, members, embs, str(doc.get("name", "chain")))
    problems = validate_chain(chain)
    if problems:
        raise DocumentError("invalid chain: " + "; ".join(problems))
    return chain


def chain_to_doc(chain: ChainFamily) -> dict:
    return {
        "name": chain.name,
        "structures": [structure_to_doc(s) for s in chain.members],
        "embeddings": [list(e) for e in chain.embeddings],
    }


def _read(path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DocumentError(f"{path}: not a YAML/JSON document ({exc.__class__.__name__})") from None


def load_structure(path) -> FiniteStructure:
    return structure_from_doc(_read(path))


def load_chain(path) -> ChainFamily:
    return chain_from_doc(_read(path))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def save_structure(s: FiniteStructure, path) -> None:
    Path(path).write_text(dumps(structure_to_doc(s)), encoding="utf-8")


def save_chain(chain: ChainFamily, path) -> None:
    Path(path).write_text(dumps(chain_to_doc(chain)), encoding="utf-8")

"""Bundled example programs with their expected results."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

ORACLE_MAX_EXP = 12
ORACLE_XS = range(-5, 6)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    source: str
    file: str = ""
    expected_flattened: Optional[str] = None
    flattened_trait: Optional[str] = None
    expected_values: list = field(default_factory=list)  # (expression, value)
    deviations: list = field(default_factory=list)


def corpus_files():
    return resources.files(__package__).joinpath("corpus")


def read_file(name: str) -> str:
    return corpus_files().joinpath(name).read_text(encoding="utf-8")


def iterated_product(x: int, n: int) -> int:
    acc = 1
    for _ in range(n):
        acc *= x
    return acc


def _oracle_entry(pow_source: str) -> CorpusEntry:
    classes = "".join(f"class Gen{n}: generate({n})\n" for n in range(1, ORACLE_MAX_EXP + 1))
    values = [
        (f"new Gen{n}().pow({x})", iterated_product(x, n))
        for n in range(1, ORACLE_MAX_EXP + 1)
        for x in ORACLE_XS
    ]
    return CorpusEntry("powN-oracle", pow_source + "\n" + classes, "30-pow.trait",
                       expected_values=values)


def load_corpus() -> list[CorpusEntry]:
    manifest = json.loads(read_file("manifest.json"))
    entries = []
    for item in manifest["entries"]:
        flat = item.get("flattened")
        entries.append(CorpusEntry(
            id=item["id"],
            source=read_file(item["file"]),
            file=item["file"],
            expected_flattened=read_file(flat["golden"]) if flat else None,
            flattened_trait=flat["trait"] if flat else None,
            expected_values=[tuple(v) for v in item.get("values", [])],
            deviations=list(item.get("deviations", [])),
        ))
    entries.append(_oracle_entry(read_file("30-pow.trait")))
    return entries


def entry(entry_id: str) -> CorpusEntry:
    for e in load_corpus():
        if e.id == entry_id:
            return e
    raise KeyError(entry_id)

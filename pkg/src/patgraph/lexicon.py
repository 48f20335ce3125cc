"""Collaborative ontology lexicon: terms, usage counters, synonyms, is-A pairs.

The lexicon seeds annotation combo boxes (geometry types, actions, function
verbs, flows), counts every use of a term so upper/lower ontologies can be
deduced later, and carries the subtype hierarchy used by supertype queries.
Loaded from a CSV lookup table at startup and saved back on shutdown.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path

CATEGORIES = ("geometry-type", "action", "function-verb", "flow")

LEXICON_COLUMNS = ["category", "term", "domain", "usage_count", "parent", "synonyms"]

LIST_SEPARATOR = ";"


@dataclass(frozen=True)
class OntologyTerm:
    """One lexicon entry. (category, term) is the unique key."""

    category: str
    term: str
    domain: str = ""
    usage_count: int = 0
    parent: str | None = None
    synonyms: tuple[str, ...] = ()
    user_defined: bool = False


class Lexicon:
    """In-memory term table keyed by (category, term)."""

    def __init__(self, terms: list[OntologyTerm] | None = None):
        self._terms: dict[tuple[str, str], OntologyTerm] = {}
        for term in terms or []:
            self.add_term(term)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._terms

    def add_term(self, term: OntologyTerm) -> OntologyTerm:
        _check_category(term.category)
        if not term.term:
            raise ValueError("lexicon term must be non-empty")
        existing = self._terms.get((term.category, term.term))
        if existing is not None:
            # keep the larger counter; counters never decrease
            merged = replace(
                term, usage_count=max(term.usage_count, existing.usage_count)
            )
            self._terms[(term.category, term.term)] = merged
            return merged
        self._terms[(term.category, term.term)] = term
        return term

    def get(self, category: str, term: str) -> OntologyTerm | None:
        return self._terms.get((category, term))

    def terms(self, category: str | None = None) -> list[OntologyTerm]:
        """All terms, sorted by (category, term), optionally one category."""
        entries = [
            t for t in self._terms.values() if category is None or t.category == category
        ]
        return sorted(entries, key=lambda t: (t.category, t.term))

    def record_usage(self, category: str, term: str, domain: str = "") -> int:
        """Increment a term's usage counter, creating a user-defined entry at 1.

        Returns the updated count. Counters are monotonically non-decreasing.
        """
        _check_category(category)
        if not term:
            raise ValueError("cannot record usage of an empty term")
        existing = self._terms.get((category, term))
        if existing is None:
            created = OntologyTerm(
                category, term, domain=domain, usage_count=1, user_defined=True
            )
            self._terms[(category, term)] = created
            return 1
        updated = replace(existing, usage_count=existing.usage_count + 1)
        self._terms[(category, term)] = updated
        return updated.usage_count

    def synonyms_of(self, keyword: str) -> list[str]:
        """One-hop synonym lookup across all categories (no transitive chaining)."""
        found: list[str] = []
        for term in self.terms():
            if term.term == keyword:
                found.extend(s for s in term.synonyms if s and s != keyword)
        return list(dict.fromkeys(found))

    def expand_subtypes(self, type_name: str) -> list[str]:
        """The input plus every transitive subtype per the is-A parent links.

        Querying a supertype returns all its subtypes; querying a subtype
        does not return supertypes. Unknown types yield a singleton.
        """
        children: dict[tuple[str, str], list[str]] = {}
        for term in self._terms.values():
            if term.parent:
                children.setdefault((term.category, term.parent), []).append(term.term)

        collected: list[str] = [type_name]
        seen = {type_name}
        frontier = [
            (category, type_name)
            for category in CATEGORIES
            if (category, type_name) in self._terms or (category, type_name) in children
        ]
        while frontier:
            key = frontier.pop()
            for child in children.get(key, ()):
                if child not in seen:
                    seen.add(child)
                    collected.append(child)
                frontier.append((key[0], child))
        return [collected[0]] + sorted(collected[1:])

    # -- CSV round trip -------------------------------------------------

    @classmethod
    def load_csv(cls, source: str | Path | io.TextIOBase) -> "Lexicon":
        """Read a lookup table: category,term,domain,usage_count,parent,synonyms."""
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8", newline="") as handle:
                return cls._read(handle)
        return cls._read(source)

    @classmethod
    def _read(cls, handle) -> "Lexicon":
        lexicon = cls()
        reader = csv.DictReader(handle)
        missing = [c for c in LEXICON_COLUMNS[:2] if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"lexicon CSV missing columns: {', '.join(missing)}")
        for row in reader:
            synonyms = tuple(
                s.strip() for s in (row.get("synonyms") or "").split(LIST_SEPARATOR) if s.strip()
            )
            count_text = (row.get("usage_count") or "0").strip()
            lexicon.add_term(
                OntologyTerm(
                    category=(row.get("category") or "").strip(),
                    term=(row.get("term") or "").strip(),
                    domain=(row.get("domain") or "").strip(),
                    usage_count=int(count_text) if count_text else 0,
                    parent=(row.get("parent") or "").strip() or None,
                    synonyms=synonyms,
                )
            )
        return lexicon

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(LEXICON_COLUMNS)
        for term in self.terms():
            writer.writerow(
                [
                    term.category,
                    term.term,
                    term.domain,
                    term.usage_count,
                    term.parent or "",
                    LIST_SEPARATOR.join(term.synonyms),
                ]
            )
        return buffer.getvalue()

    def save_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _check_category(category: str) -> None:
    if category not in CATEGORIES:
        raise ValueError(
            f"unknown lexicon category {category!r}; expected one of {', '.join(CATEGORIES)}"
        )

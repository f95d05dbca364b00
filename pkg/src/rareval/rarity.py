"""Cross-system retrieval counts and the rarity weighting functions.

A document retrieved by few of a campaign's systems is "rare". With ``S``
systems total and ``S_d`` of them retrieving document ``d`` for a topic:

* ``rareness``            -- ``1 - S_d/S``, in ``[0, (S-1)/S]``
* ``rareness_revised``    -- ``1 - (S_d-1)/(S-1)``, rescaled to ``[0, 1]``

Counts are computed once per campaign and frozen; metric code only ever asks
about documents that at least one indexed system retrieved (``S_d >= 1``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal, NamedTuple

from .errors import DataError, UndefinedRarityError
from .trec_io import Campaign, Run

RarityVariant = Literal["eq2", "revised"]

RARITY_VARIANTS: tuple[str, ...] = ("eq2", "revised")


@dataclass(frozen=True)
class RarityIndex:
    """Retrieval counts per (topic, doc) over a fixed set of systems.

    ``count_depth`` limits how deep in each canonical ranking retrieval
    counts; ``None`` counts a document wherever it appears in the run.
    Instances are immutable after build.
    """

    total_systems: int
    counts: dict[str, dict[str, int]]
    count_depth: int | None = None

    def count(self, topic: str, doc: str) -> int:
        """How many systems retrieved ``doc`` for ``topic`` (0 if none)."""
        return self.counts.get(topic, {}).get(doc, 0)

    def topic_counts(self, topic: str) -> dict[str, int]:
        return self.counts.get(topic, {})


def build_rarity_index(campaign: Campaign, count_depth: int | None = None) -> RarityIndex:
    """Count, per (topic, doc), how many distinct systems retrieve it."""
    if count_depth is not None and count_depth < 1:
        raise DataError(f"count depth must be >= 1 or None, got {count_depth}")
    counts: dict[str, dict[str, int]] = {}
    for run in campaign.runs:
        for topic, entries in run.rankings.items():
            scope = entries if count_depth is None else entries[:count_depth]
            by_doc = counts.setdefault(topic, {})
            for entry in scope:
                by_doc[entry.doc] = by_doc.get(entry.doc, 0) + 1
    return RarityIndex(campaign.n_systems, counts, count_depth)


def extend_index(index: RarityIndex, run: Run) -> RarityIndex:
    """The index after one more system joins; equals a full rebuild."""
    counts = {t: dict(d) for t, d in index.counts.items()}
    for topic, entries in run.rankings.items():
        scope = entries if index.count_depth is None else entries[: index.count_depth]
        by_doc = counts.setdefault(topic, {})
        for entry in scope:
            by_doc[entry.doc] = by_doc.get(entry.doc, 0) + 1
    return RarityIndex(index.total_systems + 1, counts, index.count_depth)


def _checked_count(index: RarityIndex, topic: str, doc: str) -> int:
    s_d = index.count(topic, doc)
    if s_d < 1:
        raise UndefinedRarityError(
            f"no indexed system retrieved {doc!r} for topic {topic!r}"
            + (
                f" within count depth {index.count_depth}"
                if index.count_depth is not None
                else ""
            )
        )
    return s_d


def rareness(index: RarityIndex, topic: str, doc: str) -> float:
    """Fraction-complement of retrieving systems: ``1 - S_d/S``."""
    s_d = _checked_count(index, topic, doc)
    return 1.0 - s_d / index.total_systems


def rareness_revised(index: RarityIndex, topic: str, doc: str) -> float:
    """Rescaled rarity ``1 - (S_d-1)/(S-1)``: 1 for unique, 0 for universal."""
    s_d = _checked_count(index, topic, doc)
    s = index.total_systems
    if s == 1:
        # 0/0 case: with a single system every retrieval is trivially unique.
        warnings.warn(
            "revised rarity is meaningless with a single system; returning 1.0",
            stacklevel=2,
        )
        return 1.0
    return 1.0 - (s_d - 1) / (s - 1)


def rarity_value(index: RarityIndex, topic: str, doc: str, variant: RarityVariant) -> float:
    if variant == "eq2":
        return rareness(index, topic, doc)
    if variant == "revised":
        return rareness_revised(index, topic, doc)
    raise DataError(f"unknown rarity variant {variant!r} (expected one of {RARITY_VARIANTS})")


class RarityRow(NamedTuple):
    doc: str
    grade: int
    retrievers: int
    rarity: float


def rarity_report(
    campaign: Campaign,
    index: RarityIndex,
    topic: str,
    variant: RarityVariant = "eq2",
) -> list[RarityRow]:
    """Judged-relevant retrieved documents for a topic, rarest first.

    Ties in rarity are broken by ascending doc-id, so output is stable.
    """
    if topic not in campaign.qrels.judgments:
        raise DataError(f"topic {topic!r} is not judged in the qrels")
    rows: list[RarityRow] = []
    by_doc = index.topic_counts(topic)
    for doc in campaign.qrels.relevant(topic):
        s_d = by_doc.get(doc, 0)
        if s_d < 1:
            continue
        rows.append(
            RarityRow(
                doc=doc,
                grade=campaign.qrels.grade(topic, doc),
                retrievers=s_d,
                rarity=rarity_value(index, topic, doc, variant),
            )
        )
    rows.sort(key=lambda r: (-r.rarity, r.doc))
    return rows

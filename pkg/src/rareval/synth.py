"""Synthetic campaigns and hypothetical probe systems.

``generate_campaign`` builds seed-deterministic campaigns whose systems vary
in quality and in how much their relevant retrievals overlap. Each ranking
is drawn position by position: with probability ``skill * overlap_bias`` the
system emits the next document from a per-topic shared order over the
relevant set (concentrating systems on the same relevant documents), and
otherwise the next unused document from its own uniform shuffle of the pool.
At ``overlap_bias = 1`` every system deliberately front-loads the whole
shared order, so all systems retrieve identical relevant sets; at 0 the
draws are uniform, so with a large pool most retrieved relevant documents
are found by a single system.

Two hypothetical probe systems can be inserted into any campaign:

* ``make_rare_system``   -- retrieves fresh documents nobody else has, each
  added to the qrels as relevant (uniquely-found by construction).
* ``make_common_system`` -- retrieves the topic's most commonly-retrieved
  relevant documents first.

``rank_trajectory`` inserts one of them and tracks its midrank as the number
of retrieved relevant documents grows.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .campaign import evaluate_campaign, mean_scores, rank_systems
from .errors import ConfigError, DataError
from .metrics import MetricConfig, MetricSpec
from .rarity import RarityIndex, build_rarity_index, extend_index
from .rng import DEFAULT_SEED, substream
from .trec_io import Campaign, Qrels, Run, RunEntry

_STREAM_TOPIC = 11
_STREAM_SKILL = 12
_STREAM_RANKING = 13

PadPolicy = Literal["none", "pool-nonrel"]
HypotheticalKind = Literal["rare", "common"]


@dataclass(frozen=True)
class SynthSpec:
    """Shape and randomness of a generated campaign."""

    n_systems: int
    n_topics: int
    n_relevant_per_topic: int
    doc_pool_size: int
    overlap_bias: float
    run_depth: int
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n_systems < 1:
            raise ConfigError(f"need at least 1 system, got {self.n_systems}")
        if self.n_topics < 1:
            raise ConfigError(f"need at least 1 topic, got {self.n_topics}")
        if not 1 <= self.n_relevant_per_topic <= self.doc_pool_size:
            raise ConfigError(
                f"relevant-per-topic {self.n_relevant_per_topic} must lie in "
                f"[1, doc pool size {self.doc_pool_size}]"
            )
        if not 1 <= self.run_depth <= self.doc_pool_size:
            raise ConfigError(
                f"run depth {self.run_depth} must lie in "
                f"[1, doc pool size {self.doc_pool_size}]"
            )
        if not 0.0 <= self.overlap_bias <= 1.0:
            raise ConfigError(f"overlap bias must be in [0, 1], got {self.overlap_bias}")


def _doc_id(j: int) -> str:
    return f"doc{j:05d}"


def generate_campaign(spec: SynthSpec) -> Campaign:
    """A deterministic campaign drawn from the spec's generative model."""
    skills = substream(spec.seed, _STREAM_SKILL).uniform(0.15, 0.95, spec.n_systems)
    topic_ids = [f"t{t:03d}" for t in range(spec.n_topics)]

    shared_orders: dict[str, np.ndarray] = {}
    judgments: dict[str, dict[str, int]] = {}
    for t, topic in enumerate(topic_ids):
        rng = substream(spec.seed, _STREAM_TOPIC, t)
        rel = rng.choice(spec.doc_pool_size, size=spec.n_relevant_per_topic, replace=False)
        shared_orders[topic] = rng.permutation(rel)
        judgments[topic] = {_doc_id(j): 1 for j in rel}

    runs: list[Run] = []
    for s in range(spec.n_systems):
        theta = 1.0 if spec.overlap_bias == 1.0 else skills[s] * spec.overlap_bias
        rankings: dict[str, tuple[RunEntry, ...]] = {}
        for t, topic in enumerate(topic_ids):
            rng = substream(spec.seed, _STREAM_RANKING, s, t)
            take_shared = rng.random(spec.run_depth) < theta
            private = rng.permutation(spec.doc_pool_size)
            shared = shared_orders[topic]
            used: set[int] = set()
            picked: list[int] = []
            shared_at = 0
            private_at = 0
            for slot in range(spec.run_depth):
                doc = -1
                if take_shared[slot]:
                    while shared_at < len(shared) and int(shared[shared_at]) in used:
                        shared_at += 1
                    if shared_at < len(shared):
                        doc = int(shared[shared_at])
                        shared_at += 1
                if doc < 0:
                    while int(private[private_at]) in used:
                        private_at += 1
                    doc = int(private[private_at])
                used.add(doc)
                picked.append(doc)
            rankings[topic] = tuple(
                RunEntry(_doc_id(doc), float(spec.run_depth - slot), slot + 1)
                for slot, doc in enumerate(picked)
            )
        runs.append(Run(f"sys{s:03d}", rankings))
    return Campaign(runs, Qrels(judgments, relevance_threshold=1))


def _all_known_docs(campaign: Campaign) -> set[str]:
    known: set[str] = set()
    for run in campaign.runs:
        for entries in run.rankings.values():
            known.update(e.doc for e in entries)
    for by_doc in campaign.qrels.judgments.values():
        known.update(by_doc)
    return known


def _fresh_doc_ids(campaign: Campaign, tag: str, count: int) -> list[str]:
    known = _all_known_docs(campaign)
    out: list[str] = []
    i = 0
    while len(out) < count:
        candidate = f"{tag}-{i:04d}"
        if candidate not in known:
            out.append(candidate)
        i += 1
    return out


def _padding_docs(
    campaign: Campaign, topic: str, exclude: set[str], count: int
) -> list[str]:
    """Non-relevant documents other systems retrieved for the topic."""
    if count <= 0:
        return []
    relevant = campaign.qrels.relevant(topic)
    seen: set[str] = set()
    for run in campaign.runs:
        seen.update(e.doc for e in run.rankings.get(topic, ()))
    candidates = sorted(seen - relevant - exclude)
    return candidates[:count]


def _build_run(tag: str, topic: str, docs: Sequence[str]) -> Run:
    entries = tuple(
        RunEntry(doc, float(len(docs) - i), i + 1) for i, doc in enumerate(docs)
    )
    return Run(tag, {topic: entries})


def make_rare_system(
    campaign: Campaign,
    topic: str,
    d: int,
    *,
    tag: str = "hyp-rare",
    pad: PadPolicy = "none",
    pad_to: int = 0,
) -> tuple[Run, Qrels]:
    """A run of ``d`` fresh relevant documents no other system retrieves.

    The fresh doc-ids are namespaced under ``tag`` and also returned inside
    an augmented qrels (judged relevant at the campaign's threshold). With
    ``pad="pool-nonrel"`` the run is extended to ``pad_to`` entries using
    non-relevant pooled documents, which cannot change any system's score.
    """
    if d < 1:
        raise DataError(f"the probe system needs at least 1 document, got {d}")
    fresh = _fresh_doc_ids(campaign, tag, d)
    docs = list(fresh)
    if pad == "pool-nonrel":
        docs += _padding_docs(campaign, topic, set(docs), pad_to - len(docs))
    elif pad != "none":
        raise ConfigError(f"unknown pad policy {pad!r} (expected 'none' or 'pool-nonrel')")
    qrels = campaign.qrels.with_added(topic, fresh)
    return _build_run(tag, topic, docs), qrels


def make_common_system(
    campaign: Campaign,
    topic: str,
    d: int,
    *,
    index: RarityIndex | None = None,
    tag: str = "hyp-common",
    pad: PadPolicy = "none",
    pad_to: int = 0,
) -> Run:
    """A run of the ``d`` most commonly-retrieved relevant documents.

    Documents are ordered by how many systems retrieve them (descending),
    ties broken by ascending doc-id.
    """
    if d < 1:
        raise DataError(f"the probe system needs at least 1 document, got {d}")
    if index is None:
        index = build_rarity_index(campaign)
    counts = index.topic_counts(topic)
    available = sorted(
        (
            (doc, counts[doc])
            for doc in campaign.qrels.relevant(topic)
            if counts.get(doc, 0) >= 1
        ),
        key=lambda item: (-item[1], item[0]),
    )
    if d > len(available):
        raise DataError(
            f"only {len(available)} relevant retrieved documents exist for "
            f"topic {topic!r}; cannot take {d}"
        )
    docs = [doc for doc, _ in available[:d]]
    if pad == "pool-nonrel":
        docs += _padding_docs(campaign, topic, set(docs), pad_to - len(docs))
    elif pad != "none":
        raise ConfigError(f"unknown pad policy {pad!r} (expected 'none' or 'pool-nonrel')")
    return _build_run(tag, topic, docs)


@dataclass
class TrajectoryResult:
    """Midrank of one probe system as its relevant-doc count D grows."""

    alpha: float
    ranks: list[tuple[int, float]]
    d_star: int | None


def rank_trajectory(
    campaign: Campaign,
    kind: HypotheticalKind,
    topic: str,
    alphas: Sequence[float],
    d_max: int,
    config: MetricConfig | None = None,
    *,
    pad: PadPolicy = "pool-nonrel",
    freeze_n_rel: bool = False,
    multi_topic: bool = False,
    rarity_depth: int | None = None,
    tag: str | None = None,
) -> list[TrajectoryResult]:
    """Track the probe system's midrank for each alpha and each D in 1..d_max.

    The probe participates fully: it is added to the campaign, so it counts
    toward the system total and its retrievals enter the rarity counts. By
    default only the chosen topic is evaluated; ``multi_topic=True`` ranks
    on the mean over all judged topics instead (the probe still submits only
    the one topic). ``d_star`` is the least D reaching midrank 1.0, if any.
    """
    if kind not in ("rare", "common"):
        raise ConfigError(f"unknown probe kind {kind!r} (expected 'rare' or 'common')")
    if d_max < 1:
        raise DataError(f"d_max must be >= 1, got {d_max}")
    if topic not in campaign.qrels.judgments:
        raise DataError(f"topic {topic!r} is not judged in the qrels")
    if config is None:
        config = MetricConfig()
    if tag is None:
        tag = f"hyp-{kind}"

    base = campaign if multi_topic else campaign.restricted_to_topics([topic])
    base_index = build_rarity_index(base, rarity_depth)
    base_n_rel = {t: base.qrels.n_relevant(t) for t in base.qrels.topics}
    kind_key = "p_mixture" if config.formulation == "mixture" else "p_rareness"

    results: list[TrajectoryResult] = []
    for alpha in alphas:
        spec = MetricSpec(kind_key, dataclasses.replace(config, alpha=float(alpha)))
        ranks: list[tuple[int, float]] = []
        d_star: int | None = None
        for d in range(1, d_max + 1):
            if kind == "rare":
                run, qrels = make_rare_system(
                    base, topic, d, tag=tag, pad=pad, pad_to=max(d, config.cutoff)
                )
                extended = base.with_run(run, qrels)
            else:
                run = make_common_system(
                    base, topic, d, index=base_index, tag=tag,
                    pad=pad, pad_to=max(d, config.cutoff),
                )
                extended = base.with_run(run)
            matrix = evaluate_campaign(
                extended,
                [spec],
                index=extend_index(base_index, run),
                n_relevant_override=base_n_rel if freeze_n_rel else None,
            )[0]
            ranking = rank_systems(mean_scores(matrix))
            rank = ranking.rank_of(tag)
            ranks.append((d, rank))
            if d_star is None and rank == 1.0:
                d_star = d
        results.append(TrajectoryResult(float(alpha), ranks, d_star))
    return results

"""Does the ranking survive when fewer systems define rarity?

Rarity depends on who participates: with fewer systems, every document's
retrieval count changes. This experiment samples N systems at random,
recomputes rarity over just those N, re-ranks them, and correlates the
result against the same systems' ordering in the full 64-system ranking.
High mean tau at small N means the weighted metric is robust to the
participant pool.
"""

from rareval import (
    MetricSpec,
    SubsetExperimentConfig,
    SynthSpec,
    generate_campaign,
    subset_experiment,
)

campaign = generate_campaign(
    SynthSpec(
        n_systems=64,
        n_topics=6,
        n_relevant_per_topic=40,
        doc_pool_size=1200,
        overlap_bias=0.35,
        run_depth=80,
        seed=1,
    )
)

print("mean tau between full-campaign and N-system rankings (400 trials)")
print(f"{'metric':26s} " + "  ".join(f"N={n:<3d}" for n in (2, 4, 8, 16, 32, 64)))
for name in ("P@80_rareness(alpha=1)", "AP_rareness(alpha=1)"):
    spec = MetricSpec.parse(name)
    taus = []
    for n in (2, 4, 8, 16, 32, 64):
        result = subset_experiment(
            campaign, spec, SubsetExperimentConfig(subset_size=n, trials=400)
        )
        taus.append(result.mean_tau)
    print(f"{name:26s} " + "  ".join(f"{t:.3f}" for t in taus))

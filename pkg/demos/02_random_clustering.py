#!/usr/bin/env python3
"""Random clustering: copy a baseline encoding's size profile, then shuffle.

Builds the size distribution from Metaphone over a small vocabulary,
partitions the vocabulary at random with that exact size multiset, and
shows the uniform variant at several cluster-count fractions.
"""

from collections import Counter

from phonoprep.clustering import (
    derive_size_distribution,
    encode_with_clusters,
    random_cluster,
    random_cluster_uniform,
)
from phonoprep.encoders import metaphone_encode

VOCAB = [
    "body", "but", "bad", "bat", "bead", "speak", "space", "suppose",
    "night", "knight", "note", "net", "nut", "knit",
    "care", "car", "cry", "crow", "core", "chair",
]

print("=== Baseline: how many words share each Metaphone code ===")
groups = Counter(metaphone_encode(w) for w in VOCAB)
for code, size in sorted(groups.items(), key=lambda kv: -kv[1]):
    members = [w for w in VOCAB if metaphone_encode(w) == code]
    print(f"  {code:6s} size {size}: {', '.join(members)}")

dist = derive_size_distribution(VOCAB, metaphone_encode)
print(f"\nsize multiset: {sorted(dist.multiplicities, reverse=True)}")

print("\n=== Random clusters with the same size multiset ===")
model = random_cluster(VOCAB, dist, seed=42)
clusters: dict[str, list[str]] = {}
for word, cid in model.assignment.items():
    clusters.setdefault(cid, []).append(word)
for cid in sorted(clusters, key=lambda c: -len(clusters[c])):
    print(f"  {cid:4s} size {len(clusters[cid])}: {', '.join(sorted(clusters[cid]))}")
print(f"cluster sizes match baseline: "
      f"{model.cluster_sizes() == sorted(dist.multiplicities, reverse=True)}")

print("\n=== Encoding a sentence with the cluster map ===")
sentence = "body and bat speak".split()
print(f"  {sentence} -> {encode_with_clusters(sentence, model)}")
print("  (unknown words map to G_UNK; the same word always gets the same id)")

print("\n=== Uniform random clustering at different fractions ===")
for fraction in (0.2, 0.4, 0.6, 0.8, 1.0):
    m = random_cluster_uniform(VOCAB, fraction=fraction, seed=1)
    sizes = m.cluster_sizes()
    print(f"  fraction {fraction}: {m.num_clusters} clusters, "
          f"avg size {len(VOCAB) / m.num_clusters:.2f}, sizes {sizes}")

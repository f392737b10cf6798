"""k-means, k-means++ and the jump-based k-means-u / k-means-u* refinements."""

from .core import Dataset, Partition, assign, centroid, sse
from .jumps import JumpConfig, JumpTrace, run_kms, run_kmu, utilities
from .kmeans import LloydConfig, LloydResult, kmeans, run_lloyd, seed_random
from .seeding import SeedingConfig, kmpp, seed_kmpp

__all__ = [
    "Dataset", "Partition", "assign", "centroid", "sse",
    "JumpConfig", "JumpTrace", "run_kms", "run_kmu", "utilities",
    "LloydConfig", "LloydResult", "kmeans", "run_lloyd", "seed_random",
    "SeedingConfig", "kmpp", "seed_kmpp",
]

__version__ = "0.1.0"

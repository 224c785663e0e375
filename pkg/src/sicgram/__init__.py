"""Self-intersection census of curves on the punctured torus."""

from sicgram.census import ENGINE_VERSION, Histogram, merge, run_shard
from sicgram.diagnostics import DistributionDiagnostics, diagnostics
from sicgram.intersection import PUNCTURED_TORUS, SurfaceOrder, self_intersection
from sicgram.words import CyclicWord, Letter, count_classes, enumerate_classes

__all__ = [
    "ENGINE_VERSION",
    "PUNCTURED_TORUS",
    "CyclicWord",
    "DistributionDiagnostics",
    "Histogram",
    "Letter",
    "SurfaceOrder",
    "count_classes",
    "diagnostics",
    "enumerate_classes",
    "merge",
    "run_shard",
    "self_intersection",
]

"""Shape statistics of a census histogram."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from sicgram.census import Histogram


@dataclass(frozen=True)
class DistributionDiagnostics:
    total: int
    mean: float
    variance: float
    skewness: float | None  # None when the variance is zero
    excess_kurtosis: float | None
    fit_distance: float

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> DistributionDiagnostics:
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})


def raw_moments(h: Histogram) -> tuple[int, int, int, int, int]:
    """Exact sums of ``count * k**p`` for p = 0..4."""
    sums = [0] * 5
    for k, count in h.bins.items():
        for p in range(5):
            sums[p] += count * k**p
    return tuple(sums)


def normal_masses(mean: float, variance: float, support: int) -> list[float]:
    """Normal density at 0..support, renormalized to sum to one."""
    weights = [math.exp(-((k - mean) ** 2) / (2 * variance)) for k in range(support + 1)]
    z = math.fsum(weights)
    return [x / z for x in weights]


def diagnostics(h: Histogram) -> DistributionDiagnostics:
    s0, s1, s2, s3, s4 = raw_moments(h)
    if s0 == 0:
        raise ValueError("diagnostics of an empty histogram")
    mu = Fraction(s1, s0)
    e2, e3, e4 = Fraction(s2, s0), Fraction(s3, s0), Fraction(s4, s0)
    m2 = e2 - mu**2
    m3 = e3 - 3 * mu * e2 + 2 * mu**3
    m4 = e4 - 4 * mu * e3 + 6 * mu**2 * e2 - 3 * mu**4
    if m2 == 0:
        return DistributionDiagnostics(s0, float(mu), 0.0, None, None, 1.0)
    skew = float(m3) / float(m2) ** 1.5
    kurt = float(m4 / m2**2 - 3)
    top = max(h.bins)
    q = normal_masses(float(mu), float(m2), top)
    tv = 0.5 * math.fsum(abs(Fraction(h.bins.get(k, 0), s0) - q[k]) for k in range(top + 1))
    return DistributionDiagnostics(s0, float(mu), float(m2), skew, kurt, float(tv))


def is_unimodal(h: Histogram) -> bool:
    """Counts over 0..max k rise weakly to a peak and then fall weakly."""
    counts = [h.bins.get(k, 0) for k in range(max(h.bins) + 1)]
    peak = counts.index(max(counts))
    rising = all(counts[i] <= counts[i + 1] for i in range(peak))
    falling = all(counts[i] >= counts[i + 1] for i in range(peak, len(counts) - 1))
    return rising and falling

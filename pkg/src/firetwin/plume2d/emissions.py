"""PM2.5 emission assumptions per incident category.

These defaults are order-of-magnitude engineering values, not measured
emission factors; each deployment should review and override them in
config. The only property downstream code relies on is that vegetation
fires emit far more than small contained fires.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EmissionSpec:
    q: float  # µg/s of PM2.5
    radius: float  # effective source radius, m
    duration_h: float

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"emission rate {self.q} must be positive")


class EmissionProfile:
    """Ordered substring patterns over the incident category, first match
    wins; unmatched categories get the default spec."""

    def __init__(self, patterns: list[tuple[str, EmissionSpec]], default: EmissionSpec):
        for pattern, spec in patterns:
            if not pattern:
                raise ValueError("empty category pattern")
            assert spec.q > 0  # EmissionSpec already validated
        self.patterns = list(patterns)
        self.default = default

    def lookup(self, category: str) -> EmissionSpec:
        needle = category.lower()
        for pattern, spec in self.patterns:
            if pattern in needle:
                return spec
        return self.default


DEFAULT_PROFILE = EmissionProfile(
    patterns=[
        ("brush", EmissionSpec(q=4.0e7, radius=20.0, duration_h=3.0)),
        ("grass", EmissionSpec(q=4.0e7, radius=20.0, duration_h=3.0)),
        ("wildland", EmissionSpec(q=4.0e7, radius=25.0, duration_h=3.0)),
        ("forest", EmissionSpec(q=4.0e7, radius=25.0, duration_h=3.0)),
        ("structure", EmissionSpec(q=1.5e7, radius=12.0, duration_h=2.0)),
        ("building", EmissionSpec(q=1.5e7, radius=12.0, duration_h=2.0)),
        ("house", EmissionSpec(q=1.5e7, radius=10.0, duration_h=2.0)),
        ("vehicle", EmissionSpec(q=5.0e6, radius=5.0, duration_h=1.0)),
        ("auto", EmissionSpec(q=5.0e6, radius=5.0, duration_h=1.0)),
        ("car ", EmissionSpec(q=5.0e6, radius=5.0, duration_h=1.0)),
        ("dumpster", EmissionSpec(q=2.0e6, radius=3.0, duration_h=1.0)),
        ("trash", EmissionSpec(q=2.0e6, radius=3.0, duration_h=1.0)),
        ("rubbish", EmissionSpec(q=2.0e6, radius=3.0, duration_h=1.0)),
        ("appliance", EmissionSpec(q=5.0e5, radius=2.0, duration_h=0.5)),
        ("cooking", EmissionSpec(q=5.0e5, radius=2.0, duration_h=0.5)),
    ],
    default=EmissionSpec(q=5.0e6, radius=5.0, duration_h=1.0),
)

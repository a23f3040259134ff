"""Seeded synthetic microcell workloads.

Random stream contract (so other implementations can reproduce scenarios bit
for bit): ``numpy.random.SeedSequence(seed).spawn(2)`` yields two children;
child 0 seeds a ``numpy.random.Generator(PCG64)`` for providers and child 1
one for consumers. Each stream draws, in this order:

1. arrival counts: one ``poisson(rate)`` per hour of the window (rates cycle
   when the window is longer than the list), or nothing if an exact count is
   configured;
2. arrival minutes: ``integers(hour_start, hour_end)`` per arrival, hour by
   hour, or ``integers(w0, w1)`` for all of them under an exact count; the
   arrivals are then sorted;
3. stay lengths: ``integers(stay_lo, stay_hi + 1)``, one per arrival;
4. energies: ``uniform(lo, hi)``, one per arrival.

An entity ends at ``min(arrival + stay, w1)``. Because the two entity kinds
use separate streams, changing the consumer count leaves the providers of a
given seed untouched.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .model import EnergyRequest, EnergyService, Scenario, ScenarioError, make_scenario

RNG_ALGORITHM = "numpy PCG64 via SeedSequence(seed).spawn(2)"


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    # one scarce hour: a few long-staying providers, demand well above supply
    window: tuple[int, int] = (0, 60)
    provider_rates: tuple[float, ...] = (6.0,)
    consumer_rates: tuple[float, ...] = (10.0,)
    stay_duration: tuple[int, int] = (30, 60)
    service_dec: tuple[float, float] = (20.0, 60.0)
    request_re: tuple[float, float] = (300.0, 1800.0)
    n_services: int | None = None
    n_requests: int | None = None

    def __post_init__(self):
        for name in ("window", "provider_rates", "consumer_rates", "stay_duration",
                     "service_dec", "request_re"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        w0, w1 = self.window
        if not w0 < w1:
            raise ScenarioError(f"degenerate window {self.window}")
        for name in ("stay_duration", "service_dec", "request_re"):
            lo, hi = getattr(self, name)
            if lo < 0 or lo > hi:
                raise ValueError(f"{name}: invalid range ({lo}, {hi})")
        if self.stay_duration[0] < 1:
            raise ValueError("stay_duration must be at least one minute")
        if self.request_re[0] <= 0:
            raise ValueError("request_re must be strictly positive")
        for name in ("provider_rates", "consumer_rates"):
            rates = getattr(self, name)
            if not rates or any(r < 0 for r in rates):
                raise ValueError(f"{name}: need at least one non-negative rate")
        for name in ("n_services", "n_requests"):
            n = getattr(self, name)
            if n is not None and n < 0:
                raise ValueError(f"{name} must be >= 0")

    def replace(self, **changes) -> "GenConfig":
        data = asdict(self)
        data.update(changes)
        return GenConfig(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _arrivals(rng: np.random.Generator, window, rates, exact: int | None) -> np.ndarray:
    w0, w1 = window
    if exact is not None:
        times = rng.integers(w0, w1, size=exact)
    else:
        hours = range(w0, w1, 60)
        counts = [rng.poisson(rates[k % len(rates)]) for k, _ in enumerate(hours)]
        times = np.concatenate([
            rng.integers(h, min(h + 60, w1), size=n) for h, n in zip(hours, counts)
        ]) if counts else np.zeros(0, dtype=np.int64)
    return np.sort(times)


def _draw(rng, window, rates, exact, stay, energy):
    starts = _arrivals(rng, window, rates, exact)
    stays = rng.integers(stay[0], stay[1] + 1, size=len(starts))
    amounts = rng.uniform(energy[0], energy[1], size=len(starts))
    ends = np.minimum(starts + stays, window[1])
    return [(int(s), int(e), float(a)) for s, e, a in zip(starts, ends, amounts)]


def generate(config: GenConfig) -> Scenario:
    provider_seq, consumer_seq = np.random.SeedSequence(config.seed).spawn(2)
    providers = _draw(np.random.Generator(np.random.PCG64(provider_seq)), config.window,
                      config.provider_rates, config.n_services, config.stay_duration,
                      config.service_dec)
    consumers = _draw(np.random.Generator(np.random.PCG64(consumer_seq)), config.window,
                      config.consumer_rates, config.n_requests, config.stay_duration,
                      config.request_re)
    services = [EnergyService(f"S{k + 1}", f"P{k + 1}", s, e, a)
                for k, (s, e, a) in enumerate(providers)]
    requests = [EnergyRequest(f"R{k + 1}", s, e, a, k)
                for k, (s, e, a) in enumerate(consumers)]
    return make_scenario(config.window, services, requests)


def trial_seed(base_seed: int, trial: int) -> int:
    """Independent 64-bit seed for trial ``trial`` of a sweep."""
    return int(np.random.SeedSequence([base_seed, trial]).generate_state(1, np.uint64)[0])


__all__ = ["GenConfig", "RNG_ALGORITHM", "generate", "trial_seed"]

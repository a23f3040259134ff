"""Bundled scenarios.

``comparison_scenario`` is a four-request, two-provider microcell over
[300, 390) on which the strategies separate clearly on wastage and
fairness. Hand-checked results (fulfillment % of R1..R4, wastage %, sigma):

    FCFS     100    0  100    0   50.00  50.00
    P_FCFS   100   67  100   60   15.79  18.48
    RR        50  100   67  100   18.42  21.65
    MAXMIN   100   67  100   60   15.79  18.48
    FACES    100   67  100  100   10.53  14.43
    NFACES    50  100  100  100   10.53  21.65

S1 delivers 20 mAh/min on [315, 335), so R1 and R2 share 200 mAh on
[320, 330). With only two providers FCFS can serve at most two requests in
full, so its last column cannot reach 100.
"""

from __future__ import annotations

from importlib import resources

from .model import Scenario, load_scenario


def _load(name: str) -> Scenario:
    return load_scenario(resources.files("faces.data").joinpath(name).read_text())


def comparison_scenario() -> Scenario:
    return _load("comparison.json")


__all__ = ["comparison_scenario"]

"""Mean / sample-SD helpers shared by the report and annotation layers."""

import math
from typing import Sequence


def mean(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("mean of empty sequence")
    return sum(values) / len(values)


def sample_sd(values: Sequence[float]) -> float:
    """Sample standard deviation (n-1 denominator); 0.0 for a single point."""
    n = len(values)
    if n == 0:
        raise ValueError("sd of empty sequence")
    if n == 1:
        return 0.0
    m = mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / (n - 1))

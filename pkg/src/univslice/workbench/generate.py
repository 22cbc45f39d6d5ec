"""Synthetic clustered posting lists."""
from __future__ import annotations

import numpy as np

from ..errors import InfeasibleParameters
from ..sequence import MAX_U32, validate_sequence
from .collection import Collection


def clustered_list(rng: np.random.Generator, last: int, n: int, run_prob: float, gap_mean: float) -> np.ndarray:
    """``n`` values ending exactly at ``last``.

    Gaps are 1 with probability ``run_prob``, otherwise geometric with mean
    ``gap_mean``; the non-unit gaps and the leading offset are then scaled
    so the values span ``[0, last]``.
    """
    if n == 1:
        return np.array([last], dtype=np.int64)
    unit = rng.random(n - 1) < run_prob
    weights = rng.geometric(1.0 / gap_mean, size=int((~unit).sum()) + 1).astype(np.float64)
    spare = last - (n - 1)
    cum = np.round(np.cumsum(weights) / weights.sum() * spare).astype(np.int64)
    extra = np.diff(np.r_[0, cum])
    gaps = np.ones(n - 1, dtype=np.int64)
    gaps[~unit] += extra[1:]
    return extra[0] + np.r_[0, np.cumsum(gaps)]


def generate_clustered(count: int, u: int, target_density: float, run_prob: float = 0.5,
                       gap_mean: float = 8.0, seed: int = 0, density_spread: float = 0.0) -> Collection:
    """A collection of ``count`` clustered lists over ``[0, u)``.

    Each list ends uniformly in ``[u/2, u)``; its length is chosen so its
    density is ``target_density`` (times ``10**uniform(-spread, spread)``
    when ``density_spread`` is set).
    """
    if count < 1:
        raise InfeasibleParameters("need at least one list")
    if not 2 <= u <= MAX_U32:
        raise InfeasibleParameters(f"universe {u} outside [2, 2^32 - 1]")
    if not 0.0 < run_prob < 1.0:
        raise InfeasibleParameters("run probability must lie in (0, 1)")
    if gap_mean <= 1.0:
        raise InfeasibleParameters("gap mean must exceed 1")
    if not 0.0 < target_density <= 1.0 or density_spread < 0:
        raise InfeasibleParameters(f"density {target_density} unreachable")
    rng = np.random.default_rng(seed)
    lists = []
    for _ in range(count):
        d = target_density * 10 ** rng.uniform(-density_spread, density_spread)
        last = int(rng.integers(u // 2, u))
        n = max(1, round(d * last))
        if n > last + 1:
            raise InfeasibleParameters(f"density {d:.3g} needs {n} values below {last + 1}")
        lists.append(validate_sequence(clustered_list(rng, last, n, run_prob, gap_mean), u - 1))
    return Collection(u, lists)

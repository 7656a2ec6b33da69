"""Random prime generation by rejection, with stopping-time accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from sigforge.numtheory import miller_rabin
from sigforge.sampling import MuSpec, RngStream, SumOfTwoUniform, UniformPow, sample_mu
from sigforge.timing import clock

CANDIDATE_CAP = 10**6


class CandidateCapExceeded(RuntimeError):
    pass


def default_rounds(mu: MuSpec) -> int:
    """ceil(sqrt(log of the upper end of the support))."""
    if isinstance(mu, UniformPow):
        return max(1, math.ceil(math.sqrt(mu.N * math.log(mu.L))))
    if isinstance(mu, SumOfTwoUniform):
        return max(1, math.ceil(math.sqrt(mu.N * math.log(2))))
    raise TypeError(f"unknown candidate law {mu!r}")


@dataclass(frozen=True)
class PrimeGenConfig:
    mu: MuSpec
    m_rounds: Optional[int] = None
    candidate_cap: int = CANDIDATE_CAP

    def __post_init__(self):
        if self.m_rounds is not None and self.m_rounds < 1:
            raise ValueError("m_rounds must be >= 1")

    @property
    def rounds(self) -> int:
        return self.m_rounds if self.m_rounds is not None else default_rounds(self.mu)


@dataclass(frozen=True)
class PrimeGenRecord:
    prime: int
    tau: int
    mr_rounds_total: int
    wall_seconds: float

    def signature_time(self, c: float = 1.0) -> float:
        """Default hardware-free running time: MR rounds plus c per candidate."""
        return self.mr_rounds_total + c * self.tau


@dataclass(frozen=True)
class ModelTimeParams:
    c: float = 1.0
    t1: float = 1.0
    tM: float = 1.0

    def __post_init__(self):
        if min(self.c, self.t1, self.tM) < 0:
            raise ValueError("model time costs must be non-negative")


def generate_prime(cfg: PrimeGenConfig, rng: RngStream) -> PrimeGenRecord:
    """Sample candidates from ``cfg.mu`` until one passes ``M`` Miller-Rabin rounds.

    A candidate is dropped at its first failed round. ``tau`` counts every
    candidate drawn, the accepted one included.
    """
    M = cfg.rounds
    tau = 0
    total = 0
    t0 = clock()
    while True:
        tau += 1
        if tau > cfg.candidate_cap:
            raise CandidateCapExceeded(f"no prime after {cfg.candidate_cap} candidates")
        x = sample_mu(cfg.mu, rng)
        ok, executed = miller_rabin(x, M, rng)
        total += executed
        if ok:
            return PrimeGenRecord(x, tau, total, clock() - t0)


def model_time(rec: PrimeGenRecord, params: ModelTimeParams) -> float:
    """c*tau + (tau - 1)*t1 + tM, with deterministic per-round costs."""
    return params.c * rec.tau + (rec.tau - 1) * params.t1 + params.tM

"""Seeded Monte-Carlo estimation of the certification and discrimination games.

`run_cert` estimates the probability that the verifier accepts the
certificate; `run_discr` estimates the adversary's chance of guessing
which of two messages the protocol ran on, conditioned on acceptance.
Analytic references from `bounds` are attached whenever a closed form is
known, so every estimate ships with the value it should be compared to.

Trials are processed in fixed-size batches; batch b draws from a stream
derived from (seed, b), so a run is reproducible from its config alone and
batches could be distributed across workers without changing the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import bounds
from ._engine import BatchTally, run_batch
from .encoding import as_bits
from .parties import (
    AdversaryStrategy,
    Custom,
    FirstBit,
    NoOp,
    RectilinearSample,
    Task,
    adversary_label,
)

#: Trials per derived random stream. Fixed so results do not depend on
#: scheduling; changing it changes the streams and therefore the samples.
BATCH_TRIALS = 4096

_Z95 = 1.959963984540054


def stream_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sub-stream `index` of master seed `seed`."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def wilson_halfwidth(successes: int, trials: int, z: float = _Z95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return math.nan
    p = successes / trials
    z2 = z * z
    return (z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))) / (
        1.0 + z2 / trials
    )


def runs_test_pvalue(bits) -> float:
    """Two-sided Wald-Wolfowitz runs test p-value for a binary sequence."""
    b = np.asarray(bits)
    total = b.size
    ones = int(b.sum())
    zeros = total - ones
    if zeros == 0 or ones == 0:
        return 0.0
    runs = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    mu = 1.0 + 2.0 * zeros * ones / total
    var = (
        2.0 * zeros * ones * (2.0 * zeros * ones - total)
        / (total * total * (total - 1.0))
    )
    if var <= 0:
        return 0.0
    z = (runs - mu) / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


@dataclass(frozen=True, slots=True)
class FixedMessage:
    bits: str

    def realize(self, m: int) -> np.ndarray:
        arr = as_bits(self.bits)
        if arr.size != m:
            raise ValueError(f"fixed message has length {arr.size}, expected {m}")
        return arr


@dataclass(frozen=True, slots=True)
class UniformMessage:
    pass


MessageSource = Union[FixedMessage, UniformMessage]


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n: int
    task: Task = Task.STORAGE
    adversary: AdversaryStrategy = NoOp()
    trials: int = 10_000
    seed: int = 0
    message_source: MessageSource = UniformMessage()

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if isinstance(self.message_source, FixedMessage):
            self.message_source.realize(self.m)


@dataclass(frozen=True)
class ExperimentReport:
    """Monte-Carlo estimate with its interval and analytic reference.

    `estimate` is the acceptance rate for certification runs; for
    discrimination runs it is P[correct guess | accepted] with
    `conditioned_on` set to "CERT", and the unconditioned rate, the
    acceptance rate and the security product
    P[CERT] * (P[DISCR | CERT] - 1/2) ride along.
    """

    estimate: float
    trials: int
    ci95_halfwidth: float
    analytic_reference: Optional[float] = None
    conditioned_on: Optional[str] = None
    cert_estimate: Optional[float] = None
    unconditioned_estimate: Optional[float] = None
    security_product: Optional[float] = None
    accepted_trials: Optional[int] = None
    error: Optional[str] = None

    @property
    def degenerate(self) -> bool:
        return isinstance(self.estimate, float) and math.isnan(self.estimate)


def _iter_batches(config: ExperimentConfig, legit: Optional[np.ndarray]) -> BatchTally:
    fixed = None
    if isinstance(config.message_source, FixedMessage):
        fixed = config.message_source.realize(config.m)
    accepted = correct = correct_accepted = 0
    done = 0
    batch_index = 0
    while done < config.trials:
        t = min(BATCH_TRIALS, config.trials - done)
        rng = stream_rng(config.seed, batch_index)
        tally = run_batch(
            config.m,
            config.n,
            config.task,
            config.adversary,
            t,
            rng,
            fixed_message=fixed,
            legit=legit,
        )
        accepted += tally.accepted
        correct += tally.correct
        correct_accepted += tally.correct_accepted
        done += t
        batch_index += 1
    return BatchTally(accepted, correct, correct_accepted)


def run_cert(config: ExperimentConfig) -> ExperimentReport:
    """Estimate P[certificate accepted] over independent protocol runs."""
    tally = _iter_batches(config, None)
    estimate = tally.accepted / config.trials
    return ExperimentReport(
        estimate=estimate,
        trials=config.trials,
        ci95_halfwidth=wilson_halfwidth(tally.accepted, config.trials),
        analytic_reference=bounds.analytic_cert_probability(
            config.m, config.n, config.adversary
        ),
    )


def run_discr(config: ExperimentConfig, legit) -> ExperimentReport:
    """Estimate the adversary's discrimination success, conditioned on acceptance.

    Each trial runs the protocol on `legit` or on a fresh uniform dummy of
    the same length with equal probability; the strategy's guessing rule
    maps the eavesdrop record to a guess. With zero accepted trials the
    conditional estimate is degenerate (NaN).
    """
    legit_arr = as_bits(legit)
    if legit_arr.size != config.m:
        raise ValueError(f"legit message length {legit_arr.size} != m={config.m}")
    tally = _iter_batches(config, legit_arr)
    cert_rate = tally.accepted / config.trials
    uncond = tally.correct / config.trials
    if tally.accepted > 0:
        conditional = tally.correct_accepted / tally.accepted
        halfwidth = wilson_halfwidth(tally.correct_accepted, tally.accepted)
        product = cert_rate * (conditional - 0.5)
    else:
        conditional = math.nan
        halfwidth = math.nan
        product = math.nan
    analytic = None
    if isinstance(config.adversary, FirstBit):
        analytic = bounds.firstbit_conditional_success(config.m, config.n)
    elif isinstance(config.adversary, NoOp):
        analytic = 0.5
    return ExperimentReport(
        estimate=conditional,
        trials=config.trials,
        ci95_halfwidth=halfwidth,
        analytic_reference=analytic,
        conditioned_on="CERT",
        cert_estimate=cert_rate,
        unconditioned_estimate=uncond,
        security_product=product,
        accepted_trials=tally.accepted,
    )


def derive_seed(master_seed: int, index: int) -> int:
    """Deterministic child seed for position `index` under a master seed."""
    return int(np.random.SeedSequence((master_seed, index)).generate_state(1)[0])


def sweep(
    configs: list[ExperimentConfig], master_seed: Optional[int] = None
) -> list[ExperimentReport]:
    """Run every certification config; per-config failures do not abort the sweep.

    With `master_seed` given, config i runs under a counter-derived seed so
    the whole sweep is reproducible from one number.
    """
    if not configs:
        raise ValueError("sweep needs at least one config")
    reports: list[ExperimentReport] = []
    for index, config in enumerate(configs):
        if master_seed is not None:
            config = replace(config, seed=derive_seed(master_seed, index))
        try:
            reports.append(run_cert(config))
        except Exception as exc:  # noqa: BLE001 - sweep must keep going
            reports.append(
                ExperimentReport(
                    estimate=math.nan,
                    trials=0,
                    ci95_halfwidth=math.nan,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return reports


REPORT_COLUMNS = (
    "m",
    "n",
    "task",
    "adversary",
    "r",
    "trials",
    "estimate",
    "ci95",
    "analytic",
    "product",
    "seed",
)


def attacked_count(strategy: AdversaryStrategy) -> int:
    if isinstance(strategy, RectilinearSample):
        return strategy.r
    if isinstance(strategy, FirstBit):
        return 1
    if isinstance(strategy, Custom):
        return int(strategy.positions.size)
    return 0


def report_row(config: ExperimentConfig, report: ExperimentReport) -> dict:
    """Self-describing row: full parameter set plus the report values."""
    return {
        "m": config.m,
        "n": config.n,
        "task": config.task.value,
        "adversary": adversary_label(config.adversary),
        "r": attacked_count(config.adversary),
        "trials": report.trials,
        "estimate": report.estimate,
        "ci95": report.ci95_halfwidth,
        "analytic": report.analytic_reference,
        "product": report.security_product,
        "seed": config.seed,
    }

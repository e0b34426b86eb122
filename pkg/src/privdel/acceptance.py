"""Acceptance suite: every headline property checked at its stated tolerance.

Each criterion is a function returning a `CriterionResult`; `run_all`
executes them in order. The same checks back the CLI `--check` flag and
the test suite, so one command reproduces all the headline numbers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from . import auth, bounds
from .encoding import generate_key, encode, key_length_bits, random_message
from .experiments import (
    ExperimentConfig,
    run_cert,
    run_discr,
    runs_test_pvalue,
    stream_rng,
)
from .qubit import Basis
from .parties import (
    Custom,
    FirstBit,
    HONEST,
    RectilinearSample,
    Task,
    adversary_intervene,
    prover_respond,
    verify,
)

SEED = 20260810


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str


# --------------------------------------------------------------------------
# 1. noiseless correctness: honest runs always accept


def check_honest_correctness(trials: int = 100_000) -> CriterionResult:
    failures = []
    for m, n in ((10, 2), (100, 20), (1000, 50)):
        for task in (Task.STORAGE, Task.ERASURE):
            report = run_cert(
                ExperimentConfig(
                    m=m, n=n, task=task, trials=trials, seed=SEED + m + n
                )
            )
            if report.estimate != 1.0:
                failures.append((m, n, task.value, report.estimate))
    detail = (
        f"honest accepts {trials}/{trials} for all 6 (m,n,task) configurations"
        if not failures
        else f"non-unit acceptance at {failures}"
    )
    return CriterionResult("honest_correctness", not failures, detail)


# --------------------------------------------------------------------------
# 2. exact detection law for uniform rectilinear sampling


def _snap_probability(value: float) -> Fraction:
    """Map a squared overlap of conjugate-coding states to its exact value."""
    for exact in (Fraction(0), Fraction(1, 2), Fraction(1)):
        if abs(value - float(exact)) < 1e-9:
            return exact
    raise AssertionError(f"unexpected overlap probability {value!r}")


def _trap_survival_factor() -> Fraction:
    """P[one measured trap still verifies], from the state geometry alone.

    Averages over the trap value and the adversary's outcome branches:
    branch probability |<rect_o|diag_t>|^2, then verifier match
    probability |<diag_t|rect_o>|^2.
    """
    from .qubit import EIGENSTATES

    total = Fraction(0)
    for trap_value in (0, 1):
        trap_state = EIGENSTATES[Basis.DIAGONAL, trap_value]
        for outcome in (0, 1):
            rect_state = EIGENSTATES[Basis.RECTILINEAR, outcome]
            branch = _snap_probability(float(np.dot(rect_state, trap_state)) ** 2)
            match = _snap_probability(float(np.dot(trap_state, rect_state)) ** 2)
            total += Fraction(1, 2) * branch * match
    return total


def enumerated_cert_fraction(m: int, n: int, r: int) -> Fraction:
    """Brute-force acceptance probability: every position choice, every branch.

    Traps sit at the first n positions (the uniform adversary choice makes
    the placement irrelevant); each r-subset contributes the product of
    per-trap survival factors, each factor itself enumerated from the
    Born-rule geometry. Exact rational arithmetic throughout.
    """
    survival = _trap_survival_factor()
    total = Fraction(0)
    count = 0
    for subset in itertools.combinations(range(m + n), r):
        hits = sum(1 for p in subset if p < n)
        total += survival**hits
        count += 1
    return total / count


def check_sampling_exact_law(trials: int = 100_000) -> CriterionResult:
    problems = []
    # Monte Carlo against the closed form, 3 sigma at the exact p
    for m in (50, 100):
        for n in (10, 20):
            total = m + n
            for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
                r = round(frac * total)
                p = bounds.cert_exact(m, n, r)
                sigma = math.sqrt(p * (1.0 - p) / trials)
                report = run_cert(
                    ExperimentConfig(
                        m=m,
                        n=n,
                        adversary=RectilinearSample(r),
                        trials=trials,
                        seed=SEED + 7 * m + 13 * n + r,
                    )
                )
                if abs(report.estimate - p) > 3.0 * sigma:
                    problems.append(
                        f"MC m={m} n={n} r={r}: {report.estimate} vs {p} (3s={3*sigma:.2e})"
                    )
    # exhaustive enumeration oracle, exact match for all m+n <= 12
    checked = 0
    for total in range(1, 13):
        for n in range(0, total + 1):
            m = total - n
            for r in range(0, total + 1):
                expected = enumerated_cert_fraction(m, n, r)
                if bounds.cert_exact_fraction(m, n, r) != expected:
                    problems.append(f"rational mismatch at m={m} n={n} r={r}")
                if abs(bounds.cert_exact(m, n, r) - float(expected)) > 1e-12:
                    problems.append(f"float mismatch at m={m} n={n} r={r}")
                checked += 1
    detail = (
        f"20 grid points within 3 sigma of the exact law; "
        f"enumeration oracle matched exactly at {checked} small instances"
        if not problems
        else "; ".join(problems[:4])
    )
    return CriterionResult("sampling_exact_law", not problems, detail)


# --------------------------------------------------------------------------
# 3. tail bound dominates the exact law


def check_sampling_tail_bound() -> CriterionResult:
    problems = []
    compared = 0
    for m in (50, 100):
        for n in (10, 20):
            total = m + n
            for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
                r = round(frac * total)
                exact = bounds.cert_exact(m, n, r)
                for eps in (0.1, 0.5, 1.0, 2.0, 5.0):
                    raw = bounds.hoeffding_bound(m, n, r, eps).raw
                    if raw <= 1.0:
                        compared += 1
                        if exact > raw:
                            problems.append(
                                f"m={m} n={n} r={r} eps={eps}: exact {exact} > bound {raw}"
                            )
    detail = (
        f"exact law dominated by the raw bound at all {compared} non-vacuous grid points"
        if not problems
        else "; ".join(problems[:4])
    )
    return CriterionResult("sampling_tail_bound", not problems, detail)


# --------------------------------------------------------------------------
# 4. first-bit probe: acceptance, conditional advantage, security product


def check_firstbit_attack(trials: int = 1_000_000) -> CriterionResult:
    m, n = 90, 10
    legit = "0" * m
    report = run_discr(
        ExperimentConfig(
            m=m, n=n, adversary=FirstBit(), trials=trials, seed=SEED + 4
        ),
        legit,
    )
    cert_expected = bounds.firstbit_cert(m, n)  # 0.95
    adv_expected = bounds.firstbit_conditional_success(m, n) - 0.5  # 9/38
    product_expected = bounds.firstbit_advantage(m, n)  # 0.225, met with equality
    advantage = report.estimate - 0.5
    problems = []
    if abs(report.cert_estimate - cert_expected) > 0.01:
        problems.append(f"cert {report.cert_estimate:.4f} != {cert_expected} +-0.01")
    if abs(advantage - adv_expected) > 0.01:
        problems.append(f"advantage {advantage:.4f} != {adv_expected:.4f} +-0.01")
    if advantage < product_expected:
        # the conditional advantage must clear the closed-form floor
        problems.append(f"advantage {advantage:.4f} below floor {product_expected}")
    if abs(report.security_product - product_expected) > 0.01:
        problems.append(
            f"product {report.security_product:.4f} != {product_expected} +-0.01"
        )
    detail = (
        f"cert {report.cert_estimate:.4f} (ref {cert_expected}), "
        f"conditional advantage {advantage:.4f} (ref {adv_expected:.4f}), "
        f"security product {report.security_product:.4f} (ref {product_expected}); "
        f"{trials} trials"
        if not problems
        else "; ".join(problems)
    )
    return CriterionResult("firstbit_attack", not problems, detail)


# --------------------------------------------------------------------------
# 5. rectilinear transparency: reading every message bit goes undetected


def check_rectilinear_transparency(trials: int = 100_000) -> CriterionResult:
    m, n = 100, 20
    for i in range(trials):
        rng = stream_rng(SEED + 5, i)
        message = random_message(m, rng)
        key = generate_key(m, n, rng)
        state = encode(message, key)
        snoop = Custom(key.non_trap_positions(), Basis.RECTILINEAR)
        state, record = adversary_intervene(state, snoop, rng)
        if not np.array_equal(record.outcomes, message):
            return CriterionResult(
                "rectilinear_transparency", False, f"adversary misread M at trial {i}"
            )
        cert = prover_respond(state, HONEST, Task.STORAGE, rng)
        accepted, recovered = verify(cert, key, rng)
        if not accepted:
            return CriterionResult(
                "rectilinear_transparency", False, f"rejected at trial {i}"
            )
        if not np.array_equal(recovered, message):
            return CriterionResult(
                "rectilinear_transparency", False, f"verifier misread M at trial {i}"
            )
    return CriterionResult(
        "rectilinear_transparency",
        True,
        f"adversary read M and passed certification in {trials}/{trials} runs",
    )


# --------------------------------------------------------------------------
# 6. honest erasure announcements are uniform off the traps


def check_erasure_randomness(pooled_bits: int = 1_000_000) -> CriterionResult:
    m, n = 100, 20
    trials = (pooled_bits + m - 1) // m
    chunks = []
    for i in range(trials):
        rng = stream_rng(SEED + 6, i)
        message = random_message(m, rng)
        key = generate_key(m, n, rng)
        state = encode(message, key)
        cert = prover_respond(state, HONEST, Task.ERASURE, rng)
        accepted, _ = verify(cert, key, rng)
        if not accepted:
            return CriterionResult(
                "erasure_randomness", False, f"honest run rejected at trial {i}"
            )
        chunks.append(cert.announced[key.non_trap_positions()])
    pool = np.concatenate(chunks)[:pooled_bits]
    ones = float(pool.mean())
    tol = 3.0 / (2.0 * math.sqrt(pooled_bits))
    pvalue = runs_test_pvalue(pool)
    passed = abs(ones - 0.5) <= tol and pvalue >= 0.01
    return CriterionResult(
        "erasure_randomness",
        passed,
        f"ones fraction {ones:.5f} (0.5 +- {tol:.5f}), runs test p={pvalue:.3f} "
        f"over {pooled_bits} pooled bits",
    )


# --------------------------------------------------------------------------
# 7. key length accounting


def check_key_length() -> CriterionResult:
    m, n = 10**6, 32
    exact, approx = key_length_bits(m, n)
    oracle = n + math.log2(math.comb(m + n, n))  # exact integer arithmetic
    rel = abs(exact - oracle) / oracle
    approx_rel = abs(approx - exact) / exact
    zero = key_length_bits(m, 0).exact_bits
    problems = []
    if rel > 1e-9:
        problems.append(f"log-gamma value off by {rel:.2e} relative to integer oracle")
    if approx_rel > 0.08:
        # The shorthand n*log2(m) exceeds the exact length by
        # (log2(n!) - n) / exact, which is 15.5% at these sizes; the 8%
        # gate is kept as pinned and cannot pass before m ~ 1e11 at n=32.
        problems.append(
            f"shorthand n*log2(m) = {approx:.1f} is {approx_rel:.2%} from the exact "
            f"{exact:.1f} bits (gate: 8%)"
        )
    if zero != 0.0:
        problems.append(f"n=0 gave {zero}")
    detail = (
        f"exact {exact:.6f} bits vs integer oracle {oracle:.6f} "
        f"(rel {rel:.1e}); shorthand {approx:.1f} within {approx_rel:.2%}; n=0 -> 0"
        if not problems
        else "; ".join(problems)
    )
    return CriterionResult("key_length", not problems, detail)


# --------------------------------------------------------------------------
# 8. one-time MAC: exhaustive forgery bound and round trip


def _gf16_mul_table() -> np.ndarray:
    table = np.zeros((16, 16), dtype=np.uint8)
    for a in range(16):
        for b in range(16):
            table[a, b] = auth.gf_mul(a, b, 4)
    return table


def _hash_class(blocks_per_message: int, table: np.ndarray) -> np.ndarray:
    """H[i, k] = hash of the i-th block-aligned message under hash key k, s=4.

    Messages are all 16^L data-block vectors with the 4L-bit length block
    appended, hashed by Horner with the multiplication table.
    """
    grids = np.meshgrid(
        *([np.arange(16, dtype=np.uint8)] * blocks_per_message), indexing="ij"
    )
    data = np.stack([g.reshape(-1) for g in grids], axis=1)
    length_block = np.full((data.shape[0], 1), 4 * blocks_per_message, np.uint8)
    encoded = np.concatenate([data, length_block], axis=1)
    out = np.zeros((data.shape[0], 16), dtype=np.uint8)
    for k in range(16):
        acc = np.zeros(data.shape[0], dtype=np.uint8)
        for col in range(encoded.shape[1] - 1, -1, -1):
            acc = table[acc ^ encoded[:, col], k]
        out[:, k] = acc
    return out


def _max_multiplicity_ok(diff: np.ndarray, limit: int) -> bool:
    """True iff no row of `diff` holds any value more than `limit` times."""
    d = np.sort(diff, axis=-1)
    if limit >= d.shape[-1]:
        return True
    return not (d[..., limit:] == d[..., : d.shape[-1] - limit]).any()


def check_wegman_carter() -> CriterionResult:
    problems = []
    table = _gf16_mul_table()
    hashes = {L: _hash_class(L, table) for L in (1, 2, 3)}

    # spot check the vectorized oracle against the reference implementation
    rng = stream_rng(SEED + 8, 0)
    for _ in range(200):
        L = int(rng.integers(1, 4))
        idx = int(rng.integers(0, 16**L))
        k = int(rng.integers(0, 16))
        digits = [(idx >> (4 * (L - 1 - j))) & 0xF for j in range(L)]
        bits = "".join(f"{d:04b}" for d in digits)
        expected = auth.poly_hash(auth.message_blocks(bits, 4), k, 4)
        row = int(np.ravel_multi_index(digits, (16,) * L))
        if hashes[L][row, k] != expected:
            problems.append(f"vectorized hash oracle mismatch at L={L}")
            break

    # equal block counts: difference polynomials have degree <= L, so any
    # forgery (M', delta) succeeds for at most L of the 16 hash keys
    for L in (1, 2, 3):
        h = hashes[L]
        zero_row = h[0]  # the all-zero message hashes the shared length term
        diffs = h[1:] ^ zero_row  # all nonzero data differences, by linearity
        if not _max_multiplicity_ok(diffs, L):
            problems.append(f"equal-length forgery beats {L}/16 bound at L={L}")

    # different block counts: the length blocks sit at different degrees,
    # so the difference has degree at most max(L)+1
    for l_small, l_big in ((1, 2), (1, 3), (2, 3)):
        ha, hb = hashes[l_small], hashes[l_big]
        limit = l_big + 1
        step = 512
        for start in range(0, ha.shape[0], step):
            block = ha[start : start + step][:, None, :] ^ hb[None, :, :]
            if not _max_multiplicity_ok(block, limit):
                problems.append(
                    f"cross-length forgery beats {limit}/16 bound at ({l_small},{l_big})"
                )
                break

    # round-trip completeness at s=64
    rng = stream_rng(SEED + 8, 1)
    for i in range(10_000):
        bits = rng.integers(0, 2, int(rng.integers(1, 257)), dtype=np.uint8)
        key = auth.generate_auth_key(64, rng)
        if not auth.verify_tag(bits, auth.tag(bits, key), key):
            problems.append(f"round trip failed at instance {i}")
            break

    # key size is two field elements regardless of message length
    rng = stream_rng(SEED + 8, 2)
    key = auth.generate_auth_key(64, rng)
    short_tag = auth.tag(np.ones(64, dtype=np.uint8), key)
    long_tag = auth.tag(np.ones(4096, dtype=np.uint8), key)
    if len(auth.auth_key_to_hex(key)) * 4 != 128 or short_tag.s != long_tag.s:
        problems.append("key material size depends on message length")

    detail = (
        "exhaustive s=4 forgery sweep respects the degree/16 key-fraction "
        "bound (L<=3, equal and mixed lengths); 10000/10000 round trips at "
        "s=64; key is 2 field elements for any message length"
        if not problems
        else "; ".join(problems[:4])
    )
    return CriterionResult("wegman_carter", not problems, detail)


# --------------------------------------------------------------------------

ALL_CHECKS: tuple[Callable[[], CriterionResult], ...] = (
    check_key_length,
    check_sampling_tail_bound,
    check_wegman_carter,
    check_sampling_exact_law,
    check_honest_correctness,
    check_rectilinear_transparency,
    check_erasure_randomness,
    check_firstbit_attack,
)


def run_all(names: Optional[Iterable[str]] = None) -> list[CriterionResult]:
    wanted = set(names) if names is not None else None
    results = []
    for check in ALL_CHECKS:
        name = check.__name__.removeprefix("check_")
        if wanted is not None and name not in wanted:
            continue
        results.append(check())
    if wanted is not None and not results:
        raise ValueError(f"no criteria match {sorted(wanted)}")
    return results

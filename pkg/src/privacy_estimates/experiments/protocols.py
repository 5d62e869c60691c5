"""Membership distinguishing games and the attacks that play them.

Randomness: every model's stream comes from
``SeedSequence(seed, spawn_key=(purpose, rep, model_id))``, so results do not
depend on the order in which models or replicates are evaluated.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import DegenerateInputError, DomainError
from ..rates import ConfusionTally, OutcomeRecord, tally_from_outcomes
from .mechanisms import Mechanism, RandomizedResponse

_PURPOSE_MODEL, _PURPOSE_POOL, _PURPOSE_PILOT = 0, 1, 2


def derive_rng(seed: int, purpose: int, rep: int = 0, model_id: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(purpose), int(rep), int(model_id)))
    return np.random.default_rng(ss)


class Regime(str, enum.Enum):
    AVERAGE_CASE = "average_case"
    WORST_CASE = "worst_case"


class AttackKind(str, enum.Enum):
    OPTIMAL_RR = "optimal_rr"
    LOSS_THRESHOLD = "loss_threshold"


@dataclass(frozen=True)
class AdversarySpec:
    kind: AttackKind
    alpha_pct: float | None = None
    regime: Regime = Regime.AVERAGE_CASE
    reference_size: int = 200
    pilot_models: int = 32
    pool_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.kind is AttackKind.LOSS_THRESHOLD:
            if self.alpha_pct is None or not (0.0 < self.alpha_pct < 100.0):
                raise DomainError("loss_threshold needs alpha_pct strictly inside (0, 100)")
            if self.reference_size < 1:
                raise DomainError("reference_size must be positive")

    @classmethod
    def optimal_rr(cls, regime: Regime = Regime.AVERAGE_CASE) -> "AdversarySpec":
        return cls(AttackKind.OPTIMAL_RR, regime=regime)

    @classmethod
    def loss_threshold(cls, alpha_pct: float, regime: Regime = Regime.AVERAGE_CASE, **kw) -> "AdversarySpec":
        return cls(AttackKind.LOSS_THRESHOLD, alpha_pct=alpha_pct, regime=regime, **kw)


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n_models: int
    n: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n_models < 1 or self.n < 0:
            raise DomainError("need m >= 1, n_models >= 1 and n >= 0")

    @property
    def total(self) -> int:
        return self.m * self.n_models


@dataclass
class SimulationReport:
    records: list[OutcomeRecord]
    tally: ConfusionTally
    config: dict = field(default_factory=dict)


def percentile_threshold_attack(
    member_scores: Sequence[float], reference_scores: Sequence[float], alpha_pct: float
) -> np.ndarray:
    """Guess "member" for every score at or below the alpha-percentile of the reference."""
    ref = np.asarray(reference_scores, dtype=float)
    if ref.size == 0:
        raise DegenerateInputError("reference population is empty")
    if not (0.0 < alpha_pct < 100.0):
        raise DomainError("alpha_pct must lie strictly inside (0, 100)")
    tau = np.percentile(ref, alpha_pct)
    return np.asarray(member_scores, dtype=float) <= tau


def calibrate_alpha(candidate_alphas: Sequence[float], evaluation: Callable[[float], float]) -> float:
    """Candidate with the largest evaluated lower bound; ties go to the smaller alpha."""
    cands = list(candidate_alphas)
    if not cands:
        raise DomainError("no candidate alphas")
    scores = [evaluation(a) for a in cands]
    best = max(scores)
    return min(a for a, s in zip(cands, scores) if s == best)


# ---------------------------------------------------------------------------


class _Game:
    """Shared state of one run: candidate pool and its worst-case ranking."""

    def __init__(self, mech: Mechanism, adv: AdversarySpec, n: int, m: int, seed: int, rep: int):
        if adv.kind is AttackKind.OPTIMAL_RR and not isinstance(mech, RandomizedResponse):
            raise DomainError("the optimal_rr attack only applies to randomized_response")
        self.mech, self.adv, self.n, self.m = mech, adv, n, m
        self.seed, self.rep = seed, rep
        need = m * mech.pair_size
        size = max(adv.pool_size or 0, 2 * need)
        pool_rng = derive_rng(seed, _PURPOSE_POOL, rep)
        self.pool = mech.draw_candidates(pool_rng, size, offset=n)
        self.reference_offset = n + size
        self.ranking = None
        if adv.regime is Regime.WORST_CASE:
            self.ranking = self._rank_by_loss_gap()

    def _rank_by_loss_gap(self) -> np.ndarray:
        # pilot models on random halves of the pool; rank by mean out-in loss gap
        rng = derive_rng(self.seed, _PURPOSE_PILOT, self.rep)
        k = len(self.pool)
        loss_in = np.zeros(k)
        loss_out = np.zeros(k)
        n_in = np.zeros(k)
        n_out = np.zeros(k)
        for _ in range(self.adv.pilot_models):
            mask = rng.random(k) < 0.5
            base = self.mech.draw_base(rng, self.n)
            model = self.mech.train(np.concatenate([base, self.pool[mask]]), rng)
            losses = self.mech.loss(model, self.pool)
            loss_in += np.where(mask, losses, 0.0)
            loss_out += np.where(mask, 0.0, losses)
            n_in += mask
            n_out += ~mask
        gap = loss_out / np.maximum(n_out, 1) - loss_in / np.maximum(n_in, 1)
        return np.argsort(-gap, kind="stable")

    def play_model(self, model_id: int) -> list[OutcomeRecord]:
        mech, adv, m = self.mech, self.adv, self.m
        rng = derive_rng(self.seed, _PURPOSE_MODEL, self.rep, model_id)
        base = mech.draw_base(rng, self.n)
        need = m * mech.pair_size
        if self.ranking is None:
            idx = rng.choice(len(self.pool), size=need, replace=False)
        else:
            idx = rng.permutation(self.ranking[:need])
        z0, z1 = mech.pair_up(rng, self.pool[idx])
        bits = rng.integers(0, 2, size=m)
        members = np.where(bits[:, None] == 1, z1, z0)
        model = mech.train(np.concatenate([base, members]), rng)
        if adv.kind is AttackKind.OPTIMAL_RR:
            # the released bit at the challenge key is the likelihood-ratio test
            guesses = np.array([model[int(key)] for key in z1[:, 0]], dtype=np.int64)
        else:
            ref = mech.draw_reference(rng, adv.reference_size, self.reference_offset)
            ref_scores = mech.loss(model, ref)
            # each guess sees only its own pair: is z1 the member?
            guesses = percentile_threshold_attack(mech.loss(model, z1), ref_scores, adv.alpha_pct).astype(np.int64)
        return [OutcomeRecord(model_id, i, int(b), int(g)) for i, (b, g) in enumerate(zip(bits, guesses))]


def run_mia_m(mech: Mechanism, adv: AdversarySpec, cfg: ExperimentConfig, rep: int = 0) -> SimulationReport:
    """Train ``n_models`` models, each holding ``m`` challenge members, and guess every one."""
    game = _Game(mech, adv, cfg.n, cfg.m, cfg.seed, rep)
    records: list[OutcomeRecord] = []
    for j in range(cfg.n_models):
        records.extend(game.play_model(j))
    echo = {"mechanism": mech.name, "adversary": adv.kind.value, "rep": rep, **asdict(cfg)}
    return SimulationReport(records, tally_from_outcomes(records), echo)


def run_ind_mia(
    mech: Mechanism, adv: AdversarySpec, trials: int, seed: int, n: int = 10, rep: int = 0
) -> SimulationReport:
    """One fresh model per trial, one challenge pair per model."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    return run_mia_m(mech, adv, ExperimentConfig(m=1, n_models=trials, n=n, seed=seed), rep)

"""Monte-Carlo expected-hypervolume-improvement acquisition (qEHVI), its
noisy variant (qNEHVI) that re-derives the frontier from joint posterior
samples at the observed inputs, the log-smoothed flavor, and batch
optimization over the constrained mixture space.

All randomness flows through scrambled Sobol base samples fixed per seed, so
acquisition values are bit-reproducible and continuous in candidate location.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from mixopt.design_space import Constraints, Mixture, sample_feasible
from mixopt.exceptions import InputShapeError, ValidationError
from mixopt.moo.hypervolume import batch_hypervolume_improvement, box_decomposition
from mixopt.moo.pareto import pareto_filter
from mixopt.objectives import GwpTable, ObjectiveSampler, ObjectiveSpec

log = logging.getLogger("mixopt.moo")

Q_EHVI = "qEHVI"
Q_NEHVI = "qNEHVI"
Q_LOG_NEHVI = "qLogNEHVI"
_VARIANTS = (Q_EHVI, Q_NEHVI, Q_LOG_NEHVI)


@dataclass(frozen=True)
class AcquisitionConfig:
    q: int = 1
    mc_samples: int = 128
    seed: int = 0
    raw_candidates: int = 512
    restarts: int = 4
    variant: str = Q_LOG_NEHVI
    smoothing_temperature: float = 1e-3
    batch_mode: str = "joint"  # or "greedy"
    polish_batches: int = 2
    polish_iters: int = 1

    def __post_init__(self):
        if self.q < 1:
            raise ValidationError("batch size q must be >= 1")
        if self.mc_samples < 64:
            raise ValidationError("mc_samples must be >= 64")
        if self.variant not in _VARIANTS:
            raise ValidationError(f"variant must be one of {_VARIANTS}")
        if self.batch_mode not in ("joint", "greedy"):
            raise ValidationError("batch_mode must be 'joint' or 'greedy'")
        if self.smoothing_temperature <= 0:
            raise ValidationError("smoothing temperature must be positive")


def sobol_normal_samples(n: int, dim: int, seed: int) -> np.ndarray:
    """Scrambled-Sobol standard normal draws of shape (n, dim)."""
    if dim == 0:
        return np.zeros((n, 0))
    engine = qmc.Sobol(d=dim, scramble=True, seed=seed)
    u = engine.random(n)
    tiny = np.finfo(float).tiny
    return ndtri(np.clip(u, tiny, 1.0 - 1e-16))


def _log_softplus(x: np.ndarray, tau: float) -> np.ndarray:
    """log(tau * log1p(exp(x / tau))), numerically stable for x >= 0."""
    z = x / tau
    out = np.empty_like(z)
    big = z > 33.0
    out[big] = np.log(x[big])
    out[~big] = np.log(tau * np.log1p(np.exp(z[~big])))
    return out


def _aggregate(improvements: np.ndarray, variant: str, tau: float) -> float:
    if variant == Q_LOG_NEHVI:
        ls = _log_softplus(np.clip(improvements, 0.0, None), tau)
        m = ls.max()
        return float(m + np.log(np.mean(np.exp(ls - m))))
    return float(np.mean(np.clip(improvements, 0.0, None)))


# ---------------------------------------------------------------------------
# qEHVI against a fixed frontier
# ---------------------------------------------------------------------------


def qehvi(sampler, frontier, reference_point, config: AcquisitionConfig) -> float:
    """MC estimate of E[(HV(P u Y) - HV(P))_+] for a q-point batch.

    ``sampler`` maps standard-normal base samples (S, sampler.sample_dim) to
    objective draws (S, q, m); the frontier stays fixed across draws.
    """
    ref = np.asarray(reference_point, dtype=float).ravel()
    lo, hi = box_decomposition(frontier, ref)
    u = sobol_normal_samples(config.mc_samples, sampler.sample_dim, config.seed)
    Y = np.asarray(sampler(u), dtype=float)
    if Y.ndim != 3 or Y.shape[2] != ref.size:
        raise InputShapeError(f"sampler returned shape {Y.shape}, expected (S, q, {ref.size})")
    imp = batch_hypervolume_improvement(lo, hi, Y)
    return _aggregate(imp, config.variant if config.variant == Q_LOG_NEHVI else Q_EHVI,
                      config.smoothing_temperature)


@dataclass(frozen=True)
class GaussianBatchSampler:
    """Joint Gaussian objective draws for a fixed q-point batch; mainly for
    tests and oracles. ``cov`` is the (q*m, q*m) covariance of the row-major
    flattened batch and may be singular (deterministic coordinates)."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def q(self) -> int:
        return np.atleast_2d(self.mean).shape[0]

    @property
    def m(self) -> int:
        return np.atleast_2d(self.mean).shape[1]

    @property
    def sample_dim(self) -> int:
        return self.q * self.m

    def _sqrt(self) -> np.ndarray:
        C = np.atleast_2d(np.asarray(self.cov, dtype=float))
        vals, vecs = np.linalg.eigh(0.5 * (C + C.T))
        return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))

    def __call__(self, u: np.ndarray) -> np.ndarray:
        mean = np.atleast_2d(np.asarray(self.mean, dtype=float))
        draws = mean.reshape(1, -1) + u @ self._sqrt().T
        return draws.reshape(u.shape[0], self.q, self.m)


# ---------------------------------------------------------------------------
# qNEHVI: frontier integrated over the posterior at observed inputs
# ---------------------------------------------------------------------------


@dataclass
class NehviState:
    """Shared per-seed state: base-sample matrix and per-draw decompositions
    of the region not dominated by the sampled observed-point objectives."""

    u: np.ndarray  # (S, 2*(n_base + q))
    box_lo: np.ndarray  # (S, K_max, m), zero-padded
    box_hi: np.ndarray
    reference_point: np.ndarray
    q: int


def prepare_nehvi(
    sampler: ObjectiveSampler, reference_point, config: AcquisitionConfig, q: int | None = None
) -> NehviState:
    """Draw base samples and decompose the per-draw sampled frontiers once;
    every candidate evaluation under this state reuses them."""
    q = config.q if q is None else q
    ref = np.asarray(reference_point, dtype=float).ravel()
    u = sobol_normal_samples(config.mc_samples, sampler.sample_dim(q), config.seed)
    nb = sampler.n_base
    if nb == 0:
        lo, hi = box_decomposition(np.zeros((0, ref.size)), ref)
        S = config.mc_samples
        return NehviState(u, np.tile(lo, (S, 1, 1)), np.tile(hi, (S, 1, 1)), ref, q)
    base_draws = _base_draws(sampler, u, q)
    los, his = [], []
    for s in range(base_draws.shape[0]):
        front = pareto_filter(base_draws[s]).points
        lo, hi = box_decomposition(front, ref)
        los.append(lo)
        his.append(hi)
    k_max = max(b.shape[0] for b in los)
    S = len(los)
    box_lo = np.zeros((S, k_max, ref.size))
    box_hi = np.zeros((S, k_max, ref.size))
    for s, (lo, hi) in enumerate(zip(los, his)):
        box_lo[s, : lo.shape[0]] = lo
        box_hi[s, : hi.shape[0]] = hi
    return NehviState(u, box_lo, box_hi, ref, q)


def _base_draws(sampler: ObjectiveSampler, u: np.ndarray, q: int) -> np.ndarray:
    """Objective draws at the observed inputs only, using the base block of u."""
    nb = sampler.n_base
    # sampling with an empty candidate set consumes exactly the base columns
    empty = np.zeros((0, len(sampler.model.ingredients_)))
    return sampler.sample(empty, u[:, : 2 * nb])


def qnehvi(
    sampler: ObjectiveSampler,
    candidates,
    reference_point,
    config: AcquisitionConfig,
    state: NehviState | None = None,
) -> float:
    """Noisy qEHVI of a candidate batch (composition vectors, model ingredient
    order). Per MC draw the frontier is recomputed from the joint posterior
    sample at the observed inputs; config.variant qLogNEHVI returns the
    log-smoothed value (monotone in the plain one)."""
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    if state is None:
        state = prepare_nehvi(sampler, reference_point, config, q=candidates.shape[0])
    if candidates.shape[0] != state.q:
        raise InputShapeError(f"state prepared for q={state.q}, got {candidates.shape[0]} candidates")
    draws = sampler.sample(candidates, state.u)
    Y = draws[:, sampler.n_base :, :]
    imp = batch_hypervolume_improvement(state.box_lo, state.box_hi, Y)
    return _aggregate(imp, config.variant, config.smoothing_temperature)


def qlognehvi(sampler, candidates, reference_point, config: AcquisitionConfig,
              state: NehviState | None = None) -> float:
    return qnehvi(sampler, candidates, reference_point,
                  replace(config, variant=Q_LOG_NEHVI), state)


# ---------------------------------------------------------------------------
# acquisition optimization over the feasible mixture space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AcquisitionResult:
    batch: np.ndarray  # (q, n_ingredients), canonical constraint order
    mixtures: tuple[Mixture, ...]
    value: float
    diagnostics: dict = field(default_factory=dict)


def _novelty_filter(X: np.ndarray, exclude: np.ndarray | None, distance: float) -> np.ndarray:
    if exclude is None or len(exclude) == 0 or distance <= 0:
        return np.ones(len(X), dtype=bool)
    dists = np.abs(X[:, None, :] - exclude[None, :, :]).max(axis=2).min(axis=1)
    return dists > distance


def _evaluate(sampler, batch, state, config) -> float:
    return qnehvi(sampler, batch, state.reference_point, config, state)


def _polish(sampler, batch, value, state, config, constraints, exclude, distance):
    """Coordinate pattern search, accepting only feasible improving moves."""
    lo, hi = constraints.bounds_arrays()
    span = np.where(hi > lo, hi - lo, 0.0)
    batch = batch.copy()
    step = 0.1
    for _ in range(config.polish_iters):
        for j in range(batch.shape[0]):
            for d in range(batch.shape[1]):
                if span[d] == 0:
                    continue
                for sign in (+1.0, -1.0):
                    trial = batch.copy()
                    trial[j, d] = np.clip(trial[j, d] + sign * step * span[d], lo[d], hi[d])
                    if not constraints.is_feasible(trial[j]):
                        continue
                    if not _novelty_filter(trial[j : j + 1], exclude, distance)[0]:
                        continue
                    trial_value = _evaluate(sampler, trial, state, config)
                    if trial_value > value:
                        batch, value = trial, trial_value
                        break
        step *= 0.5
    return batch, value


def optimize_acquisition(
    model,
    gwp_table: GwpTable,
    constraints: Constraints,
    config: AcquisitionConfig,
    spec: ObjectiveSpec = ObjectiveSpec(),
    observed: list[Mixture] | None = None,
    novelty_exclude: np.ndarray | None = None,
    novelty_distance: float = 0.0,
) -> AcquisitionResult:
    """Propose a batch of q feasible mixtures maximizing the acquisition.

    Scores ``raw_candidates`` feasible draws as singletons under shared base
    samples, assembles initial batches from the top of that pool, evaluates
    them jointly, and polishes the best by a feasibility-preserving pattern
    search. The returned value is never below the best initial batch's value.
    Deterministic given the config seed.
    """
    ing = constraints.ingredients
    if tuple(ing) != tuple(model.ingredients_):
        raise InputShapeError(
            f"constraints ingredients {ing} differ from model ingredients {model.ingredients_}"
        )
    constraints.check_nonempty()
    rng = np.random.default_rng(config.seed)
    X = sample_feasible(constraints, config.raw_candidates, rng)

    keep = _novelty_filter(X, novelty_exclude, novelty_distance)
    if keep.any():
        X = X[keep]
    else:
        log.warning("novelty filter removed every raw candidate; ignoring it")

    # degenerate fully pinned region: one feasible point, return q copies
    if np.ptp(X, axis=0).max() < 1e-12:
        log.warning("feasible region collapsed to a single point; returning q copies")
        batch = np.tile(X[0], (config.q, 1))
        mixtures = tuple(Mixture.from_vector(x, ing) for x in batch)
        return AcquisitionResult(batch, mixtures, 0.0, {"degenerate": True})

    if observed is None:
        observed = []
    sampler = ObjectiveSampler(model, gwp_table, observed, spec)
    ref = np.asarray(spec.reference_point, dtype=float)

    if config.variant == Q_EHVI:
        # frontier of posterior means at observed inputs; zero-noise special case
        from mixopt.objectives import objective_posterior

        if observed:
            means, _ = objective_posterior(model, gwp_table, observed, spec)
            frontier = pareto_filter(means).points
        else:
            frontier = np.zeros((0, 3))
        lo, hi = box_decomposition(frontier, ref)
        S = config.mc_samples
        u1 = sobol_normal_samples(S, sampler.sample_dim(1), config.seed)
        state1 = NehviState(u1, np.tile(lo, (S, 1, 1)), np.tile(hi, (S, 1, 1)), ref, 1)
        uq = sobol_normal_samples(S, sampler.sample_dim(config.q), config.seed)
        stateq = NehviState(uq, np.tile(lo, (S, 1, 1)), np.tile(hi, (S, 1, 1)), ref, config.q)
    else:
        state1 = prepare_nehvi(sampler, ref, config, q=1)
        stateq = state1 if config.q == 1 else prepare_nehvi(sampler, ref, config, q=config.q)

    single_values = np.array([_evaluate(sampler, X[i : i + 1], state1, config) for i in range(len(X))])
    order = np.argsort(-single_values, kind="stable")

    q = config.q
    if q == 1:
        batches = [X[i : i + 1].copy() for i in order[: max(1, config.restarts)]]
    elif config.batch_mode == "greedy":
        pool = order[: min(len(order), 64)]
        members: list[int] = []
        while len(members) < q:
            best_i, best_v = None, -np.inf
            for i in pool:
                if i in members:
                    continue
                trial = X[np.array(members + [i])] if members else X[[i]]
                if len(trial) < q:  # pad by repeating for a comparable joint eval
                    pad = np.tile(trial[-1], (q - len(trial), 1))
                    trial = np.vstack([trial, pad])
                v = _evaluate(sampler, trial, stateq, config)
                if v > best_v:
                    best_i, best_v = i, v
            if best_i is None:  # pool exhausted (q larger than the pool)
                best_i = members[-1]
            members.append(int(best_i))
        batches = [X[np.array(members)].copy()]
        for _ in range(max(0, config.restarts - 1)):
            pick = rng.choice(order[: min(len(order), 4 * q)], size=q, replace=len(order) < q)
            batches.append(X[pick].copy())
    else:
        batches = [X[order[:q]].copy()]
        top = order[: min(len(order), 4 * q)]
        for _ in range(max(0, config.restarts - 1)):
            pick = rng.choice(top, size=q, replace=len(top) < q)
            batches.append(X[pick].copy())

    evaluated = [(_evaluate(sampler, b, stateq, config), k) for k, b in enumerate(batches)]
    evaluated.sort(key=lambda t: (-t[0], t[1]))
    initial_best = evaluated[0][0]

    best_batch, best_value = batches[evaluated[0][1]], initial_best
    for v, k in evaluated[: max(1, config.polish_batches)]:
        pb, pv = _polish(sampler, batches[k], v, stateq, config, constraints,
                         novelty_exclude, novelty_distance)
        if pv > best_value:
            best_batch, best_value = pb, pv
    diagnostics = {
        "initial_batch_values": [v for v, _ in evaluated],
        "best_single_value": float(single_values.max()) if len(single_values) else 0.0,
        "polished_value": best_value,
        "variant": config.variant,
    }
    log.info("acquisition optimized", extra={"acquisition": diagnostics})
    mixtures = tuple(Mixture.from_vector(x, ing) for x in best_batch)
    return AcquisitionResult(best_batch, mixtures, float(best_value), diagnostics)

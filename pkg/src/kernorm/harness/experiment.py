"""Experiment orchestration.

Every trial owns a seed derived from the root seed and its grid
coordinates, so results do not depend on how trials are spread over
worker processes.  Methods within a trial see the same data.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .._seeding import derive_seed, make_rng
from ..baselines import (
    energy_test,
    gaussian_direction_sampler,
    gaussian_marginal_factory,
    gaussian_sampler,
    hz_test,
    lmmda_test,
    random_projection_test,
)
from ..errors import ConfigurationError, KernormError, NumericError
from ..linalg import KernelKind, gram_matrix, kernel_features
from ..lmmd import run_test
from ..synthetic import GaussianSpec, sample
from .config import METHODS, ExperimentKind
from .io import load_csv

CSV_COLUMNS = ("experiment", "method", "n", "B", "d", "alpha", "rejection_rate", "replicates",
               "mean_elapsed_ms", "seed")

TYPE2_KINDS = (ExperimentKind.TYPE2_VS_N_MEAN, ExperimentKind.TYPE2_VS_N_COV, ExperimentKind.REAL_DATA)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    method: str
    n: int
    B: int
    d: int
    alpha: float
    rejection_rate: float
    replicates: int
    mean_elapsed_ms: Optional[float]
    seed: int
    # not written to CSV: which error the rate measures (type1, type2 or time).
    # For type2 rows ``rejection_rate`` holds the non-rejection rate, i.e. the
    # Type-II error, so every plotted rate is an error rate.
    measure: str = "type1"


def _measure(config):
    if config.experiment is ExperimentKind.EXEC_TIME:
        return "time"
    if config.experiment in TYPE2_KINDS:
        return "type2"
    if config.experiment is ExperimentKind.DIM_STUDY and config.alternative.kind != "none":
        return "type2"
    return "type1"


def grid_points(config, data_dim=None):
    """``(d, n, B)`` triples in report order."""
    if config.experiment is ExperimentKind.TYPE1_VS_B:
        return [(config.d_grid[0], config.n_grid[0], B) for B in config.B_grid]
    ds = (data_dim,) if data_dim is not None else config.d_grid
    if config.experiment is ExperimentKind.DIM_STUDY:
        return [(d, n, config.B_grid[0]) for d in ds for n in config.n_grid]
    return [(ds[0], n, config.B_grid[0]) for n in config.n_grid]


def _data_law(config, d):
    if config.experiment in (ExperimentKind.TYPE1_VS_B, ExperimentKind.EXEC_TIME):
        return GaussianSpec(config.null_delta, config.null_lam, d)
    law = config.alternative.build(d)
    return law if law is not None else GaussianSpec(config.null_delta, config.null_lam, d)


def _draw(config, d, n, rng, data):
    if data is not None:
        if n > len(data):
            raise ConfigurationError(f"sample size {n} exceeds the {len(data)} available rows")
        return data[rng.choice(len(data), size=n, replace=False)]
    return sample(_data_law(config, d), n, rng)


def _known_null(config, d):
    return GaussianSpec(0.0, config.null_lam, d)


def _lmmd(X, config, d, B, seed):
    cov = _known_null(config, d).covariance_spec() if config.null_mode == "known" else None
    return run_test(X, config.kernel, cov, config.alpha, B, seed, workers=1).reject


def _lmmda(X, config, d, B, seed):
    cov = _known_null(config, d).covariance_spec() if config.null_mode == "known" else None
    return lmmda_test(X, config.kernel, cov, config.alpha, n_draws=B, seed=seed).reject


def _rp(X, config, d, B, seed):
    if config.kernel.kind is KernelKind.LINEAR:
        points = X
        directions = gaussian_direction_sampler(1.0 / np.arange(1, X.shape[1] + 1) ** 2)
    else:
        # <k(X_i, .), h> = h(X_i) for a Gaussian-process direction h ~ GP(0, k)
        points = kernel_features(gram_matrix(config.kernel, X))
        directions = gaussian_direction_sampler(np.ones(points.shape[1]))
    if config.null_mode == "known":
        null = _known_null(config, points.shape[1])
        mean, cov = np.zeros(points.shape[1]), np.diag(null.variances)
    else:
        mean, cov = points.mean(axis=0), np.atleast_2d(np.cov(points, rowvar=False))
    result = random_projection_test(
        points, directions, gaussian_marginal_factory(mean, cov), config.alpha,
        n_directions=config.rp_directions, mc_B=config.baseline_B,
        null_sampler=gaussian_sampler(mean, cov), seed=seed,
    )
    return result.reject


def _hz(X, config, d, B, seed):
    return hz_test(X, config.alpha, config.baseline_B, seed).reject


def _ed(X, config, d, B, seed):
    return energy_test(X, config.alpha, config.baseline_B, config.m_null, seed).reject


_RUNNERS = {"lmmd": _lmmd, "lmmda": _lmmda, "rp": _rp, "hz": _hz, "ed": _ed}


def trial_seed(config, d, n, B, trial):
    return derive_seed(config.seed, d, n, B, trial)


def run_trial(config, point, trial, data=None):
    """Run every configured method on one dataset; returns ``[(reject, seconds), ...]``."""
    d, n, B = point
    seed = trial_seed(config, d, n, B, trial)
    try:
        X = _draw(config, d, n, make_rng(seed, 0), data)
        out = []
        for method in config.methods:
            t0 = time.perf_counter()
            reject = _RUNNERS[method](X, config, d, B, derive_seed(seed, 1 + METHODS.index(method)))
            out.append((bool(reject), time.perf_counter() - t0))
        return out
    except ConfigurationError:
        raise
    except KernormError as exc:
        raise NumericError(
            f"trial {trial} at d={d}, n={n}, B={B} failed (replay seed {seed}): {exc}", seed=seed
        ) from exc


_WORKER_STATE = {}


def _init_worker(config, data):
    try:
        from threadpoolctl import threadpool_limits

        _WORKER_STATE["limits"] = threadpool_limits(1)
    except ImportError:  # pragma: no cover
        pass
    _WORKER_STATE["config"] = config
    _WORKER_STATE["data"] = data


def _worker_task(task):
    point, trial = task
    return run_trial(_WORKER_STATE["config"], point, trial, _WORKER_STATE["data"])


def load_experiment_data(config):
    if config.experiment is not ExperimentKind.REAL_DATA:
        return None
    src = config.data
    if not src.path:
        raise ConfigurationError("real-data experiments need a data file ([data] path or --data)")
    return load_csv(src.path, src.label_column, src.keep_labels, src.scale)


def run_experiment(config, data=None, progress=None):
    """Run all trials of ``config`` and aggregate them into :class:`ResultRow` s."""
    if data is None:
        data = load_experiment_data(config)
    points = grid_points(config, None if data is None else data.shape[1])
    replicates = 1 if config.experiment is ExperimentKind.EXEC_TIME else config.replicates
    tasks = [(p, t) for p in points for t in range(replicates)]

    if config.workers == 1 or len(tasks) == 1:
        results = []
        for task in tasks:
            results.append(run_trial(config, *task, data=data))
            if progress:
                progress(len(results), len(tasks))
    else:
        chunk = max(1, len(tasks) // (8 * config.workers))
        with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(config, data)) as pool:
            results = []
            for res in pool.map(_worker_task, tasks, chunksize=chunk):
                results.append(res)
                if progress:
                    progress(len(results), len(tasks))

    timing = config.timing or config.experiment is ExperimentKind.EXEC_TIME
    measure = _measure(config)
    rows = []
    for p_idx, (d, n, B) in enumerate(points):
        block = results[p_idx * replicates:(p_idx + 1) * replicates]
        for m_idx, method in enumerate(config.methods):
            rejects = sum(trial[m_idx][0] for trial in block)
            count = replicates - rejects if measure == "type2" else rejects
            seconds = sum(trial[m_idx][1] for trial in block)
            rows.append(ResultRow(
                experiment=config.name,
                method=method,
                n=n,
                B=B,
                d=d,
                alpha=config.alpha,
                rejection_rate=count / replicates,
                replicates=replicates,
                mean_elapsed_ms=1000 * seconds / replicates if timing else None,
                seed=config.seed,
                measure=measure,
            ))
    return rows

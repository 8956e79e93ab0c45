"""Random-matrix spectra: Wishart matrices and products of Ginibre matrices.

Each repetition draws from its own Philox stream keyed by ``(seed, index)``,
so batches are reproducible in any order and across worker counts.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .dist_core import Cdf, Law
from .errors import ContractError, NumericalError

RNG_NAME = "Philox"
ENSEMBLES = ("wishart", "ginibre-product")
# double range comfortably handled by the Jacobi SVD after rescaling
_LOG_RANGE = 600.0


@dataclass(frozen=True, eq=False)
class SpectrumSample:
    """Sorted nonnegative spectrum of one random matrix.

    For ``ginibre-product`` the stored values are the eigenvalues of
    ``P P^T`` raised to the power ``1/n_factors``.
    """

    ensemble: str
    dim: int
    n_factors: int
    seed: int
    eigenvalues: np.ndarray
    index: int = 0

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size != self.dim:
            raise ContractError("eigenvalue list must have length dim")
        if np.any(np.diff(ev) < 0) or np.any(ev < 0):
            raise ContractError("eigenvalues must be sorted and nonnegative")
        object.__setattr__(self, "eigenvalues", ev)

    def metadata(self) -> dict:
        return {"ensemble": self.ensemble, "N": self.dim, "n": self.n_factors, "seed": self.seed,
                "index": self.index, "rng": RNG_NAME}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "eigenvalue"])
            for i, v in enumerate(self.eigenvalues):
                w.writerow([i, repr(float(v))])


def make_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for repetition ``index`` of a run seeded by ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _clip_spectrum(ev):
    ev = np.sort(np.asarray(ev, dtype=float))
    top = float(np.max(np.abs(ev))) if ev.size else 0.0
    if np.any(ev < -1e-10 * max(top, 1e-300)):
        raise NumericalError("symmetric eigensolver returned a clearly negative eigenvalue")
    return np.maximum(ev, 0.0)


def _check_dim(N):
    if int(N) != N or N < 2:
        raise ContractError(f"matrix size must be an integer >= 2, got {N}")
    return int(N)


def sample_wishart_spectrum(N: int, seed: int, index: int = 0) -> SpectrumSample:
    """Eigenvalues of ``X X^T / N`` for an ``N x N`` real Gaussian matrix ``X``."""
    N = _check_dim(N)
    x = make_rng(seed, index).standard_normal((N, N))
    try:
        ev = np.linalg.eigvalsh(x @ x.T / N)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return SpectrumSample("wishart", N, 1, int(seed), _clip_spectrum(ev), int(index))


def _log_singular_values(factors):
    """Log singular values of ``factors[-1] @ ... @ factors[0]``.

    The product is carried as ``Q diag(exp(ell)) T`` with ``Q`` orthogonal
    and ``T`` upper triangular with unit-norm rows, refreshed by one QR
    factorization per factor.  Row scales stay in log form, so long
    products neither overflow nor lose their small singular values.
    """
    N = factors[0].shape[0]
    q = np.eye(N)
    ell = np.zeros(N)
    tri = np.eye(N)
    for g in factors:
        q, r = np.linalg.qr(g @ q)
        # diag(e^-ell) R diag(e^ell) is bounded above the diagonal when the
        # scales decrease, which unpivoted QR of such products maintains
        shift = ell[None, :] - ell[:, None]
        with np.errstate(over="ignore", under="ignore"):
            inner = np.triu(r * np.exp(np.minimum(shift, _LOG_RANGE)))
        tri = inner @ tri
        norms = np.linalg.norm(tri, axis=1)
        if np.any(norms == 0) or not np.all(np.isfinite(norms)):
            raise NumericalError("product accumulation lost a row")
        tri = tri / norms[:, None]
        ell = ell + np.log(norms)
    top = float(np.max(ell))
    if top - float(np.min(ell)) < _LOG_RANGE:
        b = np.exp(ell - top)[:, None] * tri
        sva, _, _, _, _, info = lapack.dgejsv(b, joba=1, jobu=3, jobv=3)
        if info != 0:
            raise NumericalError(f"Jacobi SVD failed with info={info}")
        sva = np.asarray(sva[:N]) if np.ndim(sva) else np.array([sva])
        with np.errstate(divide="ignore"):
            return np.log(sva) + top
    # beyond double range the diagonal carries the singular values to leading order
    return ell + np.log(np.abs(np.diag(tri)))


def ginibre_product_spectrum(N: int, n: int, seed: int, index: int = 0) -> SpectrumSample:
    """``eig(P P^T)^(1/n)`` for ``P = G_1 ... G_n`` with ``G_k`` Gaussian over ``sqrt(N)``.

    ``n = 1`` draws the same matrix as :func:`sample_wishart_spectrum`.
    """
    N = _check_dim(N)
    if int(n) != n or n < 1:
        raise ContractError(f"number of factors must be an integer >= 1, got {n}")
    n = int(n)
    if n == 1:
        w = sample_wishart_spectrum(N, seed, index)
        return SpectrumSample("ginibre-product", N, 1, int(seed), w.eigenvalues, int(index))
    rng = make_rng(seed, index)
    scale = 1.0 / np.sqrt(N)
    factors = [rng.standard_normal((N, N)) * scale for _ in range(n)]
    log_sv = _log_singular_values(factors)
    with np.errstate(under="ignore"):
        ev = np.exp(2.0 * log_sv / n)
    return SpectrumSample("ginibre-product", N, n, int(seed), np.sort(np.nan_to_num(ev, nan=0.0)), int(index))


def sample_batch(ensemble: str, N: int, n: int, seed: int, repetitions: int, workers: int = 1):
    """Independent spectra for repetition indices ``0 .. repetitions-1``, ordered by index."""
    if ensemble not in ENSEMBLES:
        raise ContractError(f"unknown ensemble {ensemble!r}")
    if repetitions < 1:
        raise ContractError("need at least one repetition")

    def one(i):
        if ensemble == "wishart":
            return sample_wishart_spectrum(N, seed, i)
        return ginibre_product_spectrum(N, n, seed, i)

    if workers <= 1:
        return [one(i) for i in range(repetitions)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(repetitions)))


def ks_distance(sample, target) -> float:
    """Two-sided Kolmogorov-Smirnov statistic between a sample and a CDF.

    Uses ``max_i max(i/N - F(x_i), F(x_i) - (i-1)/N)`` over the sorted sample.
    """
    values = sample.eigenvalues if isinstance(sample, SpectrumSample) else np.asarray(sample, dtype=float)
    values = np.sort(np.asarray(values, dtype=float))
    if not values.size:
        raise ContractError("empty sample")
    if isinstance(target, Law):
        target = target.to_cdf()
    cdf = target if callable(target) else None
    if cdf is None:
        raise ContractError("target must be a Cdf, a Law or a callable CDF")
    f = np.asarray(cdf(values), dtype=float)
    n = values.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def mean_ks(samples, target) -> float:
    return float(np.mean([ks_distance(s, target) for s in samples]))


def experiment_summary(sample: SpectrumSample, target: Cdf, target_name: str) -> dict:
    """The summary record ``{ensemble, N, n, seed, ks, target}``."""
    return {
        "ensemble": sample.ensemble,
        "N": sample.dim,
        "n": sample.n_factors,
        "seed": sample.seed,
        "ks": ks_distance(sample, target),
        "target": target_name,
    }


def write_summary(records, path) -> None:
    with open(path, "w") as fh:
        json.dump(records, fh, indent=2)


__all__ = [
    "SpectrumSample",
    "make_rng",
    "sample_wishart_spectrum",
    "ginibre_product_spectrum",
    "sample_batch",
    "ks_distance",
    "mean_ks",
    "experiment_summary",
    "write_summary",
]

"""Masked multiplicative-update factorization engine.

Fits non-negative factors W (documents x topics) and H (topics x terms)
to a non-negative matrix V under a binary permission mask applied to W:

    minimize  || V - (W o mask) H ||_F^2

where ``o`` is the entrywise product.  Entries of W at forbidden positions
are held at exactly zero.  With an all-ones mask the updates are the
classical multiplicative rules for plain NMF.

The optional row-weighted variant multiplies each document's residual by
an importance weight inside the update ratios, which steers the fit
toward supervised documents.  For the weighted rules the fit trace
records the row-weighted squared error

    sum_i weight_i * || V_i - ((W o mask) H)_i ||^2

because that is the quantity the weighted updates decrease monotonically
(weights enter the update ratios linearly).  ``loss_tsw`` with the weight
matrix inside the Frobenius norm is also provided for reporting.

Epsilon is added to every update denominator to keep ratios finite; the
monotonicity guarantee therefore holds up to a 1e-10 relative slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import json

import numpy as np

from .errors import NumericalFailureError, ShapeError
from .matrix import frobenius_sq, read_dense_csv, require_nonnegative, write_dense_csv

STOP_CONVERGED = "converged"
STOP_MAX_ITER = "max_iter"

OBJECTIVE_MASKED = "masked_sse"
OBJECTIVE_ROW_WEIGHTED = "row_weighted_sse"


@dataclass(frozen=True)
class FitConfig:
    """Knobs for one factorization run."""

    d: int
    max_iter: int = 200
    rel_tol: float = 1e-4
    epsilon: float = 1e-9
    seed: int = 0
    weighted: bool = False
    acol_q: int = 5

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"topic count d must be >= 1, got {self.d}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.acol_q < 1:
            raise ValueError(f"acol_q must be >= 1, got {self.acol_q}")


@dataclass(frozen=True)
class FactorModel:
    """Fitted factors; W rows live in the subspace the mask permits."""

    W: np.ndarray
    H: np.ndarray


@dataclass(frozen=True)
class FitTrace:
    """Loss recorded before iterating and after each (H, W) update pair."""

    losses: tuple[float, ...]
    stop_reason: str
    objective: str = OBJECTIVE_MASKED

    @property
    def iterations(self) -> int:
        return len(self.losses) - 1

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def _conform(V, W, H, L):
    V = np.asarray(V, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    n, t = V.shape
    if W.shape != L.shape:
        raise ShapeError(f"W shape {W.shape} does not match mask shape {L.shape}")
    if W.shape[0] != n:
        raise ShapeError(f"W has {W.shape[0]} rows, V has {n}")
    if H.shape != (W.shape[1], t):
        raise ShapeError(f"H shape {H.shape}, expected ({W.shape[1]}, {t})")
    return V, W, H, L


def _row_weights_column(E: np.ndarray, n: int) -> np.ndarray:
    E = np.asarray(E, dtype=np.float64)
    if E.shape != (n,):
        raise ShapeError(f"row weights shape {E.shape}, expected ({n},)")
    return E[:, np.newaxis]


def loss_ts(V, W, H, L) -> float:
    """Squared Frobenius error of the masked reconstruction."""
    V, W, H, L = _conform(V, W, H, L)
    return frobenius_sq(V - (W * L) @ H)


def loss_tsw(V, W, H, L, E) -> float:
    """Squared Frobenius error with each residual row scaled by its weight.

    ``E`` is one positive weight per document; the full weight matrix is
    its broadcast across columns, so weights enter this value squared.
    """
    V, W, H, L = _conform(V, W, H, L)
    e = _row_weights_column(E, V.shape[0])
    return frobenius_sq((V - (W * L) @ H) * e)


def _row_weighted_sse(V, W, H, L, E) -> float:
    """sum_i E_i * ||row i residual||^2 — the objective the weighted updates descend."""
    V, W, H, L = _conform(V, W, H, L)
    R = V - (W * L) @ H
    e = _row_weights_column(E, V.shape[0])
    return float(np.sum(e * R * R))


def _check_finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.isfinite(a).all():
        raise NumericalFailureError(f"{what} produced NaN or Inf entries", iteration=-1)
    return a


def update_h(V, W, H, L, epsilon: float) -> np.ndarray:
    """One multiplicative step on H.

    Each entry is scaled by the ratio of the masked correlation with V to
    the masked self-correlation with the current reconstruction, epsilon
    added to every denominator entry.  Zero entries stay zero.
    """
    V, W, H, L = _conform(V, W, H, L)
    WL = W * L
    with np.errstate(all="ignore"):
        numer = WL.T @ V
        denom = WL.T @ (WL @ H) + epsilon
        out = H * (numer / denom)
    return _check_finite(out, "H update")


def update_w(V, W, H, L, epsilon: float) -> np.ndarray:
    """One multiplicative step on W; masked entries come out exactly zero.

    At forbidden positions both the numerator and denominator vanish, so
    the value is pinned to 0 explicitly rather than left to 0/epsilon.
    """
    V, W, H, L = _conform(V, W, H, L)
    WL = W * L
    with np.errstate(all="ignore"):
        numer = (V @ H.T) * L
        denom = ((WL @ H) @ H.T) * L + epsilon
        out = W * (numer / denom)
    _check_finite(out, "W update")
    return np.where(L == 0.0, 0.0, out)


def update_h_weighted(V, W, H, L, E, epsilon: float) -> np.ndarray:
    """Row-weighted multiplicative step on H; reduces to update_h when E is all ones."""
    V, W, H, L = _conform(V, W, H, L)
    e = _row_weights_column(E, V.shape[0])
    WL = W * L
    with np.errstate(all="ignore"):
        numer = WL.T @ (V * e)
        denom = WL.T @ ((WL @ H) * e) + epsilon
        out = H * (numer / denom)
    return _check_finite(out, "weighted H update")


def update_w_weighted(V, W, H, L, E, epsilon: float) -> np.ndarray:
    """Row-weighted multiplicative step on W with the same mask zeroing as update_w.

    The weight of row i scales both the numerator and denominator of that
    row's ratios, so for row-constant weights this is numerically close to
    the unweighted step and identical to it when E is all ones.
    """
    V, W, H, L = _conform(V, W, H, L)
    e = _row_weights_column(E, V.shape[0])
    WL = W * L
    with np.errstate(all="ignore"):
        numer = ((V * e) @ H.T) * L
        denom = (((WL @ H) * e) @ H.T) * L + epsilon
        out = W * (numer / denom)
    _check_finite(out, "weighted W update")
    return np.where(L == 0.0, 0.0, out)


def init_model(V, L, config: FitConfig) -> FactorModel:
    """Seeded initialization.

    Each row of H starts as the mean of ``acol_q`` distinct random rows of
    V (random-Acol style, oriented so topics average documents); W starts
    uniform on [0, 1) with masked entries zeroed.  Draw order is H first,
    then W, from one PCG64 generator.
    """
    V = np.asarray(V, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    n, t = V.shape
    d = config.d
    if L.shape != (n, d):
        raise ShapeError(f"mask shape {L.shape}, expected ({n}, {d})")
    rng = np.random.default_rng(config.seed)
    q = min(config.acol_q, n)
    H0 = np.empty((d, t), dtype=np.float64)
    for r in range(d):
        picks = rng.choice(n, size=q, replace=False)
        H0[r, :] = V[picks, :].mean(axis=0)
    W0 = rng.random((n, d))
    W0[L == 0.0] = 0.0
    return FactorModel(W=W0, H=H0)


def _default_row_weights(L: np.ndarray) -> np.ndarray:
    """Inverse-rate weights inferred from the mask: constrained rows are supervised."""
    n = L.shape[0]
    supervised = np.where(~L.all(axis=1))[0]
    weights = np.ones(n, dtype=np.float64)
    if supervised.size:
        weights[supervised] = n / supervised.size
    return weights


def fit(
    V,
    L,
    config: FitConfig,
    row_weights: np.ndarray | None = None,
) -> tuple[FactorModel, FitTrace]:
    """Alternate H and W updates from a seeded start until converged.

    Stops when the relative loss improvement over one iteration falls
    below ``config.rel_tol``, when the factors reach an exact fixed point,
    or at ``config.max_iter``.  The returned W is exactly zero wherever
    the mask is zero.

    When ``config.weighted`` is set, the weighted update rules run with
    ``row_weights`` (derived from the mask when not supplied) and the
    trace records the row-weighted squared error.
    """
    V = np.asarray(V, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if V.ndim != 2 or L.ndim != 2:
        raise ShapeError(f"V and mask must be 2-D, got {V.ndim}-D and {L.ndim}-D")
    require_nonnegative(V, "V")
    if not np.isin(L, (0.0, 1.0)).all():
        raise ValueError("mask entries must be exactly 0 or 1")

    model = init_model(V, L, config)
    W, H = model.W, model.H
    eps = config.epsilon

    if config.weighted:
        e = _default_row_weights(L) if row_weights is None else np.asarray(row_weights, float)
        objective = OBJECTIVE_ROW_WEIGHTED

        def loss_fn(Wc, Hc):
            return _row_weighted_sse(V, Wc, Hc, L, e)

    else:
        e = None
        objective = OBJECTIVE_MASKED

        def loss_fn(Wc, Hc):
            return loss_ts(V, Wc, Hc, L)

    losses = [loss_fn(W, H)]
    stop_reason = STOP_MAX_ITER
    for iteration in range(1, config.max_iter + 1):
        try:
            if config.weighted:
                H_next = update_h_weighted(V, W, H, L, e, eps)
                W_next = update_w_weighted(V, W, H_next, L, e, eps)
            else:
                H_next = update_h(V, W, H, L, eps)
                W_next = update_w(V, W, H_next, L, eps)
        except NumericalFailureError as exc:
            raise NumericalFailureError(str(exc), iteration=iteration, losses=losses) from exc

        fixed_point = np.array_equal(H_next, H) and np.array_equal(W_next, W)
        W, H = W_next, H_next
        losses.append(loss_fn(W, H))
        if fixed_point:
            stop_reason = STOP_CONVERGED
            break
        prev, cur = losses[-2], losses[-1]
        if prev == 0.0 or (prev - cur) / prev < config.rel_tol:
            stop_reason = STOP_CONVERGED
            break

    W = np.where(L == 0.0, 0.0, W)
    trace = FitTrace(losses=tuple(losses), stop_reason=stop_reason, objective=objective)
    return FactorModel(W=W, H=H), trace


def save_model(outdir, model: FactorModel, trace: FitTrace, config: FitConfig) -> None:
    """Write model.json (header), W.csv, H.csv, and trace.csv under ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    header = {
        "n": int(model.W.shape[0]),
        "d": int(model.W.shape[1]),
        "t": int(model.H.shape[1]),
        "max_iter": config.max_iter,
        "rel_tol": config.rel_tol,
        "epsilon": config.epsilon,
        "seed": config.seed,
        "weighted": config.weighted,
        "acol_q": config.acol_q,
        "iterations": trace.iterations,
        "stop_reason": trace.stop_reason,
        "objective": trace.objective,
        "final_loss": trace.final_loss,
    }
    (out / "model.json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    write_dense_csv(model.W, out / "W.csv")
    write_dense_csv(model.H, out / "H.csv")
    write_trace_csv(out / "trace.csv", trace)


def write_trace_csv(path, trace: FitTrace) -> None:
    lines = ["iteration,loss"]
    lines.extend(f"{i},{loss!r}" for i, loss in enumerate(trace.losses))
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(modeldir) -> tuple[FactorModel, dict]:
    """Read back a model directory written by save_model."""
    modeldir = Path(modeldir)
    header = json.loads((modeldir / "model.json").read_text())
    W = read_dense_csv(modeldir / "W.csv")
    H = read_dense_csv(modeldir / "H.csv")
    return FactorModel(W=W, H=H), header

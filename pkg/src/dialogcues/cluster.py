"""Unsupervised discovery of utterance classes.

A finite mixture of independent categorical cues (a latent-class /
naive-Bayes mixture), fitted by EM to a maximum a posteriori estimate
under symmetric Dirichlet smoothing.  With smoothing ``alpha`` the
objective is::

    log_posterior = sum_i log sum_k pi_k prod_c theta[k, c, x_ic]
                    + alpha * (sum_k log pi_k + sum_{k,c,v} log theta[k, c, v])

so every M-step is an add-``alpha`` estimate and all probabilities stay
strictly positive.  Normalising constants of the prior are omitted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .cues import CuePattern, CueSchema, PatternRow, PatternTable, SchemaError

__all__ = [
    "MixtureModel", "EMResult", "ClusterReport", "run_em", "log_posterior",
    "fit_mixture", "select_models", "responsibilities", "hard_assign",
    "class_strength", "cue_influence", "value_influence", "cluster_report",
    "generate_synthetic", "planted_model", "free_parameters",
]


@dataclass
class MixtureModel:
    schema: CueSchema
    weights: np.ndarray
    params: tuple  # per cue, a (k, alphabet size) array
    prior_alpha: float = 1.0
    seed: int = 0
    score: float = float("nan")
    log_posterior: float = float("nan")
    n_rows: int = 0

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def schema_id(self) -> str:
        return self.schema.schema_id

    def to_json(self) -> str:
        doc = {
            "schema_id": self.schema_id,
            "schema": self.schema.to_dict(),
            "k": self.k,
            "weights": [float(x) for x in self.weights],
            "params": [[[float(x) for x in row] for row in p] for p in self.params],
            "alpha": float(self.prior_alpha),
            "seed": int(self.seed),
            "score": float(self.score),
            "log_posterior": float(self.log_posterior),
            "n_rows": int(self.n_rows),
        }
        # float repr is the shortest string that round-trips exactly
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MixtureModel":
        doc = json.loads(text)
        schema = CueSchema.from_dict(doc["schema"])
        if schema.schema_id != doc["schema_id"]:
            raise SchemaError("model file schema_id does not match its schema")
        model = cls(schema, np.array(doc["weights"], dtype=float),
                    tuple(np.array(p, dtype=float) for p in doc["params"]),
                    doc["alpha"], doc["seed"], doc["score"], doc["log_posterior"], doc["n_rows"])
        if model.k != doc["k"]:
            raise ValueError("model file: k does not match the weight vector")
        return model


@dataclass
class EMResult:
    weights: np.ndarray
    params: tuple
    log_posterior: float
    history: list = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False


# --- internals ---------------------------------------------------------------

class _Design:
    """Distinct patterns of a table as a weighted one-hot design matrix."""

    def __init__(self, codes: np.ndarray, sizes: Sequence[int]):
        codes = np.asarray(codes, dtype=np.int64)
        self.sizes = tuple(int(s) for s in sizes)
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)[:-1]]).astype(np.int64)
        self.n = len(codes)
        unique, inverse, counts = np.unique(codes, axis=0, return_inverse=True, return_counts=True)
        self.unique = unique
        self.inverse = inverse.reshape(-1)
        self.counts = counts.astype(float)
        onehot = np.zeros((len(unique), sum(self.sizes)))
        for c, off in enumerate(self.offsets):
            onehot[np.arange(len(unique)), off + unique[:, c]] = 1.0
        self.onehot = onehot

    def split(self, flat: np.ndarray) -> tuple:
        return tuple(flat[:, off:off + s] for off, s in zip(self.offsets, self.sizes))


def _log_joint(design: _Design, weights, params) -> np.ndarray:
    logtheta = np.concatenate([np.log(p) for p in params], axis=1)  # (k, sum V)
    return np.log(weights)[None, :] + design.onehot @ logtheta.T


def _prior_term(weights, params, alpha: float) -> float:
    return alpha * (float(np.log(weights).sum()) + sum(float(np.log(p).sum()) for p in params))


def _m_step(design: _Design, resp: np.ndarray, alpha: float) -> tuple:
    weighted = resp * design.counts[:, None]
    nk = weighted.sum(axis=0)
    k = resp.shape[1]
    weights = (nk + alpha) / (design.n + k * alpha)
    flat = (design.onehot.T @ weighted).T  # (k, sum V)
    params = tuple((block + alpha) / (nk[:, None] + block.shape[1] * alpha) for block in design.split(flat))
    return weights, params


def _e_step(design: _Design, weights, params) -> tuple:
    lj = _log_joint(design, weights, params)
    norm = logsumexp(lj, axis=1)
    return np.exp(lj - norm[:, None]), float(design.counts @ norm)


def run_em(codes: np.ndarray, sizes: Sequence[int], init_resp: np.ndarray, alpha: float = 1.0,
           tol: float = 1e-8, max_iter: int = 500,
           callback: Callable | None = None) -> EMResult:
    """EM from given per-row initial responsibilities.

    ``callback(iteration, weights, params, resp, log_posterior)`` is called
    after every iteration with the per-row responsibilities.
    Stops when the relative log-posterior improvement drops below ``tol``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    design = _Design(codes, sizes)
    init_resp = np.asarray(init_resp, dtype=float)
    # per-distinct-pattern average of the row responsibilities
    agg = np.zeros((len(design.unique), init_resp.shape[1]))
    np.add.at(agg, design.inverse, init_resp)
    resp = agg / design.counts[:, None]

    history = []
    prev = -np.inf
    converged = False
    it = 0
    weights = params = None
    for it in range(1, max_iter + 1):
        weights, params = _m_step(design, resp, alpha)
        resp, loglik = _e_step(design, weights, params)
        lp = loglik + _prior_term(weights, params, alpha)
        history.append(lp)
        if callback is not None:
            callback(it, weights, params, resp[design.inverse], lp)
        if np.isfinite(prev) and lp - prev < tol * abs(prev):
            converged = True
            break
        prev = lp
    return EMResult(weights, params, history[-1], history, it, converged)


def log_posterior(model: MixtureModel, table: PatternTable) -> float:
    """The smoothed log-posterior of ``model`` on ``table``."""
    _check_schema(model, table.schema)
    design = _Design(table.codes(), model.schema.sizes)
    _, loglik = _e_step(design, model.weights, model.params)
    return loglik + _prior_term(model.weights, model.params, model.prior_alpha)


def free_parameters(k: int, sizes: Sequence[int]) -> int:
    return (k - 1) + k * sum(s - 1 for s in sizes)


def _check_schema(model: MixtureModel, schema: CueSchema):
    if schema != model.schema:
        raise SchemaError(f"schema {schema.schema_id if schema else None} does not match "
                          f"model schema {model.schema_id}")


# --- fitting -----------------------------------------------------------------------

def restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(restart)])


def fit_mixture(table: PatternTable, k: int, seed: int = 0, restarts: int = 20, alpha: float = 1.0,
                tol: float = 1e-8, max_iter: int = 500, callback: Callable | None = None) -> MixtureModel:
    """Best-of-``restarts`` MAP EM fit of a ``k``-class mixture.

    Restart ``r`` starts from row responsibilities drawn from a flat
    Dirichlet with a generator seeded by ``(seed, r)``, so restarts are
    independent of execution order.  Ties go to the lower restart index.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(table) == 0:
        raise ValueError("cannot fit a mixture to an empty table")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    codes = table.codes()
    sizes = table.schema.sizes
    best = None
    for r in range(restarts):
        init = restart_rng(seed, r).dirichlet(np.ones(k), size=len(codes))
        cb = None if callback is None else (lambda *a, _r=r: callback(_r, *a))
        res = run_em(codes, sizes, init, alpha, tol, max_iter, cb)
        if best is None or res.log_posterior > best.log_posterior:
            best = res
    n = len(codes)
    score = best.log_posterior - 0.5 * free_parameters(k, sizes) * math.log(n)
    return MixtureModel(table.schema, best.weights, best.params, alpha, seed, score, best.log_posterior, n)


def select_models(table: PatternTable, k_range, seed: int = 0, restarts: int = 20, alpha: float = 1.0,
                  tol: float = 1e-8, max_iter: int = 500) -> list:
    """Fit every k in ``k_range`` (inclusive pair or iterable) and rank by score.

    score = log_posterior - (d / 2) ln n with d free parameters; the best
    model comes first, ties toward smaller k.
    """
    if isinstance(k_range, tuple) and len(k_range) == 2 or isinstance(k_range, list) and len(k_range) == 2:
        ks = range(int(k_range[0]), int(k_range[1]) + 1)
    else:
        ks = list(k_range)
    if not ks:
        raise ValueError("empty k range")
    models = [fit_mixture(table, k, seed, restarts, alpha, tol, max_iter) for k in ks]
    return sorted(models, key=lambda m: (-m.score, m.k))


# --- using a model -------------------------------------------------------------

def responsibilities(model: MixtureModel, pattern) -> np.ndarray:
    """Class membership probabilities of one pattern (CuePattern or code vector)."""
    if isinstance(pattern, CuePattern):
        _check_schema(model, pattern.schema)
        codes = pattern.codes()
    else:
        codes = np.asarray(pattern, dtype=np.int64)
        if codes.shape != (len(model.schema),):
            raise SchemaError("code vector does not match model schema arity")
        if np.any(codes < 0) or np.any(codes >= np.array(model.schema.sizes)):
            raise SchemaError("code outside alphabet")
    log = np.log(model.weights) + sum(np.log(p[:, v]) for p, v in zip(model.params, codes))
    return np.exp(log - logsumexp(log))


def _table_resp(model: MixtureModel, table: PatternTable) -> np.ndarray:
    _check_schema(model, table.schema)
    design = _Design(table.codes(), model.schema.sizes)
    resp, _ = _e_step(design, model.weights, model.params)
    return resp[design.inverse]


def hard_assign(model: MixtureModel, table: PatternTable) -> np.ndarray:
    """Most probable class per row; ties go to the lowest class index."""
    if len(table) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmax(_table_resp(model, table), axis=1)


def _class_loglik(model: MixtureModel, codes: np.ndarray) -> np.ndarray:
    """(n, k) log p(pattern | class)."""
    out = np.zeros((len(codes), model.k))
    for c, p in enumerate(model.params):
        out += np.log(p[:, codes[:, c]]).T
    return out


def class_strength(model: MixtureModel, table: PatternTable) -> np.ndarray:
    """Relative class strength: geometric-mean member likelihood over the max.

    A class without hard-assigned members gets strength 0.
    """
    labels = hard_assign(model, table)
    ll = _class_loglik(model, table.codes())
    raw = np.zeros(model.k)
    for k in range(model.k):
        members = labels == k
        if members.any():
            raw[k] = np.exp(ll[members, k].mean())
    if raw.max() <= 0:
        return raw
    return raw / raw.max()


def _global_distributions(model: MixtureModel, table: PatternTable) -> list:
    codes = table.codes()
    alpha = model.prior_alpha
    out = []
    for c, size in enumerate(model.schema.sizes):
        counts = np.bincount(codes[:, c], minlength=size).astype(float)
        out.append((counts + alpha) / (counts.sum() + size * alpha))
    return out


def value_influence(model: MixtureModel, table: PatternTable) -> list:
    """Per cue, per value: sum_k pi_k theta_kv ln(theta_kv / g_v)."""
    _check_schema(model, table.schema)
    g = _global_distributions(model, table)
    return [model.weights @ (p * np.log(p / gc[None, :])) for p, gc in zip(model.params, g)]


def cue_influence(model: MixtureModel, table: PatternTable, normalize: bool = True) -> np.ndarray:
    """Mixture-weighted KL divergence of each cue's class profiles from its
    overall distribution, relative to the most influential cue."""
    raw = np.array([vi.sum() for vi in value_influence(model, table)])
    raw = np.maximum(raw, 0.0)  # KL >= 0; clip rounding noise
    if not normalize or raw.max() <= 0:
        return raw
    return raw / raw.max()


@dataclass
class ClusterReport:
    schema: CueSchema
    class_strength: np.ndarray
    cue_influence: np.ndarray
    value_influence: list
    class_profiles: tuple
    hard_counts: np.ndarray
    weights: np.ndarray

    @property
    def empty_classes(self) -> list:
        return [k for k, n in enumerate(self.hard_counts) if n == 0]

    def to_text(self) -> str:
        lines = ["Class  Relative class strength  Members  Weight"]
        for k, (s, n, w) in enumerate(zip(self.class_strength, self.hard_counts, self.weights)):
            flag = "  (empty)" if n == 0 else ""
            lines.append(f"{k:>5}  {s:>23.3f}  {n:>7d}  {w:>6.3f}{flag}")
        lines += ["", "Cue         Relative influence"]
        for cue, x in zip(self.schema.ids, self.cue_influence):
            lines.append(f"{cue.value:<10}  {x:>18.3f}")
        lines += ["", "Value influence"]
        for cue, alphabet, vi in zip(self.schema.ids, self.schema.alphabets, self.value_influence):
            cells = ", ".join(f"{v}={x:.3f}" for v, x in zip(alphabet, vi))
            lines.append(f"  {cue.value}: {cells}")
        lines += ["", "Class profiles (most probable values)"]
        for k in range(len(self.weights)):
            cells = []
            for cue, alphabet, p in zip(self.schema.ids, self.schema.alphabets, self.class_profiles):
                top = int(np.argmax(p[k]))
                cells.append(f"{cue.value}={alphabet[top]}({p[k, top]:.2f})")
            lines.append(f"  class {k}: " + " ".join(cells))
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> dict:
        """Machine-readable twins, keyed by suggested file stem."""
        strength = ["class\tstrength\tmembers\tweight"]
        strength += [f"{k}\t{s!r}\t{n}\t{w!r}" for k, (s, n, w) in
                     enumerate(zip(self.class_strength.tolist(), self.hard_counts.tolist(),
                                   self.weights.tolist()))]
        influence = ["cue\tinfluence"]
        influence += [f"{c.value}\t{x!r}" for c, x in zip(self.schema.ids, self.cue_influence.tolist())]
        values = ["cue\tvalue\tinfluence"]
        for cue, alphabet, vi in zip(self.schema.ids, self.schema.alphabets, self.value_influence):
            values += [f"{cue.value}\t{v}\t{x!r}" for v, x in zip(alphabet, vi.tolist())]
        profiles = ["class\tcue\tvalue\tprobability"]
        for c, (cue, alphabet) in enumerate(self.schema.cues):
            for k in range(len(self.weights)):
                profiles += [f"{k}\t{cue.value}\t{v}\t{x!r}"
                             for v, x in zip(alphabet, self.class_profiles[c][k].tolist())]
        return {name: "\n".join(rows) + "\n" for name, rows in
                [("class_strength", strength), ("cue_influence", influence),
                 ("value_influence", values), ("class_profiles", profiles)]}


def cluster_report(model: MixtureModel, table: PatternTable) -> ClusterReport:
    labels = hard_assign(model, table)
    return ClusterReport(
        schema=model.schema,
        class_strength=class_strength(model, table),
        cue_influence=cue_influence(model, table),
        value_influence=value_influence(model, table),
        class_profiles=model.params,
        hard_counts=np.bincount(labels, minlength=model.k),
        weights=model.weights,
    )


# --- synthetic data ------------------------------------------------------------------

def generate_synthetic(model: MixtureModel, n: int, seed: int = 0, prefix: str = "syn") -> tuple:
    """Draw ``n`` i.i.d. patterns from ``model``; returns (table, true labels)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.choice(model.k, size=n, p=model.weights)
    codes = np.empty((n, len(model.schema)), dtype=np.int64)
    for c, p in enumerate(model.params):
        # inverse-CDF draw per row from its class's distribution
        cdf = np.cumsum(p[labels], axis=1)
        u = rng.random(n)[:, None]
        codes[:, c] = np.minimum((u > cdf).sum(axis=1), p.shape[1] - 1)
    alphabets = model.schema.alphabets
    width = len(str(n))
    rows = tuple(PatternRow(f"{prefix}{i:0{width}d}",
                            CuePattern(tuple(a[v] for a, v in zip(alphabets, row)), model.schema))
                 for i, row in enumerate(codes.tolist()))
    return PatternTable(rows, model.schema), labels


def planted_model(schema: CueSchema, k: int, seed: int = 0, peak: float = 0.85,
                  weights: Sequence[float] | None = None) -> MixtureModel:
    """A well-separated mixture for testing recovery.

    Every class puts probability ``peak`` on one modal value per cue and
    spreads the rest evenly; modal values differ between classes wherever
    the alphabet is large enough.
    """
    rng = np.random.default_rng(seed)
    params = []
    for size in schema.sizes:
        modes = rng.permutation(max(size, k))[:k] % size if size >= k else rng.integers(0, size, k)
        p = np.full((k, size), (1 - peak) / max(size - 1, 1))
        p[np.arange(k), modes] = peak
        if size == 1:
            p[:] = 1.0
        params.append(p / p.sum(axis=1, keepdims=True))
    w = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    return MixtureModel(schema, w / w.sum(), tuple(params), 1.0, seed)

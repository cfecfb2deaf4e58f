"""Covariate effects on topic prevalence via the method of composition.

Each draw resamples document-topic proportions from their per-document
posterior, refits the covariate regression on the drawn proportions, draws
a coefficient vector from the regression's sampling distribution, and
evaluates predictions on a covariate grid. Means and empirical 95%
intervals summarize the draws.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .design import BuiltDesign, CategoricalSpec, SplineSpec, build_design
from .errors import DimensionMismatch, SingularDesign
from .formula import Formula, parse_formula
from .stm import FittedModel, softmax_with_zero

DEFAULT_DRAWS = 500
DEFAULT_GRID_POINTS = 50
LOG_GRID_COVARIATES = frozenset({"gdp_pc", "population"})
MIN_DRAWS = 100


@dataclass
class EffectEstimate:
    topic_index: int
    covariate: str
    grid: list
    mean: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    n_draws: int

    def as_dict(self) -> dict:
        return {"topic_index": self.topic_index, "covariate": self.covariate,
                "grid": list(self.grid),
                "mean": [float(v) for v in self.mean],
                "ci_lower": [float(v) for v in self.ci_lower],
                "ci_upper": [float(v) for v in self.ci_upper],
                "n_draws": self.n_draws}

    def table_rows(self) -> list[tuple]:
        """(grid, mean, lo, hi) rows for plot-ready delimited output."""
        return [(g, float(m), float(lo), float(hi))
                for g, m, lo, hi in zip(self.grid, self.mean,
                                        self.ci_lower, self.ci_upper)]


@dataclass
class ContrastEstimate:
    topic_index: int
    covariate: str
    level_a: object
    level_b: object
    point: float
    ci: tuple[float, float]

    def as_dict(self) -> dict:
        return {"topic_index": self.topic_index, "covariate": self.covariate,
                "level_a": self.level_a, "level_b": self.level_b,
                "point": self.point, "ci": [self.ci[0], self.ci[1]]}


def _interp_quantile(sorted_draws: np.ndarray, p: float) -> np.ndarray:
    n = sorted_draws.shape[0]
    h = (n - 1) * p
    i = int(np.floor(h))
    frac = h - i
    if i + 1 >= n:
        return sorted_draws[-1]
    return sorted_draws[i] + frac * (sorted_draws[i + 1] - sorted_draws[i])


def quantile_pair(draws: np.ndarray, level: float = 0.95):
    """Empirical central interval, mirror-symmetric by construction:
    negating the draws exactly negates and swaps the bounds."""
    p = (1.0 - level) / 2.0
    lo = _interp_quantile(np.sort(draws, axis=0), p)
    hi = -_interp_quantile(np.sort(-draws, axis=0), p)
    return lo, hi


def _psd_factor(mat: np.ndarray) -> np.ndarray:
    """F with F @ F.T == mat for symmetric PSD mat (zero matrices stay zero)."""
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(0.5 * (mat + mat.T))
        return vecs * np.sqrt(np.maximum(vals, 0.0))


class _Composer:
    """Shared per-draw machinery for effects and contrasts."""

    def __init__(self, model: FittedModel, formula: Formula | str,
                 covs: dict[str, list], topic: int, n_draws: int, seed: int):
        if not 0 <= topic < model.k:
            raise ValueError(f"topic {topic} out of range for k={model.k}")
        if n_draws < MIN_DRAWS:
            raise ValueError(f"n_draws must be at least {MIN_DRAWS}")
        n_rows = len(next(iter(covs.values())))
        if n_rows != model.n_docs:
            raise DimensionMismatch(
                f"covariate table has {n_rows} rows for {model.n_docs} documents")
        if isinstance(formula, str):
            formula = parse_formula(formula)
        self.built: BuiltDesign = build_design(formula, covs)
        self.covs = covs
        kept = self.built.kept_rows
        self.x = self.built.x
        self.n, self.p = self.x.shape
        xtx = self.x.T @ self.x
        try:
            chol = np.linalg.cholesky(xtx)
            rank = self.p
            self.solver = scipy.linalg.cho_solve((chol, True), self.x.T,
                                                 check_finite=False)
            xtx_inv = scipy.linalg.cho_solve((chol, True), np.eye(self.p),
                                             check_finite=False)
            self.coef_factor = _psd_factor(0.5 * (xtx_inv + xtx_inv.T))
        except np.linalg.LinAlgError:
            # A complete B-spline block sums to 1 on every row, so each
            # spline term is structurally collinear with the intercept.
            # The minimum-norm solution leaves predictions unchanged; any
            # deficiency beyond the structural one is a real error.
            vals, vecs = np.linalg.eigh(0.5 * (xtx + xtx.T))
            keep = vals > vals.max() * 1e-10
            rank = int(keep.sum())
            n_spline_blocks = sum(isinstance(s, SplineSpec)
                                  for s in self.built.builder.specs)
            if rank < self.p - n_spline_blocks:
                raise SingularDesign(
                    "effects design X'X is singular beyond the structural "
                    "spline/intercept overlap") from None
            vecs = vecs[:, keep]
            inv_vals = 1.0 / vals[keep]
            self.solver = (vecs * inv_vals) @ (vecs.T @ self.x.T)
            self.coef_factor = vecs * np.sqrt(inv_vals)
        self.coef_dim = self.coef_factor.shape[1]
        self.eta = model.eta[kept]
        self.nu_factors = np.stack([_psd_factor(model.nu[d]) for d in kept])
        self.topic = topic
        self.dof = self.n - rank
        self.n_draws = n_draws
        self.children = np.random.SeedSequence(seed).spawn(n_draws)

    def coefficient_draw(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.eta.shape)
        eta_star = self.eta + np.einsum("nij,nj->ni", self.nu_factors, z)
        y = softmax_with_zero(eta_star)[:, self.topic]
        bhat = self.solver @ y
        resid = y - self.x @ bhat
        s2 = float(resid @ resid) / self.dof
        zb = rng.standard_normal(self.coef_dim)
        return bhat + np.sqrt(s2) * (self.coef_factor @ zb)

    def typical_row(self, exclude: str) -> dict[str, object]:
        """Held values: means for numeric columns, modes for categoricals
        (ties break to the alphabetically first level), over kept rows."""
        kept = self.built.kept_rows
        row: dict[str, object] = {}
        for spec in self.built.builder.specs:
            if spec.name == exclude:
                continue
            values = [self.covs[spec.name][i] for i in kept]
            if isinstance(spec, CategoricalSpec):
                counts = Counter(values)
                top = max(counts.values())
                row[spec.name] = min(v for v, c in counts.items() if c == top)
            else:
                row[spec.name] = float(np.mean([float(v) for v in values]))
        return row


def _grid_for(composer: _Composer, target: str, grid_points: int):
    spec = next(s for s in composer.built.builder.specs if s.name == target)
    kept = composer.built.kept_rows
    values = [composer.covs[target][i] for i in kept]
    if isinstance(spec, CategoricalSpec):
        return list(spec.levels)
    nums = np.array([float(v) for v in values])
    uniq = np.unique(nums)
    if uniq.size <= grid_points:
        return [float(u) for u in uniq]
    lo, hi = float(nums.min()), float(nums.max())
    if target in LOG_GRID_COVARIATES and lo > 0:
        return [float(g) for g in np.geomspace(lo, hi, grid_points)]
    return [float(g) for g in np.linspace(lo, hi, grid_points)]


def _prediction_matrix(composer: _Composer, target: str, grid: list,
                       hold: str) -> np.ndarray:
    builder = composer.built.builder
    names = builder.formula.term_names()
    if hold == "observed":
        kept = composer.built.kept_rows
        rows = []
        base = {name: [composer.covs[name][i] for i in kept] for name in names}
        for g in grid:
            table = dict(base)
            table[target] = [g] * len(kept)
            rows.append(builder.transform(table).mean(axis=0))
        return np.stack(rows)
    typical = composer.typical_row(exclude=target)
    table = {name: [] for name in names}
    for g in grid:
        for name in names:
            table[name].append(g if name == target else typical[name])
    return builder.transform(table)


def estimate_effect(model: FittedModel, formula: Formula | str,
                    covs: dict[str, list], topic: int, target: str, *,
                    grid: list | None = None, n_draws: int = DEFAULT_DRAWS,
                    seed: int = 0, grid_points: int = DEFAULT_GRID_POINTS,
                    hold: str = "typical") -> EffectEstimate:
    """Expected proportion of ``topic`` over a grid of ``target`` values,
    other covariates held at means/modes (or averaged over observed rows
    with ``hold='observed'``). Per-draw predictions are clipped to [0, 1].
    """
    composer = _Composer(model, formula, covs, topic, n_draws, seed)
    if target not in composer.built.builder.formula.term_names():
        raise ValueError(f"target {target!r} does not appear in the formula")
    if grid is None:
        grid = _grid_for(composer, target, grid_points)
    x_grid = _prediction_matrix(composer, target, grid, hold)
    draws = np.empty((n_draws, len(grid)))
    for i, child in enumerate(composer.children):
        rng = np.random.default_rng(child)
        b = composer.coefficient_draw(rng)
        draws[i] = np.clip(x_grid @ b, 0.0, 1.0)
    lo, hi = quantile_pair(draws)
    return EffectEstimate(topic_index=topic, covariate=target, grid=list(grid),
                          mean=draws.mean(axis=0), ci_lower=lo, ci_upper=hi,
                          n_draws=n_draws)


def estimate_contrast(model: FittedModel, formula: Formula | str,
                      covs: dict[str, list], topic: int, target: str,
                      level_a, level_b, *, n_draws: int = DEFAULT_DRAWS,
                      seed: int = 0) -> ContrastEstimate:
    """Difference in expected topic proportion between two target levels.

    The draw stream depends only on the seed, so swapping the levels under
    the same seed negates the point estimate and mirrors the interval
    exactly.
    """
    composer = _Composer(model, formula, covs, topic, n_draws, seed)
    if target not in composer.built.builder.formula.term_names():
        raise ValueError(f"target {target!r} does not appear in the formula")
    x_pair = _prediction_matrix(composer, target, [level_a, level_b],
                                hold="typical")
    direction = x_pair[0] - x_pair[1]
    deltas = np.empty(n_draws)
    for i, child in enumerate(composer.children):
        rng = np.random.default_rng(child)
        b = composer.coefficient_draw(rng)
        deltas[i] = float(direction @ b)
    lo, hi = quantile_pair(deltas)
    return ContrastEstimate(topic_index=topic, covariate=target,
                            level_a=level_a, level_b=level_b,
                            point=float(deltas.mean()),
                            ci=(float(lo), float(hi)))

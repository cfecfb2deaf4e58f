"""Design-matrix construction for prevalence and effects regressions.

Turns a parsed formula plus a covariate table into a numeric matrix:
intercept, cubic B-spline bases (boundary knots at the data range, interior
knots at quantiles), one-hot dummies with the first level dropped, and
standardized continuous columns. The builder records every learned
parameter so covariate grids can be pushed through the identical encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .errors import InsufficientData
from .formula import CATEGORICAL, SPLINE, Formula, bind_formula, parse_formula
from .stm import PrevalenceDesign

SPLINE_DEGREE = 3


@dataclass(frozen=True)
class SplineSpec:
    name: str
    df: int
    knots: np.ndarray  # full vector incl. boundary multiplicity

    @property
    def lo(self) -> float:
        return float(self.knots[0])

    @property
    def hi(self) -> float:
        return float(self.knots[-1])

    def basis(self, values: np.ndarray) -> np.ndarray:
        clipped = np.clip(np.asarray(values, dtype=float), self.lo, self.hi)
        return BSpline.design_matrix(clipped, self.knots, SPLINE_DEGREE).toarray()


@dataclass(frozen=True)
class CategoricalSpec:
    name: str
    levels: tuple[str, ...]  # sorted; the first is the dropped reference

    def encode(self, values: list) -> np.ndarray:
        known = set(self.levels)
        out = np.zeros((len(values), len(self.levels) - 1))
        for row, value in enumerate(values):
            if value not in known:
                raise ValueError(
                    f"unseen level {value!r} for categorical {self.name!r}")
            for j, level in enumerate(self.levels[1:]):
                if value == level:
                    out[row, j] = 1.0
        return out


@dataclass(frozen=True)
class LinearSpec:
    name: str
    mean: float
    scale: float

    def encode(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.mean) / self.scale


def _numeric_column(values: list, name: str) -> np.ndarray:
    out = np.empty(len(values))
    for i, v in enumerate(values):
        if v is None:
            out[i] = np.nan
        elif isinstance(v, bool):
            out[i] = float(v)
        elif isinstance(v, (int, float, np.integer, np.floating)):
            out[i] = float(v)
        else:
            raise ValueError(f"non-numeric value {v!r} in column {name!r}")
    return out


def _spline_knots(values: np.ndarray, df: int, name: str) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi <= lo:
        raise InsufficientData(f"column {name!r} is constant; no spline range")
    n_interior = df - (SPLINE_DEGREE + 1)
    if n_interior > 0:
        quantiles = np.arange(1, n_interior + 1) / (n_interior + 1)
        interior = np.quantile(values, quantiles)
        distinct = (np.all(interior > lo) and np.all(interior < hi)
                    and np.all(np.diff(interior) > 0))
        if not distinct:
            raise InsufficientData(
                f"column {name!r} has too few distinct values for a df={df} spline")
    else:
        interior = np.array([])
    return np.concatenate([[lo] * (SPLINE_DEGREE + 1), interior,
                           [hi] * (SPLINE_DEGREE + 1)])


class DesignBuilder:
    """Learned encoding for one formula over one table."""

    def __init__(self, formula: Formula, specs: list, column_names: list[str],
                 standardization: dict[str, tuple[float, float]]):
        self.formula = formula
        self.specs = specs
        self.column_names = column_names
        self.standardization = standardization

    def transform(self, table: dict[str, list]) -> np.ndarray:
        """Encode complete rows with the recorded parameters."""
        n_rows = len(next(iter(table.values())))
        blocks = [np.ones((n_rows, 1))]
        for spec in self.specs:
            values = table[spec.name]
            if isinstance(spec, SplineSpec):
                col = _numeric_column(values, spec.name)
                if np.isnan(col).any():
                    raise ValueError(f"missing value in column {spec.name!r}")
                blocks.append(spec.basis(col))
            elif isinstance(spec, CategoricalSpec):
                if any(v is None for v in values):
                    raise ValueError(f"missing value in column {spec.name!r}")
                blocks.append(spec.encode(list(values)))
            else:
                col = _numeric_column(values, spec.name)
                if np.isnan(col).any():
                    raise ValueError(f"missing value in column {spec.name!r}")
                blocks.append(spec.encode(col)[:, None])
        return np.hstack(blocks)


@dataclass
class BuiltDesign:
    design: PrevalenceDesign
    builder: DesignBuilder
    kept_rows: np.ndarray
    dropped_rows: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.design.x


def build_design(formula: Formula | str, table: dict[str, list]) -> BuiltDesign:
    """Build the design over complete-case rows of the referenced columns.

    Rows with a missing value in any referenced column are dropped and
    reported via ``dropped_rows``.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    formula = bind_formula(formula, table)

    n_rows = len(next(iter(table.values())))
    keep = np.ones(n_rows, dtype=bool)
    numeric_cache: dict[str, np.ndarray] = {}
    for term in formula.terms:
        values = table[term.name]
        if term.kind == CATEGORICAL:
            keep &= np.array([v is not None for v in values])
        else:
            col = _numeric_column(values, term.name)
            numeric_cache[term.name] = col
            keep &= ~np.isnan(col)
    kept_rows = np.nonzero(keep)[0]
    dropped_rows = np.nonzero(~keep)[0]

    specs: list = []
    column_names = ["(intercept)"]
    standardization: dict[str, tuple[float, float]] = {}
    for term in formula.terms:
        if term.kind == SPLINE:
            col = numeric_cache[term.name][kept_rows]
            spec = SplineSpec(name=term.name, df=term.df,
                              knots=_spline_knots(col, term.df, term.name))
            column_names += [f"{term.label()}:{i + 1}" for i in range(term.df)]
        elif term.kind == CATEGORICAL:
            values = [table[term.name][i] for i in kept_rows]
            levels = tuple(sorted(set(values)))
            if len(levels) < 2:
                raise InsufficientData(
                    f"categorical {term.name!r} has fewer than 2 observed levels")
            spec = CategoricalSpec(name=term.name, levels=levels)
            column_names += [f"{term.name}={level}" for level in levels[1:]]
        else:
            col = numeric_cache[term.name][kept_rows]
            mean = float(col.mean())
            scale = float(col.std())
            if scale == 0.0:
                scale = 1.0
            spec = LinearSpec(name=term.name, mean=mean, scale=scale)
            standardization[term.name] = (mean, scale)
            column_names.append(term.name)
        specs.append(spec)

    if kept_rows.size < len(column_names) + 2:
        raise InsufficientData(
            f"{kept_rows.size} complete rows for {len(column_names)} design columns")

    builder = DesignBuilder(formula=formula, specs=specs,
                            column_names=column_names,
                            standardization=standardization)
    sub_table = {name: [table[name][i] for i in kept_rows]
                 for name in formula.term_names()}
    x = builder.transform(sub_table)
    design = PrevalenceDesign(x=x, column_names=column_names,
                              standardization=standardization)
    design.validate()
    return BuiltDesign(design=design, builder=builder,
                       kept_rows=kept_rows, dropped_rows=dropped_rows)

"""Linear-Gaussian structural models over a causal graph.

Every node is a linear function of its canonical parents plus
independent Gaussian noise, so confounding arcs contribute a shared
latent root with its own coefficients.  The layer exists to check
identification claims numerically: simulate, estimate naively /
with adjustment / by instrument, and compare against the closed-form
effect implied by the coefficients.

Determinism: every coefficient is drawn from a stream keyed by
(seed, edge), so the same seed reproduces the same model even after
the graph is augmented with extra nodes; sampling streams are keyed
by the sampling seed alone.
"""

from __future__ import annotations

import hashlib
import math
import warnings as _warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyArm,
    DataError,
    InsufficientSample,
    InvalidQuery,
    MissingColumn,
    NotAdmissible,
    SingularDesign,
    UnknownEdgeInSpec,
    UnknownNode,
    WeakInstrumentWarning,
)
from .graph import CausalGraph, NodeRole, build_graph, is_synthetic
from .identify import backdoor_admissible
from .separation import CIStatement
from .implications import implied_independencies

_COEF_LOW = 0.3
_COEF_HIGH = 1.0
_WEAK_F = 10.0


# -- model ----------------------------------------------------------------


@dataclass(frozen=True)
class SemModel:
    """A parameterized linear-Gaussian model.

    ``coefficients`` maps every canonical directed edge (synthetic
    confounder edges included) to its weight; ``noise_scale`` maps
    every canonical node to its noise standard deviation.
    """

    graph: CausalGraph
    coefficients: Mapping[tuple[str, str], float]
    noise_scale: Mapping[str, float]
    seed: int


@dataclass(frozen=True)
class Do:
    """Point intervention: hold ``node`` at ``value`` for every row."""

    node: str
    value: float

    def label(self) -> str:
        return f"do({self.node}={float(self.value)!r})"


@dataclass(frozen=True)
class DatasetMeta:
    seed: tuple[int, ...] | None
    regime: str
    source: str


@dataclass
class Dataset:
    """Rectangular sample: observed columns only, float64 throughout."""

    columns: tuple[str, ...]
    rows: np.ndarray
    meta: DatasetMeta = field(
        default_factory=lambda: DatasetMeta(None, "unknown", "ingested")
    )

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise DataError("row matrix shape does not match the column list")
        if len(set(self.columns)) != len(self.columns):
            raise DataError("duplicate column names")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            i = self.columns.index(name)
        except ValueError:
            raise MissingColumn(f"dataset has no column {name!r}") from None
        return self.rows[:, i]

    def require(self, names: Iterable[str]) -> None:
        missing = sorted(set(names) - set(self.columns))
        if missing:
            raise MissingColumn(f"dataset is missing column(s): {missing}")

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, source: str = "ingested") -> "Dataset":
        import csv
        import io

        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty CSV: no header row") from None
        if not header or any(not c for c in header):
            raise DataError("CSV header has an empty column name")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DataError(
                    f"CSV line {lineno}: expected {len(header)} cells, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise DataError(f"CSV line {lineno}: non-numeric cell") from None
        mat = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
        return cls(tuple(header), mat, DatasetMeta(None, "unknown", source))

    @classmethod
    def read_csv(cls, path) -> "Dataset":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv(fh.read(), source=str(path))


@dataclass(frozen=True)
class PoTable:
    """Row-level potential outcomes for a binarized exposure."""

    d: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    y: np.ndarray


# -- construction ----------------------------------------------------------


def _require_seed(seed) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise InvalidQuery("seed must be a non-negative integer")
    return seed


def _edge_stream(seed: int, src: str, dst: str) -> np.random.Generator:
    digest = hashlib.blake2b(
        src.encode("utf-8") + b"\x00" + dst.encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng([seed, int.from_bytes(digest, "big")])


def _sample_stream(seed: Sequence[int]) -> np.random.Generator:
    return np.random.default_rng(list(seed) + [0x5E11])


def instantiate_sem(
    g: CausalGraph,
    coefficients: Mapping[tuple[str, str], float] | None = None,
    seed: int = 0,
    noise_scale: Mapping[str, float] | None = None,
) -> SemModel:
    """Build a model, drawing unspecified coefficients from the seed.

    Draws are uniform on +-[0.3, 1.0] with fair sign, one independent
    stream per edge, so the same (seed, edge) pair always yields the
    same value.  Supplied coefficients must name declared directed
    edges; confounding-arc weights cannot be pinned and are always
    drawn.
    """
    seed = _require_seed(seed)
    spec = dict(coefficients or {})
    for key, val in spec.items():
        if (
            not isinstance(key, tuple)
            or len(key) != 2
            or key not in g.directed_pairs
        ):
            raise UnknownEdgeInSpec(f"no declared directed edge {key!r}")
        if not math.isfinite(float(val)):
            raise InvalidQuery(f"coefficient for {key!r} must be finite")
    scales = {v: 1.0 for v in g.canonical_nodes}
    for v, s in (noise_scale or {}).items():
        if not g.has_node(v):
            raise UnknownNode(f"node {v!r} is not declared in graph {g.name!r}")
        s = float(s)
        if not math.isfinite(s) or s < 0:
            raise InvalidQuery(f"noise scale for {v!r} must be finite and >= 0")
        scales[v] = s
    coefs: dict[tuple[str, str], float] = {}
    for src, dst in g.canonical_directed_pairs:
        if (src, dst) in spec:
            coefs[(src, dst)] = float(spec[(src, dst)])
        else:
            rng = _edge_stream(seed, src, dst)
            mag = rng.uniform(_COEF_LOW, _COEF_HIGH)
            sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
            coefs[(src, dst)] = sign * mag
    return SemModel(g, coefs, scales, seed)


# -- simulation ------------------------------------------------------------


def _normalize_seed(model: SemModel, seed) -> tuple[int, ...]:
    if seed is None:
        return (model.seed,)
    if isinstance(seed, int):
        return (_require_seed(seed),)
    try:
        parts = tuple(seed)
    except TypeError:
        raise InvalidQuery("seed must be a non-negative integer") from None
    return tuple(_require_seed(s) for s in parts)


def _draw_noise(model: SemModel, n: int, seed: tuple[int, ...]) -> dict[str, np.ndarray]:
    rng = _sample_stream(seed)
    g = model.graph
    return {
        v: rng.normal(0.0, model.noise_scale[v], n) for v in g.topological_order
    }


def _evaluate(
    model: SemModel,
    noises: Mapping[str, np.ndarray],
    override: Mapping[str, np.ndarray | float] | None = None,
    binarize: str | None = None,
) -> dict[str, np.ndarray]:
    g = model.graph
    n = len(next(iter(noises.values()))) if noises else 0
    values: dict[str, np.ndarray] = {}
    for v in g.topological_order:
        if override and v in override:
            ov = override[v]
            values[v] = (
                np.asarray(ov, dtype=np.float64)
                if isinstance(ov, np.ndarray)
                else np.full(n, float(ov))
            )
            continue
        acc = noises[v]
        for p in sorted(g.canonical_parents[v]):
            acc = acc + model.coefficients[(p, v)] * values[p]
        if v == binarize:
            acc = (acc > 0.0).astype(np.float64)
        values[v] = acc
    return values


def _regime_label(regime: Do | None) -> str:
    return regime.label() if regime is not None else "observational"


def sample(
    model: SemModel,
    n: int,
    regime: Do | None = None,
    seed: int | Sequence[int] | None = None,
) -> Dataset:
    """Draw ``n`` rows of the observed columns.

    Under a ``Do`` regime the intervened node is held at its value for
    every row while its noise draw is still consumed, so observational
    and interventional samples with the same seed share all other
    noise realizations.
    """
    if not isinstance(n, int) or n < 0:
        raise InvalidQuery("n must be a non-negative integer")
    g = model.graph
    override = None
    if regime is not None:
        if not g.has_node(regime.node):
            raise UnknownNode(
                f"node {regime.node!r} is not declared in graph {g.name!r}"
            )
        if not math.isfinite(float(regime.value)):
            raise InvalidQuery("intervention value must be finite")
        override = {regime.node: float(regime.value)}
    eff = _normalize_seed(model, seed)
    values = _evaluate(model, _draw_noise(model, n, eff), override)
    cols = g.observed_names
    mat = (
        np.column_stack([values[c] for c in cols])
        if cols
        else np.empty((n, 0), dtype=np.float64)
    )
    return Dataset(cols, mat, DatasetMeta(eff, _regime_label(regime), "simulated"))


def sample_potential_outcomes(
    model: SemModel,
    n: int,
    seed: int | Sequence[int] | None = None,
) -> tuple[Dataset, PoTable]:
    """Observational sample with a binarized exposure and both outcomes.

    The exposure's structural index is thresholded at zero to give a
    0/1 treatment column; the same noise draws are replayed with the
    exposure pinned at 0 and at 1 to produce row-level potential
    outcomes.  The outcome column equals ``y1*d + y0*(1-d)`` exactly.
    """
    if not isinstance(n, int) or n < 0:
        raise InvalidQuery("n must be a non-negative integer")
    g = model.graph
    d_node, y_node = g.designated_pair()
    if g.is_latent(d_node) or g.is_latent(y_node):
        raise InvalidQuery("exposure and outcome must be observed nodes")
    eff = _normalize_seed(model, seed)
    noises = _draw_noise(model, n, eff)
    obs = _evaluate(model, noises, binarize=d_node)
    d = obs[d_node]
    v0 = _evaluate(model, noises, override={d_node: 0.0})
    v1 = _evaluate(model, noises, override={d_node: 1.0})
    y0, y1 = v0[y_node], v1[y_node]
    y = np.where(d == 1.0, y1, y0)
    obs[y_node] = y
    cols = g.observed_names
    mat = np.column_stack([obs[c] for c in cols])
    data = Dataset(cols, mat, DatasetMeta(eff, "observational", "simulated"))
    return data, PoTable(d, y0, y1, y)


def true_effect(model: SemModel, d: str | None = None, y: str | None = None) -> float:
    """Total causal effect: sum over directed paths of coefficient products."""
    g = model.graph
    d, y = g.designated_pair(d, y)
    children = g.canonical_children
    total = 0.0

    def rec(v: str, weight: float) -> None:
        nonlocal total
        if v == y:
            total += weight
            return
        for c in sorted(children[v]):
            rec(c, weight * model.coefficients[(v, c)])

    rec(d, 1.0)
    return total


# -- estimation -------------------------------------------------------------


@dataclass(frozen=True)
class EstimateResult:
    method: str
    exposure: str
    outcome: str
    estimate: float
    stderr: float
    n: int
    details: Mapping[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "exposure": self.exposure,
            "outcome": self.outcome,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n": self.n,
            "details": dict(self.details),
            "warnings": list(self.warnings),
        }


def _ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """OLS fit; returns (beta, cov(beta), residuals)."""
    n, k = X.shape
    if n <= k:
        raise InsufficientSample(f"need more than {k} rows, got {n}")
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise SingularDesign("design matrix is rank deficient")
    resid = y - X @ beta
    sigma2 = float(resid @ resid) / (n - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return beta, cov, resid


def _design(data: Dataset, names: Sequence[str]) -> np.ndarray:
    cols = [np.ones(data.n)]
    cols.extend(data.column(c) for c in names)
    return np.column_stack(cols)


def estimate(
    data: Dataset,
    d: str,
    y: str,
    method: str,
    adjust_set: Iterable[str] = (),
    instrument: str | None = None,
    given: Iterable[str] = (),
) -> EstimateResult:
    """Estimate the effect of ``d`` on ``y`` from a dataset.

    ``naive`` regresses the outcome on the exposure alone; ``adjust``
    adds the covariates in ``adjust_set``; ``iv`` runs two-stage least
    squares with ``instrument`` (plus ``given`` covariates), flagging a
    first-stage F below 10 as a weak-instrument warning rather than an
    error.
    """
    if method not in ("naive", "adjust", "iv"):
        raise InvalidQuery(f"unknown method {method!r}")
    if d == y:
        raise InvalidQuery("exposure and outcome must differ")
    data.require([d, y])
    yv = data.column(y)

    if method == "naive":
        X = _design(data, [d])
        beta, cov, _ = _ols(X, yv)
        return EstimateResult(
            "naive", d, y, float(beta[1]), float(math.sqrt(cov[1, 1])), data.n
        )

    if method == "adjust":
        z = sorted(set(adjust_set))
        if d in z or y in z:
            raise InvalidQuery("adjustment set must exclude exposure and outcome")
        data.require(z)
        X = _design(data, [d] + z)
        beta, cov, _ = _ols(X, yv)
        return EstimateResult(
            "adjust",
            d,
            y,
            float(beta[1]),
            float(math.sqrt(cov[1, 1])),
            data.n,
            details={"adjust_size": float(len(z))},
        )

    if instrument is None:
        raise InvalidQuery("method 'iv' needs an instrument")
    w = sorted(set(given))
    if instrument in (d, y) or d in w or y in w or instrument in w:
        raise InvalidQuery("instrument, exposure, outcome, covariates must be distinct")
    data.require([instrument] + w)
    dv = data.column(d)

    X1 = _design(data, [instrument] + w)
    b1, _, resid_u = _ols(X1, dv)
    _, _, resid_r = _ols(_design(data, w), dv)
    rss_u = float(resid_u @ resid_u)
    rss_r = float(resid_r @ resid_r)
    dof = data.n - X1.shape[1]
    f_stat = math.inf if rss_u == 0 else (rss_r - rss_u) / (rss_u / dof)
    warn: tuple[str, ...] = ()
    if f_stat < _WEAK_F:
        msg = f"weak instrument: first-stage F = {f_stat:.2f} < {_WEAK_F:g}"
        _warnings.warn(msg, WeakInstrumentWarning, stacklevel=2)
        warn = (msg,)

    dhat = X1 @ b1
    X2 = np.column_stack([np.ones(data.n), dhat] + [data.column(c) for c in w])
    n2, k2 = X2.shape
    if n2 <= k2:
        raise InsufficientSample(f"need more than {k2} rows, got {n2}")
    b2, _, rank, _ = np.linalg.lstsq(X2, yv, rcond=None)
    if rank < k2:
        raise SingularDesign("second-stage design is rank deficient")
    # conventional 2SLS errors: residuals use the actual exposure
    Xs = np.column_stack([np.ones(data.n), dv] + [data.column(c) for c in w])
    resid = yv - Xs @ b2
    sigma2 = float(resid @ resid) / (n2 - k2)
    cov2 = sigma2 * np.linalg.inv(X2.T @ X2)
    return EstimateResult(
        "iv",
        d,
        y,
        float(b2[1]),
        float(math.sqrt(cov2[1, 1])),
        data.n,
        details={"first_stage_f": f_stat},
        warnings=warn,
    )


# -- estimand accounting -----------------------------------------------------


@dataclass(frozen=True)
class EstimandReport:
    """Population quantities of a potential-outcome table.

    The naive treated/control contrast decomposes two ways:
    as the ATE plus weighted potential-outcome gaps, and as the ATE
    plus baseline bias plus the control-weighted ATT-ATC difference.
    Both identities hold exactly in-sample.
    """

    ate: float
    att: float
    atc: float
    naive_diff: float
    baseline_bias: float
    differential_response: float
    p_treated: float
    y1_gap_term: float
    y0_gap_term: float

    def to_dict(self) -> dict:
        return {
            "ate": self.ate,
            "att": self.att,
            "atc": self.atc,
            "naive_diff": self.naive_diff,
            "baseline_bias": self.baseline_bias,
            "differential_response": self.differential_response,
            "p_treated": self.p_treated,
            "y1_gap_term": self.y1_gap_term,
            "y0_gap_term": self.y0_gap_term,
        }


def bias_decomposition(po: PoTable) -> EstimandReport:
    """Exact in-sample decomposition of the naive contrast."""
    d = po.d == 1.0
    n1 = int(d.sum())
    n0 = len(po.d) - n1
    if n1 == 0 or n0 == 0:
        raise EmptyArm("need at least one treated and one control row")
    p = n1 / len(po.d)
    ate = float(np.mean(po.y1 - po.y0))
    att = float(np.mean(po.y1[d] - po.y0[d]))
    atc = float(np.mean(po.y1[~d] - po.y0[~d]))
    naive = float(np.mean(po.y[d]) - np.mean(po.y[~d]))
    baseline = float(np.mean(po.y0[d]) - np.mean(po.y0[~d]))
    y1_gap = float(np.mean(po.y1[d]) - np.mean(po.y1[~d]))
    y0_gap = float(np.mean(po.y0[d]) - np.mean(po.y0[~d]))
    return EstimandReport(
        ate=ate,
        att=att,
        atc=atc,
        naive_diff=naive,
        baseline_bias=baseline,
        differential_response=(1.0 - p) * (att - atc),
        p_treated=p,
        y1_gap_term=(1.0 - p) * y1_gap,
        y0_gap_term=p * y0_gap,
    )


# -- independence testing ----------------------------------------------------


@dataclass(frozen=True)
class CiTestResult:
    statement: CIStatement
    statistic: float
    p_value: float
    reject: bool
    pairs: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {
            "statement": self.statement.to_dict(),
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject": self.reject,
        }


def _partial_corr(cols: list[np.ndarray]) -> float:
    mat = np.column_stack(cols)
    if np.any(np.std(mat, axis=0) == 0):
        raise SingularDesign("a test column has zero variance")
    corr = np.corrcoef(mat, rowvar=False)
    if not np.all(np.isfinite(corr)):
        raise SingularDesign("correlation matrix is not finite")
    try:
        prec = np.linalg.inv(corr)
    except np.linalg.LinAlgError:
        raise SingularDesign("correlation matrix is singular") from None
    r = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
    return max(-1.0 + 1e-15, min(1.0 - 1e-15, float(r)))


def ci_test(data: Dataset, stmt: CIStatement, alpha: float = 0.01) -> CiTestResult:
    """Fisher-z test of one independence statement.

    Set-valued statements run all pairwise tests with a Bonferroni
    combination, which is the exact block test under joint Gaussianity.
    """
    if not (0 < alpha < 1):
        raise InvalidQuery("alpha must be in (0, 1)")
    given = sorted(stmt.given)
    data.require(sorted(stmt.a) + sorted(stmt.b) + given)
    if data.n <= len(given) + 3:
        raise InsufficientSample(
            f"need more than {len(given) + 3} rows for |given|={len(given)}, got {data.n}"
        )
    zcols = [data.column(c) for c in given]
    pairs = []
    for a in sorted(stmt.a):
        for b in sorted(stmt.b):
            r = _partial_corr([data.column(a), data.column(b)] + zcols)
            z = math.atanh(r)
            stat = math.sqrt(data.n - len(given) - 3) * abs(z)
            p = math.erfc(stat / math.sqrt(2))
            pairs.append({"a": a, "b": b, "statistic": stat, "p_value": p})
    m = len(pairs)
    stat = max(p["statistic"] for p in pairs)
    p_comb = min(1.0, m * min(p["p_value"] for p in pairs))
    return CiTestResult(stmt, stat, p_comb, p_comb < alpha, tuple(pairs))


@dataclass(frozen=True)
class FitRow:
    statement: CIStatement
    statistic: float
    p_value: float
    reject_raw: bool
    reject_adjusted: bool

    def to_dict(self) -> dict:
        return {
            "statement": self.statement.to_dict(),
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject_raw": self.reject_raw,
            "reject_adjusted": self.reject_adjusted,
        }


@dataclass(frozen=True)
class ModelFitReport:
    rows: tuple[FitRow, ...]
    alpha: float
    correction: str
    rejected_fraction: float
    compatible: bool
    untestable: bool

    def to_dict(self) -> dict:
        return {
            "tests": [r.to_dict() for r in self.rows],
            "alpha": self.alpha,
            "correction": self.correction,
            "rejected_fraction": self.rejected_fraction,
            "compatible": self.compatible,
            "untestable": self.untestable,
        }


def model_fit_report(
    g: CausalGraph,
    data: Dataset,
    max_cond: int = 3,
    alpha: float = 0.01,
    correction: str = "holm",
) -> ModelFitReport:
    """Test every implied pairwise independence against a dataset.

    A graph with no testable implications is vacuously compatible and
    flagged as untestable.
    """
    if correction not in ("holm", "none"):
        raise InvalidQuery(f"unknown correction {correction!r}")
    data.require(g.observed_names)
    stmts = implied_independencies(g, max_cond)
    results = [ci_test(data, s, alpha) for s in stmts]
    m = len(results)
    adjusted = [False] * m
    if m and correction == "holm":
        order = sorted(range(m), key=lambda i: results[i].p_value)
        for step, i in enumerate(order):
            if results[i].p_value > alpha / (m - step):
                break
            adjusted[i] = True
    elif correction == "none":
        adjusted = [r.reject for r in results]
    rows = tuple(
        FitRow(r.statement, r.statistic, r.p_value, r.reject, adj)
        for r, adj in zip(results, adjusted)
    )
    rejected = sum(adj for adj in adjusted)
    return ModelFitReport(
        rows=rows,
        alpha=alpha,
        correction=correction,
        rejected_fraction=(rejected / m) if m else 0.0,
        compatible=(rejected == 0),
        untestable=(m == 0),
    )


# -- diagnostics -------------------------------------------------------------


@dataclass(frozen=True)
class Stratum:
    signature: dict
    n_control: int
    n_treated: int

    @property
    def ok(self) -> bool:
        return self.n_control > 0 and self.n_treated > 0

    def to_dict(self) -> dict:
        return {
            "signature": self.signature,
            "n_control": self.n_control,
            "n_treated": self.n_treated,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class PositivityReport:
    strata: tuple[Stratum, ...]
    bins: int

    @property
    def violations(self) -> tuple[Stratum, ...]:
        return tuple(s for s in self.strata if not s.ok)

    def to_dict(self) -> dict:
        return {
            "bins": self.bins,
            "strata": [s.to_dict() for s in self.strata],
            "n_violations": len(self.violations),
        }


def positivity_check(
    data: Dataset, d: str, z: Iterable[str] = (), bins: int = 5
) -> PositivityReport:
    """Count treated/control rows inside quantile strata of ``z``.

    The exposure is taken as-is when already 0/1 and is otherwise
    split at its median.  Strata missing an arm are the positivity
    violations.
    """
    if bins < 2:
        raise InvalidQuery("bins must be at least 2")
    zcols = sorted(set(z))
    data.require([d] + zcols)
    dv = data.column(d)
    uniq = np.unique(dv)
    if not np.all(np.isin(uniq, (0.0, 1.0))):
        dv = (dv > np.median(dv)).astype(np.float64)
    assignments = []
    for c in zcols:
        col = data.column(c)
        edges = np.quantile(col, [i / bins for i in range(1, bins)])
        assignments.append(np.searchsorted(edges, col, side="right"))
    counts: dict[tuple, list[int]] = {}
    for i in range(data.n):
        key = tuple(int(a[i]) for a in assignments)
        arm = counts.setdefault(key, [0, 0])
        arm[int(dv[i] == 1.0)] += 1
    strata = tuple(
        Stratum(dict(zip(zcols, key)), c[0], c[1])
        for key, c in sorted(counts.items())
    )
    return PositivityReport(strata, bins)


# -- sensitivity -------------------------------------------------------------


@dataclass(frozen=True)
class SensitivityRow:
    strength: float
    estimate: float
    stderr: float
    true_effect: float
    bias: float

    def to_dict(self) -> dict:
        return {
            "strength": self.strength,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "true_effect": self.true_effect,
            "bias": self.bias,
        }


@dataclass(frozen=True)
class SensitivityReport:
    exposure: str
    outcome: str
    z: tuple[str, ...]
    confounder: str
    n: int
    seed: int
    rows: tuple[SensitivityRow, ...]

    def to_dict(self) -> dict:
        return {
            "exposure": self.exposure,
            "outcome": self.outcome,
            "z": list(self.z),
            "confounder": self.confounder,
            "n": self.n,
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
        }


def sensitivity_sweep(
    g: CausalGraph,
    z: Iterable[str] = (),
    strengths: Iterable[float] = (),
    d: str | None = None,
    y: str | None = None,
    n: int = 20_000,
    seed: int = 0,
    coefficients: Mapping[tuple[str, str], float] | None = None,
) -> SensitivityReport:
    """Re-estimate under a synthetic unobserved confounder of the pair.

    The added latent points into the exposure with weight ``|s|`` and
    into the outcome with weight ``s``, so sweeping ``+-s`` flips the
    bias sign while keeping the confounding magnitude fixed.  Original
    coefficients are identical across the sweep and identical to the
    unaugmented model at the same seed.
    """
    d, y = g.designated_pair(d, y)
    z = frozenset(z)
    seed = _require_seed(seed)
    if not isinstance(n, int) or n < 10:
        raise InvalidQuery("n must be an integer of at least 10")
    verdict = backdoor_admissible(g, d, y, z)
    if not verdict.admissible:
        raise NotAdmissible(
            f"adjustment set {sorted(z)} is not admissible for {d!r} -> {y!r}: "
            f"{verdict.violated}"
        )
    hidden = "U_sens"
    while g.has_node(hidden):
        hidden = "_" + hidden
    nodes = [(v, g.role(v)) for v in g.node_names]
    nodes.append((hidden, NodeRole(latent=True)))
    edges = [(e.src, e.dst, e.kind) for e in g.edges]
    edges += [(hidden, d, "directed"), (hidden, y, "directed")]
    g_aug = build_graph(g.name + "+confounder", nodes, edges)
    rows = []
    base = dict(coefficients or {})
    for i, s in enumerate(strengths):
        s = float(s)
        if not math.isfinite(s):
            raise InvalidQuery("strengths must be finite")
        spec = dict(base)
        spec[(hidden, d)] = abs(s)
        spec[(hidden, y)] = s
        model = instantiate_sem(g_aug, spec, seed)
        data = sample(model, n, seed=(seed, 0x5E5, i))
        est = estimate(data, d, y, "adjust", adjust_set=z)
        te = true_effect(model, d, y)
        rows.append(
            SensitivityRow(s, est.estimate, est.stderr, te, est.estimate - te)
        )
    return SensitivityReport(d, y, tuple(sorted(z)), hidden, n, seed, tuple(rows))

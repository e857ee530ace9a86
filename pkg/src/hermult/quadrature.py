"""Quadrature rules, L^p norms of Hermite functions, and norm models.

Finite-p norms integrate |phi_nu|^p over [-R, R] with R = sqrt(2*lambda) + 12,
splitting the range at the zeros of the Hermite function (so each panel sees
a smooth lobe) and refining all panels by bisection until two successive
global estimates agree.  The sup norm scans a dense grid and polishes the
winning bracket by golden section.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

from ._accel import phi_row, weighted_abs_power_sum
from .errors import CapabilityError, ConvergenceError, DomainError
from .hermite_core import MAX_DEGREE_DEFAULT, as_entries, eval_phi_1d

_GH_MAX_NODES = 10_000
_GL_ORDER = 16
_MAX_REFINEMENTS = 12
_RHO_TOL = 1e-10


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights, tagged by construction."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    truncation_radius: float | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise DomainError("nodes and weights must be 1d arrays of equal length")
        if len(nodes) > 1 and not np.all(np.diff(nodes) > 0):
            raise DomainError("nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise DomainError("weights must all be positive")
        if self.kind not in ("gauss_hermite", "truncated_adaptive"):
            raise DomainError(f"unknown rule kind {self.kind!r}")
        has_radius = self.truncation_radius is not None
        if has_radius != (self.kind == "truncated_adaptive"):
            raise DomainError("truncation_radius present iff kind is truncated_adaptive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.nodes)


def gauss_hermite_rule(M: int) -> QuadratureRule:
    """M-point Gauss-Hermite rule for the weight e^{-x^2}.

    For large M the outermost weights fall below the double range; they
    are floored at the smallest subnormal so positivity holds while the
    numeric effect stays nil.
    """
    if not isinstance(M, (int, np.integer)) or isinstance(M, bool) or not 1 <= M <= _GH_MAX_NODES:
        raise CapabilityError(f"node count must be an int in [1, {_GH_MAX_NODES}], got {M!r}")
    nodes, weights = roots_hermite(int(M))
    weights = np.maximum(weights, np.nextafter(0.0, 1.0))
    return QuadratureRule(nodes=nodes, weights=weights, kind="gauss_hermite")


@functools.lru_cache(maxsize=32)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def truncated_rule(radius: float, panels: int = 64, order: int = _GL_ORDER) -> QuadratureRule:
    """Composite Gauss-Legendre rule on [-radius, radius]."""
    radius = float(radius)
    if not (radius > 0 and math.isfinite(radius)):
        raise DomainError(f"radius must be positive and finite, got {radius}")
    if panels < 1:
        raise DomainError("panels must be >= 1")
    edges = np.linspace(-radius, radius, panels + 1)
    x, w = _leggauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(
        nodes=nodes, weights=weights, kind="truncated_adaptive", truncation_radius=radius
    )


def _panel_nodes(edges: np.ndarray):
    x, w = _leggauss(_GL_ORDER)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _bisect(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(2 * len(edges) - 1)
    out[0::2] = edges
    out[1::2] = mids
    return out


def _initial_edges(degree: int, R: float) -> np.ndarray:
    """Panel edges on [0, R]: Hermite zeros plus a subdivided outer region."""
    if degree == 0:
        interior = np.array([])
    else:
        z = roots_hermite(degree)[0]
        interior = z[z > 1e-12]
    z0 = interior[-1] if len(interior) else 0.0
    tail_panels = 24
    tail = np.linspace(z0, R, tail_panels + 1)[1:]
    head = np.linspace(0.0, interior[0], 3)[1:-1] if len(interior) else np.linspace(0.0, R, 9)[1:-1]
    edges = np.concatenate([[0.0], head, interior, tail])
    return np.unique(edges)


def _half_line_integral(degree: int, p: float, edges: np.ndarray) -> float:
    nodes, weights = _panel_nodes(edges)
    vals, logs = phi_row(nodes, degree)
    return weighted_abs_power_sum(vals, logs, weights, p)


def _lp_integral_1d(degree: int, p: float, tol: float) -> float:
    """Adaptive evaluation of the full-line integral of |phi_degree|^p."""
    lam = 2.0 * degree + 1.0
    R = math.sqrt(2.0 * lam) + 12.0
    edges = _initial_edges(degree, R)
    history = [_half_line_integral(degree, p, edges)]
    for _ in range(_MAX_REFINEMENTS):
        edges = _bisect(edges)
        history.append(_half_line_integral(degree, p, edges))
        if abs(history[-1] - history[-2]) <= tol * abs(history[-1]):
            return 2.0 * history[-1]
    raise ConvergenceError(
        f"L^{p} integral for degree {degree} did not converge to {tol}",
        last_two=(2.0 * history[-2], 2.0 * history[-1]),
    )


def _sup_norm_1d(degree: int, tol: float) -> float:
    lam = 2.0 * degree + 1.0
    R = math.sqrt(2.0 * lam) + 12.0
    spacing = 0.25 / math.sqrt(lam)
    grid = np.arange(0.0, R + spacing, spacing)
    vals, logs = phi_row(grid, degree)
    with np.errstate(divide="ignore"):
        logmag = np.where(vals != 0.0, np.log(np.abs(vals)) + logs, -np.inf)
    i = int(np.argmax(logmag))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]

    def f(x):
        return -eval_phi_1d(degree, x).log_magnitude()

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > 1e-12 * max(1.0, abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    best = min(fc, fd, -float(logmag[i]))
    return math.exp(-best)


@functools.lru_cache(maxsize=None)
def _lp_norm_1d_cached(degree: int, p: float, tol: float) -> float:
    if math.isinf(p):
        return _sup_norm_1d(degree, tol)
    return _lp_integral_1d(degree, p, tol) ** (1.0 / p)


def lp_norm_1d(degree: int, p: float, tol: float = 1e-8) -> float:
    """One-dimensional norm ||phi_degree||_p by adaptive quadrature."""
    if not isinstance(degree, (int, np.integer)) or isinstance(degree, bool) or degree < 0:
        raise DomainError(f"degree must be a nonnegative int, got {degree!r}")
    if degree > MAX_DEGREE_DEFAULT:
        raise CapabilityError(f"degree {degree} exceeds {MAX_DEGREE_DEFAULT}")
    p = float(p)
    if not (p >= 1.0):
        raise DomainError(f"p must be in [1, inf], got {p}")
    if not 1e-14 < tol < 1e-2:
        raise DomainError(f"tol must be in (1e-14, 1e-2), got {tol}")
    return _lp_norm_1d_cached(int(degree), p, float(tol))


def lp_norm_phi(nu, p: float, tol: float = 1e-8) -> float:
    """||phi_nu||_p for a multi-index, via tensor factorization."""
    entries = as_entries(nu)
    out = 1.0
    for e in entries:
        out *= lp_norm_1d(e, p, tol)
    return out


def norm_regime(p: float) -> str:
    p = float(p)
    if not (p >= 1.0):
        raise DomainError(f"p must be in [1, inf], got {p}")
    if p < 4.0:
        return "sub4"
    if p == 4.0:
        return "eq4"
    return "super4"


def norm_model_exponent(p: float) -> float:
    """The pure-power exponent of the norm model at Lebesgue exponent p."""
    regime = norm_regime(p)
    if regime == "sub4":
        return 1.0 / (2.0 * p) - 0.25
    if regime == "eq4":
        return -0.125
    if math.isinf(p):
        return -1.0 / 12.0
    return -1.0 / (6.0 * p) - 1.0 / 12.0


def norm_model(nu_1d, p: float, k: int = 10) -> float:
    """Model factor for ||phi_nu||_p: frozen at rho_k for nu <= k, power law above.

    The p = 4 branch carries the ln(nu) factor; all models are defined
    up to an absolute constant.
    """
    nu = float(nu_1d)
    if nu < 0 or not math.isfinite(nu):
        raise DomainError(f"degree must be nonnegative and finite, got {nu_1d!r}")
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 2:
        raise DomainError(f"cutoff k must be an int >= 2, got {k!r}")
    p = float(p)
    regime = norm_regime(p)
    if nu <= k:
        return _lp_norm_1d_cached(int(k), p, _RHO_TOL)
    e = norm_model_exponent(p)
    if regime == "eq4":
        return nu ** e * math.log(nu)
    return nu ** e


@dataclass(frozen=True)
class NormEstimate:
    """Computed norm next to its model prediction (constant unknown)."""

    p: float
    degree: object
    computed: float
    predicted: float
    regime: str

    def __post_init__(self):
        if not self.computed > 0:
            raise DomainError("computed norm must be positive")
        if self.regime != norm_regime(self.p):
            raise DomainError(f"regime {self.regime!r} inconsistent with p = {self.p}")


def norm_estimate(nu, p: float, k: int = 10, tol: float = 1e-8) -> NormEstimate:
    """Bundle the quadrature norm of phi_nu with its model value."""
    entries = as_entries(nu)
    computed = lp_norm_phi(entries, p, tol)
    predicted = 1.0
    for e in entries:
        predicted *= norm_model(e, p, k)
    degree = entries[0] if len(entries) == 1 else entries
    return NormEstimate(
        p=float(p), degree=degree, computed=computed, predicted=predicted, regime=norm_regime(p)
    )


def _fit_degrees(lo: int, hi: int, samples: int) -> np.ndarray:
    degrees = np.unique(np.rint(np.geomspace(lo, hi, samples)).astype(int))
    return degrees


def fit_norm_exponent(p: float, degree_range, samples: int = 10, tol: float = 1e-8) -> float:
    """Least-squares slope of log ||phi_nu||_p against log nu.

    At p = 4 the model carries a logarithmic factor, so the fit runs
    jointly in (log nu, log log nu) and the power coefficient is
    returned; fit_norm_exponent_p4 exposes the fitted log power too.
    """
    if float(p) == 4.0:
        return fit_norm_exponent_p4(degree_range, samples, tol)[0]
    slope, _ = _fit(p, degree_range, samples, tol, with_log_term=False)
    return slope


def fit_norm_exponent_p4(degree_range, samples: int = 10, tol: float = 1e-8):
    """(power, log_power) from the joint fit at p = 4."""
    return _fit(4.0, degree_range, samples, tol, with_log_term=True)


def _fit(p, degree_range, samples, tol, with_log_term):
    lo, hi = (int(degree_range[0]), int(degree_range[1]))
    if not (10 <= lo < hi):
        raise DomainError(f"degree range must satisfy 10 <= lo < hi, got [{lo}, {hi}]")
    if samples < 8:
        raise DomainError(f"need at least 8 samples, got {samples}")
    degrees = _fit_degrees(lo, hi, samples)
    if len(degrees) < 2:
        raise DomainError("fewer than 2 distinct degrees in the fit range")
    logs = np.log(degrees.astype(float))
    ys = np.array([math.log(lp_norm_1d(int(d), p, tol)) for d in degrees])
    cols = [np.ones_like(logs), logs]
    if with_log_term:
        cols.append(np.log(logs))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    if with_log_term:
        return float(coef[1]), float(coef[2])
    return float(coef[1]), None

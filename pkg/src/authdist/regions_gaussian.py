"""Bounds on the achievable distortion region for the Gaussian-quadratic case.

Closed forms implemented here, for source variance ``sigma_s2`` and
reference-channel noise variance ``sigma_n2``:

- inner bound (no-authentication lower bound on D_r, via the maximum
  channel input power allowed by an encoding-distortion budget):

      D_r = sigma_n2 * sigma_s2 / (sigma_n2 + (sqrt(D_e) + sigma_s)^2)

- low-D_e achievable regime (distortion-compensated quantization with
  scaling ``alpha`` set to the largest root of the information
  constraint):  D_e = sigma_t2,  D_r = sigma_s2 D_e / (D_e + alpha^2 sigma_s2)

- high-D_e achievable regime (amplified quantization, amplification
  ``beta`` at the smallest value meeting the information constraint):
  D_e = (1-beta)^2 sigma_s2 + beta^2 sigma_t2,
  D_r = sigma_s2 sigma_t2 / (sigma_s2 + sigma_t2)

- quantize-and-embed baseline:  D_r = sigma_s2 / (1 + D_e / sigma_n2)

The achievable frontier reported by :func:`outer_boundary` is the lower
convex envelope (time-sharing closure) of the two achievable regimes swept
over the auxiliary noise variance ``sigma_t2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

SWEEP_LO_FACTOR = 1e-4   # sigma_t2 sweep spans [lo * sigma_n2, hi * sigma_s2]
SWEEP_HI_FACTOR = 1e4

REGIMES = ("inner", "low_de", "high_de", "envelope", "qe")


@dataclass(frozen=True)
class GaussianScenario:
    sigma_s2: float
    sigma_n2: float

    def __post_init__(self):
        if not (self.sigma_s2 > 0 and self.sigma_n2 > 0):
            raise ValueError("variances must be positive")

    @property
    def snr(self) -> float:
        return self.sigma_s2 / self.sigma_n2


@dataclass(frozen=True)
class GaussCurve:
    """(D_e, D_r) samples in squared units with a regime tag per point."""

    de: np.ndarray
    dr: np.ndarray
    regime: tuple

    def __post_init__(self):
        de = np.asarray(self.de, dtype=float)
        dr = np.asarray(self.dr, dtype=float)
        if de.shape != dr.shape or de.ndim != 1:
            raise ValueError("curve needs matching 1-D arrays")
        if len(self.regime) != de.size:
            raise ValueError("one regime tag per point")
        if any(t not in REGIMES for t in self.regime):
            raise ValueError(f"regime tags must be in {REGIMES}")
        if (de < 0).any() or (dr <= 0).any():
            raise ValueError("De must be >= 0 and Dr > 0")
        if (np.diff(de) < 0).any():
            raise ValueError("points must be sorted by De")
        de.setflags(write=False)
        dr.setflags(write=False)
        object.__setattr__(self, "de", de)
        object.__setattr__(self, "dr", dr)


def inner_bound_dr(scenario: GaussianScenario, de: float) -> float:
    """No-authentication bound: the best D_r any scheme with budget D_e can reach."""
    if de < 0:
        raise ValueError("De must be >= 0")
    s2, n2 = scenario.sigma_s2, scenario.sigma_n2
    return n2 * s2 / (n2 + (math.sqrt(de) + math.sqrt(s2)) ** 2)


def low_de_alpha(scenario: GaussianScenario, sigma_t2: float) -> float:
    """Largest scaling parameter keeping the information gap nonnegative.

    Positive root of  a^2 (t s + n s) - 2 a t s - t^2 = 0  in normalized
    variances (t = sigma_t2, s = sigma_s2, n = sigma_n2).
    """
    if sigma_t2 <= 0:
        raise ValueError("sigma_t2 must be positive")
    s2, n2 = scenario.sigma_s2, scenario.sigma_n2
    return (1.0 + math.sqrt(1.0 + sigma_t2 / s2 + n2 / s2)) / (1.0 + n2 / sigma_t2)


def information_embedding_alpha(scenario: GaussianScenario, sigma_t2: float) -> float:
    """The classical embedding (dirty-paper) scaling for the same noises."""
    if sigma_t2 <= 0:
        raise ValueError("sigma_t2 must be positive")
    return sigma_t2 / (sigma_t2 + scenario.sigma_n2)


def low_de_gap(scenario: GaussianScenario, sigma_t2: float, alpha: float) -> float:
    """I(U;Y) - I(S;U) in bits for the distortion-compensated encoder."""
    t, s, n = sigma_t2, scenario.sigma_s2, scenario.sigma_n2
    num = t * (t + s + n)
    den = t * s * (1.0 - alpha) ** 2 + n * (t + alpha ** 2 * s)
    return 0.5 * math.log2(num / den)


def low_de_point(scenario: GaussianScenario, sigma_t2: float) -> tuple[float, float]:
    """(D_e, D_r) of the low-distortion regime at auxiliary variance sigma_t2."""
    alpha = low_de_alpha(scenario, sigma_t2)
    s2 = scenario.sigma_s2
    de = sigma_t2
    dr = s2 * de / (de + alpha ** 2 * s2)
    return de, dr


def high_de_beta(scenario: GaussianScenario, sigma_t2: float) -> float:
    if sigma_t2 <= 0:
        raise ValueError("sigma_t2 must be positive")
    s2, n2 = scenario.sigma_s2, scenario.sigma_n2
    return math.sqrt(s2 * n2 / (sigma_t2 * (s2 + sigma_t2)))


def high_de_point(scenario: GaussianScenario, sigma_t2: float) -> tuple[float, float]:
    """(D_e, D_r) of the amplified-quantization regime at sigma_t2."""
    beta = high_de_beta(scenario, sigma_t2)
    s2 = scenario.sigma_s2
    de = (1.0 - beta) ** 2 * s2 + beta ** 2 * sigma_t2
    dr = s2 * sigma_t2 / (s2 + sigma_t2)
    return de, dr


def _lower_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain lower hull of (x, y) points sorted by x."""
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    hull: list[np.ndarray] = []
    for q in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) <= 0:
                hull.pop()
            else:
                break
        hull.append(q)
    return np.asarray(hull)


def sweep_points(scenario: GaussianScenario, resolution: int = 400):
    """Raw (D_e, D_r) samples of the two achievable regimes over sigma_t2."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    t_lo = SWEEP_LO_FACTOR * scenario.sigma_n2
    t_hi = SWEEP_HI_FACTOR * scenario.sigma_s2
    t_grid = np.logspace(math.log10(t_lo), math.log10(t_hi), resolution)
    low = np.array([low_de_point(scenario, t) for t in t_grid])
    high = np.array([high_de_point(scenario, t) for t in t_grid])
    return low, high


def outer_boundary(scenario: GaussianScenario, resolution: int = 400) -> GaussCurve:
    """Lower convex envelope of the two achievable regimes (time sharing)."""
    low, high = sweep_points(scenario, resolution)
    hull = _lower_hull(np.concatenate([low, high]))
    return GaussCurve(hull[:, 0], hull[:, 1], tuple("envelope" for _ in hull))


def envelope_dr(scenario: GaussianScenario, de, resolution: int = 400):
    """Envelope D_r interpolated at the query D_e values (scalar or array).

    Queries outside the swept range clamp to the end values; a running
    minimum enforces the monotonicity that budget slackness implies.
    """
    curve = outer_boundary(scenario, resolution)
    de_q = np.atleast_1d(np.asarray(de, dtype=float))
    out = np.interp(de_q, curve.de, curve.dr)
    # up-closure in De: more budget can never hurt
    order = np.argsort(de_q)
    run = np.minimum.accumulate(out[order])
    res = np.empty_like(out)
    res[order] = run
    return float(res[0]) if np.isscalar(de) or np.asarray(de).ndim == 0 else res


def qe_dr(scenario: GaussianScenario, de: float) -> float:
    """Quantize-and-embed baseline: rate R(D_r) equated to capacity C(D_e)."""
    if de < 0:
        raise ValueError("De must be >= 0")
    return scenario.sigma_s2 / (1.0 + de / scenario.sigma_n2)


def _innovation_eval(scenario: GaussianScenario, b: float, c: float, d: float):
    """Distortions and gap for U = S + cT, X = bU + dT with T ~ N(0, 1).

    Returns (de, dr, gap_bits) computed from the joint Gaussian covariance.
    """
    s2, n2 = scenario.sigma_s2, scenario.sigma_n2
    # X = b S + (b c + d) T
    coef_t = b * c + d
    de = (b - 1.0) ** 2 * s2 + coef_t ** 2
    var_u = s2 + c * c
    var_x = b * b * s2 + coef_t ** 2
    var_y = var_x + n2
    cov_uy = b * s2 + c * coef_t
    cov_us = s2
    dr = s2 - cov_us ** 2 / var_u
    det_uy = var_u * var_y - cov_uy ** 2
    det_us = var_u * s2 - cov_us ** 2
    if det_uy <= 0 or det_us <= 0:
        return de, max(dr, 1e-300), -math.inf
    i_uy = 0.5 * math.log2(var_u * var_y / det_uy)
    i_su = 0.5 * math.log2(var_u * s2 / det_us)
    return de, dr, i_uy - i_su


def best_gaussian_codebook_dr(
    scenario: GaussianScenario,
    de: float,
    restarts: int = 12,
    seed: int = 0,
) -> float:
    """Refinement search over general Gaussian innovations (b, c, d).

    Minimizes D_r subject to the information gap >= 0 and encoding
    distortion <= de; always at least as good as the two closed-form
    regimes at the same budget (they are feasible starting points).
    """
    if de <= 0:
        raise ValueError("De must be positive for the refinement search")
    s2 = scenario.sigma_s2

    def pack_eval(v):
        return _innovation_eval(scenario, v[0], v[1], v[2])

    def objective(v):
        return pack_eval(v)[1]

    cons = [
        {"type": "ineq", "fun": lambda v: pack_eval(v)[2]},
        {"type": "ineq", "fun": lambda v: de - pack_eval(v)[0]},
    ]
    starts = []
    # low-De regime: U = S + T/alpha, X = S + T  ->  b=1, c=sqrt(t)/alpha, d adjusts
    t = de
    alpha = low_de_alpha(scenario, t)
    starts.append([1.0, math.sqrt(t) / alpha, math.sqrt(t) * (1.0 - 1.0 / alpha)])
    # high-De regime: U = S + T, X = beta U  ->  b=beta, c=sqrt(t2), d=0
    lo, hi = 1e-12 * s2, 1e12 * s2
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if high_de_point(scenario, mid)[0] > de:
            lo = mid
        else:
            hi = mid
    t2 = 0.5 * (lo + hi)
    starts.append([high_de_beta(scenario, t2), math.sqrt(t2), 0.0])
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        starts.append([rng.uniform(0.2, 2.0), rng.uniform(0.01, 3.0) * math.sqrt(de),
                       rng.uniform(-1.0, 1.0) * math.sqrt(de)])

    best = math.inf
    for v0 in starts:
        d0, r0, g0 = pack_eval(v0)
        if g0 >= -1e-9 and d0 <= de * (1 + 1e-9):
            best = min(best, r0)
        res = minimize(objective, v0, method="SLSQP", constraints=cons,
                       options={"maxiter": 200, "ftol": 1e-14})
        d1, r1, g1 = pack_eval(res.x)
        if g1 >= -1e-7 and d1 <= de * (1 + 1e-7):
            best = min(best, r1)
    return best

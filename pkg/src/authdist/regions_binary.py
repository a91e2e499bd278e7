"""Achievable distortion region for the binary-Hamming scenario.

The region is generated by a three-parameter family of auxiliary variables:
with probability ``alpha`` the source bit is quantized through a BSC(tau)
and the channel input equals the auxiliary symbol; with probability
``1 - alpha`` the source is sent uncoded and the auxiliary symbol is the
source passed through a BSC(nu) (flagged on a disjoint alphabet).  The
resulting distortions and information quantities are

    D_e = alpha * tau
    D_r = alpha * tau + (1 - alpha) * nu
    I(U;Y) - I(U;S) = alpha * [h(tau) - h(p)]
                      + (1 - alpha) * [h(nu) - h(p * nu)]

where ``h`` is the binary entropy, ``p`` the reference crossover and
``*`` the BSC convolution.  A pair is achievable iff the gap is >= 0 for
some admissible parameters within the distortion budgets.

Also provides the quantize-and-embed baseline (source coding + information
embedding) and a numerical estimate of the underlying rate function over a
general auxiliary alphabet, used to confirm the parametric region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import binary_entropy, binary_entropy_arr, bsc_convolve

GRID_EPS = 1e-4          # open-interval clamp for tau, nu grids
FEAS_TOL = 1e-9          # mutual-information feasibility tolerance
LN2 = math.log(2.0)


@dataclass(frozen=True)
class BinaryAuxParams:
    """Mixing probability and the two flip rates of the auxiliary family."""

    alpha: float
    tau: float
    nu: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not (0.0 < self.tau < 0.5):
            raise ValueError(f"tau must be in (0, 1/2), got {self.tau}")
        if not (0.0 < self.nu < 0.5):
            raise ValueError(f"nu must be in (0, 1/2), got {self.nu}")


@dataclass(frozen=True)
class RegionCurve:
    """Distortion frontier sampled on a D_e grid.

    ``de`` is strictly increasing, ``dr`` non-increasing, all values in
    [0, 1/2].  ``witnesses[i]`` is the parameter triple achieving point i,
    or None where the grid point is infeasible (D_r pinned at 1/2).
    """

    de: np.ndarray
    dr: np.ndarray
    witnesses: tuple = field(default=None, repr=False)

    def __post_init__(self):
        de = np.asarray(self.de, dtype=float)
        dr = np.asarray(self.dr, dtype=float)
        if de.shape != dr.shape or de.ndim != 1 or de.size < 2:
            raise ValueError("curve needs matching 1-D de/dr arrays, >= 2 points")
        if not (np.diff(de) > 0).all():
            raise ValueError("de grid must be strictly increasing")
        if (np.diff(dr) > 1e-12).any():
            raise ValueError("dr must be non-increasing along the curve")
        if de.min() < -1e-12 or de.max() > 0.5 + 1e-12 or dr.min() < -1e-12 or dr.max() > 0.5 + 1e-12:
            raise ValueError("curve coordinates must lie in [0, 1/2]")
        de.setflags(write=False)
        dr.setflags(write=False)
        object.__setattr__(self, "de", de)
        object.__setattr__(self, "dr", dr)

    def dr_at(self, de: float) -> float:
        """Piecewise-linear interpolation of the frontier."""
        return float(np.interp(de, self.de, self.dr))


def rate_gap(params: BinaryAuxParams, p: float) -> float:
    """I(U;Y) - I(U;S) for the parametric family at reference crossover p."""
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover must be in [0, 1/2], got {p}")
    a, t, v = params.alpha, params.tau, params.nu
    coded = binary_entropy(t) - binary_entropy(p)
    uncoded = binary_entropy(v) - binary_entropy(bsc_convolve(p, v))
    return a * coded + (1.0 - a) * uncoded


def param_distortions(params: BinaryAuxParams) -> tuple[float, float]:
    """(D_e, D_r) = (alpha tau, alpha tau + (1 - alpha) nu)."""
    de = params.alpha * params.tau
    return de, de + (1.0 - params.alpha) * params.nu


def _tau_nu_grids(p: float, ntau: int, nnu: int) -> tuple[np.ndarray, np.ndarray]:
    tau = np.linspace(GRID_EPS, 0.5 - GRID_EPS, ntau)
    if 0.0 < p < 0.5:
        # the flat part of the frontier needs tau == p exactly
        tau = np.unique(np.append(tau, p))
    nu = np.linspace(GRID_EPS, 0.5 - GRID_EPS, nnu)
    return tau, nu


def boundary(p: float, resolution: int = 500, ntau: int = 200, nnu: int = 200) -> RegionCurve:
    """Lower frontier D_r(D_e) of the achievable region on a D_e grid.

    For each grid D_e, minimizes D_r over all parameter triples with
    ``alpha * tau <= D_e`` (the encoding budget) and rate gap >= 0.  For a
    fixed (tau, nu) pair the gap is linear in alpha, so feasibility reduces
    to an alpha interval whose endpoints are the only candidates for the
    linear objective; the search is a vectorized sweep over the (tau, nu)
    grid.  Infeasible grid points report D_r = 1/2, which is always
    achievable by ignoring the channel output.
    """
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover must be in [0, 1/2], got {p}")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    de_grid = np.linspace(0.0, 0.5, resolution)

    if p == 0.0:
        # Digital-signature corner: gap = alpha h(tau) >= 0 always, and the
        # open-interval infimum nu -> 0 gives D_r -> 0 at every budget.
        dr = np.zeros_like(de_grid)
        wit = tuple(BinaryAuxParams(0.0, 0.25, GRID_EPS) for _ in de_grid)
        return RegionCurve(de_grid, dr, wit)

    tau, nu = _tau_nu_grids(p, ntau, nnu)
    b1 = binary_entropy_arr(tau) - binary_entropy(p)                   # coded bracket
    b2 = binary_entropy_arr(nu) - binary_entropy_arr(p + nu - 2 * p * nu)  # uncoded, <= 0
    T, V = np.meshgrid(tau, nu, indexing="ij")
    B1, B2 = np.meshgrid(b1, b2, indexing="ij")
    span = B1 - B2
    with np.errstate(divide="ignore", invalid="ignore"):
        # smallest alpha with alpha B1 + (1-alpha) B2 >= 0
        a_min = np.where(span > 0, -B2 / span, np.where(B2 >= -FEAS_TOL, 0.0, np.inf))
    a_min = np.clip(a_min, 0.0, np.inf)

    dr_out = np.full(resolution, 0.5)
    wit_out: list[BinaryAuxParams | None] = [None] * resolution
    for i, de in enumerate(de_grid):
        with np.errstate(divide="ignore"):
            a_max = np.minimum(1.0, de / T)
        feasible = a_min <= a_max + 1e-15
        if not feasible.any():
            continue
        a_lo = np.where(feasible, a_min, 0.0)
        a_hi = np.where(feasible, a_max, 0.0)
        # D_r = nu + alpha (tau - nu) is linear in alpha: check both ends
        dr_lo = V + a_lo * (T - V)
        dr_hi = V + a_hi * (T - V)
        dr_cell = np.where(feasible, np.minimum(dr_lo, dr_hi), 0.5)
        j = np.unravel_index(np.argmin(dr_cell), dr_cell.shape)
        best = float(dr_cell[j])
        if best < 0.5:
            dr_out[i] = best
            a_star = float(a_lo[j] if dr_lo[j] <= dr_hi[j] else a_hi[j])
            wit_out[i] = BinaryAuxParams(a_star, float(T[j]), float(V[j]))
    dr_out = np.minimum.accumulate(dr_out)  # budget is a <=, frontier is monotone
    return RegionCurve(de_grid, dr_out, tuple(wit_out))


def embedding_capacity(de: float, p: float) -> float:
    """Information-embedding capacity C(D_e) for the BSC host at crossover p.

    Upper concave envelope of h(D_e) - h(p) on [p, 1/2]: linear through
    the origin up to the breakpoint D_p = 1 - 2^(-h(p)), then the curve
    itself.
    """
    if not (0.0 <= de <= 0.5):
        raise ValueError(f"De must be in [0, 1/2], got {de}")
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover must be in [0, 1/2], got {p}")
    hp = binary_entropy(p)
    dp = 1.0 - 2.0 ** (-hp)
    if de <= dp:
        if dp <= 0.0:
            return max(binary_entropy(de) - hp, 0.0)
        slope = (binary_entropy(dp) - hp) / dp
        return max(slope * de, 0.0)
    return max(binary_entropy(de) - hp, 0.0)


def _inv_entropy(target: float) -> float:
    """h^{-1}(target) on [0, 1/2] by bisection (h is increasing there)."""
    lo, hi = 0.0, 0.5
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def qe_boundary(p: float, resolution: int = 500) -> RegionCurve:
    """Quantize-and-embed frontier: solve 1 - h(D_r) = C(D_e) per grid D_e.

    The left side is the rate needed to describe the source at distortion
    D_r; the right is what the watermark can carry.  Zero capacity pins
    D_r = 1/2.
    """
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover must be in [0, 1/2], got {p}")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    de_grid = np.linspace(0.0, 0.5, resolution)
    dr = np.empty_like(de_grid)
    for i, de in enumerate(de_grid):
        cap = embedding_capacity(float(de), p)
        if cap <= 0.0:
            dr[i] = 0.5
        else:
            dr[i] = _inv_entropy(1.0 - cap)
    dr = np.minimum.accumulate(dr)
    return RegionCurve(de_grid, dr)


# ---------------------------------------------------------------------------
# Rate-function estimate over a general auxiliary alphabet
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFnResult:
    """Best rate-gap found, its witness distributions, and convergence info."""

    value: float
    q_u_given_s: np.ndarray      # (2, K) rows on the simplex
    p_x1_given_us: np.ndarray    # (K, 2) Bernoulli parameters for X = 1
    decoder: np.ndarray          # (K,) hard reconstruction per auxiliary symbol
    converged: bool
    restarts_used: int


def _gap_value_grad(z: np.ndarray, K: int, p: float) -> tuple[float, np.ndarray]:
    """Objective I(U;Y) - I(S;U) and its gradient wrt the packed variables."""
    q = np.clip(z[: 2 * K].reshape(2, K), 1e-15, None)
    r = z[2 * K:].reshape(K, 2)
    jus = 0.5 * q.T                                   # (K, 2) joint of (U, S)
    pu = jus.sum(axis=1)
    w1 = p + r * (1.0 - 2.0 * p)                      # P(Y=1 | u, s)
    juy1 = (jus * w1).sum(axis=1)
    juy = np.stack([pu - juy1, juy1], axis=1)         # (K, 2) joint of (U, Y)
    py = juy.sum(axis=0)

    ps = jus.sum(axis=0)

    def xlog(a):
        return np.where(a > 1e-15, np.log2(np.maximum(a, 1e-300)), 0.0)

    i_su = float((jus * (xlog(jus) - xlog(pu)[:, None] - xlog(ps)[None, :])).sum())
    i_uy = float((juy * (xlog(juy) - xlog(pu)[:, None] - xlog(py)[None, :])).sum())

    # exact unconstrained gradients: all three marginals vary with the joint
    g_su = xlog(jus) - xlog(pu)[:, None] - xlog(ps)[None, :] - 1.0 / LN2
    g_uy = xlog(juy) - xlog(pu)[:, None] - xlog(py)[None, :] - 1.0 / LN2

    d_q = np.empty((2, K))
    for s in (0, 1):
        d_q[s] = 0.5 * (g_uy[:, 0] * (1.0 - w1[:, s]) + g_uy[:, 1] * w1[:, s] - g_su[:, s])
    d_r = (g_uy[:, 1] - g_uy[:, 0])[:, None] * jus * (1.0 - 2.0 * p)        # (K, 2)

    return i_uy - i_su, np.concatenate([d_q.reshape(-1), d_r.reshape(-1)])


def _de_value_grad(z: np.ndarray, K: int) -> tuple[float, np.ndarray]:
    q = z[: 2 * K].reshape(2, K)
    r = z[2 * K:].reshape(K, 2)
    val = 0.5 * float((q[0] * r[:, 0]).sum() + (q[1] * (1.0 - r[:, 1])).sum())
    d_q = 0.5 * np.stack([r[:, 0], 1.0 - r[:, 1]])
    d_r = 0.5 * np.stack([q[0], -q[1]], axis=1)
    return val, np.concatenate([d_q.reshape(-1), d_r.reshape(-1)])


def _dr_value_grad(z: np.ndarray, K: int, g: np.ndarray) -> tuple[float, np.ndarray]:
    q = z[: 2 * K].reshape(2, K)
    mis = (g[None, :] != np.arange(2)[:, None])       # (2, K): decoder misses s
    val = 0.5 * float(q[mis].sum())
    d_q = 0.5 * mis.astype(float)
    return val, np.concatenate([d_q.reshape(-1), np.zeros(2 * K)])


def _best_decoder(q: np.ndarray) -> np.ndarray:
    jus = 0.5 * q.T
    return (jus[:, 1] > jus[:, 0]).astype(int)


def _evaluate(z: np.ndarray, K: int, p: float) -> tuple[float, float, float, np.ndarray]:
    q = np.clip(z[: 2 * K].reshape(2, K), 0.0, None)
    q = q / q.sum(axis=1, keepdims=True)
    r = np.clip(z[2 * K:].reshape(K, 2), 0.0, 1.0)
    zz = np.concatenate([q.reshape(-1), r.reshape(-1)])
    g = _best_decoder(q)
    val, _ = _gap_value_grad(zz, K, p)
    de, _ = _de_value_grad(zz, K)
    dr, _ = _dr_value_grad(zz, K, g)
    return val, de, dr, zz


def params_to_joint(params: BinaryAuxParams, K: int = 7) -> np.ndarray:
    """Embed the parametric witness into the packed optimizer variables."""
    if K < 4:
        raise ValueError("parametric embedding needs at least 4 auxiliary symbols")
    a, t, v = params.alpha, params.tau, params.nu
    q = np.zeros((2, K))
    r = np.full((K, 2), 0.5)
    for s in (0, 1):
        q[s, s] += a * (1.0 - t)
        q[s, 1 - s] += a * t
        q[s, 2 + s] += (1.0 - a) * (1.0 - v)
        q[s, 2 + (1 - s)] += (1.0 - a) * v
    r[0, :] = 0.0   # coded symbols transmit the symbol itself
    r[1, :] = 1.0
    r[2] = [0.0, 1.0]   # uncoded symbols transmit the source
    r[3] = [0.0, 1.0]
    q = q / q.sum(axis=1, keepdims=True)
    return np.concatenate([q.reshape(-1), r.reshape(-1)])


def best_family_member(de: float, dr: float, p: float,
                       ntau: int = 200, nnu: int = 200) -> BinaryAuxParams | None:
    """Family member maximizing the rate gap within both distortion budgets.

    For a fixed (tau, nu) cell the gap is increasing in alpha (the coded
    bracket dominates the uncoded one), so the cell optimum sits at the
    largest alpha the budgets allow; the best cell wins.
    """
    if p == 0.0:
        return BinaryAuxParams(min(1.0, de / 0.25) if de < 0.25 else 1.0,
                               0.25, GRID_EPS)
    tau, nu = _tau_nu_grids(p, ntau, nnu)
    b1 = binary_entropy_arr(tau) - binary_entropy(p)
    b2 = binary_entropy_arr(nu) - binary_entropy_arr(p + nu - 2 * p * nu)
    T, V = np.meshgrid(tau, nu, indexing="ij")
    B1, B2 = np.meshgrid(b1, b2, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        a_de = np.where(T > 0, de / T, np.inf)
        a_dr = np.where(T > V, (dr - V) / (T - V), np.inf)
        # cells where the uncoded branch alone busts the reconstruction
        # budget need alpha large enough, which may contradict the encoding
        # budget
        a_lo = np.where(V > dr, np.where(T < V, (V - dr) / (V - T), np.inf), 0.0)
    a_hi = np.minimum(1.0, np.minimum(a_de, a_dr))
    feasible = (a_hi >= 0.0) & (a_lo <= np.minimum(a_hi, 1.0) + 1e-15)
    if not feasible.any():
        return None
    # the gap is linear in alpha, so the cell optimum is at an interval end
    lo = np.clip(a_lo, 0.0, 1.0)
    hi = np.clip(a_hi, 0.0, 1.0)
    gap_lo = lo * B1 + (1.0 - lo) * B2
    gap_hi = hi * B1 + (1.0 - hi) * B2
    a = np.where(gap_hi >= gap_lo, hi, lo)
    gap = np.where(feasible, np.maximum(gap_lo, gap_hi), -np.inf)
    j = np.unravel_index(np.argmax(gap), gap.shape)
    return BinaryAuxParams(float(a[j]), float(T[j]), float(V[j]))


def _boundary_seed(de: float, dr: float, p: float, K: int) -> list[np.ndarray]:
    """Parametric seeds: best family member within the (de, dr) budgets."""
    seeds = []
    best = best_family_member(de, dr, p)
    if best is not None:
        seeds.append(params_to_joint(best, K))
    if 0.0 < p < 0.5 and p <= de + 1e-12 and p <= dr + 1e-12:
        seeds.append(params_to_joint(BinaryAuxParams(1.0, p, 0.25), K))
    return seeds


def optimize_rate_fn(
    de: float,
    dr: float,
    p: float,
    cardinality: int = 7,
    restarts: int = 32,
    max_iter: int = 300,
    seed: int = 0,
) -> RateFnResult:
    """Estimate sup I(U;Y) - I(S;U) subject to E[d_e] <= de, E[d_r] <= dr.

    The supremum runs over conditionals p(u|s) on an auxiliary alphabet of
    the given cardinality and (not necessarily deterministic) p(x|u, s);
    the reconstruction map is the minimum-distortion estimator of S from U.
    Maximization alternates SLSQP over the distributions with updates of
    the hard decoder, from parametric seeds plus random restarts; the
    reported value is always attained by a feasible witness, so it is a
    lower bound on the true supremum.
    """
    if not (0.0 <= de <= 0.5 and 0.0 <= dr <= 0.5):
        raise ValueError("distortion budgets must be in [0, 1/2]")
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"crossover must be in [0, 1/2], got {p}")
    if cardinality < 2:
        raise ValueError("auxiliary cardinality must be >= 2")
    K = int(cardinality)
    rng = np.random.default_rng(seed)

    starts = _boundary_seed(de, dr, p, K) if K >= 4 else []
    for _ in range(restarts):
        q0 = rng.dirichlet(np.ones(K), size=2)
        r0 = rng.random((K, 2))
        starts.append(np.concatenate([q0.reshape(-1), r0.reshape(-1)]))

    bounds = [(0.0, 1.0)] * (4 * K)
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    converged = False
    for z0 in starts:
        z = np.asarray(z0, dtype=float)
        q0 = np.clip(z[: 2 * K].reshape(2, K), 1e-12, None)
        g = _best_decoder(q0 / q0.sum(axis=1, keepdims=True))
        ok = False
        for _ in range(4):
            cons = [
                {
                    "type": "eq",
                    "fun": lambda zz: zz[: 2 * K].reshape(2, K).sum(axis=1) - 1.0,
                    "jac": lambda zz: np.concatenate(
                        [np.kron(np.eye(2), np.ones((1, K))), np.zeros((2, 2 * K))], axis=1
                    ),
                },
                {
                    "type": "ineq",
                    "fun": lambda zz: de - _de_value_grad(zz, K)[0],
                    "jac": lambda zz: -_de_value_grad(zz, K)[1],
                },
                {
                    "type": "ineq",
                    "fun": lambda zz, g=g: dr - _dr_value_grad(zz, K, g)[0],
                    "jac": lambda zz, g=g: -_dr_value_grad(zz, K, g)[1],
                },
            ]
            res = minimize(
                lambda zz: -_gap_value_grad(zz, K, p)[0],
                z,
                jac=lambda zz: -_gap_value_grad(zz, K, p)[1],
                method="SLSQP",
                bounds=bounds,
                constraints=cons,
                options={"maxiter": max_iter, "ftol": 1e-12},
            )
            z = np.clip(res.x, 0.0, 1.0)
            ok = ok or res.success
            qn = np.clip(z[: 2 * K].reshape(2, K), 1e-12, None)
            g_new = _best_decoder(qn / qn.sum(axis=1, keepdims=True))
            if (g_new == g).all():
                break
            g = g_new
        val, de_got, dr_got, zz = _evaluate(z, K, p)
        if de_got <= de + FEAS_TOL and dr_got <= dr + FEAS_TOL:
            if best is None or val > best[0]:
                best = (val, zz, g)
                converged = converged or ok
    if best is None:
        # the uniform independent auxiliary is always feasible when dr ~ 1/2,
        # otherwise report the (infeasible-start) sentinel
        z = np.concatenate([np.full(2 * K, 1.0 / K), np.full(2 * K, 0.5)])
        val, de_got, dr_got, zz = _evaluate(z, K, p)
        feasible = de_got <= de + FEAS_TOL and dr_got <= dr + FEAS_TOL
        best = (val if feasible else -np.inf, zz, _best_decoder(zz[: 2 * K].reshape(2, K)))
        converged = False
    q = best[1][: 2 * K].reshape(2, K)
    r = best[1][2 * K:].reshape(K, 2)
    return RateFnResult(best[0], q, r, best[2], converged, len(starts))

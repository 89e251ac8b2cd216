"""Aggregate claims S = Y_1 + ... + Y_X with NBL claim count X.

Both evaluation routes rest on the same two-term recursion structure as the
claim-count pmf: the aggregate density at parameter r couples to the shifted
family r+1, so a triangular scheme over the shift index is used.

* Discrete severities on the positive integer lattice: exact recursion,
  run at elevated precision (the triangle is as ill-conditioned as the pmf
  recursion it generalises).
* Continuous severities: a second-kind Volterra integral equation solved by
  trapezoidal forward stepping on a uniform mesh, vectorised over the
  parameter family.  The probability atom Pr(S = 0) = Pr(X = 0) is carried
  separately; its contribution to the convolution integrals appears as the
  inhomogeneous term r f(y) (p_r(0) - p_{r+1}(0)).
* A seedable Monte Carlo sampler serves as an independent cross-check.
"""

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import mpmath as mp
import numpy as np
from scipy import integrate

from .distributions import NblParams, _seed_chain, nbl_pmf_recursive
from .errors import (
    DomainError,
    MeshTooCoarse,
    OutOfRange,
    SeverityMassAtZero,
    UnnormalizedSeverity,
)


@dataclass(frozen=True)
class DiscreteSeverity:
    """Claim-size pmf on the positive integer lattice."""

    pmf: Dict[int, float]

    def __post_init__(self):
        if any(s <= 0 for s in self.pmf):
            raise SeverityMassAtZero(
                "severity support must start at 1 (no mass at or below 0)"
            )
        if any(s != int(s) for s in self.pmf):
            raise DomainError("discrete severity support must be integer lattice points")
        total = sum(self.pmf.values())
        if abs(total - 1.0) > 1e-12:
            raise UnnormalizedSeverity(f"severity pmf sums to {total!r}, not 1")
        if any(p < 0 for p in self.pmf.values()):
            raise DomainError("severity probabilities must be nonnegative")

    @property
    def max_support(self) -> int:
        return max(self.pmf)


@dataclass(frozen=True)
class ContinuousSeverity:
    """Claim-size density on (0, inf) with known mean; optional sampler.

    ``sampler(rng, size)`` draws variates for the Monte Carlo cross-check;
    evaluation routines use only the density.
    """

    density: Callable[[float], float]
    mean: float
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None

    def __post_init__(self):
        if self.mean <= 0:
            raise DomainError("severity mean must be positive")
        total, _ = integrate.quad(self.density, 0.0, np.inf, limit=200)
        if abs(total - 1.0) > 1e-8:
            raise UnnormalizedSeverity(f"severity density integrates to {total!r}")


def exponential_severity(mean: float) -> ContinuousSeverity:
    rate = 1.0 / mean
    return ContinuousSeverity(
        density=lambda y: rate * math.exp(-rate * y),
        mean=mean,
        sampler=lambda rng, size: rng.exponential(mean, size),
    )


@dataclass(frozen=True)
class CompoundDistribution:
    """Aggregate-claims law: zero atom plus lattice probabilities or density."""

    atom_at_zero: float
    grid: np.ndarray  # positive lattice points (discrete) or mesh incl. 0
    values: np.ndarray
    kind: str  # "discrete" | "continuous"

    def pmf(self, y: int) -> float:
        """Discrete case only: Pr(S = y)."""
        if self.kind != "discrete":
            raise DomainError("pmf is defined for discrete compound distributions")
        if y == 0:
            return self.atom_at_zero
        i = int(np.searchsorted(self.grid, y))
        if i >= len(self.grid) or self.grid[i] != y:
            raise OutOfRange(f"y={y} outside computed support")
        return float(self.values[i])


def compound_discrete(
    params: NblParams, severity: DiscreteSeverity, y_max: int
) -> CompoundDistribution:
    """Exact aggregate pmf g(0..y_max) for lattice severities."""
    if y_max < 0:
        raise DomainError(f"y_max must be >= 0, got {y_max}")
    r = params.r
    dps = 30 + math.ceil(0.602 * y_max)
    with mp.workdps(dps):
        rm = mp.mpf(r)
        sev = {int(s): mp.mpf(p) for s, p in severity.pmf.items()}
        # G[k][y] = aggregate pmf at y for the family parameter r+k
        G = [_seed_chain(r, params.theta, y_max + 2)]
        G = [[p] for p in G[0]]
        for y in range(1, y_max + 1):
            for k in range(y_max - y + 1):
                rho = rm + k
                acc = mp.mpf(0)
                for s, fs in sev.items():
                    if s > y:
                        continue
                    acc += (
                        ((rho * s + y - s) / y) * G[k][y - s]
                        - (rho * s / y) * G[k + 1][y - s]
                    ) * fs
                G[k].append(acc)
        probs = np.array([float(v) for v in G[0]])
    probs = np.clip(probs, 0.0, None)
    return CompoundDistribution(
        atom_at_zero=probs[0],
        grid=np.arange(1, y_max + 1),
        values=probs[1:],
        kind="discrete",
    )


def _family_depth(params) -> int:
    """Number of shifted families worth carrying: past the claim-count tail."""
    x_max = 64
    while True:
        pmf = nbl_pmf_recursive(params, x_max)
        if 1.0 - pmf.sum() < 1e-12:
            break
        x_max *= 2
    tail = int(np.searchsorted(np.cumsum(pmf), 1.0 - 1e-12)) + 16
    return max(96, tail)


def _volterra_solve(params, severity, y_max, mesh, depth):
    """Trapezoidal forward stepping of the family-coupled Volterra system.

    Families 0..depth are carried; the closure family depth+1 is taken as
    zero, which is accurate once depth exceeds the claim-count tail.
    """
    r = params.r
    m = int(mesh)
    K = int(depth)
    h = y_max / m
    y = np.linspace(0.0, y_max, m + 1)
    f = np.array([severity.density(t) for t in y])
    with mp.workdps(40):
        p0 = np.array(
            [float(v) for v in _seed_chain(r, params.theta, K + 2)]
        )  # p_{r+k}(0), k = 0..K+1
    dp0 = p0[:-1] - p0[1:]
    rk = r + np.arange(K + 1, dtype=float)

    G = np.zeros((K + 2, m + 1))  # last row: zero closure
    G[: K + 1, 0] = rk * f[0] * dp0
    implicit = 1.0 - 0.5 * h * f[0]
    for j in range(1, m + 1):
        yj = y[j]
        # trapezoid weights over s_i = i h, i = 0..j; i = 0 handled implicitly
        w = np.full(j, h)
        w[-1] = 0.5 * h  # endpoint s = y_j
        fw = w * f[1 : j + 1]
        sw = fw * y[1 : j + 1]
        hist = G[:, j - 1 :: -1][:, :j]  # columns j-1 .. 0
        A = hist[: K + 1] @ fw
        B = hist @ sw
        G[: K + 1, j] = (
            rk * f[j] * dp0
            + A
            + (rk - 1.0) / yj * B[: K + 1]
            - rk / yj * B[1 : K + 2]
        ) / implicit
    return y, np.clip(G[0], 0.0, None)


def _volterra_solve_mp(params, severity, y_max, mesh, depth, dps):
    """The same stepping scheme in arbitrary precision.

    The family system has homogeneous modes growing like y^(r+k-1), so in
    fixed precision rounding noise overtakes the (decaying) solution once
    y_max reaches a few tens of severity means.  Elevated precision scaled
    to y_max keeps the parasitic modes below the answer.
    """
    m = int(mesh)
    K = int(depth)
    with mp.workdps(dps):
        r = mp.mpf(params.r)
        h = mp.mpf(y_max) / m
        y = [h * j for j in range(m + 1)]
        f = [mp.mpf(severity.density(float(t))) for t in y]
        p0 = _seed_chain(params.r, params.theta, K + 2)
        dp0 = [p0[k] - p0[k + 1] for k in range(K + 1)]
        rk = [r + k for k in range(K + 1)]
        G = [[mp.mpf(0)] * (m + 1) for _ in range(K + 2)]
        for k in range(K + 1):
            G[k][0] = rk[k] * f[0] * dp0[k]
        implicit = 1 - h * f[0] / 2
        for j in range(1, m + 1):
            yj = y[j]
            fw = [h * f[i] for i in range(1, j + 1)]
            fw[-1] /= 2
            sw = [fw[i] * y[i + 1] for i in range(j)]
            cols = range(j - 1, -1, -1)
            B = [
                mp.fsum(wi * G[k][c] for wi, c in zip(sw, cols))
                for k in range(K + 2)
            ]
            for k in range(K + 1):
                A = mp.fsum(wi * G[k][c] for wi, c in zip(fw, cols))
                G[k][j] = (
                    rk[k] * f[j] * dp0[k]
                    + A
                    + (rk[k] - 1) / yj * B[k]
                    - rk[k] / yj * B[k + 1]
                ) / implicit
        grid = np.array([float(t) for t in y])
        vals = np.array([float(v) for v in G[0]])
    return grid, np.clip(vals, 0.0, None)


# beyond ~25 severity means the float64 solver's parasitic modes surface;
# precision is then escalated at roughly 1.5 decimal digits per extra mean
_FLOAT_HORIZON = 25.0


def compound_continuous(
    params: NblParams,
    severity: ContinuousSeverity,
    y_max: float,
    mesh: int = 256,
    max_refinements: int = 3,
) -> CompoundDistribution:
    """Aggregate-claims density on a uniform mesh, with adaptive refinement.

    The mesh is doubled until no reported value moves by more than 1e-3
    relative (measured against the density scale) between refinements.
    """
    if mesh < 16:
        raise DomainError(f"mesh must be >= 16, got {mesh}")
    if y_max <= 0:
        raise DomainError(f"y_max must be > 0, got {y_max}")
    depth = _family_depth(params)
    span = y_max / severity.mean
    if span <= _FLOAT_HORIZON:
        solve = lambda m: _volterra_solve(params, severity, y_max, m, depth)
    else:
        dps = 40 + int(1.5 * (span - _FLOAT_HORIZON))
        solve = lambda m: _volterra_solve_mp(params, severity, y_max, m, depth, dps)
        max_refinements = min(max_refinements, 1)
    grid, vals = solve(mesh)
    for _ in range(max_refinements):
        mesh *= 2
        grid2, vals2 = solve(mesh)
        scale = max(vals2.max(), 1e-300)
        diff = np.abs(vals2[::2] - vals) / scale
        grid, vals = grid2, vals2
        if diff.max() <= 1e-3:
            with mp.workdps(40):
                atom = float(_seed_chain(params.r, params.theta, 1)[0])
            return CompoundDistribution(
                atom_at_zero=atom,
                grid=grid,
                values=vals,
                kind="continuous",
            )
    raise MeshTooCoarse(
        f"solution not stable at mesh {mesh}; residual {diff.max():.2e}"
    )


def compound_cdf(dist: CompoundDistribution, y: float) -> float:
    """Pr(S <= y) accumulated from the computed representation."""
    if y < 0:
        raise OutOfRange("cdf queried at negative y")
    if len(dist.grid) and y > dist.grid[-1] + 1e-12:
        raise OutOfRange(f"y={y} beyond computed grid end {dist.grid[-1]}")
    if dist.kind == "discrete":
        i = int(np.searchsorted(dist.grid, y, side="right"))
        return float(dist.atom_at_zero + dist.values[:i].sum())
    # continuous: trapezoid integral of the density up to y
    i = int(np.searchsorted(dist.grid, y, side="right")) - 1
    g, v = dist.grid, dist.values
    total = float(np.trapezoid(v[: i + 1], g[: i + 1])) if i >= 1 else 0.0
    if i < len(g) - 1 and y > g[i]:
        frac = (y - g[i]) / (g[i + 1] - g[i])
        v_y = v[i] + frac * (v[i + 1] - v[i])
        total += 0.5 * (v[i] + v_y) * (y - g[i])
    return float(dist.atom_at_zero + total)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted Monte Carlo totals, queryable as a right-continuous cdf."""

    totals: np.ndarray

    def __call__(self, y: float) -> float:
        return bisect.bisect_right(self.totals, y) / len(self.totals)

    def std_error(self, y: float) -> float:
        p = self(y)
        return math.sqrt(p * (1.0 - p) / len(self.totals))


def compound_monte_carlo(
    params: NblParams, severity, draws: int, seed: int
) -> EmpiricalCdf:
    """Simulate S by inversion sampling of X and i.i.d. severity draws."""
    if draws < 1:
        raise DomainError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    # tabulate the claim-count cdf far enough to capture all but ~1e-10 mass
    x_max = 64
    while True:
        pmf = nbl_pmf_recursive(params, x_max)
        cdf = np.cumsum(pmf)
        if 1.0 - cdf[-1] < 1e-10:
            break
        x_max *= 2
    counts = np.searchsorted(cdf, rng.random(draws), side="left")
    total_claims = int(counts.sum())
    if isinstance(severity, DiscreteSeverity):
        support = np.array(sorted(severity.pmf))
        probs = np.array([severity.pmf[int(s)] for s in support], dtype=float)
        sev = rng.choice(support, size=total_claims, p=probs / probs.sum())
    else:
        if severity.sampler is None:
            raise DomainError("continuous severity has no sampler attached")
        sev = severity.sampler(rng, total_claims)
    totals = np.zeros(draws)
    nonzero = counts > 0
    if total_claims:
        boundaries = np.concatenate(([0], np.cumsum(counts[nonzero])))[:-1]
        totals[nonzero] = np.add.reduceat(sev, boundaries)
    return EmpiricalCdf(np.sort(totals))

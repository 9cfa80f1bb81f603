"""Empirical distribution machinery: exact CDFs, distances, discrepancy.

Samples are enumerated exactly (never binned, never sampled); distances
against step references are computed by exact sup/sum formulas over jump
points, and distances against grid references come back as intervals that
carry the grid's envelope error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import PointOutOfRange, ResourceLimit
from .mixed_radix import CantorBase
from .qadditive import DigitMap, level_values

ENUM_CAP = 1 << 24


class Interval(NamedTuple):
    """lo/hi bracket for a quantity known up to envelope error."""

    lo: float
    hi: float


class UniformCDF:
    """Exact uniform reference on [lo, hi]."""

    def __init__(self, lo: float = 0.0, hi: float = 1.0):
        if not hi > lo:
            raise ValueError(f"uniform needs hi > lo, got [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    cdf_left = cdf   # continuous

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    @property
    def density_sup(self) -> float:
        return 1.0 / (self.hi - self.lo)


class PointMassCDF:
    """Degenerate reference: all mass at one point."""

    def __init__(self, c: float):
        self.c = float(c)

    def cdf(self, x):
        return (np.asarray(x, dtype=float) >= self.c).astype(float)

    def cdf_left(self, x):
        return (np.asarray(x, dtype=float) > self.c).astype(float)

    def support(self) -> tuple[float, float]:
        return self.c, self.c


class EmpiricalCDF:
    """Exact empirical CDF of a finite sample, kept sorted."""

    def __init__(self, samples):
        s = np.sort(np.asarray(samples, dtype=float))
        if s.size == 0:
            raise ValueError("empirical CDF needs at least one sample")
        self.samples = s
        self.n = int(s.size)

    def cdf(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.n

    def cdf_left(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="left") / self.n

    def support(self) -> tuple[float, float]:
        return float(self.samples[0]), float(self.samples[-1])


def value_vector(dmap: DigitMap, base: CantorBase, n: int) -> np.ndarray:
    """f(0), ..., f(n-1) via vectorized digit extraction (exact).

    Every index is treated as a digit vector over the full enumeration
    window (levels 0 .. L(n-1)), zero digits included, so the result is
    the product-measure evaluation that the limit law discretizes.  It
    differs from the expansion value exactly when digit 0 carries a
    nonzero value at some level above a number's own length.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > ENUM_CAP:
        raise ResourceLimit(f"enumeration of {n} values exceeds the cap {ENUM_CAP}")
    idx = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=float)
    q = 1
    j = 0
    while q <= n - 1:
        a = base.digit_size(j)
        table = np.asarray(level_values(dmap, base, j), dtype=float)
        out += table[(idx // q) % a]
        q *= a
        j += 1
    return out


def empirical_cdf(dmap: DigitMap, base: CantorBase, n: int, cap: int = ENUM_CAP) -> EmpiricalCDF:
    """Empirical CDF of {f(0), ..., f(n-1)}; refuses n beyond the cap."""
    if n > cap:
        raise ResourceLimit(f"enumeration of {n} values exceeds the cap {cap}")
    return EmpiricalCDF(value_vector(dmap, base, n))


# -- Kolmogorov distance -----------------------------------------------------


def _is_grid(ref) -> bool:
    return hasattr(ref, "eps_x") and hasattr(ref, "eps_p") and hasattr(ref, "cum")


def _is_step(ref) -> bool:
    return isinstance(ref, (EmpiricalCDF, PointMassCDF)) or _is_grid(ref)


def _sup_diff_step(ecdf: EmpiricalCDF, ref) -> float:
    # both right-continuous steps: the difference is constant between merged
    # jumps and takes its piece value at each jump, so right values suffice
    best = float(np.max(np.abs(ecdf.cdf(ecdf.samples) - np.asarray(ref.cdf(ecdf.samples)))))
    if isinstance(ref, EmpiricalCDF):
        jumps = [ref.samples]
    elif isinstance(ref, PointMassCDF):
        jumps = [np.array([ref.c])]
    else:
        k = ref.cum.size
        jumps = (ref.x0 + ref.w * np.arange(lo, min(lo + (1 << 20), k))
                 for lo in range(0, k, 1 << 20))
    for chunk in jumps:
        d = np.max(np.abs(ecdf.cdf(chunk) - np.asarray(ref.cdf(chunk))))
        best = max(best, float(d))
    return best


def kolmogorov(ecdf: EmpiricalCDF, ref):
    """sup_x |F_n(x) - F(x)|.

    Exact float against exact references (continuous or step); an
    Interval against a grid reference, widened by the grid's envelope.
    """
    if _is_grid(ref):
        d0 = _sup_diff_step(ecdf, ref)
        slack = ref.vertical_slack()
        return Interval(max(0.0, d0 - slack), min(1.0, d0 + slack))
    if _is_step(ref):
        return _sup_diff_step(ecdf, ref)
    s, n = ecdf.samples, ecdf.n
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    d_plus = np.max(hi - np.asarray(ref.cdf(s)))
    d_minus = np.max(np.asarray(ref.cdf_left(s)) - lo)
    return float(max(d_plus, d_minus, 0.0))


# -- Wasserstein-1 distance ---------------------------------------------------


def _w1_step(ecdf: EmpiricalCDF, ref) -> float:
    if isinstance(ref, EmpiricalCDF):
        knots = ref.samples
    elif isinstance(ref, PointMassCDF):
        knots = np.array([ref.c])
    else:
        knots = ref.x0 + ref.w * np.arange(ref.cum.size)
    b = np.union1d(ecdf.samples, knots)
    diff = np.abs(ecdf.cdf(b[:-1]) - np.asarray(ref.cdf(b[:-1])))
    return float(np.sum(diff * np.diff(b)))


def _w1_uniform(ecdf: EmpiricalCDF, ref: UniformCDF) -> float:
    # segments between sorted samples (plus the uniform's own endpoints);
    # |c - F| with linear F integrates in closed form on each segment
    b = np.union1d(ecdf.samples, [ref.lo, ref.hi])
    a, c = b[:-1], b[1:]
    fa = np.asarray(ref.cdf(a))
    fb = np.asarray(ref.cdf(c))
    lev = np.asarray(ecdf.cdf(a))
    width = c - a
    below = fa >= lev          # F >= level on the whole segment
    above = fb <= lev
    mid = ~(below | above)
    area = np.where(below, (0.5 * (fa + fb) - lev) * width, 0.0)
    area = np.where(above, (lev - 0.5 * (fa + fb)) * width, area)
    if np.any(mid):
        slope = np.where(width > 0, (fb - fa) / np.where(width > 0, width, 1.0), 0.0)
        xs = np.where(mid, a + (lev - fa) / np.where(slope != 0, slope, 1.0), a)
        area = np.where(mid, 0.5 * (lev - fa) * (xs - a) + 0.5 * (fb - lev) * (c - xs), area)
    return float(np.sum(area))


def wasserstein1(ecdf: EmpiricalCDF, ref, with_error: bool = False):
    """integral |F_n - F| dx.

    Exact for step and uniform references; adaptive quadrature between
    sample knots otherwise (set with_error=True for the error estimate).
    """
    if _is_step(ref):
        v, err = _w1_step(ecdf, ref), 0.0
    elif isinstance(ref, UniformCDF):
        v, err = _w1_uniform(ecdf, ref), 0.0
    else:
        from scipy.integrate import quad

        lo = min(ecdf.support()[0], ref.support()[0])
        hi = max(ecdf.support()[1], ref.support()[1])
        b = np.union1d(ecdf.samples, [lo, hi])
        total, err = 0.0, 0.0
        for a, c in zip(b[:-1], b[1:]):
            if c <= a:
                continue
            lev = float(ecdf.cdf(a))
            val, e = quad(lambda x: abs(lev - float(ref.cdf(x))), a, c, limit=200)
            total += val
            err += e
        v = total
    return (v, err) if with_error else v


# -- concentration ------------------------------------------------------------


def _atom_window_sup(atoms: np.ndarray, masses: np.ndarray, r: float) -> float:
    # sup_t mass[t, t+r]: optimal closed windows start at an atom
    cum = np.cumsum(masses)
    hi = np.searchsorted(atoms, atoms + r, side="right") - 1
    lo_mass = np.concatenate(([0.0], cum[:-1]))
    return float(np.max(cum[hi] - lo_mass))


def concentration(ref, r: float):
    """Levy concentration Q(r) = sup_x (F(x + r) - F(x-)).

    Exact for atomic and uniform references; for a grid reference an
    Interval whose upper end absorbs the envelope (window widened by
    2 eps_x, plus 2 eps_p).  Other references get a certified upper
    bound: every width-r window sits inside some width-(r + s) window
    anchored on a step-s scan grid, so the scan maximum dominates the
    sup.  The step never drops below span / 2^20, keeping the scan
    bounded for arbitrarily small r.
    """
    if r < 0:
        raise ValueError(f"window width must be >= 0, got {r}")
    if _is_grid(ref):
        exact = ref.window_sup(r)
        hi = min(1.0, ref.window_sup(r + 2.0 * ref.eps_x) + 2.0 * ref.eps_p)
        return Interval(exact, hi)
    if isinstance(ref, PointMassCDF):
        return 1.0
    if isinstance(ref, EmpiricalCDF):
        atoms, counts = np.unique(ref.samples, return_counts=True)
        return _atom_window_sup(atoms, counts / ref.samples.size, r)
    if isinstance(ref, UniformCDF):
        return min(1.0, r * ref.density_sup)
    lo, hi = ref.support()
    if r == 0.0:
        return 0.0
    step = max(r / 16.0, (hi - lo) / float(1 << 20))
    xs = np.arange(lo - r - step, hi + step, step)
    return float(min(1.0, np.max(np.asarray(ref.cdf(xs + r + step))
                                 - np.asarray(ref.cdf_left(xs)))))


# -- star discrepancy ----------------------------------------------------------


def star_discrepancy(points, n: Optional[int] = None) -> float:
    """Exact one-dimensional star discrepancy of points in [0, 1].

    D*_n = max_i max(i/n - x_(i), x_(i) - (i-1)/n) over the sorted points.
    """
    pts = np.sort(np.asarray(points, dtype=float))
    if n is None:
        n = pts.size
    elif n != pts.size:
        raise ValueError(f"n = {n} does not match the {pts.size} points supplied")
    if n == 0:
        raise ValueError("star discrepancy of an empty point set is undefined")
    if pts[0] < 0.0 or pts[-1] > 1.0:
        raise PointOutOfRange("star discrepancy inputs must lie in [0, 1]")
    up = np.arange(1, n + 1) / n - pts
    down = pts - np.arange(0, n) / n
    return float(max(np.max(up), np.max(down), 0.0))


# -- smoothing inequality check -------------------------------------------------


@dataclass(frozen=True)
class SmoothingRow:
    sigma: float
    bound: float      # w1/sigma + rho_inf * sigma
    ok: bool          # d_K <= bound


@dataclass(frozen=True)
class SmoothingReport:
    dk: float
    w1: float
    rho_inf: float
    rows: tuple[SmoothingRow, ...]
    optimized_bound: float          # 2 sqrt(rho_inf * w1)
    optimized_ok: bool


def smoothing_check(ecdf: EmpiricalCDF, ref, rho_inf: float,
                    sigmas: Optional[Sequence[float]] = None) -> SmoothingReport:
    """Tabulate the kernel-smoothing bound d_K <= w1/sigma + rho_inf sigma.

    The reference must have a bounded density with sup at most rho_inf.
    Interval-valued distances use their upper ends, which only makes the
    claimed inequality harder to satisfy.
    """
    if rho_inf <= 0:
        raise ValueError(f"rho_inf must be > 0, got {rho_inf}")
    dk = kolmogorov(ecdf, ref)
    if isinstance(dk, Interval):
        dk = dk.hi
    w1 = wasserstein1(ecdf, ref)
    if sigmas is None:
        center = max(np.sqrt(w1 / rho_inf), 1e-300)
        sigmas = [center * 2.0 ** k for k in range(-3, 4)]
    rows = []
    for s in sigmas:
        bound = w1 / s + rho_inf * s
        rows.append(SmoothingRow(sigma=float(s), bound=float(bound), ok=bool(dk <= bound)))
    opt = 2.0 * float(np.sqrt(rho_inf * w1))
    return SmoothingReport(dk=float(dk), w1=float(w1), rho_inf=float(rho_inf),
                           rows=tuple(rows), optimized_bound=opt,
                           optimized_ok=bool(dk <= opt))

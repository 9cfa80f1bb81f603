"""Limit laws of digitwise-additive functions.

The limit distribution is the law of an infinite sum of independent
per-level digit variables.  Two independent constructions are provided:

- ``limit_cdf_conv``    exact lattice convolution of the per-level digit
                        measures, truncated at a certified depth, returned
                        as a GridCDF with explicit horizontal/vertical
                        envelope (eps_x, eps_p);
- ``limit_cdf_invert``  characteristic-function inversion on a finite
                        t-range with its own error budget.

Both carry enough error accounting that the two routes can be compared
within the sum of their envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import RangeTooSmall, ResourceLimit
from .mixed_radix import CantorBase
from .qadditive import DigitMap, digit_stats, level_values, tail_sums

CONV_CAP = 1 << 26          # atom lattice size limit
DEPTH_CAP = 4096


class GridCDF:
    """Right-continuous step CDF on an equally spaced knot lattice.

    cum[k] is the certified-approximate probability of (-inf, x0 + k w].
    The envelope promises  F_true(x - eps_x) - eps_p <= cdf(x) <=
    F_true(x + eps_x) + eps_p  for every x in the knot window.
    """

    def __init__(self, x0: float, w: float, cum, eps_x: float, eps_p: float,
                 conditional: bool = False):
        if w <= 0:
            raise ValueError(f"grid pitch must be > 0, got {w}")
        self.x0 = float(x0)
        self.w = float(w)
        self.cum = np.asarray(cum, dtype=float)
        if self.cum.ndim != 1 or self.cum.size == 0:
            raise ValueError("grid cumulative array must be nonempty and 1-d")
        self.eps_x = float(eps_x)
        self.eps_p = float(eps_p)
        self.conditional = bool(conditional)
        self._slack: Optional[float] = None
        self._win_cache: dict[float, float] = {}

    def support(self) -> tuple[float, float]:
        return self.x0, self.x0 + self.w * (self.cum.size - 1)

    def cdf(self, x):
        k = np.floor((np.asarray(x, dtype=float) - self.x0) / self.w).astype(np.int64)
        k = np.minimum(k, self.cum.size - 1)
        return np.where(k < 0, 0.0, self.cum[np.maximum(k, 0)])

    def cdf_left(self, x):
        kf = (np.asarray(x, dtype=float) - self.x0) / self.w
        k = np.ceil(kf).astype(np.int64) - 1
        k = np.minimum(k, self.cum.size - 1)
        return np.where(k < 0, 0.0, self.cum[np.maximum(k, 0)])

    def window_sup(self, r: float) -> float:
        """max mass of a closed window of width r (knot-anchored, exact)."""
        if r < 0:
            raise ValueError(f"window width must be >= 0, got {r}")
        hit = self._win_cache.get(r)
        if hit is not None:
            return hit
        m = int(math.floor(r / self.w))
        k = self.cum.size
        if m >= k - 1:
            out = float(self.cum[-1])
        else:
            hi = np.concatenate((self.cum[m:], np.full(m, self.cum[-1])))
            lo = np.concatenate(([0.0], self.cum[:-1]))
            out = float(np.max(hi - lo))
        self._win_cache[r] = out
        return out

    def vertical_slack(self) -> float:
        """Certified sup_x |cdf(x) - F_true(x)| over the knot window."""
        if self._slack is None:
            if self.eps_x > 0.0:
                self._slack = 3.0 * self.eps_p + self.window_sup(4.0 * self.eps_x)
            else:
                self._slack = self.eps_p
        return self._slack

    def __repr__(self) -> str:
        return (f"GridCDF(x0={self.x0}, w={self.w}, knots={self.cum.size}, "
                f"eps_x={self.eps_x:.3g}, eps_p={self.eps_p:.3g})")


# -- truncation depth ---------------------------------------------------------


def _tail_pair(dmap: DigitMap, base: CantorBase, j: int) -> tuple[float, float]:
    """(mean tail, var tail) beyond level j.

    A bare finite table has no mass past its depth, but its remaining
    rows between j and the depth still count: they are summed exactly.
    """
    if dmap.family == "custom-table" and not dmap.has_tail_meta:
        mt = vt = 0.0
        for k in range(j + 1, dmap.depth):
            st = digit_stats(dmap, base, k)
            mt += abs(st.m)
            vt += st.s2
        return mt, vt
    return tail_sums(dmap, base, j)


def choose_depth(dmap: DigitMap, base: CantorBase, w: float,
                 cap: int = DEPTH_CAP) -> int:
    """Depth minimizing lattice rounding (J w / 2) against the tail shift."""
    hard = dmap.depth if dmap.depth is not None else cap
    hard = min(hard, cap)
    best_j, best_cost = 1, math.inf
    for j in range(1, hard + 1):
        mt, vt = _tail_pair(dmap, base, j - 1)
        delta = (2.0 * vt) ** (1.0 / 3.0)
        cost = (j + 1) * w / 2.0 + mt + delta
        if cost < best_cost:
            best_j, best_cost = j, cost
        if math.isfinite(best_cost) and (j + 1) * w / 2.0 > best_cost:
            break   # the lattice term alone already exceeds the best total
    return best_j


# -- route 1: lattice convolution ----------------------------------------------


def limit_cdf_conv(dmap: DigitMap, base: CantorBase, x0: float, x1: float,
                   w: float, depth: Optional[int] = None) -> GridCDF:
    """Limit CDF by exact convolution of rounded per-level digit measures.

    Each level's atoms are rounded to the lattice {i w}, contributing w/2
    of horizontal envelope per level; the discarded tail beyond the depth
    contributes its certified mean shift plus a Chebyshev horizontal/
    vertical split.  Mass above the requested window is charged to eps_p;
    more than a quarter of the mass outside raises RangeTooSmall.
    """
    if not x1 > x0:
        raise ValueError(f"window needs x1 > x0, got [{x0}, {x1}]")
    if w <= 0:
        raise ValueError(f"grid pitch must be > 0, got {w}")
    depth_j = choose_depth(dmap, base, w) if depth is None else int(depth)
    if depth_j < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")

    offsets = []
    for j in range(depth_j):
        vals = level_values(dmap, base, j)
        offsets.append(np.array([int(round(v / w)) for v in vals], dtype=np.int64))
    # span the hull of every prefix sum so no intermediate fold leaves the array
    grid_lo, grid_hi, run_lo, run_hi = 0, 0, 0, 0
    for o in offsets:
        run_lo += int(o.min())
        run_hi += int(o.max())
        grid_lo = min(grid_lo, run_lo)
        grid_hi = max(grid_hi, run_hi)
    size = grid_hi - grid_lo + 1
    if size > CONV_CAP:
        raise ResourceLimit(
            f"convolution lattice needs {size} knots, over the cap {CONV_CAP}")

    dist = np.zeros(size)
    dist[-grid_lo] = 1.0                # the all-zero expansion sits at value 0
    for o in offsets:
        if int(o.min()) == int(o.max()):
            s = int(o[0])        # all digits shift alike: pure translation
            if s > 0:
                dist[s:] = dist[:size - s]
                dist[:s] = 0.0
            elif s < 0:
                dist[:s] = dist[-s:]
                dist[s:] = 0.0
            continue
        new = np.zeros(size)
        p = 1.0 / o.size
        for shift in o:
            # dist index i holds value (grid_lo + i) w; shifting by s moves
            # mass to index i + s, inside [0, size) by the prefix-hull sizing
            s = int(shift)
            if s >= 0:
                new[s:] += dist[:size - s] * p if s else dist * p
            else:
                new[:s] += dist[-s:] * p
        dist = new

    cum_all = np.cumsum(dist)
    total = float(cum_all[-1])

    mt, vt = _tail_pair(dmap, base, depth_j - 1)
    delta = (2.0 * vt) ** (1.0 / 3.0)
    eps_x = (depth_j + 1) * w / 2.0 + mt + delta
    eps_p = (vt / (delta * delta)) if delta > 0.0 else 0.0
    eps_p += abs(1.0 - total) + 1e-15   # float mass drift guard

    # map the atom lattice {i w} onto the requested knots x0 + k w: atom i
    # is <= knot k  iff  i <= floor(x0 / w) + k
    k_req = int(math.floor((x1 - x0) / w)) + 1
    anchor = int(math.floor(x0 / w))
    idx = anchor + np.arange(k_req, dtype=np.int64) - grid_lo
    idx_c = np.clip(idx, -1, size - 1)
    cum = np.where(idx_c < 0, 0.0, cum_all[np.maximum(idx_c, 0)])

    mass_below = float(cum[0])
    mass_above = total - float(cum[-1])
    if mass_below + mass_above > 0.25:
        raise RangeTooSmall(
            f"window [{x0}, {x1}] misses {mass_below + mass_above:.3g} of the mass")
    eps_p += mass_above

    return GridCDF(x0=x0, w=w, cum=cum, eps_x=eps_x, eps_p=eps_p)


# -- characteristic function ----------------------------------------------------


def cf_factor(dmap: DigitMap, base: CantorBase, j: int, t) -> np.ndarray:
    """phi_j(t) = mean over digits d of exp(i t f(d q_j))."""
    vals = np.asarray(level_values(dmap, base, j), dtype=float)
    tt = np.asarray(t, dtype=float)
    return np.exp(1j * np.multiply.outer(tt, vals)).mean(axis=-1)


def cf_truncation_bound(dmap: DigitMap, base: CantorBase, depth: int, t_abs: float) -> float:
    """Certified sup over |t| <= t_abs of |prod_{j<depth} phi_j - phi|."""
    mt, vt = _tail_pair(dmap, base, depth - 1)
    return t_abs * mt + 0.5 * t_abs * t_abs * (vt + mt * mt)


def cf_truncated(dmap: DigitMap, base: CantorBase, t,
                 depth: Optional[int] = None,
                 tol: float = 1e-12) -> tuple[np.ndarray, float, int]:
    """(phi values on t, certified truncation bound, depth used).

    With depth None the product deepens until the certified bound over
    the supplied t-range drops below tol (or a hard cap is hit).
    """
    tt = np.asarray(t, dtype=float)
    t_abs = float(np.max(np.abs(tt))) if tt.size else 0.0
    hard = dmap.depth if dmap.depth is not None else DEPTH_CAP
    hard = min(hard, DEPTH_CAP)
    if depth is None:
        depth = hard
        for j in range(1, hard + 1):
            if cf_truncation_bound(dmap, base, j, t_abs) <= tol:
                depth = j
                break
    depth = int(depth)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    out = np.ones(tt.shape, dtype=complex)
    for j in range(depth):
        out *= cf_factor(dmap, base, j, tt)
    return out, cf_truncation_bound(dmap, base, depth, t_abs), depth


# -- route 2: characteristic-function inversion ----------------------------------


@dataclass(frozen=True)
class InvertedCDF:
    """CDF values from smoothed inversion, with an explicit error budget."""

    xs: np.ndarray
    values: np.ndarray
    envelope: float                    # certified-modulo-quadrature total
    pieces: dict = field(repr=False)   # individual envelope contributions
    conditional: bool = False          # True when no window hint was supplied

    def cdf(self, x):
        # step interpolation on the evaluation points; exact at the xs
        idx = np.searchsorted(self.xs, np.asarray(x, dtype=float), side="right") - 1
        idx_c = np.clip(idx, 0, self.xs.size - 1)
        return np.where(idx < 0, 0.0, self.values[idx_c])


def limit_cdf_invert(dmap: DigitMap, base: CantorBase, xs,
                     t_max: float = 2048.0, n_t: int = 1 << 17,
                     depth: Optional[int] = None,
                     q_hint: Optional[float] = None) -> InvertedCDF:
    """Limit CDF through the half-range inversion formula.

    F(x) = 1/2 - (1/pi) integral_0^T Im(e^{-itx} phi(t)) / t dt, evaluated
    by trapezoid on n_t cells; the t = 0 integrand is its limit mu - x.
    The envelope stacks a Richardson quadrature estimate, the certified
    CF truncation integral, the finite-T smoothing window (q_hint should
    bound the concentration of the law over windows of width 1/T; when it
    is None the result is flagged conditional), and the kernel leak 1/T.
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    if n_t < 8 or n_t & (n_t - 1):
        raise ValueError(f"n_t must be a power of two >= 8, got {n_t}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size == 0:
        raise ValueError("need at least one evaluation point")
    if np.any(np.diff(xs) < 0):
        raise ValueError("evaluation points must be sorted")

    ts = np.linspace(0.0, t_max, n_t + 1)
    phi, cf_err, depth_used = cf_truncated(dmap, base, ts[1:], depth=depth)
    mu = math.fsum(digit_stats(dmap, base, j).m for j in range(depth_used))

    # phi(t)/t on the open grid; the t -> 0 limit of Im(e^{-itx} phi)/t is mu - x
    phi_over_t = phi / ts[1:]
    h = t_max / n_t
    vals = np.empty(xs.size)
    vals_half = np.empty(xs.size)
    chunk = max(1, (1 << 22) // (n_t + 1))
    for lo in range(0, xs.size, chunk):
        xc = xs[lo:lo + chunk]
        ker = np.exp(-1j * np.multiply.outer(xc, ts[1:]))       # (nx, n_t)
        integrand = (ker * phi_over_t).imag
        g0 = mu - xc
        # trapezoid over nodes 0..n_t, then the same on every other node
        full = h * (0.5 * g0 + integrand[:, :-1].sum(axis=1) + 0.5 * integrand[:, -1])
        coarse = 2.0 * h * (0.5 * g0 + integrand[:, 1:-1:2].sum(axis=1)
                            + 0.5 * integrand[:, -1])
        vals[lo:lo + chunk] = 0.5 - full / math.pi
        vals_half[lo:lo + chunk] = 0.5 - coarse / math.pi
    quad_err = float(np.max(np.abs(vals - vals_half))) / 3.0

    # integral of the CF truncation bound against 1/pi dt
    mt, vt = _tail_pair(dmap, base, depth_used - 1)
    cf_int = (mt * t_max + (vt + mt * mt) * t_max * t_max / 4.0) / math.pi

    smoothing = q_hint if q_hint is not None else 0.0
    kernel = 1.0 / t_max
    env = quad_err + cf_int + smoothing + kernel
    pieces = {"quad": quad_err, "cf_truncation": cf_int,
              "smoothing_window": smoothing, "kernel_leak": kernel}
    # inversion of a step law rings around jumps; clip and monotonize,
    # charging the adjustment to the envelope
    clipped = np.clip(vals, 0.0, 1.0)
    mono = np.maximum.accumulate(clipped)
    adjust = float(np.max(np.abs(mono - vals)))
    pieces["monotonize"] = adjust
    return InvertedCDF(xs=xs, values=mono, envelope=env + adjust, pieces=pieces,
                       conditional=q_hint is None)

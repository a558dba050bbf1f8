"""Density-of-states reconstruction for the coupled SO model.

Every partition function handled here is the Laplace transform of a density
of states supported on [0, inf). For the bare oscillator, the SO pair and
the difference construction (pair divided by bare) the densities are exact
delta combs and are rendered directly as regularized boxcar sums. For the
intrinsic partition function the density is only available through numerical
inversion; a boxcar regularizer of width reg_width is applied on the
transform side, s -> (1 - e^{-reg_width*s})/(reg_width*s) * Z(s), and the
inversion runs on a damped vertical line.

Evaluating the intrinsic transform off the real axis needs the analytic
continuation of the entropy integral. That is done with a single cumulative
sweep up the vertical line: the effective occupation x(alpha) is factored as
e^{-alpha*omega2} * bracket(alpha) so the fast exponential winding is handled
exactly, and the slowly winding bracket and 1 + x keep continuous logarithm
branches via phase unwrapping.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .equilibrium import free_energy_sharp
from .model import dressed_mode
from .numerics import (IltDivergenceError, IltSpec, QuadratureSpec,
                       bromwich_fft_geometry, inverse_laplace)

__all__ = [
    "DensityGrid",
    "DistributionSeries",
    "density_sharp",
    "cumulative_sharp",
    "density_closed_forms",
    "density_sharp_perturbative",
    "density_so_perturbative",
    "partition_from_density",
    "partition_from_series",
    "DEFAULT_REG_WIDTH",
]

DEFAULT_REG_WIDTH = 1e-3


@dataclass
class DensityGrid:
    """Density samples on an energy grid, regularized at scale reg_width."""

    epsilon: np.ndarray
    values: np.ndarray
    reg_width: float

    def __post_init__(self):
        self.epsilon = np.asarray(self.epsilon, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.epsilon.ndim != 1 or len(self.epsilon) != len(self.values):
            raise ValueError("epsilon and values must be 1d and equal length")
        if np.any(np.diff(self.epsilon) <= 0):
            raise ValueError("energy grid must be strictly increasing")
        if self.reg_width <= 0:
            raise ValueError("reg_width must be positive")


@dataclass
class DistributionSeries:
    """Weighted point-distribution terms (center, derivative order, weight).

    Order 0 is a delta, order 1 its first derivative, order 2 its second;
    under e^{-beta*eps} integration a term contributes
    weight * beta^order * e^{-beta*center}.
    """

    terms: tuple

    def __post_init__(self):
        self.terms = tuple((float(c), int(o), float(w)) for c, o, w in self.terms)
        for c, o, w in self.terms:
            if o not in (0, 1, 2):
                raise ValueError("derivative order must be 0, 1 or 2")
            if c < 0:
                raise ValueError("centers must be nonnegative")


# ----------------------------------------------------------------------
# intrinsic partition function off the real axis
# ----------------------------------------------------------------------

def _partition_sharp_real(p, s, q):
    mode = dressed_mode(p.omega0, p)
    return np.exp(-s * free_energy_sharp(s, mode, q))


def _branch_clearance(p):
    """Abscissa sigma_* right of which the occupation bracket provably
    cannot vanish, so the entropy continuation has no branch points with
    Re alpha > sigma_*.

    On the line Re alpha = sigma the constant-mode term obeys
    |w2/(1-e2)| >= w2/(1+e^{-sigma*omega2}) while the rotating term obeys
    |w1 e^{-2 kappa alpha}/(1-e1)| <= w1 e^{-2 kappa sigma}/(1-e^{-sigma*omega1}).
    Their ratio h(sigma) is strictly decreasing with h(0+) = inf, so zeros
    (and any winding of the bracket) are excluded wherever h < 1; sigma_*
    solves h = 1 by bisection.
    """
    m = dressed_mode(p.omega0, p)
    if p.kappa == 0.0 or m.w2 == 0.0:
        return 0.0

    def h(sigma):
        return (m.w1 / m.w2) * math.exp(-2.0 * p.kappa * sigma) \
            * (1.0 + math.exp(-sigma * m.omega2)) \
            / -math.expm1(-sigma * m.omega1)

    hi = 1.0
    while h(hi) >= 1.0:
        hi *= 2.0
        if hi > 1e6:
            raise IltDivergenceError(
                "no zero-free vertical line found for the entropy "
                "continuation")
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if h(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return hi


_ALIAS_DECADES = 12.0 * math.log(10.0)


def _auto_line_spec(p, grid, ilt):
    """Fill in ilt.damping for the vertical-line inverter when unset.

    The inversion line must clear every branch point of the entropy
    continuation, plus extra damping to suppress periodization aliases.
    Since exp(damping * eps) amplifies roundoff in the reconstruction, a
    nonzero clearance is paired with an enlarged periodic domain (longer
    evaluation grid), keeping the alias share of the damping small.
    Returns the filled spec and the evaluation grid, a superset of grid.
    """
    if ilt.method != "bromwich-fft" or ilt.damping is not None:
        return ilt, grid
    de, j0, sigma, pad, n_fft, period = bromwich_fft_geometry(grid, ilt)
    clearance = _branch_clearance(p)
    grid_eval = grid
    margin = 0.0
    if clearance > 0.0:
        while _ALIAS_DECADES / period > 0.9:
            n_fft *= 2
            period = n_fft * de
        n_total = n_fft - pad - j0
        if n_total > len(grid):
            grid_eval = grid[0] + de * np.arange(n_total)
        margin = 0.3
    damping = clearance + margin + _ALIAS_DECADES / period
    return replace(ilt, damping=damping), grid_eval


def _sweep_entropy_tail(p, a, y, refine):
    """Cumulative contour integral of S(alpha)/alpha^2 up the vertical line
    Re alpha = a, returned at the nodes a + i*y.

    Evaluates on a grid refined by `refine` and combines trapezoid sums at
    spacings h and 2h (Richardson, i.e. composite Simpson) because the
    integrand is oscillatory and the plain-trapezoid h^2 deficit, amplified
    by the final exp(-s*...), scrambles the transform's phase at large |s|.
    The branch of log(bracket) is continued by phase unwrapping; the sweep
    aborts (the caller refines globally) when the sampling cannot exclude a
    winding slip near a zero of the bracket. Returns (v, flagged) where
    flagged=True requests a finer pass.
    """
    m = dressed_mode(p.omega0, p)
    hf = (y[1] - y[0]) / refine
    t = np.arange(refine * (len(y) - 1) + 1) * hf
    alpha = a + 1j * t
    e1 = np.exp(-alpha * m.omega1)
    e2 = np.exp(-alpha * m.omega2)
    bracket = m.w2 / (1.0 - e2) \
        + m.w1 * np.exp(-2.0 * p.kappa * alpha) / (1.0 - e1)
    mag = np.abs(bracket)
    # geometric slip guard: where |bracket| is comparable to its per-step
    # change, the phase may wind faster than the sampling can certify
    step_max = np.abs(np.diff(bracket)).max()
    if np.any(mag < 3.0 * step_max):
        return None, True
    x = e2 * bracket
    if np.max(np.abs(x)) >= 0.999:
        raise IltDivergenceError(
            "effective occupation reaches unit magnitude on the inversion "
            "line; raise IltSpec.damping or use a denser grid")
    log_x = -alpha * m.omega2 + np.log(mag) \
        + 1j * np.unwrap(np.angle(bracket))
    g = ((1.0 + x) * np.log(1.0 + x) - x * log_x) / alpha ** 2
    v_h = cumulative_trapezoid(g, dx=hf, initial=0.0)[::refine]
    v_2h = cumulative_trapezoid(g[::2], dx=2.0 * hf,
                                initial=0.0)[::refine // 2]
    return (4.0 * v_h - v_2h) / 3.0, False


def _partition_sharp_line(p, s, q):
    """Intrinsic partition function on a vertical line a + i*y.

    Requires the layout the FFT inverter produces: constant real part and
    uniform imaginary parts increasing from zero. One cumulative sweep
    evaluates the entropy tail integral for the whole line; the sweep
    refines globally until the branch tracking is certified slip-free.
    """
    a = float(s[0].real)
    y = s.imag
    if a <= 0:
        raise ValueError("vertical line must sit in the right half plane")
    if not np.allclose(s.real, a, rtol=0.0, atol=1e-12 * (1.0 + a)):
        raise ValueError("vertical-line sweep needs a constant real part")
    dy = y[1] - y[0]
    if y[0] != 0.0 or dy <= 0 or not np.allclose(np.diff(y), dy, rtol=1e-9,
                                                 atol=1e-12 * dy):
        raise ValueError("vertical-line sweep needs uniform imaginary parts "
                         "increasing from zero")
    refine = 8
    while True:
        v, flagged = _sweep_entropy_tail(p, a, y, refine)
        if not flagged:
            break
        refine *= 2
        if refine > 64:
            raise IltDivergenceError(
                "branch point of the entropy continuation too close to the "
                "inversion line; raise IltSpec.damping")
    mode = dressed_mode(p.omega0, p)
    f_line = free_energy_sharp(a, mode, q) + 1j * v
    out = np.exp(-s * f_line)
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > 1e6:
        raise IltDivergenceError("entropy continuation lost its branch on "
                                 "the inversion line")
    return out


def _make_transform(p, q, shape):
    """Closure evaluating shape(s) * Z_sharp(s) for real points or a whole
    vertical line. The deformed-contour inverter probes the left half plane,
    where this evaluator has no continuation, so it is rejected upstream."""

    def transform(s):
        arr = np.atleast_1d(np.asarray(s, dtype=complex))
        if np.all(arr.imag == 0.0):
            z = np.array([_partition_sharp_real(p, sk.real, q) for sk in arr],
                         dtype=complex)
        else:
            z = _partition_sharp_line(p, arr, q)
        out = z * shape(arr)
        if np.ndim(s) == 0:
            return complex(out[0])
        return out

    return transform


def _boxcar_shape(reg_width):
    def shape(s):
        return -np.expm1(-reg_width * s) / (reg_width * s)
    return shape


def _check_ilt(ilt, default_fold):
    if ilt is None:
        return IltSpec(method="bromwich-fft", fold_at_zero=default_fold)
    if ilt.method == "fixed-talbot":
        raise ValueError("fixed-talbot needs transform values off the "
                         "vertical line; use bromwich-fft or gaver-stehfest")
    return ilt


def density_sharp(p, grid, reg_width=DEFAULT_REG_WIDTH, ilt=None, q=None):
    """Regularized intrinsic density of states on an energy grid.

    The grid should be uniform with spacing at most reg_width/4 so the
    boxcar features stay resolved.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be nonnegative and strictly increasing")
    if reg_width <= 0:
        raise ValueError("reg_width must be positive")
    ilt = _check_ilt(ilt, default_fold=True)
    q = q or QuadratureSpec()
    ilt, grid_eval = _auto_line_spec(p, grid, ilt)
    transform = _make_transform(p, q, _boxcar_shape(reg_width))
    values = inverse_laplace(transform, grid_eval, spec=ilt)[:len(grid)]
    return DensityGrid(epsilon=grid, values=values, reg_width=reg_width)


def cumulative_sharp(p, grid, ilt=None, q=None):
    """Integrated intrinsic state count N(eps) (diagnostic).

    Inverts Z(s)/s, which is far better conditioned than the density
    itself; the result's reg_width records the grid spacing since no
    boxcar regularizer is involved.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be nonnegative and strictly increasing")
    ilt = _check_ilt(ilt, default_fold=True)
    q = q or QuadratureSpec()
    ilt, grid_eval = _auto_line_spec(p, grid, ilt)
    transform = _make_transform(p, q, lambda s: 1.0 / s)
    values = inverse_laplace(transform, grid_eval, spec=ilt)[:len(grid)]
    return DensityGrid(epsilon=grid, values=values,
                       reg_width=float(grid[1] - grid[0]))


# ----------------------------------------------------------------------
# closed-form regularized densities
# ----------------------------------------------------------------------

def _lattice_terms(which, p, e_cut):
    """(center, weight) delta terms with center <= e_cut for the bare
    oscillator (S), the coupled pair (SO) and the difference construction
    (star: pair deltas minus the same lattice shifted up by omega0)."""
    m = dressed_mode(p.omega0, p)
    terms = []
    if which == "S":
        n = 0
        while n * p.omega0 <= e_cut:
            terms.append((n * p.omega0, 1.0))
            n += 1
        return terms
    if which not in ("SO", "star"):
        raise ValueError("which must be one of 'S', 'SO', 'star'")
    n = 0
    while n * m.omega1 <= e_cut:
        base = n * m.omega1
        mm = 0
        while base + mm * m.omega2 <= e_cut:
            c = base + mm * m.omega2
            terms.append((c, 1.0))
            if which == "star" and c + p.omega0 <= e_cut:
                terms.append((c + p.omega0, -1.0))
            mm += 1
        n += 1
    return terms


def density_closed_forms(which, p, grid, reg_width=DEFAULT_REG_WIDTH):
    """Exact regularized density for 'S', 'SO' or 'star'.

    Each delta of weight w at e0 becomes a boxcar of height w/reg_width on
    [e0, e0 + reg_width). Terms beyond the grid cannot intersect it and are
    dropped, which is stricter than any tail-weight cutoff.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be nonnegative and strictly increasing")
    if reg_width <= 0:
        raise ValueError("reg_width must be positive")
    values = np.zeros_like(grid)
    height = 1.0 / reg_width
    for c, w in _lattice_terms(which, p, float(grid[-1]) + reg_width):
        lo = np.searchsorted(grid, c, side="left")
        hi = np.searchsorted(grid, c + reg_width, side="left")
        values[lo:hi] += w * height
    return DensityGrid(epsilon=grid, values=values, reg_width=reg_width)


# ----------------------------------------------------------------------
# small-coupling distributional expansions
# ----------------------------------------------------------------------

def density_sharp_perturbative(p, max_n):
    """Second-order small-coupling expansion of the intrinsic density as a
    delta / delta' / delta'' series on the bare ladder n*omega0."""
    if max_n < 0:
        raise ValueError("max_n must be nonnegative")
    w0 = p.omega0
    k2 = p.kappa ** 2
    terms = []
    for n in range(0, max_n + 1):
        terms.append((n * w0, 0, 1.0))
    for n in range(1, max_n + 1):
        terms.append((n * w0, 2, k2 * n * (n + 1) / 4.0))
    for n in range(1, max_n + 1):
        terms.append((n * w0, 1, k2 * n / (2.0 * w0)))
    return DistributionSeries(terms=tuple(terms))


def density_so_perturbative(p, max_n):
    """Matching second-order expansion of the coupled-pair density, used as
    a reference in forward-transform checks."""
    if max_n < 0:
        raise ValueError("max_n must be nonnegative")
    w0 = p.omega0
    k2 = p.kappa ** 2
    terms = []
    for n in range(0, max_n + 1):
        terms.append((n * w0, 0, float(n + 1)))
    for n in range(1, max_n + 1):
        terms.append((n * w0, 2, k2 * n * (n + 1) * (n + 2) / 6.0))
    return DistributionSeries(terms=tuple(terms))


# ----------------------------------------------------------------------
# forward transforms (used by consistency checks)
# ----------------------------------------------------------------------

def partition_from_density(dg, beta):
    """Trapezoid Laplace transform of density samples at inverse temperature
    beta. For a regularized density this approximates
    Z(beta) * (1 - e^{-reg_width*beta})/(reg_width*beta)."""
    return float(np.trapezoid(dg.values * np.exp(-beta * dg.epsilon),
                              dg.epsilon))


def partition_from_series(series, beta):
    """Exact Laplace transform of a DistributionSeries."""
    total = 0.0
    for c, o, w in series.terms:
        total += w * beta ** o * np.exp(-beta * c)
    return float(total)

"""Survival-probability dynamics, local density of states, and the
random-matrix analytic curve.

For an initial state with eigenbasis weights w_m = |c_m|^2,

    SP(t) = |sum_m w_m exp(-i E_m t)|^2

decays from 1, equilibrates at the inverse participation ratio
IPR = sum w_m^2, and (for states spread over many correlated levels) dips
below the asymptote first: the correlation hole.  The hole is described by

    <SP(t)> = (1-IPR)/(eta-1) * [eta*S_bc(t) - b2(t/(2 pi nubar))] + IPR

with S_bc the squared Fourier transform of the smoothed LDoS, b2 the GOE
two-level form factor, nubar the mean density of states in the LDoS core,
and eta the effective number of available levels,
eta = 1 / int dE rho^2(E)/nu(E).
"""

from dataclasses import dataclass

import numpy as np
import scipy.ndimage
import scipy.optimize

WEIGHT_TOL = 1e-10
SP_ROUNDOFF = 1e-12


# ---------------------------------------------------------------------------
# time grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    """Logarithmic time grid."""

    t_min: float = 0.1
    t_max: float = 1e6
    points_per_decade: int = 100

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be >= 1")

    @property
    def points(self) -> np.ndarray:
        decades = np.log10(self.t_max / self.t_min)
        n = int(round(decades * self.points_per_decade)) + 1
        return np.geomspace(self.t_min, self.t_max, n)

    def covers_heisenberg(self, t_heisenberg: float) -> bool:
        """Whether the grid reaches ten Heisenberg times."""
        return self.t_max >= 10 * t_heisenberg


# ---------------------------------------------------------------------------
# survival probability
# ---------------------------------------------------------------------------

def check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"weights sum to {w.sum():.12f}, expected 1")
    return w


def survival_probability(weights, eigenvalues, times, chunk: int = 128) -> np.ndarray:
    """SP(t) = |sum_m w_m exp(-i E_m t)|^2 on an arbitrary time grid."""
    w = check_weights(weights)
    e = np.asarray(eigenvalues, dtype=float)
    t = np.atleast_1d(np.asarray(times, dtype=float))
    sp = np.empty(t.size)
    for lo in range(0, t.size, chunk):
        hi = min(lo + chunk, t.size)
        amp = w @ np.exp(-1j * np.outer(e, t[lo:hi]))
        sp[lo:hi] = np.abs(amp) ** 2
    if sp.max() > 1.0 + SP_ROUNDOFF:
        raise RuntimeError(f"survival probability exceeded 1 by {sp.max() - 1:.3e}")
    return sp


def long_time_average(weights) -> float:
    """IPR = sum_m w_m^2, the non-degenerate long-time mean of SP."""
    w = check_weights(weights)
    return float(np.sum(w * w))


def asymptote_with_degeneracies(weights, eigenvalues) -> tuple[float, int]:
    """Long-time SP mean allowing exact degeneracies.

    Degenerate levels keep their cross terms, so the asymptote is
    sum_groups (sum_{m in group} w_m)^2.  Returns (asymptote, number of
    exactly degenerate level pairs); with no degeneracies this is the IPR.
    """
    w = check_weights(weights)
    e = np.asarray(eigenvalues, dtype=float)
    boundaries = np.nonzero(np.diff(e) != 0.0)[0] + 1
    groups = np.split(w, boundaries)
    value = float(sum(g.sum() ** 2 for g in groups))
    return value, int(e.size - len(groups))


# ---------------------------------------------------------------------------
# local density of states
# ---------------------------------------------------------------------------

def exact_ldos(weights, eigenvalues) -> tuple[np.ndarray, np.ndarray]:
    """Full-resolution LDoS: the (E_m, w_m) pairs themselves."""
    w = check_weights(weights)
    e = np.asarray(eigenvalues, dtype=float)
    return e, w


@dataclass(frozen=True)
class LdosHistogram:
    """LDoS binned in constant energy windows; masses sum to 1."""

    centers: np.ndarray
    masses: np.ndarray
    width: float

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.width

    @property
    def edges(self) -> np.ndarray:
        return np.append(self.centers - 0.5 * self.width,
                         self.centers[-1] + 0.5 * self.width)


DEFAULT_BIN_WIDTH = 0.74


def energy_bins(e_lo: float, e_hi: float, width: float) -> np.ndarray:
    """Edges of constant-width bins covering [e_lo, e_hi]."""
    if width <= 0:
        raise ValueError("bin width must be positive")
    n = max(int(np.ceil((e_hi - e_lo) / width)), 1)
    return e_lo + width * np.arange(n + 1)


def smooth_ldos(eigenvalues, weights, width: float = DEFAULT_BIN_WIDTH,
                e_range: tuple[float, float] | None = None) -> LdosHistogram:
    """Histogram of |c_m|^2 over constant energy windows of the given width.

    `e_range` fixes the grid explicitly (needed when several realizations
    must share bins); by default the grid starts at the lowest eigenvalue.
    """
    e = np.asarray(eigenvalues, dtype=float)
    w = check_weights(weights)
    lo, hi = (float(e.min()), float(e.max())) if e_range is None else e_range
    edges = energy_bins(lo, hi, width)
    masses, _ = np.histogram(e, bins=edges, weights=w)
    # np.histogram drops values outside the range; fold any such roundoff
    # stragglers into the edge bins so mass is conserved exactly
    masses[0] += w[e < edges[0]].sum()
    masses[-1] += w[e > edges[-1]].sum()
    centers = 0.5 * (edges[:-1] + edges[1:])
    return LdosHistogram(centers=centers, masses=masses, width=width)


def average_ldos(eigenvalue_sets, weight_sets, width: float = DEFAULT_BIN_WIDTH) -> LdosHistogram:
    """Ensemble-averaged smoothed LDoS on a common bin grid."""
    lo = min(float(np.min(e)) for e in eigenvalue_sets)
    hi = max(float(np.max(e)) for e in eigenvalue_sets)
    hists = [smooth_ldos(e, w, width, (lo, hi))
             for e, w in zip(eigenvalue_sets, weight_sets)]
    masses = np.mean(np.stack([h.masses for h in hists]), axis=0)
    return LdosHistogram(centers=hists[0].centers, masses=masses, width=width)


# ---------------------------------------------------------------------------
# Gaussian fit of the smoothed LDoS
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianLdosFit:
    """Normalized Gaussian fitted to an LDoS histogram."""

    center: float
    sigma: float
    rss: float       # residual sum of squares against bin densities
    method: str      # "least-squares" or "moments" (fallback)


def _gaussian_density(e, center, sigma):
    return np.exp(-((e - center) ** 2) / (2 * sigma**2)) / (sigma * np.sqrt(2 * np.pi))


def moment_fit(hist: LdosHistogram) -> tuple[float, float]:
    """Mean and standard deviation of the histogram mass distribution."""
    total = hist.masses.sum()
    center = float(np.sum(hist.centers * hist.masses) / total)
    var = float(np.sum((hist.centers - center) ** 2 * hist.masses) / total)
    return center, np.sqrt(var)


def fit_gaussian(hist: LdosHistogram, method: str = "least-squares") -> GaussianLdosFit:
    """Fit a normalized Gaussian (center, sigma) to the binned LDoS densities.

    Falls back to moment matching when the least-squares fit does not
    converge; the `method` field records which path produced the result.
    """
    if np.count_nonzero(hist.masses) < 4:
        raise ValueError("need at least 4 nonzero bins for a Gaussian fit")
    c0, s0 = moment_fit(hist)
    if method == "least-squares":
        try:
            popt, _ = scipy.optimize.curve_fit(
                _gaussian_density, hist.centers, hist.densities, p0=(c0, s0))
            center, sigma = float(popt[0]), float(abs(popt[1]))
        except RuntimeError:
            method = "moments"
            center, sigma = c0, s0
    elif method == "moments":
        center, sigma = c0, s0
    else:
        raise ValueError(f"unknown fit method {method!r}")
    if sigma <= 0:
        raise RuntimeError("degenerate LDoS: fitted width is zero")
    rss = float(np.sum((hist.densities - _gaussian_density(hist.centers, center, sigma)) ** 2))
    return GaussianLdosFit(center=center, sigma=sigma, rss=rss, method=method)


# ---------------------------------------------------------------------------
# analytic survival probability
# ---------------------------------------------------------------------------

def analytic_sp_bc(fit: GaussianLdosFit, times) -> np.ndarray:
    """|FT of the Gaussian LDoS|^2 = exp(-sigma^2 t^2), the initial decay."""
    if fit.sigma <= 0:
        raise ValueError("fit width must be positive")
    t = np.asarray(times, dtype=float)
    return np.exp(-(fit.sigma**2) * t * t)


def sp_bc_numeric(hist: LdosHistogram, times, resolution: int = 10) -> np.ndarray:
    """Quadrature route for non-Gaussian LDoS: trapezoidal |FT|^2 of the
    piecewise-linear bin densities at `resolution` x bin refinement."""
    t = np.asarray(times, dtype=float)
    e = np.linspace(hist.centers[0], hist.centers[-1],
                    resolution * hist.centers.size + 1)
    rho = np.interp(e, hist.centers, hist.densities)
    norm = np.trapezoid(rho, e)
    amp = np.trapezoid(rho[None, :] * np.exp(-1j * t[:, None] * e[None, :]), e, axis=1)
    return np.abs(amp / norm) ** 2


def b2(t) -> np.ndarray:
    """GOE two-level form factor.

    b2(t) = [1 - 2t + t ln(2t+1)] for t <= 1 and
            [t ln((2t+1)/(2t-1)) - 1] for t > 1; continuous at t = 1 with
    value ln 3 - 1, decaying as 1/(12 t^2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("form factor argument must be >= 0")
    below = 1.0 - 2.0 * t + t * np.log1p(2.0 * t)
    denom = np.where(t > 0.5, 2.0 * t - 1.0, 1.0)  # guard division; branch unused there
    above = t * np.log1p(2.0 / denom) - 1.0
    out = np.where(t <= 1.0, below, above)
    return out if out.shape else float(out)


def estimate_eta(ldos_density, dos_density, width: float) -> float:
    """Effective number of available levels from a Riemann sum:

        eta = 1 / sum_i width * rho_i^2 / nu_i

    `ldos_density` and `dos_density` must share the same bin grid; the
    LDoS integrates to 1 and the DOS to the Hilbert-space dimension.
    """
    rho = np.asarray(ldos_density, dtype=float)
    nu = np.asarray(dos_density, dtype=float)
    if rho.shape != nu.shape:
        raise ValueError("LDoS and DOS must be binned on the same grid")
    if width <= 0:
        raise ValueError("bin width must be positive")
    occupied = rho > 0
    if not occupied.any():
        raise ValueError("LDoS carries no mass on this grid")
    if np.any(nu[occupied] <= 0):
        raise ValueError("LDoS mass found in bins with zero density of states")
    integral = width * np.sum(rho[occupied] ** 2 / nu[occupied])
    return float(1.0 / integral)


def eta_from_samples(eigenvalue_sets, weight_sets, width: float = DEFAULT_BIN_WIDTH,
                     e_range: tuple[float, float] | None = None) -> float:
    """eta from raw per-realization spectra and LDoS weights.

    The LDoS and DOS are ensemble-averaged on a common bin grid before the
    Riemann sum.
    """
    eigenvalue_sets = [np.asarray(e, dtype=float) for e in eigenvalue_sets]
    n_real = len(eigenvalue_sets)
    if e_range is None:
        e_range = (min(float(e.min()) for e in eigenvalue_sets),
                   max(float(e.max()) for e in eigenvalue_sets))
    edges = energy_bins(e_range[0], e_range[1], width)
    mass = np.zeros(edges.size - 1)
    count = np.zeros(edges.size - 1)
    for e, w in zip(eigenvalue_sets, weight_sets):
        m, _ = np.histogram(e, bins=edges, weights=check_weights(w))
        k, _ = np.histogram(e, bins=edges)
        mass += m
        count += k
    rho = mass / (n_real * width)
    nu = count / (n_real * width)
    return estimate_eta(rho, nu, width)


def mean_dos_in_window(eigenvalue_sets, center: float, half_width: float) -> float:
    """Mean density of states over [center - hw, center + hw], averaged over
    realizations; this is the nubar entering the form-factor time scale."""
    if half_width <= 0:
        raise ValueError("window half-width must be positive")
    counts = [np.count_nonzero(np.abs(np.asarray(e) - center) <= half_width)
              for e in eigenvalue_sets]
    return float(np.mean(counts) / (2 * half_width))


@dataclass(frozen=True)
class AnalyticInputs:
    """Scalars feeding the random-matrix survival-probability curve."""

    ipr: float
    eta: float
    nu_bar: float
    ldos_fit: GaussianLdosFit

    def __post_init__(self):
        if not 0 < self.ipr <= 1:
            raise ValueError(f"ipr={self.ipr} outside (0, 1]")
        if self.eta <= 1:
            raise ValueError(f"eta={self.eta} must exceed 1")
        if self.nu_bar <= 0:
            raise ValueError("nu_bar must be positive")

    @property
    def heisenberg_time(self) -> float:
        return 2 * np.pi * self.nu_bar


def analytic_sp(inputs: AnalyticInputs, times) -> np.ndarray:
    """<SP(t)> = (1-IPR)/(eta-1) [eta S_bc(t) - b2(t / 2 pi nubar)] + IPR."""
    t = np.asarray(times, dtype=float)
    s_bc = analytic_sp_bc(inputs.ldos_fit, t)
    form = b2(t / inputs.heisenberg_time)
    return (1.0 - inputs.ipr) / (inputs.eta - 1.0) * (inputs.eta * s_bc - form) + inputs.ipr


# ---------------------------------------------------------------------------
# curve post-processing
# ---------------------------------------------------------------------------

def rolling_average(values, window: int) -> np.ndarray:
    """Centered moving mean over `window` grid points; endpoint windows are
    truncated to the available points.  Even windows round up to the next
    odd count so the mean stays centered."""
    if window < 1:
        raise ValueError("window must be >= 1")
    v = np.asarray(values, dtype=float)
    if window == 1:
        return v.copy()
    half = window // 2
    cs = np.concatenate([[0.0], np.cumsum(v)])
    idx = np.arange(v.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, v.size)
    return (cs[hi] - cs[lo]) / (hi - lo)


@dataclass(frozen=True)
class PowerLawFit:
    """Log-log line fit of a decaying curve segment."""

    exponent: float    # decay exponent (positive for decay)
    prefactor: float
    rms_residual: float  # in log10 units
    n_points: int
    used_peaks: bool
    good: bool


POWER_LAW_RESIDUAL_TOL = 0.1  # log10 rms above which the fit is flagged poor


def fit_power_law(times, values, t_range: tuple[float, float],
                  min_points: int = 10) -> PowerLawFit:
    """Fit value ~ prefactor * t^(-exponent) over a time range.

    The fit runs over the local maxima of the curve in the range (the
    oscillation peak envelope); monotone segments without interior maxima
    fall back to every point.  Values must be positive throughout the
    range.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = (t >= t_range[0]) & (t <= t_range[1])
    if sel.sum() < min_points:
        raise ValueError(f"only {int(sel.sum())} grid points in range, need {min_points}")
    ts, vs = t[sel], v[sel]
    if np.any(vs <= 0):
        raise ValueError("curve must be positive over the fit range")
    interior = np.zeros(ts.size, dtype=bool)
    interior[1:-1] = (vs[1:-1] >= vs[:-2]) & (vs[1:-1] >= vs[2:])
    used_peaks = interior.sum() >= 5
    if used_peaks:
        ts, vs = ts[interior], vs[interior]
    x, y = np.log10(ts), np.log10(vs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return PowerLawFit(
        exponent=float(-slope),
        prefactor=float(10.0**intercept),
        rms_residual=rms,
        n_points=int(ts.size),
        used_peaks=bool(used_peaks),
        good=rms < POWER_LAW_RESIDUAL_TOL,
    )


@dataclass(frozen=True)
class HoleReport:
    """Correlation-hole diagnostics of an equilibrated survival curve."""

    present: bool
    depth: float        # asymptote minus curve minimum
    t_min: float        # time of the minimum
    t_end: float        # first return into the asymptote band after t_min
    ipr: float
    eta: float
    threshold: float    # presence requires depth > threshold / eta
    asymptote_band: float


def detect_hole(times, sp_rolled, ipr: float, eta: float,
                threshold: float = 0.3, flat_tol: float = 0.25,
                band: float = 0.1, search_start: float | None = None,
                sustain_points: int = 75) -> HoleReport:
    """Locate the correlation hole of a rolled, ensemble-averaged SP curve.

    A genuine hole is a sustained depression: its floor follows the slowly
    decaying form factor and stays below the asymptote for about a decade.
    The depth is therefore the best windowed excursion, max over window
    positions of min over `sustain_points` consecutive grid points of
    (IPR - SP); isolated noise dips and smoothed revival troughs do not
    register.  The search starts at `search_start` (callers should put
    that past the post-decay oscillation transient, a small fraction of
    the Heisenberg time) or, when absent, at the first decay below 2x the
    asymptote.  The hole is called present when the depth exceeds
    threshold/eta (maximal possible depth 1/eta); the hole end is the
    first later time back inside |SP - IPR| <= band * depth.  Raises if
    the last decade of the curve is not flat, i.e. the grid ends before
    equilibration.
    """
    t = np.asarray(times, dtype=float)
    sp = np.asarray(sp_rolled, dtype=float)
    if eta <= 1:
        raise ValueError("eta must exceed 1")
    tail = t >= t[-1] / 10.0
    tail_mean = sp[tail].mean()
    if (sp[tail].max() - sp[tail].min()) > flat_tol * tail_mean:
        raise ValueError(
            "curve has not equilibrated in the last grid decade; extend the grid"
        )
    if search_start is not None:
        start = min(int(np.searchsorted(t, search_start)), sp.size - 1)
    else:
        decayed = np.nonzero(sp <= 2.0 * ipr)[0]
        start = decayed[0] if decayed.size else sp.size - 1
    excursion = ipr - sp[start:]
    window = max(min(sustain_points, excursion.size), 1)
    sustained = scipy.ndimage.minimum_filter1d(excursion, size=window, mode="nearest")
    i_rel = int(np.argmax(sustained))
    depth = float(sustained[i_rel])
    i_min = start + i_rel
    present = depth > threshold / eta
    after = np.nonzero(sp[i_min:] >= ipr - band * max(depth, 0.0))[0]
    t_end = float(t[i_min + after[0]]) if after.size else float(t[-1])
    return HoleReport(
        present=bool(present),
        depth=depth,
        t_min=float(t[i_min]),
        t_end=t_end,
        ipr=float(ipr),
        eta=float(eta),
        threshold=threshold,
        asymptote_band=band,
    )

"""Scaling analysis of defect-density sweeps.

Pipeline per quench range: find the fast-quench plateau, fit the slow
branch, and intersect the two to get the critical inverse quench rate.
Across quench ranges, the plateau values and critical rates are fitted to
power laws in delta_max.

The slow branch is a power law for the lattice model.  For the single
Landau-Zener crossing it is not (the finite-range LZ curve decays
exponentially), so there the slow branch is the adiabatic-impulse law
n = eps_hat^2 / (1 + eps_hat^2) with the freezing constant alpha fitted.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize, stats

from . import analytic
from .errors import DomainError, ExtractionError, InsufficientDataError

DEFAULT_EPS_PLATEAU = 0.05
DEFAULT_WINDOW_FACTOR = 2.0
DEFAULT_LZ_FLOOR = 0.1


@dataclass(frozen=True)
class ScalingExponents:
    d: float = 1.0
    z: float = 1.0
    nu: float = 1.0

    @property
    def a_pred(self) -> float:
        return -self.d * self.nu / (self.z * self.nu + 1)

    @property
    def b_pred(self) -> float:
        return self.z * self.nu + 1

    @property
    def c_pred(self) -> float:
        return self.d * self.nu


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    amplitude: float
    stderr: float
    window: tuple[float, float]
    n_points: int
    r_squared: float

    def __call__(self, x):
        return self.amplitude * np.asarray(x, dtype=float) ** self.exponent


def fit_power_law(x, y, window=None) -> PowerLawFit:
    """Ordinary least squares of log y on log x inside ``window`` (inclusive)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DomainError("x and y must have the same length")
    if window is not None:
        lo, hi = window
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    if x.size < 3:
        raise InsufficientDataError(f"power-law fit needs >= 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0:
        raise InsufficientDataError("all abscissae coincide")
    res = stats.linregress(lx, ly)
    r2 = float(res.rvalue**2) if np.ptp(ly) > 0 else 1.0
    return PowerLawFit(float(res.slope), float(math.exp(res.intercept)), float(res.stderr),
                       (float(x.min()), float(x.max())), int(x.size), r2)


@dataclass(frozen=True)
class Plateau:
    n_sat: float | None
    members: tuple[float, ...]
    eps: float

    @property
    def present(self) -> bool:
        return self.n_sat is not None

    @property
    def exit_tau(self) -> float | None:
        return max(self.members) if self.members else None


def detect_plateau(tau, n, eps: float = DEFAULT_EPS_PLATEAU) -> Plateau:
    """Grow a set from the fastest quench while all members stay within
    ``eps`` (relative) of the running mean.  Fewer than two members means no
    plateau; that is reported, not raised."""
    tau = np.asarray(tau, dtype=float)
    n = np.asarray(n, dtype=float)
    if tau.shape != n.shape:
        raise DomainError("tau and n must have the same length")
    order = np.lexsort((n, tau))
    tau, n = tau[order], n[order]
    count = 0
    for k in range(1, n.size + 1):
        mean = n[:k].mean()
        if mean > 0 and np.all(np.abs(n[:k] - mean) <= eps * mean):
            count = k
        else:
            break
    if count < 2:
        return Plateau(None, (), eps)
    return Plateau(float(n[:count].mean()), tuple(float(t) for t in tau[:count]), eps)


def critical_tau(fit: PowerLawFit, n_sat: float) -> float:
    """Abscissa where the fitted slow law reaches the plateau value."""
    if not fit.exponent < 0:
        raise ExtractionError(f"slow-branch exponent must be negative, got {fit.exponent:.4g}")
    if not (n_sat > 0 and fit.amplitude > 0):
        raise ExtractionError("plateau value and amplitude must be positive")
    tau_c = (n_sat / fit.amplitude) ** (1.0 / fit.exponent)
    if not (math.isfinite(tau_c) and tau_c > 0):
        raise ExtractionError("fitted law does not intersect the plateau")
    return tau_c


@dataclass(frozen=True)
class CurveAnalysis:
    """Breakdown quantities for one quench range.

    ``tau_c`` is None when no plateau or no usable slow branch was found;
    ``note`` says why.
    """

    plateau: Plateau
    tau_c: float | None = None
    tau_c_first_pass: float | None = None
    fit: PowerLawFit | None = None
    alpha_fit: float | None = None
    note: str = ""

    @property
    def usable(self) -> bool:
        return self.plateau.present and self.tau_c is not None


def analyze_power_curve(tau, n, eps: float = DEFAULT_EPS_PLATEAU,
                        window_factor: float = DEFAULT_WINDOW_FACTOR) -> CurveAnalysis:
    """Plateau + slow power-law branch + intersection, with one window refinement.

    The first-pass critical value is the plateau exit; the slow fit uses
    tau >= window_factor * (current critical estimate).
    """
    tau = np.asarray(tau, dtype=float)
    n = np.asarray(n, dtype=float)
    plateau = detect_plateau(tau, n, eps)
    if not plateau.present:
        return CurveAnalysis(plateau, note="no plateau")
    first = plateau.exit_tau
    estimate = first
    fit = None
    try:
        for _ in range(2):
            fit = fit_power_law(tau, n, (window_factor * estimate, np.inf))
            estimate = critical_tau(fit, plateau.n_sat)
    except (InsufficientDataError, ExtractionError) as exc:
        if fit is None:
            return CurveAnalysis(plateau, tau_c_first_pass=first, note=str(exc))
        # refinement window too small: keep the first fit
        return CurveAnalysis(plateau, critical_tau(fit, plateau.n_sat), first, fit,
                             note=f"refinement skipped: {exc}")
    return CurveAnalysis(plateau, estimate, first, fit)


def _lz_window(tau, n, lower, n_sat, floor):
    keep = np.zeros(tau.size, dtype=bool)
    for i in np.argsort(tau):
        if tau[i] < lower:
            continue
        if n[i] < floor * n_sat:
            break
        keep[i] = True
    return keep


def fit_freezing_constant(tau_ratio, n) -> float:
    """Least-squares alpha of the adiabatic-impulse law in log n."""
    tau_ratio = np.asarray(tau_ratio, dtype=float)
    log_n = np.log(np.asarray(n, dtype=float))

    def cost(log_alpha):
        model = analytic.adiabatic_impulse_density(tau_ratio, math.exp(log_alpha))
        return float(np.sum((np.log(model) - log_n) ** 2))

    res = optimize.minimize_scalar(cost, bounds=(-8.0, 8.0), method="bounded",
                                   options={"xatol": 1e-10})
    return math.exp(res.x)


def lz_critical_tau(alpha_fit: float, n_sat: float) -> float:
    """tau_Q/tau_0 at which the adiabatic-impulse law reaches ``n_sat``."""
    if not 0 < n_sat < 1:
        raise ExtractionError("plateau value must lie in (0, 1)")
    f = lambda lt: analytic.adiabatic_impulse_density(math.exp(lt), alpha_fit) - n_sat
    lo, hi = -40.0, 40.0
    if f(lo) * f(hi) > 0:
        raise ExtractionError("adiabatic-impulse law does not cross the plateau")
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14))


def analyze_lz_curve(tau_ratio, n, eps: float = DEFAULT_EPS_PLATEAU,
                     window_factor: float = DEFAULT_WINDOW_FACTOR,
                     floor: float = DEFAULT_LZ_FLOOR) -> CurveAnalysis:
    """Landau-Zener counterpart of ``analyze_power_curve``.

    The slow window starts at window_factor * (critical estimate) and ends at
    the first point below ``floor * n_sat``; past that the finite-range
    curve is dominated by adiabatic end-point oscillations.
    """
    tau = np.asarray(tau_ratio, dtype=float)
    n = np.asarray(n, dtype=float)
    plateau = detect_plateau(tau, n, eps)
    if not plateau.present:
        return CurveAnalysis(plateau, note="no plateau")
    first = plateau.exit_tau
    estimate = first
    alpha = None
    for _ in range(2):
        keep = _lz_window(tau, n, window_factor * estimate, plateau.n_sat, floor)
        if keep.sum() < 3:
            note = f"slow window holds {int(keep.sum())} points"
            if alpha is None:
                return CurveAnalysis(plateau, tau_c_first_pass=first, note=note)
            return CurveAnalysis(plateau, estimate, first, alpha_fit=alpha, note="refinement skipped: " + note)
        alpha = fit_freezing_constant(tau[keep], n[keep])
        estimate = lz_critical_tau(alpha, plateau.n_sat)
    return CurveAnalysis(plateau, estimate, first, alpha_fit=alpha)


@dataclass(frozen=True)
class CriticalLawFit:
    """One-parameter fit tau_Qc/tau_0 = 1/(alpha x_c sqrt(1 + x_c^2))."""

    alpha: float
    r_squared: float  # in log space
    r_squared_linear: float
    n_points: int


def fit_critical_law(x_c, tau_c) -> CriticalLawFit:
    x = np.asarray(x_c, dtype=float)
    t = np.asarray(tau_c, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least two critical values")
    if np.any(x <= 0) or np.any(t <= 0):
        raise DomainError("x_c and tau_c must be positive")
    shape = 1.0 / (x * np.sqrt(1 + x * x))
    log_alpha = float(np.mean(np.log(shape) - np.log(t)))
    alpha = math.exp(log_alpha)
    resid = np.log(t) - (np.log(shape) - log_alpha)
    ss_tot = np.sum((np.log(t) - np.log(t).mean()) ** 2)
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    pred = shape / alpha
    ss_lin = np.sum((t - t.mean()) ** 2)
    r2_lin = 1.0 - float(np.sum((t - pred) ** 2)) / ss_lin if ss_lin > 0 else 1.0
    return CriticalLawFit(alpha, r2, r2_lin, int(x.size))


@dataclass(frozen=True)
class RangeRow:
    delta_max: float
    n_sat: float | None
    tau_c: float | None
    a: float | None
    a_stderr: float | None
    note: str = ""


@dataclass(frozen=True)
class BreakdownSummary:
    rows: tuple[RangeRow, ...]
    b_fit: PowerLawFit  # tau_c ~ delta_max^(-b): exponent is -b
    c_fit: PowerLawFit  # n_sat ~ delta_max^c
    eps_plateau: float
    window_factor: float

    @property
    def b(self) -> float:
        return -self.b_fit.exponent

    @property
    def c(self) -> float:
        return self.c_fit.exponent

    def to_json(self) -> dict:
        return {
            "exponents": {
                "a": [r.a for r in self.rows],
                "a_stderr": [r.a_stderr for r in self.rows],
                "b": self.b,
                "b_stderr": self.b_fit.stderr,
                "c": self.c,
                "c_stderr": self.c_fit.stderr,
            },
            "plateaus": [{"delta_max": r.delta_max, "n_sat": r.n_sat} for r in self.rows],
            "criticals": [{"delta_max": r.delta_max, "tau_Q_c": r.tau_c, "note": r.note} for r in self.rows],
            "config": {"eps_plateau": self.eps_plateau, "window_factor": self.window_factor},
        }


def breakdown_summary(sweeps, eps: float = DEFAULT_EPS_PLATEAU,
                      window_factor: float = DEFAULT_WINDOW_FACTOR) -> BreakdownSummary:
    """Global b and c from per-range curves.

    ``sweeps`` maps delta_max -> (tau_Q array, n array).  Ranges lacking a
    plateau or slow fit are kept in the table but left out of the fits.
    """
    rows = []
    for dm in sorted(sweeps):
        tau, n = sweeps[dm]
        ca = analyze_power_curve(tau, n, eps, window_factor)
        rows.append(RangeRow(float(dm), ca.plateau.n_sat, ca.tau_c,
                             ca.fit.exponent if ca.fit else None,
                             ca.fit.stderr if ca.fit else None, ca.note))
    usable = [r for r in rows if r.n_sat is not None and r.tau_c is not None]
    if len(usable) < 3:
        raise InsufficientDataError(f"need >= 3 quench ranges with plateau and slow fit, got {len(usable)}")
    dms = [r.delta_max for r in usable]
    b_fit = fit_power_law(dms, [r.tau_c for r in usable])
    c_fit = fit_power_law(dms, [r.n_sat for r in usable])
    return BreakdownSummary(tuple(rows), b_fit, c_fit, eps, window_factor)


def fit_to_json(fit: PowerLawFit | None):
    return None if fit is None else {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(fit).items()}


def collapse_deviation(curves, n_grid: int = 401) -> float:
    """Largest pointwise spread between curves (x, y) on their common x range.

    Each curve is linearly interpolated onto a shared grid spanning the
    overlap of all abscissa ranges.
    """
    curves = [(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) for x, y in curves]
    if len(curves) < 2:
        raise InsufficientDataError("need at least two curves")
    lo = max(x.min() for x, _ in curves)
    hi = min(x.max() for x, _ in curves)
    if not hi > lo:
        raise ExtractionError("curves do not overlap")
    grid = np.linspace(lo, hi, n_grid)
    stack = np.array([np.interp(grid, x, y) for x, y in curves])
    return float(np.max(stack.max(axis=0) - stack.min(axis=0)))

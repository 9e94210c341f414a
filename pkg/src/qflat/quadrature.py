"""Gaussian-weighted radial integrals on the half line.

Evaluates

    Q(tau) = int_0^inf exp(-t^2/tau) P(-sinh^2 t) t^mu sinh(t)^kappa cosh(t)^nu dt

together with its first two log-derivatives in tau, by composite adaptive
Gauss-Legendre panels on a truncated interval [0, T].

Two numerical realities shape the implementation:

* Before the Gaussian takes over, the integrand grows like exp(lambda*t)
  with lambda = kappa + nu + 2 deg(P), so for large tau the peak magnitude
  (about exp(lambda^2 tau / 4)) dwarfs the double range even though every
  relative quantity of interest is tame.  Node evaluation therefore happens
  in log space, panels are accumulated after subtracting one common scale,
  and the result records log(value) alongside the value itself (which may
  legitimately overflow to inf within the allowed parameter box).
* The truncation point T comes from the exponent t^2/tau - lambda*t, placed
  where the integrand has dropped a fixed factor below the requested
  tolerance.  An analytic majorant of the discarded tail is checked
  a posteriori against the computed value; T is enlarged and the
  integration redone in the rare case the bound is not met.

Derivatives in tau are produced by differentiation under the integral sign:
dQ/dtau inserts a factor t^2/tau^2 and d2Q/dtau2 a factor
t^4/tau^4 - 2 t^2/tau^3, so one pass over the nodes yields the moments
needed for (log Q)' and (log Q)''.

All operations are pure; results are bit-reproducible for fixed inputs and
independent of evaluation order across calls.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .hypergeom import RationalPoly, hypergeom_poly, horner_compensated
from .spaces import RootData, chi_params, sphere_volume, _shx_over_x

__all__ = [
    "QPParams",
    "QuadratureResult",
    "QuadratureError",
    "ParameterRangeError",
    "ConvergenceError",
    "CancellationWarning",
    "integrand",
    "integrand_direct",
    "integrand_regrouped",
    "q_p",
    "q_chi",
    "q_chi_derivs",
    "p_chi",
    "dlogq",
    "TOL_MIN",
    "TOL_MAX",
    "MAX_DEGREE",
    "MAX_TAU",
    "MAX_POWER",
    "DEFAULT_TOL",
]

_LN2 = math.log(2.0)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)

TOL_MIN = 1e-13
TOL_MAX = 1e-4
DEFAULT_TOL = 1e-10

# Parameter box.  Within it log-magnitudes stay far from the float64
# exponent limits at every node; outside it the operations refuse to run
# rather than degrade silently.
MAX_DEGREE = 16
MAX_TAU = 400.0
MAX_POWER = 8.0

_MAX_DEPTH = 46
_MAX_ROUNDS = 6
_SAFETY = 0.5
_DEFAULT_BUDGET = 400_000


class QuadratureError(Exception):
    """Base class for radial-integration failures."""


class ParameterRangeError(QuadratureError, ValueError):
    """Parameters outside the supported box or otherwise invalid."""


class ConvergenceError(QuadratureError):
    """Tolerance not reached within the node budget; carries the best estimate."""

    def __init__(self, message: str, best: "QuadratureResult | None" = None):
        super().__init__(message)
        self.best = best


class CancellationWarning(RuntimeWarning):
    """More than six digits lost forming (log Q)'' from its moment ratios."""


PolyLike = Union[RationalPoly, Sequence[float], Sequence[Fraction], int, float, Fraction]


@dataclass(frozen=True)
class QPParams:
    """Weight exponents and Gaussian width of a radial integral."""

    mu: float
    kappa: float
    nu: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("mu", "kappa", "nu", "tau"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterRangeError(f"{name} must be finite, got {v}")
        if self.mu + self.kappa <= -1.0:
            raise ParameterRangeError(
                f"need mu + kappa > -1 for convergence, got {self.mu + self.kappa}"
            )
        if self.tau <= 0.0:
            raise ParameterRangeError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a radial integral with accounting.

    ``log_value`` stays finite even when ``value`` overflows the double
    range; ratio-style consumers should prefer it.  ``abs_error`` and
    ``rel_error`` cover both the panel error estimates and the analytic
    truncation-tail bound.
    """

    value: float
    abs_error: float
    nodes: int
    truncation_t: float
    log_value: float
    rel_error: float


def _as_float_coeffs(P: PolyLike) -> tuple[float, ...]:
    if isinstance(P, RationalPoly):
        cs = P.float_coeffs()
    elif isinstance(P, (int, float, Fraction)):
        cs = (float(P),)
    else:
        cs = tuple(float(c) for c in P)
    if not cs:
        raise ParameterRangeError("empty polynomial")
    while len(cs) > 1 and cs[-1] == 0.0:
        cs = cs[:-1]
    if not any(c != 0.0 for c in cs):
        raise ParameterRangeError("zero polynomial")
    return cs


def _check_box(coeffs: Sequence[float], params: QPParams, tol: float) -> None:
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ParameterRangeError(
            f"tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}], got {tol:g}"
        )
    if len(coeffs) - 1 > MAX_DEGREE:
        raise ParameterRangeError(
            f"polynomial degree {len(coeffs) - 1} exceeds supported {MAX_DEGREE}"
        )
    if params.tau > MAX_TAU:
        raise ParameterRangeError(f"tau {params.tau} exceeds supported {MAX_TAU}")
    for name in ("mu", "kappa", "nu"):
        if abs(getattr(params, name)) > MAX_POWER:
            raise ParameterRangeError(
                f"|{name}| exceeds supported {MAX_POWER}: {getattr(params, name)}"
            )


def _log_sinh(t: np.ndarray) -> np.ndarray:
    # requires t > 0; switch form before sinh overflows
    out = np.empty_like(t)
    small = t <= 20.0
    out[small] = np.log(np.sinh(t[small]))
    tl = t[~small]
    out[~small] = tl - _LN2 + np.log1p(-np.exp(-2.0 * tl))
    return out


def _log_cosh(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    small = t <= 20.0
    out[small] = np.log(np.cosh(t[small]))
    tl = t[~small]
    out[~small] = tl - _LN2 + np.log1p(np.exp(-2.0 * tl))
    return out


class _Weight:
    """Log-space evaluator of the integrand and its even tau-moments."""

    def __init__(self, coeffs: Sequence[float], mu: float, kappa: float,
                 nu: float, tau: float):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.deg = len(coeffs) - 1
        self.mu = float(mu)
        self.kappa = float(kappa)
        self.nu = float(nu)
        self.tau = float(tau)
        self.lam = self.kappa + self.nu + 2.0 * self.deg
        with np.errstate(divide="ignore"):
            self._logc = np.log(np.abs(self.coeffs))
        j = np.arange(self.deg + 1)
        self._csign = np.sign(self.coeffs)
        self._j2 = (2.0 * j)[:, None]
        self._tsign = (self._csign * np.where(j % 2 == 0, 1.0, -1.0))[:, None]
        # majorant constant: |P(-sh^2 t)| sh^k ch^v <= C exp(lam t) t^0 with
        # C = sum |c_j| 4^-j * 2^-kappa  (uses sh t <= e^t/2, ch t <= e^t)
        self.log_tail_const = (
            math.log(float(np.sum(np.abs(self.coeffs) * 4.0 ** -j)))
            - self.kappa * _LN2
        )

    def log_mag_sign(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(log|integrand|, sign) elementwise; t must be positive."""
        logsh = _log_sinh(t)
        # P(-sinh^2 t) as a scaled signed sum of exponentials of
        # log|c_j| + 2 j log sinh t; stable for any magnitude of sinh
        lt = self._logc[:, None] + self._j2 * logsh[None, :]
        top = np.max(lt, axis=0)
        acc = np.sum(self._tsign * np.exp(lt - top[None, :]), axis=0)
        sign = np.sign(acc)
        with np.errstate(divide="ignore"):
            g = top + np.log(np.abs(acc)) - t * t / self.tau
        if self.mu != 0.0:
            g = g + self.mu * np.log(t)
        if self.kappa != 0.0:
            g = g + self.kappa * logsh
        if self.nu != 0.0:
            g = g + self.nu * _log_cosh(t)
        return g, sign

    def moments(self, t: np.ndarray, scale: float) -> np.ndarray:
        """Rows (w, t^2 w, t^4 w) with w = sign * exp(log|integrand| - scale)."""
        g, sign = self.log_mag_sign(t)
        w = sign * np.exp(g - scale)
        t2 = t * t
        return np.stack([w, t2 * w, t2 * t2 * w])


@dataclass
class _Panel:
    a: float
    b: float
    depth: int
    val: np.ndarray  # refined estimate (sum of two half rules), shape (3,)
    err: np.ndarray  # |whole-rule - halves|


def _eval_panel(weight: _Weight, scale: float, a: float, b: float,
                depth: int) -> tuple[_Panel, int]:
    mid = 0.5 * (a + b)
    half1 = 0.5 * (b - a)
    xs = np.concatenate([
        0.5 * (a + b) + half1 * _GL_X,
        0.5 * (a + mid) + 0.5 * (mid - a) * _GL_X,
        0.5 * (mid + b) + 0.5 * (b - mid) * _GL_X,
    ])
    rows = weight.moments(xs, scale)
    w_whole = rows[:, :15] @ _GL_W * half1
    w_left = rows[:, 15:30] @ _GL_W * (0.5 * (mid - a))
    w_right = rows[:, 30:] @ _GL_W * (0.5 * (b - mid))
    halves = w_left + w_right
    return _Panel(a, b, depth, halves, np.abs(w_whole - halves)), 45


def _initial_breaks(weight: _Weight, T: float) -> list[float]:
    tau = weight.tau
    sig = math.sqrt(tau / 2.0)
    tpk = weight.lam * tau / 2.0
    cand = {0.0, T}
    for k in range(1, 8):
        cand.add(T * k / 8.0)
    for jj in range(-12, 13):
        x = tpk + jj * sig
        if 0.0 < x < T:
            cand.add(x)
    for e in (0.25, 0.5, 1.0, 2.0, 4.0):
        x = e * math.sqrt(tau)
        if 0.0 < x < T:
            cand.add(x)
    br = sorted(cand)
    out = [br[0]]
    for x in br[1:]:
        if x - out[-1] > 1e-10 * T:
            out.append(x)
    out[-1] = T
    return out


def _sum_panels(panels: list[_Panel]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    I = np.array([math.fsum(p.val[k] for p in panels) for k in range(3)])
    Iabs = np.array([math.fsum(abs(p.val[k]) for p in panels) for k in range(3)])
    E = np.array([math.fsum(p.err[k] for p in panels) for k in range(3)])
    return I, Iabs, E


def _targets(I: np.ndarray, Iabs: np.ndarray, tol: float) -> np.ndarray:
    # the 4e-16 floor stops futile refinement once a moment is dominated by
    # cancellation noise; failure to reach tol is then reported honestly
    return np.maximum(tol * np.abs(I), 4e-16 * Iabs)


def _integrate_moments(
    weight: _Weight, T: float, tol: float, node_budget: int
) -> tuple[np.ndarray, np.ndarray, float, int, bool]:
    tg = np.linspace(0.0, T, 801)[1:]
    g, _ = weight.log_mag_sign(tg)
    scale = float(np.max(g))

    panels: list[_Panel] = []
    nodes = 0
    breaks = _initial_breaks(weight, T)
    for a, b in zip(breaks[:-1], breaks[1:]):
        p, nn = _eval_panel(weight, scale, a, b, 0)
        panels.append(p)
        nodes += nn

    budget_hit = False
    for _ in range(_MAX_ROUNDS):
        I, Iabs, E = _sum_panels(panels)
        target = _targets(I, Iabs, tol)
        if np.all(E <= target) or budget_hit:
            break
        done: list[_Panel] = []
        stack = list(reversed(panels))
        while stack:
            p = stack.pop()
            share = _SAFETY * (p.b - p.a) / T
            if np.all(p.err <= target * share) or p.depth >= _MAX_DEPTH:
                done.append(p)
                continue
            if nodes + 90 > node_budget:
                budget_hit = True
                done.append(p)
                done.extend(reversed(stack))
                break
            mid = 0.5 * (p.a + p.b)
            pl, n1 = _eval_panel(weight, scale, p.a, mid, p.depth + 1)
            pr, n2 = _eval_panel(weight, scale, mid, p.b, p.depth + 1)
            nodes += n1 + n2
            stack.append(pr)
            stack.append(pl)
        panels = done

    I, Iabs, E = _sum_panels(panels)
    converged = bool(np.all(E <= _targets(I, Iabs, tol)))
    return I, E, scale, nodes, converged


def _log_tail_bound(weight: _Weight, T: float) -> float:
    """Log of an analytic bound on the integral over [T, inf).

    On [T, inf) the exponent -t^2/tau + lam t decays with slope at least
    D = 2T/tau - lam, and t^mu <= T^mu exp(mu_+ (t-T)/T), so the tail is at
    most C T^mu exp(-T^2/tau + lam T) / (D - mu_+/T).
    """
    tau, lam, mu = weight.tau, weight.lam, weight.mu
    D = 2.0 * T / tau - lam - max(mu, 0.0) / T
    if D <= 0.0:
        return math.inf
    return (
        weight.log_tail_const
        - T * T / tau
        + lam * T
        + mu * math.log(T)
        - math.log(D)
    )


def _exp_or_inf(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _build_result(
    I: np.ndarray, E: np.ndarray, scale: float, nodes: int, T: float,
    rel_tail: float
) -> QuadratureResult:
    i0 = float(I[0])
    if i0 == 0.0:
        return QuadratureResult(0.0, 0.0, nodes, T, -math.inf, math.inf)
    sign = 1.0 if i0 > 0 else -1.0
    log_value = scale + math.log(abs(i0))
    value = sign * _exp_or_inf(log_value)
    rel = float(E[0]) / abs(i0) + rel_tail
    abs_err = math.inf if math.isinf(value) else rel * abs(value)
    return QuadratureResult(value, abs_err, nodes, T, log_value, rel)


def _q_engine(
    coeffs: Sequence[float], mu: float, kappa: float, nu: float, tau: float,
    tol: float, node_budget: int
) -> tuple[np.ndarray, QuadratureResult]:
    weight = _Weight(coeffs, mu, kappa, nu, tau)
    L = math.log(1.0 / tol) + 40.0
    lam = weight.lam
    root = 0.5 * (lam * tau + math.sqrt(lam * lam * tau * tau + 4.0 * L * tau))
    T0 = max(8.0 * math.sqrt(tau), root)

    for attempt in range(5):
        T = T0 * 1.3 ** attempt
        # split the tolerance: half for the panels, half for the tail
        I, E, scale, nodes, conv = _integrate_moments(
            weight, T, 0.5 * tol, node_budget
        )
        if not conv:
            best = _build_result(I, E, scale, nodes, T, 0.0)
            raise ConvergenceError(
                f"panel refinement did not reach tol={tol:g} within "
                f"{node_budget} nodes (reached rel error "
                f"{best.rel_error:.3g})",
                best,
            )
        log_tail = _log_tail_bound(weight, T)
        if I[0] != 0.0:
            log_value = scale + math.log(abs(float(I[0])))
            if log_tail <= math.log(tol / 2.0) + log_value:
                rel_tail = _exp_or_inf(min(log_tail - log_value, 0.0))
                res = _build_result(I, E, scale, nodes, T, rel_tail)
                if res.rel_error > tol:
                    # panels stopped at the cancellation noise floor
                    raise ConvergenceError(
                        f"cancellation limits the relative error to "
                        f"{res.rel_error:.3g}, above tol={tol:g}",
                        res,
                    )
                return I, res
    best = _build_result(I, E, scale, nodes, T, 1.0)
    raise ConvergenceError(
        "truncation tail bound failed to settle below tol/2", best
    )


# ---------------------------------------------------------------------------
# public operations


def integrand_direct(P: PolyLike, params: QPParams, t: float) -> float:
    """Plain product form of the integrand at one point (t >= 0)."""
    coeffs = _as_float_coeffs(P)
    pv = horner_compensated(coeffs, -math.sinh(t) ** 2)
    out = math.exp(-t * t / params.tau) * pv
    if params.mu != 0.0:
        out *= t ** params.mu
    if params.kappa != 0.0:
        out *= math.sinh(t) ** params.kappa
    if params.nu != 0.0:
        out *= math.cosh(t) ** params.nu
    return out


def integrand_regrouped(P: PolyLike, params: QPParams, t: float) -> float:
    """Integrand as t^(r-1) times an even analytic factor, r = mu+kappa+1.

    Regroups t^mu sinh^kappa = t^(r-1) (sinh t / t)^kappa, which is the
    numerically robust form near t = 0; sinh(t)/t is evaluated by series
    for small t.
    """
    coeffs = _as_float_coeffs(P)
    r = params.mu + params.kappa + 1.0
    if t == 0.0:
        if r > 1.0:
            return 0.0
        if r == 1.0:
            return coeffs[0]
        return math.inf
    pv = horner_compensated(coeffs, -math.sinh(t) ** 2)
    out = math.exp(-t * t / params.tau) * pv * t ** (r - 1.0)
    if params.kappa != 0.0:
        out *= _shx_over_x(t) ** params.kappa
    if params.nu != 0.0:
        out *= math.cosh(t) ** params.nu
    return out


def integrand(P: PolyLike, params: QPParams, t: float) -> float:
    """Integrand value at t >= 0 in plain double arithmetic.

    Uses the regrouped form below t = 1e-4 (removable origin behaviour) and
    the direct product elsewhere.  Raises OverflowError when the magnitude
    provably exceeds the double range; the integration routines themselves
    work in log space and do not share this limit.
    """
    if t < 0.0:
        raise ParameterRangeError(f"t must be nonnegative, got {t}")
    coeffs = _as_float_coeffs(P)
    if t > 0.0:
        weight = _Weight(coeffs, params.mu, params.kappa, params.nu, params.tau)
        g, _ = weight.log_mag_sign(np.array([t]))
        if float(g[0]) > 709.0:
            raise OverflowError(
                f"integrand magnitude exp({float(g[0]):.1f}) exceeds double range"
            )
    if t < 1e-4:
        return integrand_regrouped(P, params, t)
    return integrand_direct(P, params, t)


def q_p(P: PolyLike, params: QPParams, tol: float = DEFAULT_TOL, *,
        node_budget: int = _DEFAULT_BUDGET) -> QuadratureResult:
    """The radial integral for an arbitrary polynomial and weight exponents.

    The returned relative error estimate is at most ``tol`` on success;
    otherwise a ConvergenceError carrying the best estimate is raised.
    Deterministic: identical inputs give bit-identical results.
    """
    coeffs = _as_float_coeffs(P)
    _check_box(coeffs, params, tol)
    _, res = _q_engine(
        coeffs, params.mu, params.kappa, params.nu, params.tau, tol, node_budget
    )
    return res


def _chi_setup(space: RootData, n: int, tau: float, tol: float):
    if n < 0 or n > MAX_DEGREE:
        raise ParameterRangeError(f"isotype index n must be in [0, {MAX_DEGREE}], got {n}")
    if space.m > 16:
        raise ParameterRangeError(f"dimension m={space.m} exceeds supported 16")
    ch = chi_params(space, n)
    params = QPParams(
        mu=float(ch.mu), kappa=float(ch.kappa), nu=float(ch.nu), tau=float(tau)
    )
    poly = hypergeom_poly(ch.A, n, ch.c)
    coeffs = _as_float_coeffs(poly)
    _check_box(coeffs, params, tol)
    return coeffs, params


def q_chi(space: RootData, n: int, tau: float, tol: float = DEFAULT_TOL, *,
          node_budget: int = _DEFAULT_BUDGET) -> QuadratureResult:
    """The isotype-n radial integral q_n(tau) of a catalog space."""
    coeffs, params = _chi_setup(space, n, tau, tol)
    _, res = _q_engine(
        coeffs, params.mu, params.kappa, params.nu, params.tau, tol, node_budget
    )
    return res


def q_chi_derivs(
    space: RootData, n: int, tau: float, tol: float = DEFAULT_TOL, *,
    node_budget: int = _DEFAULT_BUDGET
) -> tuple[QuadratureResult, float, float]:
    """One-pass (q_n(tau), (log q_n)'(tau), (log q_n)''(tau)).

    The second log-derivative is assembled as Q''/Q - (Q'/Q)^2, which can
    cancel; losing more than six digits triggers a CancellationWarning.
    """
    coeffs, params = _chi_setup(space, n, tau, tol)
    I, res = _q_engine(
        coeffs, params.mu, params.kappa, params.nu, params.tau, tol, node_budget
    )
    tau = params.tau
    ratio2 = float(I[1]) / float(I[0])
    ratio4 = float(I[2]) / float(I[0])
    d1 = ratio2 / tau**2
    term_a = ratio4 / tau**4
    term_b = 2.0 * ratio2 / tau**3
    term_c = d1 * d1
    d2 = term_a - term_b - term_c
    biggest = max(abs(term_a), abs(term_b), abs(term_c))
    if biggest > 0.0 and abs(d2) < 1e-6 * biggest:
        warnings.warn(
            f"(log q)'' lost more than six digits to cancellation at "
            f"tau={tau:g} (terms ~{biggest:.3g}, result {d2:.3g})",
            CancellationWarning,
            stacklevel=2,
        )
    return res, d1, d2


def dlogq(space: RootData, n: int, tau: float, order: int,
          tol: float = DEFAULT_TOL, *,
          node_budget: int = _DEFAULT_BUDGET) -> float:
    """First or second derivative of log q_n at tau."""
    if order not in (1, 2):
        raise ParameterRangeError(f"order must be 1 or 2, got {order}")
    _, d1, d2 = q_chi_derivs(space, n, tau, tol, node_budget=node_budget)
    return d1 if order == 1 else d2


def p_chi(space: RootData, n: int, s: complex, tol: float = DEFAULT_TOL, *,
          node_budget: int = _DEFAULT_BUDGET) -> float:
    """The polarization-family matrix coefficient p_n(s), up to its constant.

    Depends on s only through Im s: equals
    Vol(S^(m-1)) 2^(m/2) / (B^m (Im s)^(m/2)) * q_n(B^2 Im s), with the
    overall isotype constant normalized to 1.
    """
    im = complex(s).imag
    if im <= 0.0:
        raise ParameterRangeError(f"need Im s > 0, got {im}")
    tau = space.B * space.B * im
    res = q_chi(space, n, tau, tol, node_budget=node_budget)
    pref = (
        sphere_volume(space.m)
        * 2.0 ** (space.m / 2.0)
        / (space.B ** space.m * im ** (space.m / 2.0))
    )
    return pref * res.value

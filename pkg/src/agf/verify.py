"""Numerical verifiers for the rearrangement and embedding inequalities.

Each verifier computes both sides of one inequality -- exactly where the step
structure allows it, with documented quadrature otherwise -- and emits
InequalityReports.  Constants fall in two tiers: hard constants that the
underlying estimates state explicitly (asserted as-is), and empirical budgets
frozen by a calibration run for the "there exists c" results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PreconditionError
from .geometry import AnisotropicGauge, box_average_field, box_average_on_grid, build_gauge
from .grid import GridFunction, make_grid_function
from .moduli import (
    interval_modulus_1d,
    modulus_curve,
    partial_modulus,
    shift_norm_integral,
    steklov_derivative_norm,
    steklov_distance,
)
from .norms import (
    BesovParams,
    _leggauss,
    besov_seminorm,
    derive_lipschitz_params,
    derive_params,
    gagliardo_seminorm,
    lipschitz_seminorm,
    lorentz_norm,
    mixed_lorentz_norm,
)
from .rearrange import decreasing_rearrangement, dyadic_decrement, is_mdec, iterated_rearrangement

REL_TOL = 1e-9

# constants stated by the estimates themselves (not calibrated)
HARD_BUDGETS = {
    "rearrangement-modulus-1d": lambda n=1, **_: 2.0,
    "rearrangement-modulus-axes": lambda n, **_: 3.0**n,
    "modulus-mean-bound": lambda **_: 3.0,
    "steklov-distance": lambda **_: 1.0,
    "steklov-derivative": lambda **_: 1.0,
    "box-operator-pointwise": lambda **_: 1.0,
    "box-operator-weight": lambda n, a, **_: 2.0 ** (max(1.0, a) * n),
    "axis-decrement": lambda mu, **_: 4.0 * mu,
    "gauge-product": lambda **_: 1.0,
    "embedding-dyadic-step": lambda **_: 1.0,
}


@dataclass(frozen=True)
class InequalityReport:
    """One verified inequality instance: both sides, the allowed ratio, verdict."""

    inequality_id: str
    function_id: str
    params: dict
    lhs: float
    rhs: float
    budget: float
    truncation: str = ""
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        if self.lhs == 0.0:
            return 0.0
        if self.rhs == 0.0:
            return math.inf
        return self.lhs / self.rhs

    @property
    def verdict(self) -> str:
        if self.degenerate or (self.lhs == 0.0 and self.rhs == 0.0):
            return "degenerate"
        return "pass" if self.ratio <= self.budget * (1.0 + REL_TOL) else "fail"


@dataclass(frozen=True)
class LimitTrace:
    """A scaled quantity along a dyadic parameter sequence, against its limit target."""

    trace_id: str
    function_id: str
    param_name: str
    param_values: np.ndarray
    values: np.ndarray
    target: float
    truncated: bool = False

    @property
    def gaps(self) -> np.ndarray:
        if self.target == 0.0:
            return np.where(np.asarray(self.values) == 0.0, 0.0, math.inf)
        return np.abs(np.asarray(self.values) / self.target - 1.0)

    def to_rows(self):
        for pv, v, g in zip(self.param_values, self.values, self.gaps):
            yield (self.trace_id, self.function_id, self.param_name,
                   float(pv), float(v), float(self.target), float(g))


def _degenerate(inequality_id, function_id, params, budget=math.inf, note="zero input"):
    return InequalityReport(inequality_id, function_id, dict(params), 0.0, 0.0,
                            budget, truncation=note, degenerate=True)


# --- isotropic rearrangement estimate -------------------------------------------

def verify_isotropic_estimate(f: GridFunction, p: float, delta: float,
                              budget: float = math.inf,
                              function_id: str = "") -> InequalityReport:
    """Tail integral of the rearrangement decrement against the isotropic modulus.

    LHS = integral over t > delta^n of t^(-p/n - 1) * integral_0^t
    (f*(u) - f*(t))^p du dt, closed form on the rearrangement steps.
    RHS = (omega(f; delta)_p / delta)^p with the isotropic modulus taken as the
    max over axes of the partial moduli (recorded in the params).
    """
    if not math.isfinite(p) or p < 1:
        raise ParameterError(f"p must be finite and >= 1, got {p}")
    if delta <= 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    n = f.dims
    params = {"p": p, "delta": delta, "isotropic_modulus": "max-over-axes"}
    sf = decreasing_rearrangement(f)
    if sf.values.size == 0:
        return _degenerate("rearr-estimate", function_id, params, budget)
    bp = sf.breakpoints
    vals = sf.values
    left = np.concatenate([[0.0], bp[:-1]])
    widths = bp - left
    lo_cut = delta**n
    e = p / n
    lhs = 0.0
    # inner integral is constant on each rearrangement step
    for k in range(vals.size):
        inner = float(np.sum((vals[:k] - vals[k]) ** p * widths[:k]))
        lo, hi = max(left[k], lo_cut), bp[k]
        if inner > 0.0 and hi > lo:
            lhs += inner * (lo ** (-e) - hi ** (-e)) / e
    inner_tail = float(np.sum(vals**p * widths))
    tail_lo = max(bp[-1], lo_cut)
    lhs += inner_tail * tail_lo ** (-e) / e
    omega = max(partial_modulus(f, k, delta, p) for k in range(n))
    rhs = (omega / delta) ** p
    return InequalityReport("rearr-estimate", function_id, params, lhs, rhs, budget)


# --- anisotropic gauge estimates --------------------------------------------------

def verify_anisotropic_estimate(f: GridFunction, p: float, order, h_values,
                                gauge: AnisotropicGauge | None = None,
                                budget_integral: float = math.inf,
                                budget_sup: float = math.inf,
                                function_id: str = "") -> list[InequalityReport]:
    """Gauge-weighted decrement bounds, one report pair per (axis, shift).

    With phi(t) = f*(t) - f*(2t) and the per-axis gauge u_j(t), checks on the
    lattice domain Omega_j(h) = {t : u_j(t) >= h}:

    * integral form:  sum over t in Omega of
      integral_(t_prev, t] phi(s)^p ds / u_j(t)^p  <=  c (omega_j(f; h)_p / h)^p
    * sup form:       max over t in Omega of t^(1/p) phi(t) / u_j(t)
      <=  c omega_j(f; h)_p / h

    The moduli on the right are those of the original f.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    order = tuple(int(k) for k in order)
    if gauge is None:
        gauge = build_gauge(f, order)
    elif gauge.order != order:
        raise PreconditionError(f"gauge was built for order {gauge.order}, requested {order}")
    n = f.dims
    phi = dyadic_decrement(decreasing_rearrangement(f))
    reports: list[InequalityReport] = []
    curves = [modulus_curve(f, j, p) for j in range(n)]
    tv = gauge.t_values
    t_prev = np.concatenate([[0.0], tv[:-1]]) if tv.size else tv
    for j in range(n):
        for h in h_values:
            params = {"p": p, "order": list(order), "axis": j, "h": float(h)}
            if gauge.degenerate or tv.size == 0:
                reports.append(_degenerate("aniso-gauge-integral", function_id, params,
                                           budget_integral, note="degenerate gauge"))
                reports.append(_degenerate("aniso-gauge-sup", function_id, params,
                                           budget_sup, note="degenerate gauge"))
                continue
            mask = gauge.omega_mask(j, h)
            omega = float(curves[j](h))
            if not np.any(mask):
                reports.append(_degenerate("aniso-gauge-integral", function_id, params,
                                           budget_integral, note="empty domain"))
                reports.append(_degenerate("aniso-gauge-sup", function_id, params,
                                           budget_sup, note="empty domain"))
                continue
            lhs_int = 0.0
            lhs_sup = 0.0
            for i in np.flatnonzero(mask):
                u = gauge.u[i, j]
                lhs_int += phi.window_power_integral(t_prev[i], tv[i], p) / u**p
                lhs_sup = max(lhs_sup, tv[i] ** (1.0 / p) * float(phi(tv[i])) / u)
            reports.append(InequalityReport(
                "aniso-gauge-integral", function_id, params,
                lhs_int, (omega / h) ** p, budget_integral,
                truncation="lattice sum"))
            reports.append(InequalityReport(
                "aniso-gauge-sup", function_id, params,
                lhs_sup, omega / h, budget_sup,
                truncation="lattice sup"))
    return reports


def verify_gauge_product(f: GridFunction, order,
                         gauge: AnisotropicGauge | None = None,
                         function_id: str = "") -> list[InequalityReport]:
    """Exact check that the gauge factors multiply below the level measure.

    product over j of u_j(t) <= t at every lattice point; hard budget 1.
    """
    order = tuple(int(k) for k in order)
    if gauge is None:
        gauge = build_gauge(f, order)
    params = {"order": list(order)}
    if gauge.degenerate or gauge.t_values.size == 0:
        return [_degenerate("gauge-product", function_id, params, 1.0,
                            note="degenerate gauge")]
    reports = []
    for i, t in enumerate(gauge.t_values):
        prod = float(np.prod(gauge.u[i]))
        reports.append(InequalityReport(
            "gauge-product", function_id, {**params, "t": float(t)},
            prod, float(t), 1.0))
    return reports


# --- embedding into Lorentz spaces -------------------------------------------------

def _besov_product(f: GridFunction, params: BesovParams, with_factors: bool):
    """Product over axes of (optionally weighted) axis Besov seminorms."""
    n = params.n
    rhs = 1.0
    semis = []
    for j in range(n):
        b = besov_seminorm(f, j, params.beta_js[j], params.theta_js[j], params.p)
        semis.append(b)
        factor = 1.0
        if with_factors and not math.isinf(params.theta_js[j]):
            factor = (1.0 - params.beta_js[j]) ** (1.0 / params.theta_js[j])
        rhs *= (factor * b) ** (params.beta / (n * params.beta_js[j]))
    return rhs, semis


def verify_embedding(f: GridFunction, params: BesovParams, flavor: str = "lorentz",
                     order=None, budget: float = math.inf,
                     function_id: str = "",
                     explore_open_case: bool = False) -> list[InequalityReport]:
    """Lorentz-norm embedding against the weighted product of axis Besov seminorms.

    flavor "lorentz" bounds the Lorentz norm of f*; flavor "mixed" bounds the
    mixed Lorentz norm of the iterated rearrangement (``order`` required).
    Also asserts the exact dyadic-decrement step of the proof:
    the Lorentz norm is at most (1 - 2^(-1/q))^(-1) times the decrement norm J.
    """
    if flavor not in ("lorentz", "mixed"):
        raise ParameterError(f"unknown norm flavor {flavor!r}")
    if not params.admissible:
        raise ParameterError(
            f"inadmissible parameters: need 1 <= p < n/beta, got p={params.p}, "
            f"n/beta={params.n / params.beta}")
    if any(t < params.p for t in params.theta_js) and not explore_open_case:
        raise ParameterError("theta_j < p is an open case; pass explore_open_case to log ratios")
    q, theta, p = params.q, params.theta, params.p
    ineq_id = "embedding-lorentz" if flavor == "lorentz" else "embedding-mixed"
    rep_params = {"p": p, "q": q, "theta": theta,
                  "beta_js": list(params.beta_js), "theta_js": list(params.theta_js),
                  "flavor": flavor}
    if order is not None:
        rep_params["order"] = [int(k) for k in order]
    if f.support_cells == 0:
        return [_degenerate(ineq_id, function_id, rep_params, budget)]
    sf = decreasing_rearrangement(f)
    if flavor == "lorentz":
        lhs = lorentz_norm(sf, q, theta)
    else:
        if order is None:
            raise ParameterError("mixed flavor requires a rearrangement order")
        lhs = mixed_lorentz_norm(iterated_rearrangement(f, order), q, theta)
    rhs, semis = _besov_product(f, params, with_factors=True)
    trunc = ""
    if math.isinf(rhs):
        trunc = "unbounded seminorm on the right"
    budget_flag = "open-case, no verdict" if any(t < p for t in params.theta_js) else ""
    rep = InequalityReport(ineq_id, function_id, {**rep_params, "seminorms": semis},
                           lhs, rhs, budget,
                           truncation=trunc or budget_flag)
    out = [rep]
    if flavor == "lorentz":
        phi = dyadic_decrement(sf)
        if math.isinf(theta):
            j_norm = phi.weighted_sup(1.0 / q)
        else:
            j_norm = phi.power_integral(theta / q, theta) ** (1.0 / theta)
        c = 1.0 / (1.0 - 2.0 ** (-1.0 / q))
        out.append(InequalityReport("embedding-dyadic-step", function_id,
                                    {"q": q, "theta": theta},
                                    lhs, c * j_norm, 1.0))
    return out


def verify_lipschitz_endpoint(f: GridFunction, p: float, budget: float = math.inf,
                              function_id: str = "") -> InequalityReport:
    """Endpoint Lorentz bound by the geometric mean of axis Lipschitz seminorms.

    With every axis smoothness equal to 1: Lorentz(q*, s) norm of f* against
    the product of sup-slope seminorms, q* = np/(n-p), s = p.
    """
    n = f.dims
    lp = derive_lipschitz_params(p, (1.0,) * n, n)
    params = {"p": p, "q_star": lp.q_star, "s": lp.s}
    if not lp.admissible or not math.isfinite(lp.q_star):
        raise ParameterError(f"endpoint requires p < n, got p={p}, n={n}")
    if f.support_cells == 0:
        return _degenerate("lipschitz-endpoint", function_id, params, budget)
    lhs = lorentz_norm(decreasing_rearrangement(f), lp.q_star, lp.s)
    rhs = 1.0
    for k in range(n):
        rhs *= lipschitz_seminorm(f, k, 1.0, p).value ** (lp.alpha / (n * 1.0))
    return InequalityReport("lipschitz-endpoint", function_id, params, lhs, rhs, budget)


def limiting_sweep(f: GridFunction, p: float, theta_js, m_max: int,
                   budget: float = math.inf, function_id: str = ""):
    """Embedding ratio along axis smoothness 1 - 2^(-m), with and without weights.

    Returns (trace_with, trace_control, reports).  Trace values are RHS/LHS:
    with the (1 - beta_j)^(1/theta_j) weights the trace stays bounded, the
    unweighted control trace diverges like a power of 2^m -- the asymptotics
    the weighted inequality is designed to capture.
    """
    n = f.dims
    theta_js = tuple(float(t) for t in theta_js)
    ms = []
    vals_with = []
    vals_ctrl = []
    reports = []
    truncated = False
    for m in range(1, m_max + 1):
        beta = 1.0 - 2.0**-m
        try:
            params = derive_params(p, (beta,) * n, theta_js, n)
        except ParameterError:
            truncated = True
            break
        if not params.admissible:
            truncated = True
            break
        reps = verify_embedding(f, params, flavor="lorentz", budget=budget,
                                function_id=function_id)
        rep = reps[0]
        reports.extend(reps)
        rhs_ctrl, _ = _besov_product(f, params, with_factors=False)
        if rep.lhs == 0.0:
            truncated = True
            break
        ms.append(m)
        vals_with.append(rep.rhs / rep.lhs)
        vals_ctrl.append(rhs_ctrl / rep.lhs)
    vw = np.asarray(vals_with)
    vc = np.asarray(vals_ctrl)
    mm = np.asarray(ms, dtype=np.float64)
    target_w = float(vw[0]) if vw.size else 0.0
    target_c = float(vc[0]) if vc.size else 0.0
    trace_with = LimitTrace("limit-sweep-weighted", function_id, "m", mm, vw,
                            target_w, truncated)
    trace_ctrl = LimitTrace("limit-sweep-control", function_id, "m", mm, vc,
                            target_c, truncated)
    return trace_with, trace_ctrl, reports


# --- limit relations ---------------------------------------------------------------

def verify_limit_relations(f: GridFunction, k: int, p: float, theta: float,
                           m_max: int, function_id: str = "") -> LimitTrace:
    """Scaled Besov seminorm along alpha = 1 - 2^(-m) against its sup-slope limit.

    value_m = (1 - alpha_m)^(1/theta) * axis Besov seminorm;
    target  = (1/theta)^(1/theta) * sup over delta of omega_k(f; delta)_p / delta.
    """
    if math.isinf(theta):
        raise ParameterError("the scaled limit requires a finite theta")
    curve = modulus_curve(f, k, p)
    target = (1.0 / theta) ** (1.0 / theta) * lipschitz_seminorm(f, k, 1.0, p, curve=curve).value
    ms = np.arange(1, m_max + 1, dtype=np.float64)
    vals = np.empty(ms.size)
    for i, m in enumerate(ms):
        alpha = 1.0 - 2.0**-m
        vals[i] = (1.0 - alpha) ** (1.0 / theta) * besov_seminorm(
            f, k, alpha, theta, p, curve=curve)
    return LimitTrace("besov-limit", function_id, "m", ms, vals, target)


def slope_norm_power(f: GridFunction, p: float) -> float:
    """p-th power of the L^p norm of the 1-D difference-quotient derivative.

    Zero extension outside the grid, so boundary jumps count as slope mass over
    one cell.
    """
    if f.dims != 1:
        raise PreconditionError("slope norm is defined for 1-D functions")
    a = np.concatenate([[0.0], f.values, [0.0]])
    c = f.cell_sizes[0]
    return float(np.sum(np.abs(np.diff(a)) ** p)) * c ** (1.0 - p)


def verify_gagliardo_limit(f: GridFunction, p: float, m_max: int,
                           function_id: str = "") -> LimitTrace:
    """(1 - alpha) times the Gagliardo double integral against its 1-D limit.

    For a 1-D piecewise-constant representative the limit of
    (1 - alpha) * double integral as alpha -> 1 is (2/p) times the p-th power
    of the difference-quotient derivative norm.
    """
    if f.dims != 1:
        raise PreconditionError("the Gagliardo limit target is implemented for n = 1")
    target = (2.0 / p) * slope_norm_power(f, p)
    ms = np.arange(1, m_max + 1, dtype=np.float64)
    vals = np.empty(ms.size)
    for i, m in enumerate(ms):
        alpha = 1.0 - 2.0**-m
        vals[i] = (1.0 - alpha) * gagliardo_seminorm(f, alpha, p)
    return LimitTrace("gagliardo-limit", function_id, "m", ms, vals, target)


def verify_fractional_sobolev(f: GridFunction, p: float, alpha: float,
                              budget: float = math.inf,
                              budget_lorentz: float = math.inf,
                              function_id: str = "") -> list[InequalityReport]:
    """Critical-exponent norm bounds by the weighted Gagliardo integral.

    LHS is the p-th power of the L^(p*) norm (and, in the second report, of
    the stronger Lorentz(p*, p) norm), p* = np/(n - alpha p); RHS is
    (1 - alpha)/(n - alpha p)^(p-1) times the Gagliardo double integral.
    """
    n = f.dims
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"alpha must lie in [1/2, 1), got {alpha}")
    if p >= n / alpha:
        raise ParameterError(f"need p < n/alpha, got p={p}, n/alpha={n / alpha}")
    p_star = n * p / (n - alpha * p)
    params = {"p": p, "alpha": alpha, "p_star": p_star}
    if f.support_cells == 0:
        return [_degenerate("fractional-sobolev", function_id, params, budget),
                _degenerate("fractional-sobolev-lorentz", function_id, params, budget_lorentz)]
    sf = decreasing_rearrangement(f)
    rhs = (1.0 - alpha) / (n - alpha * p) ** (p - 1.0) * gagliardo_seminorm(f, alpha, p)
    lhs = lorentz_norm(sf, p_star, p_star) ** p
    lhs_lorentz = lorentz_norm(sf, p_star, p) ** p
    return [
        InequalityReport("fractional-sobolev", function_id, params, lhs, rhs, budget,
                         truncation="midpoint double sum"),
        InequalityReport("fractional-sobolev-lorentz", function_id, params,
                         lhs_lorentz, rhs, budget_lorentz,
                         truncation="midpoint double sum"),
    ]


# --- rearrangement vs modulus -------------------------------------------------------

def _unit_interval_values(f: GridFunction) -> np.ndarray:
    """Cell values of a 1-D function zero-padded to the interval [0, 1]."""
    c = f.cell_sizes[0]
    m = round(1.0 / c)
    if abs(m * c - 1.0) > 1e-12 or f.shape[0] > m:
        raise PreconditionError(
            "unit-interval comparison needs the support inside [0, 1] on a grid "
            f"dividing 1; got extent {f.extent[0]} with cell size {c}")
    return np.concatenate([f.values, np.zeros(m - f.shape[0])])


def verify_rearrangement_modulus(f: GridFunction, p: float, deltas, orders=None,
                                 function_id: str = "") -> list[InequalityReport]:
    """Moduli of rearrangements against moduli of the original function.

    For 1-D functions on [0, 1] and delta <= 1/2: the interval modulus of the
    decreasing rearrangement is at most twice that of f (hard constant 2).
    In any dimension: each partial modulus of an iterated rearrangement is at
    most 3^n times the corresponding partial modulus of f (hard constant 3^n).
    """
    n = f.dims
    reports: list[InequalityReport] = []
    zero = f.support_cells == 0
    if n == 1:
        vals = _unit_interval_values(f)
        g = make_grid_function(vals, f.cell_sizes)
        gstar = make_grid_function(np.sort(vals)[::-1], f.cell_sizes)
        for delta in deltas:
            if delta > 0.5:
                raise ParameterError(f"the interval comparison needs delta <= 1/2, got {delta}")
            params = {"p": p, "delta": float(delta)}
            if zero:
                reports.append(_degenerate("rearrangement-modulus-1d", function_id, params, 2.0))
                continue
            lhs = interval_modulus_1d(gstar, delta, p)
            rhs = interval_modulus_1d(g, delta, p)
            reports.append(InequalityReport("rearrangement-modulus-1d", function_id,
                                            params, lhs, rhs, 2.0))
        return reports
    if orders is None:
        orders = [tuple(range(n)), tuple(reversed(range(n)))]
    budget = 3.0**n
    for order in orders:
        rf = iterated_rearrangement(f, order)
        for k in range(n):
            for delta in deltas:
                params = {"p": p, "delta": float(delta), "axis": k, "order": list(order)}
                if zero:
                    reports.append(_degenerate("rearrangement-modulus-axes", function_id,
                                               params, budget))
                    continue
                lhs = partial_modulus(rf, k, delta, p)
                rhs = partial_modulus(f, k, delta, p)
                reports.append(InequalityReport("rearrangement-modulus-axes", function_id,
                                                params, lhs, rhs, budget))
    return reports


def verify_modulus_lemmas(f: GridFunction, p: float, deltas,
                          function_id: str = "") -> list[InequalityReport]:
    """The three exact-constant modulus estimates, per axis and shift.

    * mean bound: omega_k(f; d)_p <= (3/d) integral_0^d I_k(f; h)_p dh
    * averaging distance: the cell-averaged moving mean f_h satisfies
      ||f - f_h||_p <= omega_j(f; h)_p
    * averaging derivative: ||d f_h / d x_j||_p <= omega_j(f; h)_p / h

    These are full-space statements: an orthant-domain input is viewed as its
    zero extension, so its moduli count mass crossing the boundary.
    """
    reports: list[InequalityReport] = []
    if f.halfspace:
        f = GridFunction(f.values, f.cell_sizes, f.origin, halfspace=False)
    zero = f.support_cells == 0
    for k in range(f.dims):
        for d in deltas:
            params = {"p": p, "axis": k, "delta": float(d)}
            if zero:
                for iid, b in (("modulus-mean-bound", 3.0), ("steklov-distance", 1.0),
                               ("steklov-derivative", 1.0)):
                    reports.append(_degenerate(iid, function_id, params, b))
                continue
            omega = partial_modulus(f, k, d, p)
            reports.append(InequalityReport(
                "modulus-mean-bound", function_id, params,
                omega, shift_norm_integral(f, k, d, p) / d, 3.0))
            reports.append(InequalityReport(
                "steklov-distance", function_id, params,
                steklov_distance(f, d, k, p), omega, 1.0))
            reports.append(InequalityReport(
                "steklov-derivative", function_id, params,
                steklov_derivative_norm(f, d, k, p), omega / d, 1.0))
    return reports


# --- dyadic-box operator and axis decrement ----------------------------------------

def _orthant_weight_integral(phi: GridFunction, a: float) -> float:
    """Exact integral of phi(x)^r-free weight:  sum over cells of value times
    the closed-form integral of pi(x)^a on the cell (a > -1)."""
    weight = None
    for s, c in zip(phi.shape, phi.cell_sizes):
        edges = np.arange(s + 1, dtype=np.float64) * c
        w = (edges[1:] ** (a + 1.0) - edges[:-1] ** (a + 1.0)) / (a + 1.0)
        weight = w if weight is None else np.multiply.outer(weight, w)
    return float(np.sum(phi.values * weight))


_BOX_NODES = 16
_MAX_QUAD_POINTS = 2_000_000


def box_operator_weighted_integral(phi: GridFunction, r: float, a: float) -> float:
    """Quadrature for the integral of (box average of phi)^r * pi(x)^a over the orthant.

    Per-axis substitution x = s^2 removes the a = -1/2 singularity; panels are
    split at every cell edge and doubled cell edge, where the box average has
    kinks, so the integrand is smooth on each panel and fixed-order Gauss
    nodes resolve it to near machine precision.
    """
    if a <= -1.0:
        raise ParameterError(f"the weight is integrable only for a > -1, got {a}")
    if any(o != 0.0 for o in phi.origin):
        raise PreconditionError("the box operator lives on grids anchored at the origin")
    nodes, gw = _leggauss(_BOX_NODES)
    axis_nodes = []
    axis_weights = []
    npoints = 1
    for s, c in zip(phi.shape, phi.cell_sizes):
        edges = np.unique(np.concatenate([
            np.arange(s + 1, dtype=np.float64) * c,
            np.arange(1, s + 1, dtype=np.float64) * (2.0 * c),
        ]))
        se = np.sqrt(edges)
        mid = 0.5 * (se[1:] + se[:-1])
        half = 0.5 * (se[1:] - se[:-1])
        sn = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        wn = (half[:, None] * gw[None, :]).ravel() * 2.0 * sn ** (2.0 * a + 1.0)
        axis_nodes.append(sn**2)
        axis_weights.append(wn)
        npoints *= sn.size
    if npoints > _MAX_QUAD_POINTS:
        raise ParameterError(f"quadrature grid of {npoints} points exceeds {_MAX_QUAD_POINTS}")
    field = box_average_on_grid(phi, axis_nodes) ** r
    for w in axis_weights:
        field = np.tensordot(w, field, axes=([0], [0]))
    return float(field)


def verify_box_operator(phi: GridFunction, rs, a_values,
                        function_id: str = "") -> list[InequalityReport]:
    """Dyadic-box averaging operator bounds with their stated constants.

    * pointwise (coordinate-wise nonincreasing phi only): phi(x) is at most its
      box average at every cell corner -- hard constant 1.
    * weighted: integral of (T phi)^r pi^a is at most 2^(max(1,a) n) times the
      integral of phi^r pi^a -- the operator's own constant.
    """
    n = phi.dims
    reports: list[InequalityReport] = []
    zero = phi.support_cells == 0
    if is_mdec(phi) and not zero:
        tfield = box_average_field(phi)
        ratio = float(np.max(np.where(tfield.values > 0,
                                      phi.values / np.maximum(tfield.values, 1e-300), 0.0)))
        reports.append(InequalityReport("box-operator-pointwise", function_id, {},
                                        ratio, 1.0, 1.0))
    for r in rs:
        for a in a_values:
            params = {"r": float(r), "a": float(a)}
            budget = 2.0 ** (max(1.0, a) * n)
            if zero:
                reports.append(_degenerate("box-operator-weight", function_id, params, budget))
                continue
            lhs = box_operator_weighted_integral(phi, r, a)
            rhs_base = _orthant_weight_integral(phi.with_values(phi.values**r), a)
            reports.append(InequalityReport("box-operator-weight", function_id, params,
                                            lhs, rhs_base, budget,
                                            truncation="panel quadrature"))
    return reports


def axis_decrement_integral(f: GridFunction, k: int, mu: float, h: float, p: float) -> float:
    """Exact 1/p-power of the column integral of u^(-p) (f(u) - f(mu u))^p over u > h.

    f must be coordinate-wise nonincreasing on the orthant; per column the
    integrand is piecewise constant between the cell edges and their mu-th
    shrinkings, so each piece integrates in closed form (log form at p = 1).
    """
    if mu <= 1.0:
        raise ParameterError(f"mu must be > 1, got {mu}")
    if h <= 0:
        raise ParameterError(f"h must be > 0, got {h}")
    if not is_mdec(f):
        raise PreconditionError("the axis decrement bound needs a coordinate-wise nonincreasing f")
    a = np.moveaxis(f.values, k, 0)
    nk = a.shape[0]
    c = f.cell_sizes[k]
    colvol = f.cell_volume / c
    top = nk * c
    edges = np.unique(np.concatenate([
        np.arange(nk + 1, dtype=np.float64) * c,
        np.arange(nk + 1, dtype=np.float64) * c / mu,
        [h],
    ]))
    edges = edges[(edges >= h) & (edges <= top)]
    if edges.size < 2:
        return 0.0
    cols = a.reshape(nk, -1)
    zero_row = np.zeros(cols.shape[1])
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        midu = 0.5 * (lo + hi)
        iu = int(midu // c)
        imu = int(mu * midu // c)
        fu = cols[iu] if iu < nk else zero_row
        fmu = cols[imu] if imu < nk else zero_row
        diff = fu - fmu
        if p == 1.0:
            w = math.log(hi / lo)
        else:
            w = (lo ** (1.0 - p) - hi ** (1.0 - p)) / (p - 1.0)
        total += w * float(np.sum(diff**p))
    return (total * colvol) ** (1.0 / p)


def verify_axis_decrement(f: GridFunction, p: float, mus, h_values,
                          function_id: str = "") -> list[InequalityReport]:
    """Column decrement integral against 4 mu times the modulus quotient.

    For coordinate-wise nonincreasing f on the orthant, each axis k, mu > 1:
    the exact column integral is at most 4 mu omega_k(f; h)_p / h.
    """
    reports: list[InequalityReport] = []
    zero = f.support_cells == 0
    for k in range(f.dims):
        curve = None if zero else modulus_curve(f, k, p)
        for mu in mus:
            for h in h_values:
                params = {"p": p, "axis": k, "mu": float(mu), "h": float(h)}
                if zero:
                    reports.append(_degenerate("axis-decrement", function_id, params, 4.0 * mu))
                    continue
                lhs = axis_decrement_integral(f, k, mu, h, p)
                rhs = float(curve(h)) / h
                reports.append(InequalityReport("axis-decrement", function_id, params,
                                                lhs, rhs, 4.0 * mu))
    return reports

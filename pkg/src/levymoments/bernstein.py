"""Bernstein functions: catalog families, custom Levy densities, derivatives,
shifts, inverses, and numerical checks of the series theorem's hypotheses.

A Bernstein function here is phi(z) = q + d*z + int_0^inf (1 - e^{-zy}) mu(dy)
with killing q >= 0, drift d >= 0 and Levy measure mu. Catalog families carry
closed forms; custom densities are integrated by adaptive quadrature split at
y = 1, with (1, inf) mapped through y = 1 + u/(1-u).

All evaluation routines accept scalars or numpy arrays, real or complex, and
are pure (safe to share specs across threads).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.special as sp

from .errors import DomainError, QuadratureError, RangeError

__all__ = [
    "BernsteinSpec",
    "CustomDensity",
    "HypothesisReport",
    "FAMILIES",
    "eval_phi",
    "deriv",
    "shift",
    "inverse",
    "check_hypotheses",
    "analytic_bound",
    "phi_at_zero",
    "is_constant",
    "levy_density",
    "spec_from_json",
    "spec_to_json",
    "eval_phi_mp",
]

FAMILIES = ("log1p", "power", "shifted_power", "loglog", "truncated_gamma", "linear", "custom")

_EULER = float(np.euler_gamma)
_QUAD_TOL = 1e-11


@dataclass(frozen=True)
class CustomDensity:
    """Levy density m(y) >= 0 on (0, inf).

    Either a callable or a tabulated set of (y, density) pairs interpolated
    loglog-linearly (linear in log m vs log y, power-law continuation beyond
    the table). The integrability condition int min(y,1) m(y) dy < inf is
    asserted by the caller, not verified.
    """

    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    table: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if (self.fn is None) == (self.table is None):
            raise ValueError("provide exactly one of fn or table")
        if self.table is not None:
            ys = [p[0] for p in self.table]
            if len(ys) < 2 or any(b <= a for a, b in zip(ys, ys[1:])):
                raise ValueError("table needs >= 2 strictly increasing y values")
            if any(p[1] <= 0 for p in self.table):
                raise ValueError("tabulated densities must be positive")

    def density(self, y):
        y = np.asarray(y, dtype=float)
        if self.fn is not None:
            return np.asarray(self.fn(y), dtype=float)
        ly = np.log(np.asarray([p[0] for p in self.table]))
        lm = np.log(np.asarray([p[1] for p in self.table]))
        out = np.interp(np.log(y), ly, lm)
        # power-law continuation with the edge slopes
        lo, hi = ly[0], ly[-1]
        s_lo = (lm[1] - lm[0]) / (ly[1] - ly[0])
        s_hi = (lm[-1] - lm[-2]) / (ly[-1] - ly[-2])
        lgy = np.log(y)
        out = np.where(lgy < lo, lm[0] + s_lo * (lgy - lo), out)
        out = np.where(lgy > hi, lm[-1] + s_hi * (lgy - hi), out)
        return np.exp(out)


@dataclass(frozen=True)
class BernsteinSpec:
    """A Bernstein function: family tag, parameters, killing rate.

    phi(0) = killing_q exactly; shift_k > 0 marks the shifted function
    phi_(k)(z) = phi(k+z) - phi(k) (killing cancels, phi_(k)(0) = 0).
    """

    family: str
    alpha: Optional[float] = None
    d: float = 0.0
    q: float = 0.0
    custom: Optional[CustomDensity] = None
    custom_analytic_bound: float = 0.0
    shift_k: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family in ("power", "shifted_power"):
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ValueError("power families need alpha in (0,1)")
        if self.family == "custom" and self.custom is None:
            raise ValueError("custom family needs a CustomDensity")
        if self.d < 0 or self.q < 0 or self.shift_k < 0:
            raise ValueError("d, q and shift_k must be non-negative")
        if self.family == "custom" and self.custom_analytic_bound > 0:
            raise ValueError("analytic bound must be <= 0")

    # -- constructors ------------------------------------------------------
    @classmethod
    def log1p(cls, q: float = 0.0) -> "BernsteinSpec":
        """phi(x) = q + ln(1+x), the Gamma subordinator's exponent."""
        return cls("log1p", q=q)

    @classmethod
    def power(cls, alpha: float, q: float = 0.0) -> "BernsteinSpec":
        """phi(x) = q + x^alpha, the alpha-stable subordinator."""
        return cls("power", alpha=alpha, q=q)

    @classmethod
    def shifted_power(cls, alpha: float, q: float = 0.0) -> "BernsteinSpec":
        """phi(x) = q + (x+1)^alpha - 1."""
        return cls("shifted_power", alpha=alpha, q=q)

    @classmethod
    def loglog(cls, q: float = 0.0) -> "BernsteinSpec":
        """phi(x) = q + ln ln(x+e), a slowly growing Bernstein function."""
        return cls("loglog", q=q)

    @classmethod
    def truncated_gamma(cls, q: float = 0.0) -> "BernsteinSpec":
        """Levy density y^{-1} e^{-y} on (0,1): phi(x) = q + ln(x+1) - A(x)."""
        return cls("truncated_gamma", q=q)

    @classmethod
    def linear(cls, d: float = 1.0, q: float = 0.0) -> "BernsteinSpec":
        """phi(x) = q + d*x, the drift-only subordinator."""
        return cls("linear", d=d, q=q)

    @classmethod
    def from_custom(
        cls,
        density: Optional[Callable] = None,
        table: Optional[Sequence[tuple[float, float]]] = None,
        d: float = 0.0,
        q: float = 0.0,
        analytic_bound: float = 0.0,
    ) -> "BernsteinSpec":
        cd = CustomDensity(fn=density, table=tuple(map(tuple, table)) if table else None)
        return cls("custom", d=d, q=q, custom=cd, custom_analytic_bound=analytic_bound)


# chosen so continued-fraction symbols of the paper's strip bookkeeping stay
# available: (a_phi, u_phi, abar_phi) constants for the unshifted catalog
_ANALYTIC_BOUNDS = {
    "log1p": -1.0,
    "power": 0.0,
    "shifted_power": -1.0,
    "loglog": 1.0 - math.e,
    "truncated_gamma": -math.inf,
    "linear": -math.inf,
}

# optional metadata only: first zero u_phi and abar = max(a_phi, u_phi) for
# the unkilled catalog families (all vanish exactly at 0)
STRIP_METADATA = {
    fam: {"u_phi": 0.0, "abar_phi": max(_ANALYTIC_BOUNDS[fam], 0.0)} for fam in _ANALYTIC_BOUNDS
}


def analytic_bound(spec: BernsteinSpec) -> float:
    """Left edge a_phi of the analytic strip Re(z) > a_phi (can be -inf)."""
    if spec.family == "custom":
        base = spec.custom_analytic_bound
    else:
        base = _ANALYTIC_BOUNDS[spec.family]
    return base - spec.shift_k


def phi_at_zero(spec: BernsteinSpec) -> float:
    """phi(0): the killing rate, 0 for shifted specs."""
    return 0.0 if spec.shift_k > 0 else spec.q


def is_constant(spec: BernsteinSpec) -> bool:
    return spec.family == "linear" and spec.d == 0.0


# -- Ein: the entire exponential integral, d/du Ein(u) = (1-e^{-u})/u --------

def _ein_series(u):
    u = np.asarray(u)
    out = np.zeros_like(u)
    term = np.ones_like(u)
    for n in range(1, 120):
        term = term * (-u) / n
        inc = -term / n
        out = out + inc
        if np.all(np.abs(inc) <= 1e-17 * (np.abs(out) + 1e-300)):
            break
    return out


def _ein(u):
    """Ein(u) = int_0^u (1-e^{-s})/s ds, entire; vectorized real or complex."""
    u = np.asarray(u)
    if np.iscomplexobj(u):
        out = np.empty(u.shape, dtype=complex)
        small = np.abs(u) <= 40.0
        if small.any():
            out[small] = _ein_series(u[small])
        big = ~small
        if big.any():
            ub = u[big]
            right = ub.real >= 0
            res = np.empty(ub.shape, dtype=complex)
            if right.any():
                res[right] = _EULER + np.log(ub[right]) + sp.exp1(ub[right])
            if (~right).any():
                import mpmath as mp

                res[~right] = np.asarray(
                    [complex(mp.ein(complex(v))) for v in np.atleast_1d(ub[~right])]
                ).reshape(ub[~right].shape)
            out[big] = res
        return out if out.shape else out[()]
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape if u.shape else (1,), dtype=float)
    uu = np.atleast_1d(u)
    small = np.abs(uu) <= 2.0
    pos = (uu > 2.0)
    neg = (uu < -2.0)
    if small.any():
        out[small] = _ein_series(uu[small]).real
    if pos.any():
        out[pos] = _EULER + np.log(uu[pos]) + sp.exp1(uu[pos])
    if neg.any():
        out[neg] = _EULER + np.log(-uu[neg]) - sp.expi(-uu[neg])
    return out.reshape(u.shape) if u.shape else float(out[0])


def _inv_phi_kernel(u):
    """(1 - e^{-u})/u with the removable singularity at 0 filled in."""
    u = np.asarray(u)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 - u / 2.0 + u * u / 6.0, -np.expm1(-safe) / safe)
    return out


def _inv_phi_kernel_d1(u):
    """d/du (1-e^{-u})/u = (e^{-u}(1+u) - 1)/u^2."""
    u = np.asarray(u)
    small = np.abs(u) < 1e-3
    safe = np.where(small, 1.0, u)
    out = np.where(
        small,
        -0.5 + u / 3.0 - u * u / 8.0,
        (np.exp(-safe) * (1.0 + safe) - 1.0) / (safe * safe),
    )
    return out


# -- family closed forms -----------------------------------------------------

def _log_maybe(x):
    # np.log1p has no complex support on some numpy builds; arguments here
    # are never near 0 in the complex branch
    if np.iscomplexobj(np.asarray(x)):
        return np.log(1.0 + np.asarray(x))
    return np.log1p(np.asarray(x, dtype=float))


def _base_val(spec: BernsteinSpec, z):
    fam = spec.family
    if fam == "log1p":
        return spec.q + _log_maybe(z)
    if fam == "power":
        return spec.q + np.asarray(z) ** spec.alpha
    if fam == "shifted_power":
        return spec.q + (1.0 + np.asarray(z)) ** spec.alpha - 1.0
    if fam == "loglog":
        return spec.q + np.log(np.log(np.asarray(z) + math.e))
    if fam == "truncated_gamma":
        return spec.q + _ein(np.asarray(z) + 1.0) - _EIN_1
    if fam == "linear":
        return spec.q + spec.d * np.asarray(z)
    return _custom_val(spec, z)


def _base_d1(spec: BernsteinSpec, z):
    fam = spec.family
    z = np.asarray(z)
    if fam == "log1p":
        return 1.0 / (1.0 + z)
    if fam == "power":
        return spec.alpha * z ** (spec.alpha - 1.0)
    if fam == "shifted_power":
        return spec.alpha * (1.0 + z) ** (spec.alpha - 1.0)
    if fam == "loglog":
        return 1.0 / ((z + math.e) * np.log(z + math.e))
    if fam == "truncated_gamma":
        return _inv_phi_kernel(z + 1.0)
    if fam == "linear":
        return spec.d * np.ones_like(z)
    return _custom_deriv(spec, z, 1)


def _base_d2(spec: BernsteinSpec, z):
    fam = spec.family
    z = np.asarray(z)
    if fam == "log1p":
        return -1.0 / (1.0 + z) ** 2
    if fam == "power":
        return spec.alpha * (spec.alpha - 1.0) * z ** (spec.alpha - 2.0)
    if fam == "shifted_power":
        return spec.alpha * (spec.alpha - 1.0) * (1.0 + z) ** (spec.alpha - 2.0)
    if fam == "loglog":
        lg = np.log(z + math.e)
        return -(lg + 1.0) / ((z + math.e) ** 2 * lg ** 2)
    if fam == "truncated_gamma":
        return _inv_phi_kernel_d1(z + 1.0)
    if fam == "linear":
        return np.zeros_like(z)
    return _custom_deriv(spec, z, 2)


# -- custom-density quadrature ----------------------------------------------

def _quad_complex(f, a, b):
    re, re_err = scipy.integrate.quad(lambda y: f(y).real, a, b, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
    im, im_err = scipy.integrate.quad(lambda y: f(y).imag, a, b, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
    err = math.hypot(re_err, im_err)
    val = complex(re, im)
    if err > 1e-7 * (abs(val) + 1.0):
        raise QuadratureError(f"custom-density integral error estimate {err:.2e} too large")
    return val, err


_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _custom_kernel(spec, z, order):
    m = spec.custom.density
    if order == 0:
        return lambda y: (1.0 - np.exp(-z * y)) * m(y)
    if order == 1:
        return lambda y: y * np.exp(-z * y) * m(y)
    return lambda y: -(y * y) * np.exp(-z * y) * m(y)


def _custom_point_tabulated(spec: BernsteinSpec, z: complex, order: int) -> complex:
    """Segmentwise Gauss-Legendre over the table's knots, extended by the
    power-law continuations toward 0 and infinity."""
    kern = _custom_kernel(spec, z, order)
    ys = np.asarray([p[0] for p in spec.custom.table])
    lo = np.exp(np.linspace(math.log(ys[0] * 1e-6), math.log(ys[0]), 25))[:-1]
    hi = np.exp(np.linspace(math.log(ys[-1]), math.log(ys[-1] * 1e3), 33))[1:]
    knots = np.concatenate([lo, ys, hi])
    a, b = knots[:-1], knots[1:]
    mid = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * _GL16_X[None, :]
    vals = kern(mid.ravel()).reshape(mid.shape)
    total = complex((0.5 * (b - a) * (vals * _GL16_W[None, :]).sum(axis=1)).sum())
    if order == 0:
        total = total + spec.q + spec.d * z
    elif order == 1:
        total = total + spec.d
    return total


def _custom_point(spec: BernsteinSpec, z: complex, order: int) -> complex:
    if spec.custom.table is not None:
        return _custom_point_tabulated(spec, z, order)
    kern = _custom_kernel(spec, z, order)

    def mapped(u):
        # y = 1 + u/(1-u), dy = du/(1-u)^2 sends (0,1) to (1, inf)
        y = 1.0 + u / (1.0 - u)
        return kern(y) / (1.0 - u) ** 2

    v1, _ = _quad_complex(lambda y: np.asarray(kern(y), dtype=complex), 0.0, 1.0)
    v2, _ = _quad_complex(lambda u: np.asarray(mapped(u), dtype=complex), 0.0, 1.0 - 1e-12)
    total = v1 + v2
    if order == 0:
        total = total + spec.q + spec.d * z
    elif order == 1:
        total = total + spec.d
    return total


def _custom_eval_any(spec, z, order):
    arr = np.asarray(z)
    flat = np.atleast_1d(arr).ravel()
    vals = np.asarray([_custom_point(spec, complex(v), order) for v in flat])
    if not np.iscomplexobj(arr):
        vals = vals.real
    vals = vals.reshape(arr.shape)
    return vals if arr.shape else vals[()]


def _custom_val(spec, z):
    return _custom_eval_any(spec, z, 0)


def _custom_deriv(spec, z, order):
    return _custom_eval_any(spec, z, order)


_EIN_1 = 0.7965995992970531  # Ein(1) = gamma + E1(1)


# -- public evaluation -------------------------------------------------------

def _check_domain(spec: BernsteinSpec, z) -> None:
    """Maximal analytic domain for closed forms; half-plane for custom."""
    a = analytic_bound(spec)
    arr = np.asarray(z)
    zs = arr + spec.shift_k  # the base function sees z + k
    fam = spec.family
    if fam in ("truncated_gamma", "linear"):
        return
    if fam == "custom":
        if np.any(np.asarray(arr).real <= a):
            raise DomainError(f"Re(z) must exceed a_phi = {a:g} for custom specs")
        return
    base_cut = _ANALYTIC_BOUNDS[fam]
    zs = np.asarray(zs)
    re = zs.real
    on_axis = zs.imag == 0 if np.iscomplexobj(zs) else np.ones_like(re, dtype=bool)
    if fam == "power":
        bad = on_axis & (re < base_cut)
    else:
        bad = on_axis & (re <= base_cut)
    if np.any(bad):
        raise DomainError(f"{fam} is not analytic at the requested point (cut at {base_cut:g})")


def eval_phi(spec: BernsteinSpec, z):
    """phi(z). Real input gives real output; arrays broadcast elementwise."""
    _check_domain(spec, z)
    if spec.shift_k == 0:
        out = _base_val(spec, z)
    else:
        k = float(spec.shift_k)
        out = _base_val(spec, np.asarray(z) + k) - _base_val(spec, k)
    return _as_scalar_like(out, z)


def deriv(spec: BernsteinSpec, z, order: int = 1):
    """phi'(z) or phi''(z); positive resp. non-positive on the real axis."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    _check_domain(spec, z)
    zz = np.asarray(z) + spec.shift_k if spec.shift_k else z
    out = _base_d1(spec, zz) if order == 1 else _base_d2(spec, zz)
    return _as_scalar_like(out, z)


def _as_scalar_like(out, z):
    out = np.asarray(out)
    if np.isscalar(z) or np.asarray(z).shape == ():
        v = out[()] if out.shape == () else out
        if np.iscomplexobj(np.asarray(z)) or isinstance(z, complex):
            return complex(v)
        return float(np.real(v))
    return out


def shift(spec: BernsteinSpec, k: int) -> BernsteinSpec:
    """The shifted Bernstein function phi_(k)(z) = phi(k+z) - phi(k)."""
    if int(k) != k or k < 1:
        raise ValueError("shift needs a positive integer k")
    if spec.family == "linear":
        # d(k+z) - dk = dz exactly, killing and shift both drop
        return dataclasses.replace(spec, q=0.0, shift_k=0)
    return dataclasses.replace(spec, shift_k=spec.shift_k + int(k))


def phi_limit(spec: BernsteinSpec, probe: float = 1e12) -> float:
    """Numerical stand-in for phi(inf) (exact inf for unbounded catalog)."""
    if is_constant(spec):
        return phi_at_zero(spec)
    if spec.family in ("log1p", "power", "shifted_power", "loglog", "linear", "truncated_gamma"):
        return math.inf
    return float(eval_phi(spec, probe))


def inverse(spec: BernsteinSpec, y: float) -> float:
    """Solve phi(x) = y for x > 0 by bracketing bisection plus safeguarded
    Newton; |phi(x) - y| <= 1e-12 * max(1, |y|)."""
    p0 = phi_at_zero(spec)
    if not y > p0:
        raise RangeError(f"y must lie in (phi(0), phi(inf)) = ({p0:g}, ...)")
    hi = 1.0
    for _ in range(200):
        if eval_phi(spec, hi) >= y:
            break
        hi *= 2.0
        if hi > 1e300:
            raise RangeError("y appears to exceed phi(inf)")
    lo = 0.0
    tol = 1e-12 * max(1.0, abs(y))
    x = 0.5 * hi
    for _ in range(200):
        fx = eval_phi(spec, x) - y
        if abs(fx) <= tol:
            return x
        if fx > 0:
            hi = x
        else:
            lo = x
        dfx = deriv(spec, x, 1) if x > 0 else None
        step_ok = False
        if dfx and dfx > 0:
            xn = x - fx / dfx
            if lo < xn < hi:
                x = xn
                step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
    return x


@dataclass(frozen=True)
class HypothesisReport:
    """Finite-probe evidence for the series theorem's hypotheses.

    Heuristic by construction: the hypotheses are asymptotic statements and
    cannot be decided from finitely many probes.
    """

    ratio_bounded: bool
    max_derivative_ratio: float
    quadratic_growth: bool
    unbounded: bool
    probes: int
    note: str = "finite-probe evidence only, not a proof"

    @property
    def all_pass(self) -> bool:
        return self.ratio_bounded and self.quadratic_growth and self.unbounded


def check_hypotheses(
    spec: BernsteinSpec,
    x_max: float = 1e6,
    n_probes: int = 64,
    growth_floor: Optional[float] = None,
    ratio_cap: float = 1e3,
) -> HypothesisReport:
    """Probe limsup phi'(x)/phi'(2x) < inf, x^2 phi'(x) -> inf, phi(inf) = inf
    on a geometric grid up to x_max."""
    if x_max <= 1 or n_probes < 8:
        raise ValueError("need x_max > 1 and n_probes >= 8")
    if is_constant(spec):
        return HypothesisReport(False, math.nan, False, False, n_probes)
    xs = np.geomspace(1.0, x_max, n_probes)
    d1 = np.asarray(deriv(spec, xs, 1), dtype=float)
    d2x = np.asarray(deriv(spec, 2.0 * xs, 1), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = d1 / d2x
    max_ratio = float(np.nanmax(ratios))
    ratio_ok = bool(np.isfinite(max_ratio) and max_ratio < ratio_cap)
    w = xs * xs * d1
    tail = w[-8:]
    growth_ok = bool(np.all(np.diff(tail) > 0))
    p1 = float(eval_phi(spec, 1.0))
    floor = growth_floor if growth_floor is not None else 3.0 * max(p1, 1e-12)
    unbounded_ok = bool(eval_phi(spec, x_max) > floor)
    return HypothesisReport(ratio_ok, max_ratio, growth_ok, unbounded_ok, n_probes)


def levy_density(spec: BernsteinSpec, y):
    """The Levy density of the (unshifted) spec where known, else None."""
    y = np.asarray(y, dtype=float)
    fam = spec.family
    if fam == "log1p":
        base = np.exp(-y) / y
    elif fam == "truncated_gamma":
        base = np.where(y < 1.0, np.exp(-y) / y, 0.0)
    elif fam == "power":
        base = spec.alpha / sp.gamma(1.0 - spec.alpha) * y ** (-1.0 - spec.alpha)
    elif fam == "shifted_power":
        base = np.exp(-y) * spec.alpha / sp.gamma(1.0 - spec.alpha) * y ** (-1.0 - spec.alpha)
    elif fam == "linear":
        base = np.zeros_like(y)
    elif fam == "custom":
        base = spec.custom.density(y)
    else:
        return None
    if spec.shift_k:
        base = base * np.exp(-spec.shift_k * y)
    return base


# -- JSON wire format ---------------------------------------------------------

def spec_to_json(spec: BernsteinSpec) -> str:
    if spec.shift_k:
        raise ValueError("shifted specs are internal and not serializable")
    doc: dict = {"family": spec.family}
    if spec.alpha is not None:
        doc["alpha"] = spec.alpha
    if spec.d:
        doc["d"] = spec.d
    if spec.q:
        doc["q"] = spec.q
    if spec.family == "custom":
        if spec.custom.table is None:
            raise ValueError("only tabulated custom densities serialize")
        doc["custom_density"] = [list(p) for p in spec.custom.table]
        doc["interpolation"] = "loglog-linear"
        if spec.custom_analytic_bound:
            doc["analytic_bound"] = spec.custom_analytic_bound
    return json.dumps(doc)


def spec_from_json(text: str) -> BernsteinSpec:
    doc = json.loads(text)
    fam = doc.get("family")
    if fam not in FAMILIES:
        raise ValueError(f"unknown family {fam!r}")
    q = float(doc.get("q", 0.0))
    if fam == "custom":
        pairs = doc.get("custom_density")
        if not pairs:
            raise ValueError("custom spec needs custom_density pairs")
        return BernsteinSpec.from_custom(
            table=[(float(a), float(b)) for a, b in pairs],
            d=float(doc.get("d", 0.0)),
            q=q,
            analytic_bound=float(doc.get("analytic_bound", 0.0)),
        )
    if fam == "linear":
        return BernsteinSpec.linear(d=float(doc.get("d", 1.0)), q=q)
    if fam in ("power", "shifted_power"):
        return BernsteinSpec(fam, alpha=float(doc["alpha"]), q=q)
    return BernsteinSpec(fam, q=q)


def eval_phi_mp(spec: BernsteinSpec, x, dps: int = 50):
    """Extended-precision phi(x) for catalog families (mpmath backend).

    For cancellation-prone oracle work; custom densities are not supported.
    """
    import mpmath as mp

    with mp.workdps(dps):
        x = mp.mpf(x) if not isinstance(x, complex) else mp.mpc(x)

        def base(v):
            fam = spec.family
            if fam == "log1p":
                return spec.q + mp.log(1 + v)
            if fam == "power":
                return spec.q + v ** mp.mpf(spec.alpha)
            if fam == "shifted_power":
                return spec.q + (1 + v) ** mp.mpf(spec.alpha) - 1
            if fam == "loglog":
                return spec.q + mp.log(mp.log(v + mp.e))
            if fam == "truncated_gamma":
                return spec.q + mp.ein(v + 1) - mp.ein(1)
            if fam == "linear":
                return spec.q + spec.d * v
            raise ValueError("extended precision needs a catalog family")

        if spec.shift_k:
            return base(x + spec.shift_k) - base(mp.mpf(spec.shift_k))
        return base(x)

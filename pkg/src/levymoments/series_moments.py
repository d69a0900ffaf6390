"""Series evaluation of E[I_phi^z(t)], the moment of the exponential
functional of a (killed) subordinator on a deterministic horizon.

The master expansion is

    E[I^z(t)] = Gamma(z+1)/W_phi(z+1) + sum_{k>=1} H(z,k) e^{-phi(k) t},

    H(z,k) = prod_{j=1}^{k} (phi(k)-phi(z+j)) / prod_{j=1}^{k-1} (phi(k)-phi(j))
             * 1/phi(k) * Gamma(z+1) / W_{phi_(k)}(z+1),

valid for Re(z) > -1 + a_phi (unkilled, phi(0)=0) resp. Re(z) > -1 (killed),
under the hypotheses limsup phi'(x)/phi'(2x) < inf, x^2 phi'(x) -> inf and
phi(inf) = inf. Products run in log-modulus/argument form; the factor closest
to cancellation (z + j near k) is evaluated through the mean-value integral
-(z+j-k) * avg phi'. After adaptive truncation the tail is completed with the
envelope integral

    sum_{k>K} phi'(k) phi(k)^{-1-z} e^{-phi(k)t}  ~  t^z Gamma(-z, t*phi(K+1/2)),

whose slowly varying prefactor is estimated from trailing terms; the reported
tail certificate combines the prefactor's two-scale drift with its local
spread and is heuristic, not a proof.

Exact negative integer orders collapse to W-free sums (the Riemann zeta
identity is the log1p case), evaluated with closed-form Euler-Maclaurin tail
corrections.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import mpmath as mp
import numpy as np
import scipy.optimize

from . import bernstein as bf
from . import bgamma
from .bernstein import BernsteinSpec
from .errors import ConvergenceError, DomainError, OverflowGuardError, RangeError, RootError

__all__ = [
    "SeriesResult",
    "TermContext",
    "TailConstants",
    "h_term",
    "term_context",
    "moment",
    "tail_bound",
    "neg_int_moment",
    "minus_two_moment_via_ode",
    "zeta",
]

K_MAX_DEFAULT = 20000
_LOGMOD_CAP = 700.0
_SLOW_DECAY_EXPONENT = 30.0
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)
_GL8_T = 0.5 * (_GL8_X + 1.0)
_GL8_W = 0.5 * _GL8_W


@dataclass
class SeriesResult:
    """Truncated-series value with a heuristic tail certificate.

    converged implies tail_certificate <= tol * max(1, |value|) at the tol
    the evaluation was asked for.
    """

    value: complex
    terms_used: int
    tail_certificate: float
    converged: bool
    warnings: list[str] = field(default_factory=list)

    @property
    def real_value(self) -> float:
        return float(self.value.real)


@dataclass(frozen=True)
class TermContext:
    """Ingredients of the k-th series term (diagnostic view)."""

    k: int
    phi_k: float
    dphi_k: float
    h_value: complex
    exp_weight: float


@dataclass(frozen=True)
class TailConstants:
    """Calibrated constants for the tail certificate.

    The underlying inequality proves existence of (K, c, C) without values;
    the defaults come from scripts/calibrate_tail.py, which maximizes the
    true-remainder/raw-bound ratio over drift-only and log1p references.
    Certificates are calibration-conditional, not proofs.
    """

    K: float = 2.0
    c: float = 1.0
    C: float = 1.0


def _strip_floor(spec: BernsteinSpec) -> float:
    a = bf.analytic_bound(spec)
    return -1.0 + (a if bf.phi_at_zero(spec) == 0 else 0.0)


def _require_strip(spec: BernsteinSpec, z: complex) -> None:
    lo = _strip_floor(spec)
    if not z.real > lo:
        raise DomainError(f"Re(z) = {z.real:g} is outside the strip Re(z) > {lo:g}")


@lru_cache(maxsize=512)
def _hypotheses_pass(spec: BernsteinSpec) -> bool:
    try:
        return bf.check_hypotheses(spec, x_max=1e6, n_probes=64).all_pass
    except Exception:
        return False


def _exact_int(z: complex) -> Optional[int]:
    if z.imag == 0.0 and z.real == round(z.real):
        return int(round(z.real))
    return None


# -- the k-th coefficient -----------------------------------------------------

def _log_products(spec: BernsteinSpec, z: complex, k: int, phis_real: np.ndarray):
    """(log-modulus, argument) of prod_{j<=k}(phi(k)-phi(z+j)) over
    prod_{j<k}(phi(k)-phi(j)). The factor with z+j closest to k is computed
    as -(z+j-k) * int_0^1 phi'(k + s(z+j-k)) ds to sidestep cancellation.
    Returns logmod = -inf when a numerator factor vanishes identically."""
    pk = phis_real[k - 1]
    j = np.arange(1, k + 1, dtype=float)
    num = pk - np.asarray(bf.eval_phi(spec, j.astype(complex) + z))
    j0 = int(min(k, max(1, round(k - z.real))))
    delta = z + j0 - k
    if abs(delta) <= 0.5:
        if delta == 0:
            return -math.inf, 0.0
        nodes = (k + _GL8_T * delta).astype(complex)
        avg = complex((np.asarray(bf.deriv(spec, nodes, 1)) * _GL8_W).sum())
        num[j0 - 1] = -delta * avg
    logmod = float(np.log(np.abs(num)).sum())
    arg = float(np.angle(num).sum())
    den = pk - phis_real[: k - 1]
    logmod -= float(np.log(den).sum())
    return logmod, arg


def _log_h(spec, z, k, wtol, phis):
    logmod, arg = _log_products(spec, z, k, phis)
    if logmod == -math.inf:
        return None
    lg = bgamma.complex_loggamma(z + 1.0)
    lw = bgamma.eval_logW(bf.shift(spec, k), z + 1.0, tol=wtol)
    return (logmod - math.log(phis[k - 1]) + lg - lw) + 1j * arg


def h_term(
    spec: BernsteinSpec,
    z: complex,
    k: int,
    tol: float = 1e-12,
    _phis: Optional[np.ndarray] = None,
) -> complex:
    """The k-th series coefficient H(z, k).

    Identically zero once z is a non-negative integer n and k >= n+1 (a
    numerator factor vanishes). Raises OverflowGuardError with the log-scale
    representation when the magnitude exceeds the exponentiation cap.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if bf.is_constant(spec):
        raise DomainError("h_term needs a non-constant Bernstein function")
    z = complex(z)
    _require_strip(spec, z)
    n = _exact_int(z)
    if n is not None and n >= 0 and k >= n + 1:
        return 0.0j
    phis = (
        _phis
        if _phis is not None
        else np.asarray(bf.eval_phi(spec, np.arange(1, k + 1, dtype=float)), dtype=float)
    )
    lh = _log_h(spec, z, k, max(tol * 2.0 ** -4, 1e-13), phis)
    if lh is None:
        return 0.0j
    if lh.real > _LOGMOD_CAP:
        raise OverflowGuardError(
            "series coefficient exceeds the exponentiation cap",
            log_modulus=lh.real,
            argument=math.remainder(lh.imag, 2.0 * math.pi),
        )
    return cmath.exp(lh)


def term_context(spec: BernsteinSpec, z: complex, k: int, t: float) -> TermContext:
    """Assemble the k-th term's diagnostic record."""
    pk = float(bf.eval_phi(spec, float(k)))
    return TermContext(
        k=k,
        phi_k=pk,
        dphi_k=float(bf.deriv(spec, float(k), 1)),
        h_value=h_term(spec, z, k),
        exp_weight=math.exp(-pk * t),
    )


# -- the moment ---------------------------------------------------------------

def moment(
    spec: BernsteinSpec,
    z: complex,
    t: float,
    tol: float = 1e-8,
    k_max: int = K_MAX_DEFAULT,
    force: bool = False,
) -> SeriesResult:
    """E[I_phi^z(t)] by the adaptive series.

    Sums until |term| < tol*|partial| for 3 consecutive k, then completes the
    tail and keeps doubling the truncation point until the certificate drops
    below tol*max(1,|value|); ConvergenceError at k_max. Exact non-negative
    integer z terminates after z+1 contributions; exact negative integer z
    switches every Gamma/W ratio to its finite limit (W-free sum).
    """
    if not t > 0:
        raise DomainError("t must be positive")
    z = complex(z)
    _require_strip(spec, z)
    warnings: list[str] = []
    if not _hypotheses_pass(spec):
        if not force:
            raise DomainError(
                "check_hypotheses flags fail for this spec; pass force=True to override"
            )
        warnings.append("hypotheses_unverified")
    if float(bf.eval_phi(spec, float(k_max))) * t < _SLOW_DECAY_EXPONENT:
        warnings.append("slow_decay")

    n = _exact_int(z)
    if n is not None and n >= 0:
        return _moment_nonneg_int(spec, n, t, warnings)
    if n is not None:
        return _moment_neg_int_limits(spec, n, t, tol, k_max, warnings)
    return _moment_generic(spec, z, t, tol, k_max, warnings)


def _moment_nonneg_int(spec, n, t, warnings):
    total = bgamma.mellin_infinity(spec, float(n))
    if n:
        phis = np.asarray(bf.eval_phi(spec, np.arange(1, n + 1, dtype=float)), dtype=float)
        for k in range(1, n + 1):
            total += h_term(spec, float(n), k, _phis=phis) * math.exp(-phis[k - 1] * t)
    return SeriesResult(total, n + 1, 0.0, True, warnings)


def _upper_gamma(s: complex, x: float) -> complex:
    """Upper incomplete gamma with complex order (tail-envelope integral)."""
    return complex(mp.gammainc(mp.mpc(s), a=x))


def _moment_generic(spec, z, t, tol, k_max, warnings):
    total = bgamma.mellin_infinity(spec, z)
    wtol = max(min(tol * 1e-2, 1e-10), 1e-13)
    phis = np.empty(0)
    dphis = np.empty(0)
    small_run = 0
    trail: list[complex] = []  # envelope prefactors c_k over the last terms
    checkpoint: Optional[tuple[int, complex]] = None
    check_at = None
    k = 0
    while k < k_max:
        if k >= phis.size:
            grow = min(max(256, 2 * phis.size), k_max)
            j = np.arange(1, grow + 1, dtype=float)
            phis = np.asarray(bf.eval_phi(spec, j), dtype=float)
            dphis = np.asarray(bf.deriv(spec, j, 1), dtype=float)
        k += 1
        pk = phis[k - 1]
        lh = _log_h(spec, z, k, wtol, phis)
        if lh is None:
            continue
        log_term = lh - pk * t
        term = cmath.exp(log_term) if log_term.real > -740.0 else 0.0j
        total += term
        # c_k = term / (phi'(k) phi(k)^{-1-z} e^{-phi(k)t}), all in log form
        trail.append(cmath.exp(lh - math.log(dphis[k - 1]) + (1.0 + z) * math.log(pk)))
        if len(trail) > 8:
            trail.pop(0)
        small = abs(term) <= tol * max(1e-300, abs(total))
        small_run = small_run + 1 if small else 0
        if check_at is None and small_run >= 3 and len(trail) >= 5 and k >= 8:
            checkpoint = (k, np.mean(trail[-5:]))
            check_at = 2 * k
            continue
        if check_at is not None and k >= check_at:
            cbar = np.mean(trail[-5:])
            spread = float(max(abs(c - cbar) for c in trail[-5:]))
            drift = abs(cbar - checkpoint[1])
            x0 = t * float(bf.eval_phi(spec, k + 0.5))
            envtail = t ** complex(z) * _upper_gamma(-z, x0)
            tail = cbar * envtail
            certificate = abs(envtail) * (3.0 * drift + 2.0 * spread) + abs(term) * 1e-3
            value = total + tail
            if certificate <= tol * max(1.0, abs(value)):
                return SeriesResult(value, k + 1, float(certificate), True, warnings)
            checkpoint = (k, cbar)
            check_at = 2 * k
    raise ConvergenceError(
        f"series did not certify tol={tol:g} within k_max={k_max} terms"
        + (" (slow_decay regime; consider the Monte-Carlo oracle)" if "slow_decay" in warnings else "")
    )


def _moment_neg_int_limits(spec, l, t, tol, k_max, warnings):
    """Exact negative-integer order through the termwise limits

        Gamma(z+1)/W_{phi_(k)}(z+1) -> phi'(k) prod_j phi_(k)(l+j)/(l+j),

    keeping the general series arrangement (boundary factors of the two
    products). Algebraically equal to neg_int_moment's closed sum."""
    if bf.phi_at_zero(spec) != 0:
        raise DomainError("killed subordinators only admit Re(z) > -1")
    m = -l - 1
    jj = np.arange(1, m + 1, dtype=float)
    d0 = float(bf.deriv(spec, 0.0, 1))
    total = d0
    if m:
        total *= float(np.prod(np.asarray(bf.eval_phi(spec, jj + l)) / (jj + l)))
    phis = np.empty(0)
    k = 0
    next_check = 64
    while k < k_max:
        if k >= phis.size:
            grow = min(max(256, 2 * phis.size), k_max)
            phis = np.asarray(bf.eval_phi(spec, np.arange(1, grow + 1, dtype=float)), dtype=float)
        k += 1
        pk = phis[k - 1]
        lo = np.arange(l + 1, min(1, k + l + 1), dtype=float)
        num = pk - np.asarray(bf.eval_phi(spec, lo), dtype=float) if lo.size else np.empty(0)
        hi = np.arange(max(k + l + 1, 1), k, dtype=float)
        den = pk - np.asarray(bf.eval_phi(spec, hi), dtype=float) if hi.size else np.empty(0)
        ratio = float(np.prod(num)) / (float(np.prod(den)) if den.size else 1.0)
        limit_w = float(bf.deriv(spec, float(k), 1))
        if m:
            shifted = np.asarray(bf.eval_phi(spec, jj + l + k), dtype=float) - pk
            limit_w *= float(np.prod(shifted / (jj + l)))
        total += ratio / pk * limit_w * math.exp(-pk * t)
        if k >= next_check or k == k_max:
            tail, cert = _neg_sum_tail(spec, l, t, k)
            value = total + tail
            if cert <= tol * max(1.0, abs(value)):
                return SeriesResult(complex(value), k + 1, float(cert), True, warnings)
            next_check *= 2
    raise ConvergenceError(
        f"negative-integer series did not certify tol={tol:g} within {k_max} terms"
    )


# -- negative integer moments (closed sums) -----------------------------------

def _neg_poly_coeffs(spec: BernsteinSpec, l: int) -> np.ndarray:
    """Coefficients of P(u) = prod_{j=1}^{-l-1} (u - phi(j+l)) / (-l-1)!."""
    m = -l - 1
    if m == 0:
        return np.asarray([1.0])
    roots = np.asarray(bf.eval_phi(spec, np.arange(1, m + 1, dtype=float) + l), dtype=float)
    return np.poly(roots) / math.factorial(m)  # highest degree first


def _exp_poly_tail(coeffs: np.ndarray, c: float, t: float) -> float:
    """int_c^inf P(u) e^{-u t} du for P in np.poly coefficient order."""
    deg = coeffs.size - 1
    total = 0.0
    ect = math.exp(-c * t)
    for i, a in enumerate(coeffs):
        p = deg - i
        s = sum((c * t) ** r / math.factorial(r) for r in range(p + 1))
        total += a * math.factorial(p) / t ** (p + 1) * ect * s
    return total


def _neg_sum_f(spec, coeffs, ks, t):
    pk = np.asarray(bf.eval_phi(spec, ks), dtype=float)
    dk = np.asarray(bf.deriv(spec, ks, 1), dtype=float)
    return np.polyval(coeffs, pk) * dk * np.exp(-pk * t)


def _neg_sum_tail(spec: BernsteinSpec, l: int, t: float, k_last: int):
    """Euler-Maclaurin completion of sum_{k>k_last} P(phi(k)) phi'(k) e^{-phi(k)t}
    with an error gauge from the scale of the dropped correction."""
    coeffs = _neg_poly_coeffs(spec, l)
    x = float(k_last + 1)
    px = float(bf.eval_phi(spec, x))
    dpx = float(bf.deriv(spec, x, 1))
    d2x = float(bf.deriv(spec, x, 2))
    Ppx = float(np.polyval(coeffs, px))
    fx = Ppx * dpx * math.exp(-px * t)
    dP = np.polyder(coeffs) if coeffs.size > 1 else np.asarray([0.0])
    fpx = (
        float(np.polyval(dP, px)) * dpx * dpx + Ppx * d2x - t * Ppx * dpx * dpx
    ) * math.exp(-px * t)
    tail = _exp_poly_tail(coeffs, px, t) + 0.5 * fx - fpx / 12.0
    cert = 0.2 * abs(fpx) / 12.0 + 1e-16 * abs(tail)
    return tail, cert


def neg_int_moment(
    spec: BernsteinSpec,
    l: int,
    t: float,
    tol: float = 1e-10,
    k_max: int = K_MAX_DEFAULT,
    force: bool = False,
) -> SeriesResult:
    """E[I^l(t)] for integer l with -1 + a_phi < l < 0: the W-free sum

        sum_{k>=0} prod_{j=1}^{-l-1}(phi(k)-phi(j+l)) / (-l-1)! * phi'(k) e^{-phi(k)t}

    (needs phi(0) = 0 and a_phi < 0), with closed-form tail completion. The
    k = 0 term carries phi'(0), finite because a_phi < 0."""
    if int(l) != l or not l < 0:
        raise DomainError("l must be a negative integer")
    l = int(l)
    if not t > 0:
        raise DomainError("t must be positive")
    if bf.phi_at_zero(spec) != 0:
        raise DomainError("negative integer moments need phi(0) = 0")
    a = bf.analytic_bound(spec)
    if not a < 0:
        raise DomainError("negative integer moments need a_phi < 0")
    if not l > -1 + a:
        raise DomainError(f"l = {l} is outside (-1 + a_phi, 0) = ({-1 + a:g}, 0)")
    warnings: list[str] = []
    if not _hypotheses_pass(spec):
        if not force:
            raise DomainError("check_hypotheses flags fail; pass force=True to override")
        warnings.append("hypotheses_unverified")
    if float(bf.eval_phi(spec, float(k_max))) * t < _SLOW_DECAY_EXPONENT:
        warnings.append("slow_decay")

    coeffs = _neg_poly_coeffs(spec, l)
    total_prev = None
    k_hi = 0
    s = 0.0
    for level in range(7, 40):
        k_new = min(2 ** level, k_max)
        ks = np.arange(k_hi, k_new, dtype=float)
        if ks.size:
            s += float(_neg_sum_f(spec, coeffs, ks, t).sum())
        k_hi = k_new
        tail, cert_ext = _neg_sum_tail(spec, l, t, k_hi - 1)
        total = s + tail
        if total_prev is not None:
            cert = max(abs(total - total_prev), cert_ext)
            if cert <= tol * max(1.0, abs(total)):
                return SeriesResult(complex(total), k_hi, float(cert), True, warnings)
        total_prev = total
        if k_hi >= k_max:
            break
    raise ConvergenceError(f"negative-moment sum did not certify tol={tol:g} within {k_max} terms")


def minus_two_moment_via_ode(spec: BernsteinSpec, t: float, dt: float = 1e-3) -> float:
    """Cross-check for E[I^{-2}(t)]: -d/dt E[I^{-1}(t)] - phi(-1) E[I^{-1}(t)]
    by central difference; needs a_phi < -1 so phi(-1) exists."""
    if not bf.analytic_bound(spec) < -1:
        raise DomainError("the -2nd moment identity needs a_phi < -1")
    if not (t > dt > 0):
        raise DomainError("need t > dt > 0")
    em = lambda s: neg_int_moment(spec, -1, s, tol=1e-11).real_value
    ddt = (em(t + dt) - em(t - dt)) / (2.0 * dt)
    return -ddt - float(bf.eval_phi(spec, -1.0)) * em(t)


def zeta(s: float) -> float:
    """Riemann zeta through the Gamma-subordinator identity
    zeta(s) = E[I^{-1}(s-1)] for phi(x) = ln(1+x); s > 1 (simple pole at 1)."""
    if not s > 1.0:
        raise RangeError("zeta(s) via the moment identity needs s > 1")
    return neg_int_moment(BernsteinSpec.log1p(), -1, s - 1.0, tol=1e-12).real_value


# -- tail certificate ---------------------------------------------------------

def _yk_inverse_term(spec: BernsteinSpec, k: float) -> float:
    """1 / (x^2 phi'(x)) at the root x of phi(x) + x phi'(x) = phi(k),
    bracketed on [phi^{-1}(phi(k)/2), k/2]."""
    pk = float(bf.eval_phi(spec, k))
    lo = bf.inverse(spec, pk / 2.0)
    hi = k / 2.0
    if hi <= lo * (1.0 + 1e-12):
        x = hi
    else:
        fn = lambda x: float(bf.eval_phi(spec, x)) + x * float(bf.deriv(spec, x, 1)) - pk
        flo, fhi = fn(lo), fn(hi)
        if flo > 0 or fhi < 0:
            raise RootError("y_k bracketing failed")
        x = scipy.optimize.brentq(fn, lo, hi, xtol=1e-10 * max(1.0, hi))
    return 1.0 / (x * x * float(bf.deriv(spec, x, 1)))


def tail_bound(
    spec: BernsteinSpec,
    z: complex,
    l: int,
    t: float,
    constants: TailConstants = TailConstants(),
    rel_cutoff: float = 1e-3,
    max_terms: int = 2000,
) -> float:
    """Heuristic certificate for |sum_{k>l} H(z,k) e^{-phi(k)t}|:

        K * sum_{k>l} phi'(k) / phi(k)^{1+a}
            * exp(C (|a|+a^2/2) phi(k) (8 c ln k/(k^2 phi'(k)) + 1/(x_k^2 phi'(x_k))))
            * e^{-phi(k) t},

    with x_k solving phi(x) + x phi'(x) = phi(k). The sum truncates when
    increments fall below rel_cutoff of the accumulated value; bracketing
    failure falls back to the cruder product bound with epsilon = 1/2.
    Constants are calibrated, not proved (see TailConstants).
    """
    if l < 1 or not t > 0:
        raise DomainError("need l >= 1 and t > 0")
    a = complex(z).real
    ua = abs(a) + a * a / 2.0
    acc = 0.0
    k = l
    for _ in range(max_terms):
        k += 1
        kk = float(k)
        pk = float(bf.eval_phi(spec, kk))
        dk = float(bf.deriv(spec, kk, 1))
        try:
            inv_term = _yk_inverse_term(spec, kk)
            expo = constants.C * ua * pk * (
                8.0 * constants.c * math.log(kk) / (kk * kk * dk) + inv_term
            )
            env = dk * pk ** (-1.0 - a) * math.exp(min(expo, _LOGMOD_CAP))
        except RootError:
            if a >= 0:
                env = dk ** (1.0 - a / 2.0) * pk ** (-1.0 - a / 2.0)
            else:
                env = dk ** (1.0 + a / 2.0) * pk ** (-1.0 - 1.5 * a)
        inc = env * math.exp(-pk * t)
        acc += inc
        if acc > 0 and inc < rel_cutoff * acc:
            break
    return constants.K * acc

"""Independent simulation oracle for exponential functionals of Levy paths.

Paths are sampled either event-driven (exact piecewise-linear paths for
finite-activity jump parts, with sub-cutoff jumps of custom subordinators
compensated by their mean drift) or on a fixed grid (Gamma increments of
shape h; Gaussian increments with the path taken piecewise linear between
grid points). The functional I(t) = int_0^t e^{-xi_s} ds is integrated
exactly on every linear segment. Killing truncates the integral at an
independent Exp(q) time.

Reproducibility: a counter-based generator (Philox) keyed by the 64-bit
seed; path chunks of fixed size own disjoint counter blocks and partial
sums reduce in fixed chunk order, so results are bit-identical for a given
(spec, control, seed) regardless of worker count.
"""

from __future__ import annotations

import math
import warnings as _warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.special as sp

from . import bernstein as bf
from .bernstein import BernsteinSpec
from .errors import DomainError

__all__ = [
    "JumpLaw",
    "LevySpec",
    "SimControl",
    "Path",
    "MCEstimate",
    "sample_path",
    "exp_functional",
    "mc_moment",
    "mc_moment_grid",
    "mc_moment_curve",
]

_CHUNK = 16384
_TBLOCK = 512

KINDS = ("drift", "gamma", "compound_poisson", "truncated_custom", "brownian", "symmetric_cp")


@dataclass(frozen=True)
class JumpLaw:
    """Jump-size law. Subordinator kinds draw from the positive variant,
    symmetric kinds from the symmetric variant of the same name."""

    name: str = "exponential"  # exponential | normal | uniform | constant
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in ("exponential", "normal", "uniform", "constant"):
            raise ValueError(f"unknown jump law {self.name!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def sample_positive(self, rng, size):
        if self.name == "exponential":
            return rng.standard_exponential(size) * self.scale
        if self.name == "uniform":
            return rng.random(size) * self.scale
        if self.name == "constant":
            return np.full(size, self.scale)
        raise ValueError("normal jumps are not a subordinator law")

    def sample_symmetric(self, rng, size):
        if self.name == "normal":
            return rng.standard_normal(size) * self.scale
        if self.name == "uniform":
            return (2.0 * rng.random(size) - 1.0) * self.scale
        if self.name == "constant":
            return np.where(rng.random(size) < 0.5, -self.scale, self.scale)
        raise ValueError("exponential jumps are not symmetric")


@dataclass(frozen=True)
class LevySpec:
    """A simulable Levy process: subordinator kinds drift/gamma/
    compound_poisson/truncated_custom, symmetric kinds brownian/symmetric_cp.

    gamma corresponds exactly to phi(u) = ln(1+u) (increments Gamma(h, 1));
    truncated_custom simulates the subordinator of a BernsteinSpec with
    jumps below eps replaced by their mean drift.
    """

    kind: str
    d: float = 1.0
    sigma2: float = 1.0
    lam: float = 1.0
    jump: JumpLaw = JumpLaw()
    bernstein: Optional[BernsteinSpec] = None
    eps: float = 1e-4
    killing_q: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "truncated_custom":
            if self.bernstein is None:
                raise ValueError("truncated_custom needs a BernsteinSpec")
            if not self.eps > 0:
                raise ValueError("truncated_custom needs eps > 0")
        if self.killing_q < 0:
            raise ValueError("killing_q must be >= 0")

    @property
    def is_subordinator(self) -> bool:
        return self.kind in ("drift", "gamma", "compound_poisson", "truncated_custom")


@dataclass(frozen=True)
class SimControl:
    """Simulation controls: grid step (grid schemes), 64-bit seed, scheme
    selector (auto picks the spec's default), antithetic pairing for
    Brownian increments, and worker count for chunk-parallel sampling."""

    step_h: float = 2.0 ** -12
    seed: int = 0
    scheme: str = "auto"  # auto | grid | events
    eps: Optional[float] = None
    antithetic: bool = False
    workers: int = 1


@dataclass(frozen=True)
class Path:
    """Piecewise-linear cadlag path: level and slope per segment between
    breakpoints; non-decreasing levels for subordinators."""

    breakpoints: np.ndarray
    levels: np.ndarray
    slopes: np.ndarray
    killed_at: Optional[float] = None


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo mean with its standard error (sample std / sqrt(n))."""

    mean: complex
    stderr: float
    n_paths: int
    scheme: str


def _rng_for_chunk(seed: int, chunk_index: int):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=chunk_index << 128))


def _resolve_scheme(spec: LevySpec, ctrl: SimControl) -> str:
    if ctrl.scheme != "auto":
        if ctrl.scheme == "grid" and spec.kind not in ("gamma", "brownian"):
            raise DomainError(f"grid scheme does not apply to kind {spec.kind!r}")
        if ctrl.scheme == "events" and spec.kind == "brownian":
            raise DomainError("brownian has no event-driven scheme")
        return ctrl.scheme
    return "grid" if spec.kind in ("gamma", "brownian") else "events"


def _scheme_label(spec: LevySpec, ctrl: SimControl) -> str:
    s = _resolve_scheme(spec, ctrl)
    if s == "grid":
        lab = f"grid(h={ctrl.step_h:g},{'linear' if spec.kind == 'brownian' else 'jump'})"
        if ctrl.antithetic and spec.kind == "brownian":
            lab += "+antithetic"
        return lab
    eps = ctrl.eps if ctrl.eps is not None else spec.eps
    if spec.kind in ("gamma", "truncated_custom"):
        return f"events(eps={eps:g})"
    return "events(exact)"


# -- jump-size samplers for infinite-activity subordinators -------------------

def _gamma_jump_tables(eps: float, ymax: float = 80.0, n: int = 4096):
    lam = float(sp.exp1(eps))
    y = np.exp(np.linspace(math.log(eps), math.log(ymax), n))
    cdf = (lam - sp.exp1(y)) / lam
    cdf[0], cdf[-1] = 0.0, 1.0
    drift = -float(np.expm1(-eps))  # int_0^eps y * y^{-1} e^{-y} dy
    return lam, cdf, y, drift


def _custom_jump_tables(bspec: BernsteinSpec, eps: float, n: int = 4096):
    dens = bf.levy_density(bspec, 1.0)
    if dens is None:
        raise DomainError("no Levy density available for this Bernstein spec")
    # pick an upper cutoff with negligible tail mass
    ymax, tail = 1.0, math.inf
    while ymax < 1e6:
        tail, _ = scipy.integrate.quad(lambda y: bf.levy_density(bspec, y), ymax, np.inf, limit=200)
        if tail < 1e-12:
            break
        ymax *= 2.0
    else:
        _warnings.warn(f"jump tail mass above {ymax:g} still {tail:.2e}; samples truncated there")
    y = np.exp(np.linspace(math.log(eps), math.log(ymax), n))
    m = bf.levy_density(bspec, y)
    mass = np.concatenate([[0.0], np.cumsum(0.5 * (m[1:] + m[:-1]) * np.diff(y))])
    lam = float(mass[-1])
    if lam <= 0:
        raise DomainError("truncated density carries no jump mass above eps")
    cdf = mass / lam
    # trim any flat plateau so np.interp sees an increasing cdf
    top = int(np.searchsorted(cdf, cdf[-1] * (1.0 - 1e-15)))
    cdf, y = cdf[: top + 1], y[: top + 1]
    cdf[-1] = 1.0
    drift_small, _ = scipy.integrate.quad(
        lambda u: u * bf.levy_density(bspec, u), 0.0, eps, limit=200
    )
    return lam, cdf, y, float(drift_small + bspec.d)


# -- vectorized ensemble sampling ---------------------------------------------

def _segment_integrals(v0, seg_len, slope):
    """Exact int_0^L e^{-(v0 + slope s)} ds per segment, vectorized."""
    d = slope * seg_len
    small = np.abs(d) < 1e-12
    safe = np.where(small, 1.0, d)
    w = np.where(small, 1.0 - d / 2.0, -np.expm1(-safe) / safe)
    return np.exp(-v0) * w * seg_len


def _apply_killing(rng, spec, m, ts):
    """Killing times, or None when conservative."""
    if spec.killing_q > 0:
        return rng.standard_exponential(m) / spec.killing_q
    return None


def _events_ensemble(spec: LevySpec, ts: np.ndarray, m: int, rng, ctrl: SimControl):
    """I(t) samples at each horizon in ts for event-driven kinds; exact
    piecewise-linear paths."""
    tmax = float(ts.max())
    if spec.kind == "drift":
        lam, drift = 0.0, spec.d
        sizes = None
        n_j = np.zeros(m, dtype=int)
        tj = np.empty((m, 0))
    else:
        if spec.kind == "gamma":
            eps = ctrl.eps if ctrl.eps is not None else spec.eps
            lam, cdf, ygrid, drift = _gamma_jump_tables(eps)
        elif spec.kind == "truncated_custom":
            eps = ctrl.eps if ctrl.eps is not None else spec.eps
            lam, cdf, ygrid, drift = _custom_jump_tables(spec.bernstein, eps)
        else:
            lam, drift = spec.lam, 0.0
            cdf = ygrid = None
        n_j = rng.poisson(lam * tmax, size=m)
        nmax = int(n_j.max()) if m else 0
        tj = rng.random((m, nmax)) * tmax
        tj[np.arange(nmax)[None, :] >= n_j[:, None]] = np.inf
        tj.sort(axis=1)
        if cdf is not None:
            u = rng.random((m, nmax))
            sizes = np.interp(u, cdf, ygrid)
        elif spec.kind == "compound_poisson":
            sizes = spec.jump.sample_positive(rng, (m, nmax))
        else:
            sizes = spec.jump.sample_symmetric(rng, (m, nmax))
    kill = _apply_killing(rng, spec, m, ts)
    nmax = tj.shape[1]
    csz = np.cumsum(np.where(np.isfinite(tj), sizes, 0.0), axis=1) if nmax else np.zeros((m, 0))
    out = {}
    for t in ts:
        horiz = np.minimum(float(t), kill) if kill is not None else np.full(m, float(t))
        tcl = np.minimum(tj, horiz[:, None]) if nmax else np.empty((m, 0))
        left = np.concatenate([np.zeros((m, 1)), tcl], axis=1)
        right = np.concatenate([tcl, horiz[:, None]], axis=1)
        right = np.maximum(right, left)
        lev = np.concatenate([np.zeros((m, 1)), csz], axis=1)
        v0 = lev + drift * left
        out[float(t)] = _segment_integrals(v0, right - left, drift).sum(axis=1)
    return out


def _grid_ensemble(spec: LevySpec, ts: np.ndarray, m: int, rng, ctrl: SimControl):
    """I(t) samples at each horizon for the fixed-grid kinds."""
    h = ctrl.step_h
    tmax = float(ts.max())
    steps = int(round(tmax / h))
    if abs(steps * h - tmax) > 1e-9 * max(1.0, tmax):
        steps = int(math.ceil(tmax / h))
    marks = {float(t): int(round(float(t) / h)) for t in ts}
    kill = _apply_killing(rng, spec, m, ts)
    acc = np.zeros(m)
    vals = {}
    v = np.zeros(m)
    elapsed = 0
    mark_steps = sorted(set(marks.values()))
    antithetic = ctrl.antithetic and spec.kind == "brownian"
    while elapsed < steps:
        nb = min(_TBLOCK, steps - elapsed)
        # land block boundaries exactly on the requested horizons
        for sk in mark_steps:
            if elapsed < sk < elapsed + nb:
                nb = sk - elapsed
                break
        if spec.kind == "gamma":
            dz = rng.gamma(h, 1.0, size=(m, nb))
        else:
            if antithetic:
                half = rng.standard_normal((m // 2, nb))
                dz = np.concatenate([half, -half], axis=0)
                if dz.shape[0] < m:
                    dz = np.concatenate([dz, rng.standard_normal((m - dz.shape[0], nb))], axis=0)
            else:
                dz = rng.standard_normal((m, nb))
            dz *= math.sqrt(spec.sigma2 * h)
        lev = np.cumsum(dz, axis=1) + v[:, None]
        if spec.kind == "gamma":
            # jumps sit at the cell's left grid point (cadlag levels)
            contrib = np.exp(-lev) * h
        else:
            lev0 = np.concatenate([v[:, None], lev[:, :-1]], axis=1)
            contrib = _segment_integrals(lev0, np.full_like(dz, h), dz / h)
        if kill is not None:
            tgrid = (elapsed + np.arange(1, nb + 1)) * h
            alive = tgrid[None, :] <= kill[:, None]
            partial = alive * contrib
            # the cell containing the killing time contributes its fraction
            frac_idx = (kill[:, None] > tgrid - h) & (kill[:, None] <= tgrid)
            if frac_idx.any():
                fr = np.clip((kill[:, None] - (tgrid - h)) / h, 0.0, 1.0)
                partial = partial + np.where(frac_idx, contrib * fr, 0.0)
            acc += partial.sum(axis=1)
        else:
            acc += contrib.sum(axis=1)
        v = lev[:, -1]
        elapsed += nb
        for t, sk in marks.items():
            if elapsed >= sk and t not in vals:
                vals[t] = acc.copy()
    return vals


def _ensemble(spec, ts, m, rng, ctrl):
    scheme = _resolve_scheme(spec, ctrl)
    if scheme == "grid":
        return _grid_ensemble(spec, ts, m, rng, ctrl)
    return _events_ensemble(spec, np.asarray(ts, dtype=float), m, rng, ctrl)


def _chunk_sums(args):
    spec, ts, zs, m, seed, chunk_index, ctrl = args
    rng = _rng_for_chunk(seed, chunk_index)
    samples = _ensemble(spec, np.asarray(ts, dtype=float), m, rng, ctrl)
    out = {}
    for t in samples:
        I = samples[t]
        logI = np.log(I)
        for z in zs:
            z = complex(z)
            x = I ** z.real if z.imag == 0.0 else np.exp(z * logI)
            out[(z, t)] = (complex(x.sum()), float((np.abs(x) ** 2).sum()))
    return out


def mc_moment_grid(
    spec: LevySpec,
    zs: Sequence[complex],
    ts: Sequence[float],
    n_paths: int,
    ctrl: SimControl = SimControl(),
) -> dict:
    """Estimates of E[I^z(t)] for every (z, t) pair, sharing one path
    ensemble (I(t) is a pathwise prefix of I(t_max))."""
    if n_paths < 2:
        raise DomainError("need n_paths >= 2 for a standard error")
    ts = sorted({float(t) for t in ts})
    if any(t <= 0 for t in ts):
        raise DomainError("horizons must be positive")
    zs = [complex(z) for z in zs]
    if any(z.real < 0 for z in zs) and min(ts) < 0.25:
        _warnings.warn(
            "negative-order moments at small t carry heavy relative variance; "
            "the standard error may understate the uncertainty",
            stacklevel=2,
        )
    chunks = []
    done = 0
    ci = 0
    while done < n_paths:
        m = min(_CHUNK, n_paths - done)
        chunks.append((spec, tuple(ts), tuple(zs), m, ctrl.seed, ci, ctrl))
        done += m
        ci += 1
    if ctrl.workers > 1:
        with ProcessPoolExecutor(max_workers=ctrl.workers) as ex:
            partials = list(ex.map(_chunk_sums, chunks))
    else:
        partials = [_chunk_sums(c) for c in chunks]
    label = _scheme_label(spec, ctrl)
    out = {}
    for z in zs:
        for t in ts:
            s1 = 0.0 + 0.0j
            s2 = 0.0
            for p in partials:  # fixed chunk order: bit-stable reduction
                a, b = p[(z, t)]
                s1 += a
                s2 += b
            mean = s1 / n_paths
            var = max(s2 / n_paths - abs(mean) ** 2, 0.0)
            stderr = math.sqrt(var / n_paths)
            out[(z, t)] = MCEstimate(mean, stderr, n_paths, label)
    return out


def mc_moment(
    spec: LevySpec,
    z: complex,
    t: float,
    n_paths: int,
    ctrl: SimControl = SimControl(),
) -> MCEstimate:
    """Estimate E[I^z(t)] from n_paths independent paths (complex powers on
    the principal branch; I > 0 always)."""
    return mc_moment_grid(spec, [z], [t], n_paths, ctrl)[(complex(z), float(t))]


def mc_moment_curve(
    spec: LevySpec,
    z: complex,
    t_grid: Sequence[float],
    n_paths: int,
    ctrl: SimControl = SimControl(),
):
    """Moment curve on a horizon grid with shared paths: (means, stderrs)."""
    res = mc_moment_grid(spec, [z], t_grid, n_paths, ctrl)
    means = np.asarray([res[(complex(z), float(t))].mean for t in t_grid])
    errs = np.asarray([res[(complex(z), float(t))].stderr for t in t_grid])
    return means, errs


# -- single-path view ----------------------------------------------------------

def sample_path(spec: LevySpec, t: float, ctrl: SimControl = SimControl()) -> Path:
    """One path on [0, t] as an explicit breakpoint/level/slope record
    (path index 0 of the chunked stream)."""
    if not t > 0:
        raise DomainError("t must be positive")
    rng = _rng_for_chunk(ctrl.seed, 0)
    scheme = _resolve_scheme(spec, ctrl)
    killed_at = None
    if spec.killing_q > 0:
        killed_at = float(rng.standard_exponential() / spec.killing_q)
    if scheme == "grid":
        h = ctrl.step_h
        steps = int(math.ceil(t / h))
        if spec.kind == "gamma":
            inc = rng.gamma(h, 1.0, size=steps)
            bps = np.arange(steps + 1) * h
            cum = np.cumsum(inc)
            # cadlag: the jump lands at the cell's left endpoint
            levels = np.concatenate([cum, [cum[-1]]])
            slopes = np.zeros(steps + 1)
        else:
            inc = rng.standard_normal(steps) * math.sqrt(spec.sigma2 * h)
            bps = np.arange(steps + 1) * h
            levels = np.concatenate([[0.0], np.cumsum(inc)])
            slopes = np.concatenate([inc / h, [0.0]])
        return Path(bps, levels, slopes, killed_at)
    samples = _events_path_single(spec, t, rng, ctrl)
    return Path(*samples, killed_at)


def _events_path_single(spec, t, rng, ctrl):
    if spec.kind == "drift":
        return np.asarray([0.0, t]), np.asarray([0.0, spec.d * t]), np.asarray([spec.d, 0.0])
    if spec.kind == "gamma":
        eps = ctrl.eps if ctrl.eps is not None else spec.eps
        lam, cdf, ygrid, drift = _gamma_jump_tables(eps)
        sizes_of = lambda n: np.interp(rng.random(n), cdf, ygrid)
    elif spec.kind == "truncated_custom":
        eps = ctrl.eps if ctrl.eps is not None else spec.eps
        lam, cdf, ygrid, drift = _custom_jump_tables(spec.bernstein, eps)
        sizes_of = lambda n: np.interp(rng.random(n), cdf, ygrid)
    elif spec.kind == "compound_poisson":
        lam, drift = spec.lam, 0.0
        sizes_of = lambda n: spec.jump.sample_positive(rng, n)
    else:
        lam, drift = spec.lam, 0.0
        sizes_of = lambda n: spec.jump.sample_symmetric(rng, n)
    n = rng.poisson(lam * t)
    times = np.sort(rng.random(n) * t)
    sizes = sizes_of(n)
    bps = np.concatenate([[0.0], times, [t]])
    jumps = np.concatenate([[0.0], np.cumsum(sizes)]) if n else np.asarray([0.0])
    levels = jumps[: n + 1] + drift * bps[:-1]
    levels = np.concatenate([levels, [levels[-1] + drift * (bps[-1] - bps[-2])]])
    slopes = np.concatenate([np.full(n + 1, drift), [0.0]])
    return bps, levels, slopes


def exp_functional(path: Path, t: float) -> float:
    """Exact I(t) = int_0^t e^{-xi_s} ds for a piecewise-linear path record:
    a segment of level v, slope m and length L contributes L e^{-v} when
    m = 0 and (e^{-v} - e^{-v-mL})/m otherwise; integration stops at the
    killing time."""
    if not t > 0:
        raise DomainError("t must be positive")
    if path.breakpoints[-1] < t - 1e-12:
        raise DomainError("path does not span the requested horizon")
    horizon = min(t, path.killed_at) if path.killed_at is not None else t
    total = 0.0
    for i in range(len(path.breakpoints) - 1):
        s1 = float(path.breakpoints[i])
        s2 = min(float(path.breakpoints[i + 1]), horizon)
        if s2 <= s1:
            break
        L = s2 - s1
        v = float(path.levels[i])
        mslope = float(path.slopes[i])
        if mslope == 0.0:
            total += L * math.exp(-v)
        else:
            total += (math.exp(-v) - math.exp(-v - mslope * L)) / mslope
        if s2 >= horizon:
            break
    return total

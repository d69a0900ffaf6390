"""Service layer: pydantic request/response models plus handlers that bind
every computation behind a serializable surface.

The FastAPI app (api module) and the CLI (cli module) are both thin clients
of these handlers; the CLI calls them in process by default and over HTTP
when pointed at a running server. All responses carry schema_version = 1.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from . import bernstein as bf
from . import bgamma
from . import convolution as conv
from . import montecarlo as mc
from . import series_moments as sm
from . import symmetric_identities as sym
from .errors import (
    ConvergenceError,
    DomainError,
    GridError,
    LevyMomentsError,
    OverflowGuardError,
    PoleError,
    QuadratureError,
    RangeError,
    RootError,
    SingularityError,
)

SCHEMA_VERSION = 1


class ServiceError(Exception):
    """Normalized failure: code in {domain, convergence, io}."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    @property
    def exit_code(self) -> int:
        return {"domain": 2, "convergence": 3, "io": 4}.get(self.code, 1)


_DOMAIN_ERRORS = (DomainError, RangeError, PoleError, SingularityError, GridError, ValueError)
_CONVERGENCE_ERRORS = (ConvergenceError, QuadratureError, RootError, OverflowGuardError)


def _wrap(fn):
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ServiceError:
            raise
        except _DOMAIN_ERRORS as exc:
            raise ServiceError("domain", str(exc)) from exc
        except _CONVERGENCE_ERRORS as exc:
            raise ServiceError("convergence", str(exc)) from exc
        except OSError as exc:
            raise ServiceError("io", str(exc)) from exc
        except LevyMomentsError as exc:
            raise ServiceError("domain", str(exc)) from exc

    return inner


# -- shared wire models --------------------------------------------------------

class PhiModel(BaseModel):
    """Wire form of a BernsteinSpec (custom densities must be tabulated)."""

    family: Literal["log1p", "power", "shifted_power", "loglog", "truncated_gamma", "linear", "custom"]
    alpha: Optional[float] = None
    d: float = 0.0
    q: float = 0.0
    custom_density: Optional[list[tuple[float, float]]] = None
    interpolation: Literal["loglog-linear"] = "loglog-linear"
    analytic_bound: float = 0.0

    @model_validator(mode="after")
    def _families(self):
        if self.family in ("power", "shifted_power") and self.alpha is None:
            raise ValueError("power families need alpha")
        if self.family == "custom" and not self.custom_density:
            raise ValueError("custom family needs custom_density pairs")
        return self

    def to_spec(self) -> bf.BernsteinSpec:
        if self.family == "custom":
            return bf.BernsteinSpec.from_custom(
                table=self.custom_density, d=self.d, q=self.q, analytic_bound=self.analytic_bound
            )
        if self.family == "linear":
            return bf.BernsteinSpec.linear(d=self.d if self.d else 1.0, q=self.q)
        return bf.BernsteinSpec(self.family, alpha=self.alpha, q=self.q)

    @classmethod
    def from_shorthand(cls, text: str) -> "PhiModel":
        """Parse 'log1p', 'linear:2', 'power:0.5', 'log1p:q=0.3' or raw JSON."""
        text = text.strip()
        if text.startswith("{"):
            return cls.model_validate_json(text)
        name, _, rest = text.partition(":")
        kwargs: dict = {}
        if name in ("power", "shifted_power"):
            if not rest:
                raise ValueError(f"{name} needs an alpha, e.g. {name}:0.5")
            head, _, tail = rest.partition(":")
            kwargs["alpha"] = float(head.split("=")[-1])
            rest = tail
        elif name == "linear":
            if rest and "=" not in rest.split(":")[0]:
                head, _, tail = rest.partition(":")
                kwargs["d"] = float(head)
                rest = tail
        for piece in filter(None, rest.split(":")):
            key, _, val = piece.partition("=")
            if key not in ("q", "d", "alpha"):
                raise ValueError(f"unknown phi parameter {key!r}")
            kwargs[key] = float(val)
        return cls(family=name, **kwargs)


class ComplexModel(BaseModel):
    re: float
    im: float = 0.0

    def value(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def parse(cls, text: str) -> "ComplexModel":
        parts = [p.strip() for p in str(text).split(",")]
        return cls(re=float(parts[0]), im=float(parts[1]) if len(parts) > 1 else 0.0)


class CurveModel(BaseModel):
    """Wire form of a TabulatedFunction."""

    t: list[float]
    re: list[float]
    im: Optional[list[float]] = None
    singularity_exponent: float = 0.0

    def to_tabulated(self) -> conv.TabulatedFunction:
        vals = np.asarray(self.re, dtype=float)
        if self.im and any(self.im):
            vals = vals + 1j * np.asarray(self.im)
        return conv.TabulatedFunction.from_samples(self.t, vals, self.singularity_exponent)

    @classmethod
    def from_tabulated(cls, f: conv.TabulatedFunction) -> "CurveModel":
        vals = np.asarray(f.values, dtype=complex)
        return cls(
            t=[float(x) for x in f.t_grid],
            re=[float(v) for v in vals.real],
            im=[float(v) for v in vals.imag],
            singularity_exponent=f.singularity_exponent,
        )


# -- moment ---------------------------------------------------------------------

class MomentRequest(BaseModel):
    phi: PhiModel
    z: ComplexModel
    t: list[float] = Field(min_length=1)
    tol: float = 1e-8
    k_max: int = sm.K_MAX_DEFAULT
    force: bool = False


class MomentRow(BaseModel):
    t: float
    value_re: float
    value_im: float
    terms_used: int
    tail_certificate: float
    converged: bool
    warnings: list[str]


class MomentResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "moment"
    rows: list[MomentRow]


@_wrap
def run_moment(req: MomentRequest) -> MomentResponse:
    spec = req.phi.to_spec()
    z = req.z.value()
    rows = []
    for t in req.t:
        res = sm.moment(spec, z, float(t), tol=req.tol, k_max=req.k_max, force=req.force)
        rows.append(
            MomentRow(
                t=float(t),
                value_re=res.value.real,
                value_im=res.value.imag,
                terms_used=res.terms_used,
                tail_certificate=res.tail_certificate,
                converged=res.converged,
                warnings=res.warnings,
            )
        )
    return MomentResponse(rows=rows)


# -- bgamma ----------------------------------------------------------------------

class BgammaRequest(BaseModel):
    phi: PhiModel
    z: list[ComplexModel] = Field(min_length=1)
    tol: float = 1e-12


class BgammaRow(BaseModel):
    z_re: float
    z_im: float
    w_re: float
    w_im: float
    mellin_re: Optional[float] = None
    mellin_im: Optional[float] = None


class BgammaResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "bgamma"
    gamma_phi: float
    rows: list[BgammaRow]


@_wrap
def run_bgamma(req: BgammaRequest) -> BgammaResponse:
    spec = req.phi.to_spec()
    rows = []
    for zm in req.z:
        z = zm.value()
        w = bgamma.eval_W(spec, z, tol=req.tol)
        try:
            mel = bgamma.mellin_infinity(spec, z - 1.0, tol=req.tol)
            mre, mim = mel.real, mel.imag
        except LevyMomentsError:
            mre = mim = None
        rows.append(BgammaRow(z_re=z.real, z_im=z.imag, w_re=w.real, w_im=w.imag, mellin_re=mre, mellin_im=mim))
    return BgammaResponse(gamma_phi=bgamma.gamma_phi(spec), rows=rows)


# -- zeta ------------------------------------------------------------------------

class ZetaRequest(BaseModel):
    s: float


class ZetaResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "zeta"
    s: float
    value: float


@_wrap
def run_zeta(req: ZetaRequest) -> ZetaResponse:
    return ZetaResponse(s=req.s, value=sm.zeta(req.s))


# -- symmetric -------------------------------------------------------------------

class SymmetricRequest(BaseModel):
    op: Literal["half_neg", "cp_half_neg", "half_pos", "n_minus_half"]
    t: float
    lam: Optional[float] = None
    variant: Literal["paper", "laplace_derived"] = "laplace_derived"
    psi_half: Optional[float] = None
    psi_values: Optional[list[float]] = None
    n_cells: int = 4096

    @model_validator(mode="after")
    def _args(self):
        if self.op == "cp_half_neg" and self.lam is None:
            raise ValueError("cp_half_neg needs lam")
        if self.op == "half_pos" and self.psi_half is None:
            raise ValueError("half_pos needs psi_half = Psi(1/2)")
        if self.op == "n_minus_half" and not self.psi_values:
            raise ValueError("n_minus_half needs psi_values = [Psi(k-1/2)]")
        return self


class SymmetricResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "symmetric"
    op: str
    t: float
    value: float
    variant: Optional[str] = None


@_wrap
def run_symmetric(req: SymmetricRequest) -> SymmetricResponse:
    if req.op == "half_neg":
        val = sym.half_neg_moment(req.t)
        return SymmetricResponse(op=req.op, t=req.t, value=val)
    if req.op == "cp_half_neg":
        val = sym.cp_half_neg_moment(req.lam, req.t, variant=req.variant)
        return SymmetricResponse(op=req.op, t=req.t, value=val, variant=req.variant)
    if req.op == "half_pos":
        val = sym.half_pos_moment(req.psi_half, req.t)
        return SymmetricResponse(op=req.op, t=req.t, value=val)
    val = sym.n_minus_half_moment(req.psi_values, req.t, sym.ConvolutionGrid(req.n_cells))
    return SymmetricResponse(op=req.op, t=req.t, value=val)


# -- verify-conv -----------------------------------------------------------------

class VerifyConvRequest(BaseModel):
    z: ComplexModel
    t: float
    curve_f: CurveModel
    curve_g: CurveModel
    cp_lambda: Optional[float] = None
    n_cells: int = 4096


class VerifyConvResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "verify-conv"
    lhs_re: float
    lhs_im: float
    rhs_re: float
    rhs_im: float
    abs_residual: float
    rel_residual: float


@_wrap
def run_verify_conv(req: VerifyConvRequest) -> VerifyConvResponse:
    rep = conv.verify_identity(
        req.curve_f.to_tabulated(),
        req.curve_g.to_tabulated(),
        req.z.value(),
        req.t,
        cp_lambda=req.cp_lambda,
        n_cells=req.n_cells,
    )
    return VerifyConvResponse(**rep.as_dict())


# -- mc --------------------------------------------------------------------------

class JumpModel(BaseModel):
    name: Literal["exponential", "normal", "uniform", "constant"] = "exponential"
    scale: float = 1.0

    def to_law(self) -> mc.JumpLaw:
        return mc.JumpLaw(self.name, self.scale)


class McRequest(BaseModel):
    kind: Literal["drift", "gamma", "compound_poisson", "truncated_custom", "brownian", "symmetric_cp"]
    z: list[ComplexModel] = Field(min_length=1)
    t: list[float] = Field(min_length=1)
    n_paths: int = 100000
    seed: int = 0
    d: float = 1.0
    sigma2: float = 1.0
    lam: float = 1.0
    jump: JumpModel = JumpModel()
    phi: Optional[PhiModel] = None
    eps: float = 1e-4
    killing_q: float = 0.0
    scheme: Literal["auto", "grid", "events"] = "auto"
    h: float = 2.0 ** -12
    antithetic: bool = False
    workers: int = 1

    def to_spec(self) -> mc.LevySpec:
        return mc.LevySpec(
            kind=self.kind,
            d=self.d,
            sigma2=self.sigma2,
            lam=self.lam,
            jump=self.jump.to_law(),
            bernstein=self.phi.to_spec() if self.phi else None,
            eps=self.eps,
            killing_q=self.killing_q,
        )

    def to_ctrl(self) -> mc.SimControl:
        return mc.SimControl(
            step_h=self.h,
            seed=self.seed,
            scheme=self.scheme,
            antithetic=self.antithetic,
            workers=self.workers,
        )


class McRow(BaseModel):
    z_re: float
    z_im: float
    t: float
    mean_re: float
    mean_im: float
    stderr: float
    n_paths: int
    seed: int
    scheme: str


class McResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str = "mc"
    rows: list[McRow]


@_wrap
def run_mc(req: McRequest) -> McResponse:
    spec = req.to_spec()
    ctrl = req.to_ctrl()
    zs = [zm.value() for zm in req.z]
    ts = [float(t) for t in req.t]
    grid = mc.mc_moment_grid(spec, zs, ts, req.n_paths, ctrl)
    rows = []
    for z in zs:
        for t in ts:
            est = grid[(z, t)]
            rows.append(
                McRow(
                    z_re=z.real,
                    z_im=z.imag,
                    t=t,
                    mean_re=est.mean.real,
                    mean_im=est.mean.imag,
                    stderr=est.stderr,
                    n_paths=est.n_paths,
                    seed=req.seed,
                    scheme=est.scheme,
                )
            )
    return McResponse(rows=rows)

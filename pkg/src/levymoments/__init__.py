"""Moments of exponential functionals of Levy processes on a deterministic
horizon: series expansions for subordinators, Bernstein-Gamma functions,
closed-form symmetric identities, singular convolutions, and an independent
Monte-Carlo path oracle."""

from .bernstein import (
    BernsteinSpec,
    CustomDensity,
    HypothesisReport,
    analytic_bound,
    check_hypotheses,
    deriv,
    eval_phi,
    inverse,
    shift,
)
from .bgamma import complex_gamma, eval_W, gamma_phi, mellin_infinity
from .convolution import IdentityReport, TabulatedFunction, convolve_singular, verify_identity
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
from .montecarlo import JumpLaw, LevySpec, MCEstimate, Path, SimControl, exp_functional, mc_moment, sample_path
from .series_moments import (
    SeriesResult,
    TailConstants,
    h_term,
    moment,
    neg_int_moment,
    minus_two_moment_via_ode,
    tail_bound,
    zeta,
)
from .symmetric_identities import (
    ConvolutionGrid,
    SymmetricLevySpec,
    cp_half_neg_moment,
    half_neg_moment,
    half_pos_moment,
    n_minus_half_moment,
)

__version__ = "0.1.0"

"""tinybo: a small, modular Bayesian-optimisation library.

The pieces follow the usual BO template and can each be swapped:

* initial design (:func:`tinybo.core.latin_or_uniform_init`),
* GP model with kernel and mean (:mod:`tinybo.gp`),
* acquisition function (:mod:`tinybo.acquisition`),
* inner optimizer for the acquisition (:mod:`tinybo.inner_opt`),
* hyperparameter learning (:func:`tinybo.gp.optimize_hyperparams`).

Set ``TINYBO_DISABLE_NUMBA=1`` to run the pure-numpy kernels.
"""

from .acquisition import AcquiConfig, acqui_ei, acqui_ucb, gpucb_beta
from .bo import BoResult, BoState, ask, initial_state, optimize, tell
from .config import InnerConfig, ParamsConfig, apply_overrides, load_config
from .core import (
    Dataset,
    InvalidArgument,
    InvalidState,
    NotFound,
    NumericalFailure,
    ObjectiveError,
    ObjectiveSpec,
    RngStream,
    Sample,
    clamp_to_box,
    latin_or_uniform_init,
)
from .gp import (
    GpModel,
    KernelConfig,
    MeanConfig,
    Posterior,
    gp_fit,
    gp_query,
    kernel_eval,
    kernel_matrix,
    lml_gradient,
    log_marginal_likelihood,
    optimize_hyperparams,
)
from .inner_opt import Chain, LocalSearch, OptResult, ParallelRestarts, RandomSearch, inner_maximize

__version__ = "0.1.0"

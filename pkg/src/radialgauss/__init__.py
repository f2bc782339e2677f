"""Radial Gaussianization toolkit.

Losses that push the norms of sample sets toward the chi law, the
whitening / radial-quantile maps, sample-space optimization, distance
metrics and a batch command line (``radialgauss``).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .distributions import (  # noqa: E402
    DISTRIBUTIONS,
    MixtureSpec,
    sample_by_name,
    sample_gaussian,
    sample_mixture,
    sample_student_t_isotropic,
    sample_sunshine,
    sample_uniform_sphere,
    sample_x_distribution,
)
from .errors import (  # noqa: E402
    ConfigError,
    DegenerateInputError,
    DivergenceError,
    DomainError,
    NearOriginError,
    ParseError,
    RankError,
    SizeError,
)
from .losses import (  # noqa: E402
    LossConfig,
    LossReport,
    covariance_loss,
    e2mc_metric,
    invariance_loss,
    kl_to_chi,
    m_spacing_entropy,
    radial_ce_loss,
    radial_gaussianization_loss,
    total_loss,
    variance_loss,
    w1_radial_loss,
)
from .maps import PushforwardMap, apply_map, containment_demo, fit_map, load_map, save_map  # noqa: E402
from .metrics import (  # noqa: E402
    MetricReport,
    ks_radii_chi,
    ks_uniform_angles,
    metric_report,
    w1_1d,
    w1_2d_exact,
    w1_2d_sliced,
    w1_radii_to_chi,
    w1_to_gaussian,
)
from .optimizer import ScheduleConfig, TrajectoryRecord, lr_at, optimize_samples  # noqa: E402
from .rng import make_rng  # noqa: E402
from .special import (  # noqa: E402
    ChiModel,
    chi_cdf,
    chi_entropy_reference,
    chi_log_pdf,
    chi_mean,
    chi_pdf,
    chi_quantile,
    chi_sample,
    log_gamma,
)

"""Delay-Doppler radar sensing simulator and estimation library."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    C_LIGHT,
    DDGrid,
    FrameConfig,
    RngStream,
    TFGrid,
    TimeSeries,
    dft,
    doppler_row,
    qpsk_map,
    random_qpsk_grid,
    signed_doppler,
)
from .modem import (  # noqa: F401
    demodulate,
    dzt_demod,
    fasttime_slowtime,
    heisenberg_rect,
    isfft,
    modulate,
    sfft,
    wigner_rect,
)
from .channel import (  # noqa: F401
    ChannelSpec,
    NoiseSpec,
    Target,
    add_awgn,
    apply_channel,
    effective_dd_channel,
    fractional_circular_shift,
    indices_to_physical,
    physical_to_indices,
)
from .estimator import (  # noqa: F401
    CorrelationMap,
    EstimationError,
    Peak,
    TargetEstimate,
    correlate2d_fast,
    correlate2d_reference,
    estimate_targets,
    phase_offset,
    pick_peaks,
    refine_fractional,
)
from .baseline import (  # noqa: F401
    estimate_targets_ofdm,
    ofdm_demodulate,
    ofdm_modulate,
    ofdm_periodogram,
)
from .harness import (  # noqa: F401
    RmseReport,
    RmseRow,
    ScenarioConfig,
    TruthTarget,
    associate,
    rmse_sweep,
    run_frame,
    run_trial,
)
from .scenario import ScenarioModel, load_scenario, parse_scenario  # noqa: F401

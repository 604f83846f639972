"""Spatial-modulation OTFS link simulation over doubly-selective
delay-Doppler channels."""

from .capacity import CapacityEstimate, capacity_upper_bound, dcmc_capacity
from .channel import (
    ChannelRealization,
    PathSet,
    apply_channel,
    build_link_matrix,
    build_link_matrix_direct,
    build_mimo_matrix,
    dump_channel,
    equivalent_matrix,
    load_path_set,
    sample_paths,
)
from .config import FrameConfig, noise_variance, symbol_snr
from .constellation import Constellation, make_constellation
from .detectors import (
    Counters,
    DetectionResult,
    LsEstimate,
    complexity_model,
    depth_from_theta,
    distance_vector,
    doscd_detect,
    enumerate_taps_best_first,
    hard_round,
    lmmse_detect,
    lmmse_estimate,
    ls_estimate,
    mld_detect,
    tap_reliability,
)
from .errors import (
    BudgetExceededError,
    ConfigurationError,
    DimensionError,
    InvalidSymbolError,
    SmOtfsError,
)
from .mapping import (
    SmFrame,
    TapCandidate,
    demap_frame,
    isfft,
    map_bits,
    sfft,
    shuffle_index,
    shuffle_perm,
    tap_selector,
)
from .sweep import (
    PointResult,
    SweepConfig,
    TrialRecord,
    run_ber_sweep,
    run_capacity_sweep,
    run_trial,
    simo_baseline,
)

__version__ = "0.1.0"

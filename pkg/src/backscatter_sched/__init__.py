"""Time scheduling and backscatter-threshold design for wireless-powered
ambient backscatter IoT nodes."""

from .channel import (
    PathLossParams,
    SnrMapping,
    dbm_to_watts,
    path_loss,
    snr_of_power,
    watts_to_dbm,
)
from .errors import ContractError, DomainError, NumericalError
from .outage import (
    FadingParams,
    QuadratureSpec,
    composite_pdf,
    invert_threshold,
    outage_monte_carlo,
    outage_probability,
    outage_vs_received_power,
    transmit_power_threshold,
)
from .power_model import (
    EnergyBudget,
    NarrowSchedule,
    ScenarioParams,
    SensingVariant,
    WideSchedule,
    causality_satisfied,
    energy_budget_narrow,
    energy_budget_wide,
)
from .rate import InterferenceScene, rate_interference, rate_narrow, rate_wide
from .scheduler import (
    GridSpec,
    SolveResult,
    solve_narrow_closed_form,
    solve_narrow_grid,
    solve_wide_closed_form,
    solve_wide_grid,
)
from .sensing import ChannelBank, DetectionOutcome, SampleStream, detect, generate_stream, received_power

__version__ = "0.1.0"

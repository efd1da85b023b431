"""mobeq: traveler-equilibrium mode splits for multi-modal city scenarios."""

from .model import (
    CityModel,
    DemandTensor,
    FareScheme,
    GameInstance,
    Mode,
    Population,
    ScenarioControls,
    Violation,
    Zone,
    build_instance,
    trip_cost,
    validate_city,
    validate_controls,
)
from .travel import DistanceMatrix, compute_distance, compute_travel_time
from .equilibrium import (
    Configuration,
    NashCertificate,
    SolveStats,
    check_feasible,
    oracle_solve,
    solve_equilibrium,
    verify_nash,
)
from .metrics import KpiBundle, compute_kpis
from .session import EquilibriumReport, Session, create_session, diff_iterations, run_iteration
from .citydata import bundled_datasets, load_city, load_session, save_city, save_session

__version__ = "0.1.0"

__all__ = [
    "CityModel",
    "Configuration",
    "DemandTensor",
    "DistanceMatrix",
    "EquilibriumReport",
    "FareScheme",
    "GameInstance",
    "KpiBundle",
    "Mode",
    "NashCertificate",
    "Population",
    "ScenarioControls",
    "Session",
    "SolveStats",
    "Violation",
    "Zone",
    "build_instance",
    "bundled_datasets",
    "check_feasible",
    "compute_distance",
    "compute_kpis",
    "compute_travel_time",
    "create_session",
    "diff_iterations",
    "load_city",
    "load_session",
    "oracle_solve",
    "run_iteration",
    "save_city",
    "save_session",
    "solve_equilibrium",
    "trip_cost",
    "validate_city",
    "validate_controls",
    "verify_nash",
]

"""Joint good pricing over a social network and predictive maintenance.

A supplier with a fleet of degrading production units sells a good with
positive consumption externalities to customers connected by a social
graph.  The package solves the supplier's joint problem exactly: per-period
optimal prices against the customers' Nash equilibrium, and a maintenance
schedule that trades production capacity against maintenance cost under a
scenario-based degradation chance constraint.
"""
__version__ = "0.1.0"

from .model import (  # noqa: F401
    CustomerNetwork,
    Horizon,
    MaintenanceSchedule,
    PricingSolution,
    SolutionReport,
    UnitFleet,
    load_config,
    validate_schedule,
    write_config,
)

"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid scenario or construction parameters."""


class ContractError(ValueError):
    """A caller broke a function precondition."""


class ProtocolError(RuntimeError):
    """Malformed coordination exchange between cells."""


class SimulationAbort(RuntimeError):
    """Numerical state became unusable during a run."""

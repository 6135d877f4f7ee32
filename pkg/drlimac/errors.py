class DrliMacError(Exception):
    pass


class ConfigError(DrliMacError, ValueError):
    pass


class TopologyError(ConfigError):
    pass


class SimulationOrderError(DrliMacError, RuntimeError):
    pass


class ValidationError(DrliMacError, ValueError):
    pass

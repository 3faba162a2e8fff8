class NsccError(Exception):
    """Base error for the national SCC model. Carries the process exit code the CLI should use"""
    exit_code = 4


class ConfigError(NsccError):
    exit_code = 2


class CalibrationError(NsccError):
    exit_code = 3

    def __init__(self, message: str, failures: list = None):
        """Calibration failure

        Args:
            message (str): error message
            failures (list, optional): (region, sector) pairs that failed. Defaults to None.
        """
        super().__init__(message)
        self.failures = failures or []


class EngineError(NsccError):
    exit_code = 4


class EconomyError(EngineError):
    def __init__(self, message: str, country: str = '', year: int = None):
        super().__init__(message)
        self.country = country
        self.year = year


class EmissionsError(EngineError):
    pass


class ClimateError(EngineError):
    pass


class ImpactError(EngineError):
    pass

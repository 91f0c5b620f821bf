"""Exception hierarchy for the training harness."""


class HarnessError(Exception):
    """Base class for all harness failures."""


class ConfigError(HarnessError):
    """Invalid configuration, manifest/mode mismatch, or empty dataset."""


class CheckpointError(HarnessError):
    """Missing or malformed checkpoint artifact."""

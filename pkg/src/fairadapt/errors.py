"""Exception hierarchy shared across the package."""


class FairadaptError(ValueError):
    """Base class for all validation and modelling errors raised here."""


class GraphError(FairadaptError):
    """Invalid causal graph (cycles, bad roots, unknown nodes, bad aps)."""


class DataError(FairadaptError):
    """Invalid dataset, CSV or metadata content."""


class TransportError(FairadaptError):
    """Invalid transport problem (bad marginals, length mismatch)."""


class ZeroMassRowError(TransportError):
    """The observed level has zero mass in the transport plan row."""


class NumericError(FairadaptError):
    """A numerical routine failed to produce a usable result."""

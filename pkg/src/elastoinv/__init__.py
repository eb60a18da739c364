"""Forward synthesis and inverse source recovery for the time-dependent Lamé system."""

__version__ = "0.1.0"

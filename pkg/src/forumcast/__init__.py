"""Forum socio-semantic indicators and factor-augmented arrival forecasts."""

__version__ = "0.1.0"

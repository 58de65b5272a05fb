"""modemix - multimode three-wave mixing in channel waveguides."""

__version__ = "0.1.0"

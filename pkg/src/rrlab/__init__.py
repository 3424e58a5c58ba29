"""Rate-region lab for a two-user interference channel in which receiver 2
also transmits to help receiver 1.

Provides exact information measures, rate-system projection by
Fourier-Motzkin elimination, inner/outer bound comparison and a Monte Carlo
of the binning searches."""

__version__ = "0.1.0"

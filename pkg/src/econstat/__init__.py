"""Statistical mechanics of money, income and energy-consumption distributions."""

__version__ = "0.1.0"

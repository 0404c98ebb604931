"""Learning game rules from play: GDL engine, dataset generation and baselines."""

__version__ = "0.1.0"

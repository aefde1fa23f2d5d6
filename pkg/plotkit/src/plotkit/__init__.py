"""Offline rendering of junctionflow output directories into figures."""

__version__ = "0.1.0"

from .render import PlotJob, SchemaMismatch, render

__all__ = ["PlotJob", "SchemaMismatch", "render"]

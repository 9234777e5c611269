"""Offline figure generation for the collapse laboratory's CSV outputs."""
from .render import render
from .spec import PlotSpec, SpecError, load_spec, parse_spec_text

__version__ = "0.1.0"

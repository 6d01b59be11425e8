"""Figure rendering for job-shop energy-dispatch sweep outputs."""

from .figures import KINDS, FigureError, FigureSpec, render

__version__ = "0.1.0"

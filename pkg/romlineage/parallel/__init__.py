"""Helpers for running analysis work in parallel processes."""

from .runner import ParallelRunner
from .api import run_parallel

"""Bit-vector formulas of parametric width, translated to integer arithmetic."""

from .ast import WidthMap
from .syntax import parse_pbv, pretty_pbv
from .translate import TranslationResult, translate

__all__ = ["TranslationResult", "WidthMap", "parse_pbv", "pretty_pbv", "translate"]
__version__ = "0.1.0"

"""Cyclotomic orthomorphisms of finite fields: constructions, counts and searches."""

from __future__ import annotations

from .errors import CyclorthError
from .field import FieldCtx, make_field
from .orthomorphism import CyclotomicMap, PermutationMap

__version__ = "0.1.0"

__all__ = ["CyclorthError", "CyclotomicMap", "FieldCtx", "PermutationMap", "make_field", "__version__"]

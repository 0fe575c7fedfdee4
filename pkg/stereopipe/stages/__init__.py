"""Pipeline stage registry and the builtin matching stages."""

from .builtin import register_builtin_stages

__all__ = ["register_builtin_stages"]

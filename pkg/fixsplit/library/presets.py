# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#       jupytext_version: 1.16.4
#   kernelspec:
#     display_name: Python (fixsplit-venv)
#     language: python
#     name: fixsplit-venv
# ---

# +
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional

try:
    from .exceptions import InvalidSplitting, NotShipped, UnknownPreset
    from .numeric import sqrt_field
    from .planar import PlanarLattice, PlanarVector
    from .splitting import CylinderClass, FixSplitting, validate
except ImportError:
    from exceptions import InvalidSplitting, NotShipped, UnknownPreset
    from numeric import sqrt_field
    from planar import PlanarLattice, PlanarVector
    from splitting import CylinderClass, FixSplitting, validate
# -

logger = logging.getLogger(__name__)


class ProviderRegistry:
    """
    Minimal registry that maps token names to zero-arg callables.

    Example:
        REGISTRY.register('PRESETS', PRESETS.names)
        value = REGISTRY.resolve('PRESETS')  # calls provider
    """

    def __init__(self) -> None:
        self._providers: Dict[str, Callable[[], Any]] = {}

    def register(self, name: str, fn: Callable[[], Any]) -> None:
        if not callable(fn):
            raise TypeError('provider must be callable')
        self._providers[name] = fn

    def resolve(self, name: str) -> Any:
        fn = self._providers.get(name)
        if fn is None:
            return None
        return fn()


def _is_token(value: Any) -> bool:
    return isinstance(value, str) and value.startswith('${') and value.endswith('}') and len(value) > 3


def _expand(value: Any, fields: Iterable[str], registry: ProviderRegistry, key: Optional[str] = None) -> Any:
    if isinstance(value, dict):
        return {k: _expand(v, fields, registry, k) for k, v in value.items()}
    if isinstance(value, list):
        return [_expand(v, fields, registry, key) for v in value]
    if key in fields and _is_token(value):
        resolved = registry.resolve(value[2:-1])
        return resolved if resolved is not None else value
    return value


def expand_tokens_in_schema(schema: Dict[str, Any], *, fields: Iterable[str] = ('allowed', 'default'),
                            registry: Optional[ProviderRegistry] = None) -> Dict[str, Any]:
    """
    Expand ${TOKEN} placeholders in the rule fields of a schema section.

    Only values under keys named in `fields` are expanded. Tokens without a provider are kept
    as-is.
    """
    if not isinstance(schema, dict):
        return schema
    return _expand(schema, tuple(fields), registry or REGISTRY)


class PresetRegistry:
    """Named splitting constructors. Presets are validated when they are built."""

    def __init__(self) -> None:
        self._builders: Dict[str, Callable[[], FixSplitting]] = {}

    def register(self, name: str, builder: Callable[[], FixSplitting]) -> None:
        if not callable(builder):
            raise TypeError('preset builder must be callable')
        self._builders[name] = builder

    def names(self) -> List[str]:
        return sorted(self._builders)

    def build(self, name: str) -> FixSplitting:
        """
        Raises:
            UnknownPreset: no preset with this name
            NotShipped: the preset slot exists but has no coordinates
            InvalidSplitting: the preset data fails validation
        """
        builder = self._builders.get(name)
        if builder is None:
            raise UnknownPreset(f"unknown preset {name!r}; known presets: {', '.join(self.names())}")
        s = builder()
        report = validate(s)
        if not report.valid:
            raise InvalidSplitting(f"preset {name!r} is not a valid splitting: {', '.join(report.codes)}",
                                   report=report)
        logger.info(f'built preset {name}')
        return s


def demo_sqrt2() -> FixSplitting:
    """Irrational fix-splitting over Q(sqrt 2) with vertical splitting vector and total area 3."""
    K = sqrt_field(2)
    r2 = K.gen
    one, zero = K(1), K(0)
    lat1 = PlanarLattice(PlanarVector(one, zero), PlanarVector(r2, one))
    lat2 = PlanarLattice(PlanarVector(one, zero), PlanarVector(1 + r2, one))
    w = PlanarVector(zero, one)
    cyl = CylinderClass(PlanarLattice(w, PlanarVector(K(Fraction(1, 2)), K(Fraction(1, 3)))), w)
    return FixSplitting(lat1, lat2, cyl, w)


def arnoux_yoccoz() -> FixSplitting:
    raise NotShipped("the Arnoux-Yoccoz splitting is not shipped: its coordinates come from an external "
                     "construction and have not been sourced and validated yet")


PRESETS = PresetRegistry()
PRESETS.register('demo-sqrt2', demo_sqrt2)
PRESETS.register('arnoux-yoccoz', arnoux_yoccoz)

# Shared default registry instance
REGISTRY = ProviderRegistry()
REGISTRY.register('PRESETS', PRESETS.names)

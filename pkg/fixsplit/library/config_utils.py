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

import collections.abc
import csv
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import yaml

logger = logging.getLogger(__name__)

# schema type names; rationals are written as strings ("1/10") or plain numbers
SCHEMA_TYPES = {
    'str': str,
    'int': int,
    'float': (int, float),
    'bool': bool,
    'dict': dict,
    'list': list,
    'rational': (str, int),
}


def deep_merge(base: dict, update: Mapping) -> dict:
    """
    Merge `update` over `base` without touching either.

    Nested mappings are merged key by key; any other value in `update` replaces the one in `base`.
    A user file therefore only needs the keys it changes, e.g. `{'budget': {'combination_span': 8}}`.
    """
    merged = dict(base)
    for key, value in update.items():
        current = merged.get(key)
        if isinstance(current, dict) and isinstance(value, collections.abc.Mapping):
            merged[key] = deep_merge(current, value)
        else:
            merged[key] = value
    return merged


def _rule_type(key: str, rules: dict):
    name = rules.get('type', 'str')
    expected = SCHEMA_TYPES.get(name)
    if expected is None:
        logger.warning(f"schema rule for '{key}' names unknown type '{name}'; treating it as str")
        return name, str
    return name, expected


def _check_value(key: str, value: Any, rules: dict) -> str:
    """Return a problem description, or an empty string when the value satisfies its rule."""
    type_name, expected = _rule_type(key, rules)
    # bool is an int subclass; keep it out of numeric keys
    if not isinstance(value, expected) or (isinstance(value, bool) and type_name != 'bool'):
        return f"'{key}' must be of type {type_name}, got {type(value).__name__}."

    if type_name == 'rational':
        try:
            value = Fraction(value)
        except (ValueError, ZeroDivisionError):
            return f"'{key}' must be a rational such as '1/10', got {value!r}."

    choices = rules.get('allowed')
    if choices and value not in choices:
        return f"'{key}' must be one of {choices}, got {value}."

    bounds = rules.get('range')
    if bounds and isinstance(value, (int, float, Fraction)):
        low, high = (None if b is None else Fraction(str(b)) for b in bounds)
        if (low is not None and value < low) or (high is not None and value > high):
            return f"'{key}' must lie in {bounds}, got {value}."
    return ''


def _problem(key: str, message: str, rules: dict) -> dict:
    return {'key': key, 'error': message, 'fatal': bool(rules.get('fatal', False))}


def validate_config(config: Mapping, schema: Mapping, strict: bool = True) -> Tuple[dict, List[dict]]:
    """
    Check one configuration block against its schema rules.

    Missing keys take their schema default. A value that breaks its rule is replaced by the
    default and reported; when the rule is marked `fatal` the whole block is rejected instead.

    Args:
        config: block read from yaml, e.g. the `main:` mapping
        schema: rule mapping per key (type, default, range, allowed, required, description, fatal)
        strict: drop keys the schema does not know

    Returns:
        (validated block, list of problem dicts with 'key', 'error' and 'fatal')

    Raises:
        ValueError: a fatal rule is broken
    """
    validated = {}
    problems = []

    for key, rules in schema.items():
        if key in config:
            message = _check_value(key, config[key], rules)
            if not message:
                validated[key] = config[key]
                continue
            problems.append(_problem(key, message, rules))
        elif rules.get('required', False):
            problems.append(_problem(
                key, f"'{key}' is required ({rules.get('description', 'no description')}); "
                     f"default {rules.get('default')!r} used", rules))
        validated[key] = rules.get('default')

    for key in sorted(set(config) - set(schema)):
        if strict:
            logger.warning(f"dropping '{key}': not part of the schema")
        else:
            validated[key] = config[key]

    for problem in problems:
        logger.warning(problem['error'])
    fatal = [p['key'] for p in problems if p['fatal']]
    if fatal:
        logger.error(f"fatal configuration problems in {fatal}")
        raise ValueError(f"invalid configuration: {problems}")
    if problems:
        logger.warning(f"defaults substituted for {[p['key'] for p in problems]}")
    else:
        logger.debug(f"configuration block with {len(validated)} keys is valid")
    return validated, problems


def load_yaml_file(filepath) -> dict:
    """
    Raises:
        FileNotFoundError: no such file
        ValueError: not yaml, or not a mapping at the top level
    """
    path = Path(filepath).expanduser().resolve()
    if not path.is_file():
        raise FileNotFoundError(f"YAML file not found: {path}")

    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ValueError(f"unreadable YAML in {path}: {e}")

    if not isinstance(data, dict):
        raise ValueError(f"{path} must hold a mapping at the top level")
    logger.debug(f"read {path}")
    return data


def load_json_file(filepath) -> Any:
    """
    Raises:
        FileNotFoundError: no such file
        ValueError: not valid JSON
    """
    path = Path(filepath).expanduser().resolve()
    if not path.is_file():
        raise FileNotFoundError(f"JSON file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"unreadable JSON in {path}: {e}")


def make_json_safe(obj):
    """Turn dataclass-like results, Fractions, Paths and tuples into plain JSON values."""
    if isinstance(obj, Mapping):
        return {str(k): make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(v) for v in obj]
    if isinstance(obj, (Path, Fraction)):
        return str(obj)
    if hasattr(obj, 'to_json'):
        return make_json_safe(obj.to_json())
    return obj


def write_json_file(filepath, data: Dict[str, Any]) -> Path:
    """Write `data` with sorted keys and fixed indentation; parent directories are created."""
    path = Path(filepath).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(make_json_safe(data), f, sort_keys=True, indent=2)
        f.write('\n')
    logger.info(f"wrote {path}")
    return path


def write_csv_file(filepath, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(filepath).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        writer.writerows(rows)
    logger.info(f"wrote {path}")
    return path

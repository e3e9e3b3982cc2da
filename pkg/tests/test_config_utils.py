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
import json
import logging
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

try:
    from fixsplit.constants import (
        FNAME_APPLICATION_CONFIG,
        FNAME_APPLICATION_SCHEMA,
        KEY_APPLICATION_SCHEMA,
        KEY_BUDGET_SCHEMA,
        PATH_APP_CONFIG,
    )
    from fixsplit.library.config_utils import *
    from fixsplit.library.presets import PRESETS, expand_tokens_in_schema
except ModuleNotFoundError:
    from constants import (
        FNAME_APPLICATION_CONFIG,
        FNAME_APPLICATION_SCHEMA,
        KEY_APPLICATION_SCHEMA,
        KEY_BUDGET_SCHEMA,
        PATH_APP_CONFIG,
    )
    from library.config_utils import *
    from library.presets import PRESETS, expand_tokens_in_schema
# -

logging.getLogger('fixsplit').setLevel(logging.CRITICAL)


SCHEMA = {
    'depth': {'type': 'int', 'default': 3, 'range': [0, 24]},
    'mode': {'type': 'str', 'default': 'exact', 'allowed': ['exact', 'float']},
    'eps0': {'type': 'rational', 'default': '1/10', 'fatal': True},
    'shift': {'type': 'int', 'default': 10, 'range': [1, None]},
    'horizon': {'type': 'float', 'default': 100.0},
}


# -------------------------------------------------------------------
# 1) SHIPPED FILES
# -------------------------------------------------------------------
class TestShippedConfiguration(unittest.TestCase):
    """The default configuration must satisfy the shipped schema."""

    def setUp(self):
        self.config = load_yaml_file(PATH_APP_CONFIG / FNAME_APPLICATION_CONFIG)
        self.schema = load_yaml_file(PATH_APP_CONFIG / FNAME_APPLICATION_SCHEMA)

    def test_main_block(self):
        schema = expand_tokens_in_schema(self.schema[KEY_APPLICATION_SCHEMA])
        self.assertEqual(schema['preset']['allowed'], PRESETS.names())
        validated, errors = validate_config(self.config[KEY_APPLICATION_SCHEMA], schema)
        self.assertEqual(errors, [])
        self.assertEqual(validated['preset'], 'demo-sqrt2')
        self.assertEqual(Fraction(validated['eps0']), Fraction(1, 10))

    def test_budget_block(self):
        validated, errors = validate_config(self.config[KEY_BUDGET_SCHEMA], self.schema[KEY_BUDGET_SCHEMA])
        self.assertEqual(errors, [])
        self.assertEqual(validated['max_circumference_shift'], 10 ** 40)
        self.assertEqual(validated['combination_span'], 6)

    def test_defaults_match_config(self):
        for block in (KEY_APPLICATION_SCHEMA, KEY_BUDGET_SCHEMA):
            for key, rules in self.schema[block].items():
                self.assertEqual(rules['default'], self.config[block][key], msg=f'{block}.{key}')


# -------------------------------------------------------------------
# 2) VALIDATION RULES
# -------------------------------------------------------------------
class TestValidateConfig(unittest.TestCase):

    def test_defaults_fill_missing_keys(self):
        validated, errors = validate_config({}, SCHEMA)
        self.assertEqual(validated['depth'], 3)
        self.assertEqual(errors, [])

    def test_out_of_range_substitutes_default(self):
        validated, errors = validate_config({'depth': 99}, SCHEMA)
        self.assertEqual(validated['depth'], 3)
        self.assertEqual([e['key'] for e in errors], ['depth'])

    def test_open_range(self):
        validated, errors = validate_config({'shift': 10 ** 50}, SCHEMA)
        self.assertEqual(validated['shift'], 10 ** 50)
        _, errors = validate_config({'shift': 0}, SCHEMA)
        self.assertEqual(len(errors), 1)

    def test_bool_is_not_an_int(self):
        validated, errors = validate_config({'depth': True}, SCHEMA)
        self.assertEqual(validated['depth'], 3)
        self.assertEqual(len(errors), 1)

    def test_int_is_a_float(self):
        validated, errors = validate_config({'horizon': 50}, SCHEMA)
        self.assertEqual(validated['horizon'], 50)
        self.assertEqual(errors, [])

    def test_allowed(self):
        validated, errors = validate_config({'mode': 'interval'}, SCHEMA)
        self.assertEqual(validated['mode'], 'exact')
        self.assertEqual(len(errors), 1)

    def test_rational_values(self):
        validated, errors = validate_config({'eps0': '1/20'}, SCHEMA)
        self.assertEqual(validated['eps0'], '1/20')
        validated, errors = validate_config({'eps0': 1}, SCHEMA)
        self.assertEqual(errors, [])

    def test_fatal_rational(self):
        with self.assertRaises(ValueError):
            validate_config({'eps0': 'one tenth'}, SCHEMA)
        with self.assertRaises(ValueError):
            validate_config({'eps0': '1/0'}, SCHEMA)
        with self.assertRaises(ValueError):
            validate_config({'eps0': 0.1}, SCHEMA)

    def test_strict_drops_unknown_keys(self):
        validated, _ = validate_config({'colour': 'red'}, SCHEMA)
        self.assertNotIn('colour', validated)
        validated, _ = validate_config({'colour': 'red'}, SCHEMA, strict=False)
        self.assertEqual(validated['colour'], 'red')

    def test_deep_merge(self):
        merged = deep_merge({'main': {'depth': 3, 'mode': 'exact'}, 'x': 1}, {'main': {'depth': 5}})
        self.assertEqual(merged, {'main': {'depth': 5, 'mode': 'exact'}, 'x': 1})


# -------------------------------------------------------------------
# 3) FILES
# -------------------------------------------------------------------
class TestFiles(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_missing_yaml(self):
        with self.assertRaises(FileNotFoundError):
            load_yaml_file(self.root / 'absent.yaml')

    def test_yaml_must_be_a_mapping(self):
        path = self.root / 'list.yaml'
        path.write_text('- 1\n- 2\n')
        with self.assertRaises(ValueError):
            load_yaml_file(path)

    def test_bad_json(self):
        path = self.root / 'bad.json'
        path.write_text('{"a": ')
        with self.assertRaises(ValueError):
            load_json_file(path)

    def test_write_json_is_stable(self):
        path = write_json_file(self.root / 'nested' / 'out.json',
                               {'b': Fraction(1, 3), 'a': (1, 2), 'c': self.root})
        text = path.read_text()
        self.assertTrue(text.endswith('\n'))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        data = json.loads(text)
        self.assertEqual(data, {'a': [1, 2], 'b': '1/3', 'c': str(self.root)})

    def test_write_csv(self):
        path = write_csv_file(self.root / 'rows.csv', ['n', 'x'], [[0, 'a'], [1, 'b']])
        self.assertEqual(path.read_text(), 'n,x\n0,a\n1,b\n')


if __name__ == '__main__':
    unittest.main()

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

import unittest

try:
    from fixsplit.library.presets import *
    from fixsplit.library.splitting import FixSplitting
    from fixsplit.library.exceptions import InvalidSplitting, NotShipped, UnknownPreset
except ModuleNotFoundError:
    from library.presets import *
    from library.splitting import FixSplitting
    from library.exceptions import InvalidSplitting, NotShipped, UnknownPreset


class TestProviderRegistry(unittest.TestCase):

    def setUp(self):
        self.registry = ProviderRegistry()

    def test_resolve(self):
        self.registry.register('COLOURS', lambda: ['red', 'blue'])
        self.assertEqual(self.registry.resolve('COLOURS'), ['red', 'blue'])
        self.assertIsNone(self.registry.resolve('MISSING'))
        # a later registration replaces the provider
        self.registry.register('COLOURS', lambda: ['green'])
        self.assertEqual(self.registry.resolve('COLOURS'), ['green'])

    def test_provider_must_be_callable(self):
        with self.assertRaises(TypeError):
            self.registry.register('BAD', ['not', 'callable'])

    def test_expand_tokens(self):
        self.registry.register('PRESETS', lambda: ['a', 'b'])
        schema = {
            'preset': {'type': 'str', 'allowed': '${PRESETS}', 'description': '${PRESETS}'},
            'other': {'type': 'str', 'allowed': '${UNKNOWN}'},
        }
        expanded = expand_tokens_in_schema(schema, registry=self.registry)
        self.assertEqual(expanded['preset']['allowed'], ['a', 'b'])
        # only rule fields are expanded
        self.assertEqual(expanded['preset']['description'], '${PRESETS}')
        self.assertEqual(expanded['other']['allowed'], '${UNKNOWN}')
        self.assertEqual(schema['preset']['allowed'], '${PRESETS}')

    def test_default_registry_knows_presets(self):
        expanded = expand_tokens_in_schema({'preset': {'allowed': '${PRESETS}'}})
        self.assertEqual(expanded['preset']['allowed'], PRESETS.names())


class TestPresetRegistry(unittest.TestCase):

    def test_shipped_names(self):
        self.assertEqual(PRESETS.names(), ['arnoux-yoccoz', 'demo-sqrt2'])

    def test_demo_builds_valid(self):
        s = PRESETS.build('demo-sqrt2')
        self.assertTrue(s.report.valid)

    def test_unknown(self):
        with self.assertRaises(UnknownPreset):
            PRESETS.build('golden-l')

    def test_empty_slot(self):
        with self.assertRaises(NotShipped):
            PRESETS.build('arnoux-yoccoz')

    def test_invalid_preset_data(self):
        registry = PresetRegistry()
        demo = demo_sqrt2()
        registry.register('broken', lambda: FixSplitting(demo.lat1, demo.lat2, demo.cyl, -demo.w))
        with self.assertRaises(InvalidSplitting) as cm:
            registry.build('broken')
        self.assertIn('CircumferenceMismatch', cm.exception.report.codes)


if __name__ == '__main__':
    unittest.main()

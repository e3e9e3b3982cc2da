#!/usr/bin/env python
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
import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from .constants import *

from .library.codec import (
    partners_from_json,
    partners_to_json,
    plan_to_json,
    scalar_to_json,
    splitting_from_json,
    splitting_to_json,
    tree_from_json,
    tree_to_json,
    vector_to_json,
)
from .library.config_utils import (
    deep_merge,
    load_json_file,
    load_yaml_file,
    validate_config,
    write_csv_file,
    write_json_file,
)
from .library.exceptions import (
    BudgetExhausted,
    ConfigurationError,
    GuaranteeViolated,
    NotRealizable,
    NotShipped,
    NumericalStall,
    SlitWrapsThroughVertex,
    SplittingError,
    UnknownPreset,
)
from .library.numeric import ScalarMode, to_fraction
from .library.partners import SearchBudget, certificate_checks, search
from .library.presets import PRESETS, expand_tokens_in_schema
from .library.splitting import FixSplitting, areas, is_irrational, validate
from .library.surface import (
    build_model,
    check_saddle_realization,
    occupancy_experiment,
    square_torus_model,
    trace,
)
from .library.tree import audit_tree, build_tree, distinct_directions
from .library.twist import apply_twist, good_partners, make_plan, select_irrational_twists
from .logging_setup import setup_logging

logger = logging.getLogger(__name__)

FIXTURES = ('square-torus',)
# -


@dataclass
class RunConfig:
    """Effective parameters of one command: defaults, then the config file, then flags."""
    command: str
    mode: str
    output_dir: Path
    seed: int
    budget: SearchBudget
    input: Optional[Path] = None
    preset: Optional[str] = None
    depth: int = 2
    eps0: Fraction = Fraction(1, 10)
    max_refinements: int = 8
    max_budget_doublings: int = 3
    horizon: float = 10000.0
    samples: int = 16
    snap_tolerance: float = SNAP_TOLERANCE
    closure_tolerance: float = CLOSURE_TOLERANCE
    k: Optional[int] = None
    partners_file: Optional[Path] = None
    tree_file: Optional[Path] = None
    fixture: Optional[str] = None
    directions: List[Tuple[float, float]] = field(default_factory=list)
    directions_file: Optional[Path] = None
    start: Optional[Tuple[str, Tuple[float, float]]] = None
    region: Optional[str] = None
    name: Optional[str] = None
    realize: bool = False

    def __post_init__(self):
        if self.mode not in ('exact', 'float'):
            raise ConfigurationError(f"mode must be 'exact' or 'float', got {self.mode!r}")
        if self.depth < 0:
            raise ConfigurationError(f"depth must not be negative, got {self.depth}")
        if self.eps0 <= 0:
            raise ConfigurationError(f"eps0 must be positive, got {self.eps0}")
        if self.horizon <= 0:
            raise ConfigurationError(f"horizon must be positive, got {self.horizon}")
        if self.samples < 1:
            raise ConfigurationError(f"samples must be positive, got {self.samples}")
        for label, path in (('input', self.input), ('partners', self.partners_file),
                            ('tree', self.tree_file), ('directions', self.directions_file)):
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"{label} file not found: {path}")

    def to_json(self) -> dict:
        data = asdict(self)
        data['budget'] = self.budget.to_json()
        data['eps0'] = str(self.eps0)
        for key in ('output_dir', 'input', 'partners_file', 'tree_file', 'directions_file'):
            if data[key] is not None:
                data[key] = str(data[key])
        data['directions'] = [list(d) for d in self.directions]
        if self.start is not None:
            data['start'] = {'chart': self.start[0], 'position': list(self.start[1])}
        return data


def parse_args(argv=None):

    # detect jupyter's ipykernel_launcher and trim the jupyter args
    if argv is None:
        if 'ipykernel_launcher' in sys.argv[0]:
            argv = sys.argv[3:]
        else:
            argv = sys.argv[1:]

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=str, default=None,
                        help="Path to a configuration yaml file merged over the defaults")
    common.add_argument(
        "-l", "--log_level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="Logging output level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )
    common.add_argument("--mode", choices=["exact", "float"], default=None,
                        help="Scalar arithmetic for the run")
    source = common.add_mutually_exclusive_group()
    source.add_argument("--input", type=str, default=None, help="Splitting JSON file")
    source.add_argument("--preset", type=str, default=None, help="Named preset splitting")
    common.add_argument("--output-dir", dest="output_dir", type=str, default=None,
                        help="Directory for JSON and CSV artifacts")
    common.add_argument("--seed", type=int, default=None, help="Seed for random trajectory starts")

    search_opts = argparse.ArgumentParser(add_help=False)
    search_opts.add_argument("--eps-prime", dest="eps_prime", type=str, default=None,
                             help="Bound on partner cross products with w, e.g. 1/100")
    search_opts.add_argument("--eps-ratio", dest="eps_ratio", type=str, default=None,
                             help="Bound on partner cross ratios, at most 1/36 for good partners")
    search_opts.add_argument("--max-convergents", dest="max_convergents", type=int, default=None)
    search_opts.add_argument("--max-shift", dest="max_circumference_shift", type=int, default=None)
    search_opts.add_argument("--combination-span", dest="combination_span", type=int, default=None)

    tree_opts = argparse.ArgumentParser(add_help=False)
    tree_opts.add_argument("--depth", type=int, default=None, help="Depth of the splitting tree")
    tree_opts.add_argument("--eps0", type=str, default=None, help="First level budget, e.g. 1/10")
    tree_opts.add_argument("--max-refinements", dest="max_refinements", type=int, default=None)
    tree_opts.add_argument("--max-budget-doublings", dest="max_budget_doublings", type=int, default=None)

    parser = argparse.ArgumentParser(prog="fixsplit",
                                     description="Fix-splittings, twist trees and nonergodic directions")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="Check a splitting and its irrationality")
    sub.add_parser("partners", parents=[common, search_opts], help="Search a partner triple")

    twist = sub.add_parser("twist", parents=[common, search_opts], help="Twist along a partner triple")
    twist.add_argument("--k", type=int, default=None, help="Single twist index; default tries all")
    twist.add_argument("--realize", action="store_true",
                       help="Trace every twisted saddle connection on the polygon model")
    twist.add_argument("--partners", dest="partners_file", type=str, default=None,
                       help="Partner triple JSON written by the partners command")

    sub.add_parser("tree", parents=[common, search_opts, tree_opts], help="Build and audit the twist tree")

    audit = sub.add_parser("audit", parents=[common, search_opts, tree_opts], help="Audit a stored or new tree")
    audit.add_argument("--tree", dest="tree_file", type=str, default=None, help="Tree JSON written by tree")

    simulate = sub.add_parser("simulate", parents=[common], help="Trace the flow on a polygon model")
    simulate.add_argument("--fixture", choices=FIXTURES, default=None, help="Built-in test surface")
    simulate.add_argument("--direction", type=str, default=None, help="Flow direction as x,y")
    simulate.add_argument("--directions-file", dest="directions_file", type=str, default=None,
                          help="Directions JSON written by tree")
    simulate.add_argument("--start", type=str, default=None, help="Single trace start as chart:x,y")
    simulate.add_argument("--horizon", type=float, default=None)
    simulate.add_argument("--samples", type=int, default=None)
    simulate.add_argument("--region", type=str, default=None, help="Chart whose occupancy is measured")

    preset = sub.add_parser("preset", parents=[common], help="Write a preset splitting")
    preset.add_argument("name", type=str, help="Preset name")

    return parser.parse_args(argv)


def _pair(text: str) -> Tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(','))
    except ValueError:
        raise ConfigurationError(f"expected x,y, got {text!r}")
    return x, y


def _start(text: str) -> Tuple[str, Tuple[float, float]]:
    tag, sep, point = text.partition(':')
    if not sep:
        raise ConfigurationError(f"expected chart:x,y, got {text!r}")
    return tag, _pair(point)


def _override(values: dict, args, keys) -> dict:
    out = dict(values)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def load_configuration(args) -> Tuple[dict, dict]:
    """
    Default configuration, merged with the user file, checked against the schema.

    Raises:
        FileNotFoundError: a configuration file is missing
        ValueError: a fatal schema violation or an unreadable file
    """
    defaults = load_yaml_file(PATH_APP_CONFIG / FNAME_APPLICATION_CONFIG)
    schema = load_yaml_file(PATH_APP_CONFIG / FNAME_APPLICATION_SCHEMA)

    file_user_config = PATH_USER_CONFIG / FNAME_APPLICATION_CONFIG
    if args.config:
        file_user_config = Path(args.config)
        merged = deep_merge(defaults, load_yaml_file(file_user_config))
    elif file_user_config.is_file():
        merged = deep_merge(defaults, load_yaml_file(file_user_config))
    else:
        merged = defaults

    main_schema = expand_tokens_in_schema(schema.get(KEY_APPLICATION_SCHEMA, {}))
    main_config, _ = validate_config(merged.get(KEY_APPLICATION_SCHEMA) or {}, main_schema)
    budget_config, _ = validate_config(merged.get(KEY_BUDGET_SCHEMA) or {}, schema.get(KEY_BUDGET_SCHEMA, {}))
    return main_config, budget_config


def build_run_config(args, main_config: dict, budget_config: dict) -> RunConfig:
    """
    Raises:
        ConfigurationError: a parameter is out of range or malformed
        FileNotFoundError: a referenced input file is missing
    """
    main_config = _override(main_config, args, ('mode', 'output_dir', 'seed', 'depth', 'eps0', 'horizon',
                                                'samples', 'max_refinements', 'max_budget_doublings'))
    budget_config = _override(budget_config, args, ('eps_prime', 'eps_ratio', 'max_convergents',
                                                    'max_circumference_shift', 'combination_span'))
    try:
        budget = SearchBudget(
            eps_prime=to_fraction(budget_config['eps_prime']),
            max_convergents=int(budget_config['max_convergents']),
            max_circumference_shift=int(budget_config['max_circumference_shift']),
            eps_ratio=None if budget_config.get('eps_ratio') is None else to_fraction(budget_config['eps_ratio']),
            combination_span=int(budget_config['combination_span']),
        )
        eps0 = to_fraction(main_config['eps0'])
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigurationError(f"unreadable rational in configuration: {e}")

    directions = [_pair(args.direction)] if getattr(args, 'direction', None) else []
    start = _start(args.start) if getattr(args, 'start', None) else None

    def path(value):
        return None if value is None else Path(value).expanduser()

    return RunConfig(
        command=args.command,
        mode=main_config['mode'],
        output_dir=Path(main_config['output_dir']).expanduser(),
        seed=int(main_config['seed']),
        budget=budget,
        input=path(args.input),
        preset=None if args.input else (args.preset or main_config['preset']),
        depth=int(main_config['depth']),
        eps0=eps0,
        max_refinements=int(main_config['max_refinements']),
        max_budget_doublings=int(main_config['max_budget_doublings']),
        horizon=float(main_config['horizon']),
        samples=int(main_config['samples']),
        snap_tolerance=float(main_config['snap_tolerance']),
        closure_tolerance=float(main_config['closure_tolerance']),
        k=getattr(args, 'k', None),
        partners_file=path(getattr(args, 'partners_file', None)),
        tree_file=path(getattr(args, 'tree_file', None)),
        fixture=getattr(args, 'fixture', None),
        directions=directions,
        directions_file=path(getattr(args, 'directions_file', None)),
        start=start,
        region=getattr(args, 'region', None),
        realize=getattr(args, 'realize', False),
        name=getattr(args, 'name', None),
    )


# ---- helpers shared by the commands ----

def _meta(config: RunConfig) -> dict:
    return {'version': VERSION, 'config': config.to_json()}


def load_splitting(config: RunConfig) -> Tuple[FixSplitting, ScalarMode]:
    """
    The splitting named by --input or the preset, in the requested mode.

    Raises:
        UnknownPreset, NotShipped: preset problems
        ValueError: the input document is malformed
    """
    if config.input is not None:
        s, mode = splitting_from_json(load_json_file(config.input), config.mode)
        logger.info(f'loaded splitting from {config.input}')
        return s, mode
    s = PRESETS.build(config.preset)
    if config.mode == 'float':
        return splitting_from_json(splitting_to_json(s), 'float')
    return s, s.mode


def _write_paths(config: RunConfig, tree_audit) -> List[str]:
    written = []
    for report in tree_audit.paths:
        name = FNAME_PATH_TEMPLATE.format(leaf=report.leaf_id)
        write_csv_file(config.output_dir / name, PATH_CSV_COLUMNS, (level.to_row() for level in report.levels))
        written.append(name)
    return written


def _audit_json(config: RunConfig, tree, tree_audit, path_files: List[str]) -> dict:
    return {
        'meta': _meta(config),
        'schema': SCHEMA_PATH_REPORT,
        'complete': tree.complete,
        'failure': tree.failure,
        'passed': tree_audit.passed,
        'edges_checked': tree_audit.edges_checked,
        'failures': tree_audit.failures,
        'paths': [
            {
                'leaf': report.leaf_id,
                'file': name,
                'passed': report.passed,
                'flags': dict(sorted(report.flags.items())),
                'theta_estimate': list(report.theta_estimate),
                'theta_uncertainty': report.theta_uncertainty,
                'min_area': scalar_to_json(report.min_area),
                'partial_sum': scalar_to_json(report.partial_sums[-1]) if report.levels else '0',
                'lengths_increasing': report.lengths_increasing,
            }
            for report, name in zip(tree_audit.paths, path_files)
        ],
    }


def _directions_json(config: RunConfig, tree) -> Optional[dict]:
    if not tree.complete:
        return None
    depth = tree.depth
    summary = distinct_directions(tree, depth)
    leaves = tree.level(depth)
    return {
        'meta': _meta(config),
        'depth': depth,
        'count': summary.count,
        'min_angle': None if summary.min_angle is None else scalar_to_json(summary.min_angle),
        'directions': [list(d) for d in summary.directions],
        'exact': [vector_to_json(leaf.w) for leaf in leaves],
    }


def _finish_tree(config: RunConfig, tree, mode: ScalarMode, write_tree: bool) -> int:
    tree_audit = audit_tree(tree)
    if write_tree:
        write_json_file(config.output_dir / FNAME_TREE, {'meta': _meta(config), **tree_to_json(tree, mode)})
    path_files = _write_paths(config, tree_audit)
    write_json_file(config.output_dir / FNAME_AUDIT, _audit_json(config, tree, tree_audit, path_files))
    directions = _directions_json(config, tree)
    if directions is not None:
        write_json_file(config.output_dir / FNAME_DIRECTIONS, directions)

    if not tree.complete:
        logger.error(f'tree incomplete: {tree.failure}')
        logger.error('retry with a larger --max-convergents, --max-shift or --max-budget-doublings')
        return EXIT_BUDGET
    if not tree_audit.passed:
        for failure in tree_audit.failures:
            logger.error(failure)
        return EXIT_INVALID
    logger.info(f'tree of depth {tree.depth} with {len(tree.leaves())} leaves passes its audit')
    return EXIT_OK


# ---- commands ----

def cmd_validate(config: RunConfig) -> int:
    s, mode = load_splitting(config)
    report = validate(s)
    irrational = is_irrational(s) if report.valid else False
    output = {
        'meta': _meta(config),
        'splitting': splitting_to_json(s, mode),
        'report': report.to_json(),
        'irrational': irrational,
    }
    if report.valid:
        a = areas(s)
        output['areas'] = {'a1': scalar_to_json(a.a1), 'a2': scalar_to_json(a.a2),
                           'ac': scalar_to_json(a.ac), 'total': scalar_to_json(a.total)}
    write_json_file(config.output_dir / FNAME_VALIDATION, output)

    if not report.valid:
        for violation in report.violations:
            logger.error(f'{violation.code}: {violation.message}')
        return EXIT_INVALID
    if not irrational:
        logger.error(f'splitting direction {s.w} is rational')
        return EXIT_INVALID
    return EXIT_OK


def cmd_partners(config: RunConfig) -> int:
    s, mode = load_splitting(config)
    budget = config.budget
    p = search(s, budget, require_good_partners=budget.ratio <= GOOD_PARTNER_RATIO)
    write_json_file(config.output_dir / FNAME_PARTNERS, {
        'meta': _meta(config),
        'partners': partners_to_json(p),
        'good_partners': good_partners(s, p),
        'certificate': certificate_checks(s, p, budget.eps_prime, budget.ratio),
    })
    return EXIT_OK


def cmd_twist(config: RunConfig) -> int:
    s, mode = load_splitting(config)
    if config.partners_file is not None:
        p = partners_from_json(load_json_file(config.partners_file)['partners'], mode)
    else:
        p = search(s, config.budget, require_good_partners=config.budget.ratio <= GOOD_PARTNER_RATIO)

    if config.k is not None:
        twists = [(config.k, apply_twist(s, p, config.k))]
    else:
        twists = select_irrational_twists(s, p)
    model = build_model(s) if config.realize else None

    entries = []
    for k, twisted in twists:
        plan = make_plan(s, p, k)
        entry = {
            'k': k,
            'plan': plan_to_json(plan),
            'splitting': splitting_to_json(twisted, mode),
            'irrational': is_irrational(twisted),
        }
        if model is not None:
            entry['realized'] = check_saddle_realization(model, s, plan)
        entries.append(entry)

    write_json_file(config.output_dir / FNAME_TWISTS, {
        'meta': _meta(config),
        'partners': partners_to_json(p),
        'twists': entries,
    })
    if model is not None and not all(entry['realized'] for entry in entries):
        logger.error('a twisted saddle connection is not realized on the polygon model')
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_tree(config: RunConfig) -> int:
    s, mode = load_splitting(config)
    tree = build_tree(s, config.depth, config.eps0, config.budget,
                      config.max_refinements, config.max_budget_doublings)
    return _finish_tree(config, tree, mode, write_tree=True)


def cmd_audit(config: RunConfig) -> int:
    if config.tree_file is not None:
        tree, mode = tree_from_json(load_json_file(config.tree_file), config.mode)
        return _finish_tree(config, tree, mode, write_tree=False)
    return cmd_tree(config)


def cmd_simulate(config: RunConfig) -> int:
    if config.fixture == 'square-torus':
        model = square_torus_model()
        region = config.region or 'C1'
        start = config.start or ('C1', (0.25, 0.5))
    else:
        s, _ = load_splitting(config)
        model = build_model(s)
        region = config.region or 'T1'
        start = config.start
    if region not in model.charts:
        raise ConfigurationError(f"region {region!r} is not a chart of the model: {sorted(model.charts)}")

    directions = list(config.directions)
    if config.directions_file is not None:
        directions.extend(tuple(d) for d in load_json_file(config.directions_file)['directions'])
    if not directions:
        raise ConfigurationError("simulate needs --direction or --directions-file")

    experiments = []
    rows = []
    for d in directions:
        summary = occupancy_experiment(model, d, config.horizon, config.samples, config.seed, region)
        data = summary.to_json()
        experiments.append({'direction': list(d), **data})
        rows.append([repr(float(d[0])), repr(float(d[1])), region, repr(data['mean']), repr(data['min']),
                     repr(data['max']), repr(data['std']), repr(data['area_fraction'])])
    write_csv_file(config.output_dir / FNAME_OCCUPANCY, OCCUPANCY_CSV_COLUMNS, rows)

    output = {'meta': _meta(config), 'model': model.to_json(), 'experiments': experiments}
    if start is not None:
        result = trace(model, start, directions[0], config.horizon, config.snap_tolerance,
                       config.closure_tolerance, record=True)
        output['trace'] = result.to_json()
        write_csv_file(config.output_dir / FNAME_TRAJECTORY, TRAJECTORY_CSV_COLUMNS,
                       ([repr(t), tag, repr(x), repr(y)] for t, tag, x, y in result.breakpoints))
        logger.info(f'trace from {start}: {result.termination.kind} at {result.elapsed}')
    write_json_file(config.output_dir / FNAME_SIMULATION, output)
    return EXIT_OK


def cmd_preset(config: RunConfig) -> int:
    s = PRESETS.build(config.name)
    mode = s.mode
    if config.mode == 'float':
        s, mode = splitting_from_json(splitting_to_json(s), 'float')
    write_json_file(config.output_dir / f'{config.name}.json', splitting_to_json(s, mode))
    return EXIT_OK


DISPATCH = {
    'validate': cmd_validate,
    'partners': cmd_partners,
    'twist': cmd_twist,
    'tree': cmd_tree,
    'audit': cmd_audit,
    'simulate': cmd_simulate,
    'preset': cmd_preset,
}


def run(config: RunConfig) -> int:
    """Run one command and map library failures to exit codes."""
    try:
        return DISPATCH[config.command](config)
    except (UnknownPreset, NotShipped, ConfigurationError, FileNotFoundError) as e:
        logger.error(f'{e}')
        return EXIT_USAGE
    except BudgetExhausted as e:
        logger.error(f'{e}')
        logger.error(e.hint)
        return EXIT_BUDGET
    except GuaranteeViolated as e:
        logger.error(f'{e}')
        return EXIT_GUARANTEE
    except (NumericalStall, NotRealizable, SlitWrapsThroughVertex) as e:
        logger.error(f'{e}')
        return EXIT_NUMERICAL
    except (SplittingError, ValueError, KeyError) as e:
        logger.error(f'invalid input: {e}')
        return EXIT_INVALID


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logger_root = setup_logging(args.log_level or LOG_LEVEL)

    try:
        main_config, budget_config = load_configuration(args)
    except (FileNotFoundError, ValueError) as e:
        logger.error(f'Failed to load configuration: {e}')
        return EXIT_USAGE

    # set to configuration file logging level if not set on the command line
    if not args.log_level:
        logger_root.setLevel(main_config.get('log_level', LOG_LEVEL))

    try:
        config = build_run_config(args, main_config, budget_config)
    except (ConfigurationError, FileNotFoundError) as e:
        logger.error(f'{e}')
        return EXIT_USAGE

    logger.info(f'running {config.command}')
    return run(config)


def fixsplit_main():
    sys.exit(main())


if __name__ == "__main__":
    fixsplit_main()

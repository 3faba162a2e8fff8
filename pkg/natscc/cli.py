from argparse import REMAINDER

from natscc.arg_parser import ArgParser
from natscc.color import Color
from natscc.errors import NsccError
from natscc.logger import get_logger


def common_arguments() -> dict:
    return {
        'config': {
            'short': 'c',
            'help': 'JSON run config. Default: bundled toy world',
        },
        'output': {
            'short': 'o',
            'help': 'output directory (overrides paths.output)',
        },
        'log_level': {
            'short': 'l',
            'help': 'log level. Default: info',
            'default': 'info',
        },
        'seed': {
            'short': 's',
            'help': 'Monte Carlo master seed',
            'type': int,
        },
        'draws': {
            'short': 'n',
            'help': 'Monte Carlo draw count',
            'type': int,
        },
        'workers': {
            'short': 'w',
            'help': 'Monte Carlo worker processes',
            'type': int,
        },
        'prtp': {
            'help': 'pure rate of time preference, replaces the preference grid',
            'type': float,
        },
        'rra': {
            'help': 'relative risk aversion, replaces the preference grid',
            'type': float,
        },
        'epsilon': {
            'short': 'e',
            'help': 'income elasticity of damages',
            'type': float,
        },
        'damage_fn': {
            'short': 'd',
            'help': 'damage mode: sectoral, bma or an aggregate form name',
        },
        'deterministic': {
            'short': 'D',
            'help': 'skip the Monte Carlo draws',
            'action': 'store_true',
        },
    }


def execute(args: dict, action) -> int:
    """Load the config with command line overrides, run action(reporter) and map errors to exit codes

    Args:
        args (dict): parsed arguments
        action (callable): receives a Reporter, returns bool

    Returns:
        int: exit code
    """
    log = get_logger('natscc', args.get('log_level'))
    try:
        from natscc.config import apply_overrides, load_config
        from natscc.reporting import Reporter
        config = apply_overrides(load_config(args.get('config')), seed=args.get('seed'), draws=args.get('draws'),
                                 workers=args.get('workers'), prtp=args.get('prtp'), rra=args.get('rra'),
                                 epsilon=args.get('epsilon'), damage_fn=args.get('damage_fn'),
                                 output=args.get('output'), deterministic=args.get('deterministic', False))
        return 0 if action(Reporter(config, log)) else 1
    except NsccError as error:
        log.error(str(error))
        Color().print_message(str(error), 'red')
        return error.exit_code
    except Exception:
        log.exception('Unexpected failure')
        return 4


def natscc_calibrate(parent_args: list = None):
    args = ArgParser('Calibrate national sector impacts to the regional benchmarks', parent_args,
                     common_arguments(), prog='natscc-calibrate').set_arguments()
    exit(execute(args, lambda reporter: reporter.calibrate()))


def natscc_run(parent_args: list = None):
    args = ArgParser('Simulate the baseline world to the horizon', parent_args, common_arguments(),
                     prog='natscc-run').set_arguments()
    exit(execute(args, lambda reporter: reporter.run()))


def natscc_scc(parent_args: list = None):
    args = ArgParser('National SCC per country and preference pair', parent_args, common_arguments(),
                     prog='natscc-scc').set_arguments()
    exit(execute(args, lambda reporter: reporter.scc()))


def natscc_montecarlo(parent_args: list = None):
    args = ArgParser('Monte Carlo national SCC with per-draw output', parent_args, common_arguments(),
                     prog='natscc-montecarlo').set_arguments()
    exit(execute(args, lambda reporter: reporter.montecarlo()))


def natscc_compare(parent_args: list = None):
    args = ArgParser('Global sum of national SCCs per damage function', parent_args, {
        **common_arguments(),
        'forms': {
            'short': 'f',
            'help': 'damage functions to compare. Default: all forms, bma and sectoral',
            'nargs': '+',
        },
    }, prog='natscc-compare').set_arguments()
    exit(execute(args, lambda reporter: reporter.compare_damage_functions(args.get('forms'))))


def natscc_diagnostics(parent_args: list = None):
    args = ArgParser('Correlations and income-elasticity sweep from scc results', parent_args, {
        **common_arguments(),
        'relative_change': {
            'short': 'r',
            'help': 'add the relative change between the first and last evaluation year',
            'action': 'store_true',
        },
        'epsilons': {
            'help': 'income elasticities to sweep. Default: 0 -0.36',
            'nargs': '+',
            'type': float,
        },
    }, prog='natscc-diagnostics').set_arguments()
    exit(execute(args, lambda reporter: reporter.diagnostics(args.get('relative_change'), args.get('epsilons'))))


COMMANDS = {
    'calibrate': natscc_calibrate,
    'run': natscc_run,
    'scc': natscc_scc,
    'montecarlo': natscc_montecarlo,
    'compare-damage-functions': natscc_compare,
    'diagnostics': natscc_diagnostics,
}


def natscc_parent():
    args = ArgParser('National Social Cost of Carbon', None, {
        'command': {
            'positional': True,
            'help': 'command to run',
            'choices': list(COMMANDS),
        },
        'args': {
            'positional': True,
            'help': 'command arguments (natscc <command> -h)',
            'nargs': REMAINDER,
        },
    }, prog='natscc').set_arguments()
    COMMANDS[args['command']](args['args'])

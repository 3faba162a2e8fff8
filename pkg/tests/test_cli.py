import json
import logging
from argparse import REMAINDER

import pandas as pd
import pytest

from conftest import _merge
from natscc.arg_parser import ArgParser
from natscc.cli import COMMANDS, common_arguments, execute, natscc_run, natscc_scc
from natscc.color import Color
from natscc.config import DATA_DIR, DEFAULT_CONFIG
from natscc.logger import get_logger


def write_config(directory, updates: dict = None, **paths):
    """Write the toy config with absolute input paths into directory"""
    raw = json.loads(DEFAULT_CONFIG.read_text())
    raw['paths'] = {name: str(DATA_DIR / value) for name, value in raw['paths'].items() if name != 'output'}
    raw['paths'].update({name: str(value) for name, value in paths.items()})
    raw['paths']['output'] = str(directory / 'out')
    raw['economy']['horizon'] = 2120
    raw['scc']['mode'] = 'deterministic'
    path = directory / 'config.json'
    path.write_text(json.dumps(_merge(raw, updates or {})))
    return path


def test_success_is_exit_zero(tmp_path):
    args = {'config': str(write_config(tmp_path)), 'log_level': 'warning'}
    assert execute(args, lambda reporter: reporter.run()) == 0
    assert (tmp_path / 'out' / 'trajectory.csv').is_file()


def test_false_action_is_exit_one(tmp_path):
    assert execute({'config': str(write_config(tmp_path))}, lambda reporter: False) == 1


def test_missing_config_is_exit_two(tmp_path, capsys):
    assert execute({'config': str(tmp_path / 'missing.json')}, lambda reporter: True) == 2
    assert 'Config file not found' in capsys.readouterr().out


def test_unknown_config_key_is_exit_two(tmp_path):
    path = write_config(tmp_path, {'economy': {'savings': 0.2}})
    assert execute({'config': str(path)}, lambda reporter: True) == 2


def test_calibration_failure_is_exit_three(tmp_path):
    benchmarks = pd.read_csv(DATA_DIR / 'benchmarks.csv')
    partial = tmp_path / 'benchmarks.csv'
    benchmarks[benchmarks['sector'] != 'cooling'].to_csv(partial, index=False)
    path = write_config(tmp_path, benchmarks=partial)
    assert execute({'config': str(path)}, lambda reporter: reporter.calibrate()) == 3


def test_engine_failure_is_exit_four(tmp_path):
    path = write_config(tmp_path, {'damage': {'mode': 'nordhaus', 'coefficient_scale': 400.0}})
    assert execute({'config': str(path)}, lambda reporter: reporter.run()) == 4


def test_unexpected_failure_is_exit_four(tmp_path, caplog):
    def broken(reporter):
        raise RuntimeError('boom')
    assert execute({'config': str(write_config(tmp_path))}, broken) == 4
    assert 'Unexpected failure' in caplog.text


def test_command_line_overrides(tmp_path):
    seen = {}

    def capture(reporter):
        seen['config'] = reporter.config
        return True
    args = {'config': str(write_config(tmp_path)), 'seed': 7, 'draws': 3, 'prtp': 0.02, 'damage_fn': 'hope',
            'epsilon': -0.36, 'output': str(tmp_path / 'elsewhere')}
    assert execute(args, capture) == 0
    config = seen['config']
    assert config.uncertainty.seed == 7
    assert config.uncertainty.draws == 3
    assert [(pref.prtp, pref.rra) for pref in config.scc.preferences] == [(0.02, 1.0)]
    assert config.damage.mode == 'hope'
    assert config.damage.income_elasticity == -0.36
    assert config.output_dir == tmp_path / 'elsewhere'


def test_argument_names():
    args = ArgParser('test', ['--damage-fn', 'bma', '-D', '-n', '12', '--log-level', 'debug'],
                     common_arguments()).set_arguments()
    assert args['damage_fn'] == 'bma'
    assert args['deterministic'] is True
    assert args['draws'] == 12
    assert args['log_level'] == 'debug'
    assert args['config'] is None


def test_positional_arguments():
    args = ArgParser('test', ['scc', '-n', '5'], {
        'command': {'positional': True, 'short': 'c', 'choices': ['scc']},
        'args': {'positional': True, 'nargs': REMAINDER},
    }).set_arguments()
    assert args['command'] == 'scc'
    assert args['args'] == ['-n', '5']


def test_run_command_exits_with_code(tmp_path):
    with pytest.raises(SystemExit) as exit_info:
        natscc_run(['-c', str(write_config(tmp_path)), '-l', 'warning'])
    assert exit_info.value.code == 0


def test_scc_command_reports_config_errors(tmp_path):
    with pytest.raises(SystemExit) as exit_info:
        natscc_scc(['-c', str(tmp_path / 'missing.json')])
    assert exit_info.value.code == 2


def test_bad_flag_is_an_argparse_error():
    with pytest.raises(SystemExit) as exit_info:
        natscc_run(['--horizon', '2100'])
    assert exit_info.value.code == 2


def test_command_table():
    assert list(COMMANDS) == ['calibrate', 'run', 'scc', 'montecarlo', 'compare-damage-functions', 'diagnostics']


def test_color_table_output(capsys):
    Color().print_table([['USA', 1.23456789]], ['iso', 'nscc'])
    out = capsys.readouterr().out
    assert 'USA' in out
    assert 'nscc' in out


def test_unknown_color_is_plain_text():
    assert Color().format_message('plain', 'orange') == 'plain'


def test_logger_is_created_once(tmp_path):
    log = get_logger('natscc-test-once', 'debug', str(tmp_path))
    assert get_logger('natscc-test-once') is log
    assert len(log.handlers) == 2
    assert log.level == logging.DEBUG
    assert (tmp_path / 'natscc-test-once.log').is_file()


def test_logger_level_changes_only_when_given(tmp_path):
    log = get_logger('natscc-test-level', 'warning', str(tmp_path))
    get_logger('natscc-test-level')
    assert log.level == logging.WARNING
    get_logger('natscc-test-level', 'error')
    assert log.level == logging.ERROR
    assert all(handler.level == logging.ERROR for handler in log.handlers)

import json

import pytest

from src.main import main, parse_args, run

SMALL = ['--n-list', '4,8,16', '--fine-steps', '256', '--reps', '128']


def test_parse_rate_command():
    cmd = parse_args(['rate', '--s', '0.75', '--n-list', '16,32,64', '--reps', '1000', '--seed', '7'])
    assert cmd.verb == 'rate'
    assert cmd.config.s == 0.75
    assert cmd.config.n_list == [16, 32, 64]
    assert cmd.config.reps == 1000
    assert cmd.config.seed == 7


def test_seed_always_resolves():
    assert parse_args(['kappa']).config.seed == 42


@pytest.mark.parametrize('argv', [
    [],
    ['rate', '--s', '1.2'],
    ['rate', '--n-list', '4,eight'],
    ['rate', '--bogus'],
    ['dance'],
    ['occupation', '--deltas', '0,0.5'],
    ['rate', '--workers', '0'],
    ['couple', '--n-list', '4,8,16', '--fine-steps', '128'],
    ['kappa', '--fine-steps', '128'],
    ['couple', '--p', '3'],
])
def test_usage_errors_exit_with_two(argv, capsys):
    with pytest.raises(SystemExit) as info:
        parse_args(argv)
    assert info.value.code == 2


def test_s_error_cites_the_interval(capsys):
    with pytest.raises(SystemExit):
        parse_args(['rate', '--s', '1.2'])
    assert '(1/2, 1)' in capsys.readouterr().err


def test_flags_override_config_file(tmp_path):
    path = tmp_path / 'sweep.json'
    path.write_text(json.dumps({'reps': 300, 'seed': 5, 'drift': 'hat'}))
    cmd = parse_args(['rate', '--config', str(path), '--seed', '8'])
    assert cmd.config.reps == 300
    assert cmd.config.seed == 8
    assert cmd.config.drift == 'hat'
    assert cmd.config_path == str(path)


def test_rate_with_zero_drift_is_exact(tmp_path, capsys):
    out = tmp_path / 'zero'
    status = run(parse_args(['rate', '--drift', 'zero', '--out', str(out)] + SMALL))
    assert status == 0
    assert 'exact (errors all zero)' in capsys.readouterr().out
    assert (tmp_path / 'zero.csv').read_text().splitlines()[0] == 'n,error,stderr,reps'
    report = json.loads((tmp_path / 'zero.json').read_text())
    assert report['verb'] == 'rate'
    assert report['result']['exact'] is True
    assert (tmp_path / 'zero.meta.json').exists()


def test_reports_are_byte_identical_across_runs(tmp_path):
    out = tmp_path / 'det'
    outputs = []
    for workers in ('1', '2'):
        argv = ['couple', '--drift', 'indicator', '--out', str(out), '--workers', workers]
        assert run(parse_args(argv + SMALL)) == 0
        outputs.append([(tmp_path / ('det' + suffix)).read_bytes() for suffix in ('.csv', '.json')])
    assert outputs[0] == outputs[1]


def test_report_config_round_trips(tmp_path):
    out = tmp_path / 'first'
    assert run(parse_args(['rate', '--drift', 'hat', '--out', str(out)] + SMALL)) == 0
    replay = parse_args(['rate', '--config', str(tmp_path / 'first.json')])
    original = json.loads((tmp_path / 'first.json').read_text())['config']
    assert replay.config.to_dict() == original


def test_unwritable_output_exits_with_two(tmp_path):
    out = tmp_path / 'missing' / 'report'
    assert run(parse_args(['rate', '--drift', 'zero', '--out', str(out)] + SMALL)) == 2


def test_experiment_failure_exits_with_one(tmp_path, capsys):
    out = tmp_path / 'const'
    status = run(parse_args(['transform-check', '--drift', 'constant=1', '--out', str(out)] + SMALL))
    assert status == 1
    assert 'infinite L1 norm' in capsys.readouterr().out


def test_abort_threshold_exits_with_one(tmp_path, monkeypatch):
    monkeypatch.setenv('SDLAB_ABORT_FRACTION', '0')
    out = tmp_path / 'abort'
    assert run(parse_args(['rate', '--x-max', '0.5', '--out', str(out)] + SMALL)) == 1


def test_kappa_summary(tmp_path, capsys):
    out = tmp_path / 'kappa'
    status = run(parse_args(['kappa', '--reps', '400', '--fine-steps', '1024', '--out', str(out),
                             '--format', 'csv']))
    assert status == 0
    printed = capsys.readouterr().out
    assert 'quadrature' in printed and 'Monte Carlo' in printed
    assert (tmp_path / 'kappa.csv').exists()
    assert not (tmp_path / 'kappa.json').exists()


def test_occupation_with_plot(tmp_path):
    out = tmp_path / 'occ'
    argv = ['occupation', '--drift', 'indicator', '--reps', '200', '--out', str(out), '--plot']
    assert run(parse_args(argv)) == 0
    assert (tmp_path / 'occ.html').exists()


def test_sobolev_command(tmp_path, capsys):
    out = tmp_path / 'sob'
    argv = ['sobolev', '--drift', 'hat', '--mesh', '16', '--cutoffs', '10,1000', '--out', str(out)]
    assert run(parse_args(argv)) == 0
    assert 'sobolev check passed' in capsys.readouterr().out
    assert (tmp_path / 'sob.csv').read_text().startswith('mesh,seminorm,band_bound')


def test_main_exits_with_run_status(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(['rate', '--drift', 'zero', '--out', str(tmp_path / 'm')] + SMALL)
    assert info.value.code == 0


def test_kappa_does_not_need_the_rate_grid():
    cmd = parse_args(['kappa', '--n-list', '4,8,128', '--fine-steps', '1024'])
    assert cmd.config.fine_steps == 1024

import json
import os
import pandas as pd
import pytest
from absl import flags
from kou_pide import PRICE_COLUMNS, MC_COLUMNS, BENCH_COLUMNS, CONVERGENCE_COLUMNS, GREEK_ERROR_COLUMNS, \
    STABILITY_COLUMNS, SURFACE_COLUMNS, GREEK_SURFACE_COLUMNS, PRICE_STR
from kou_pide import cli
from kou_pide.bin import load_run_config, run_program, ARGS_FILE, CONFIG_FILE
from kou_pide.cli import EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, cmd_price, cmd_converge, cmd_greeks, cmd_stability, \
    cmd_mc, cmd_bench_integral
from kou_pide.config import RunConfig
from kou_pide.errors import BoundViolation
from kou_pide.stability import BoundReport
from kou_pide.util.logging import remove_log_handlers

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, 'config')


def _small_config(tmp_path, **kwargs):
    args = dict(m1=10, m2=10, n=4, spots=[(100., 100.)], linear_solver='direct', threads=1, output=str(tmp_path),
                cache_dir=str(tmp_path / 'cache'))
    args.update(kwargs)
    return RunConfig(**args)


def _read(tmp_path, file_name):
    return pd.read_csv(os.path.join(str(tmp_path), file_name))


def test_price(tmp_path, capsys):
    assert cmd_price(_small_config(tmp_path, surface=True)) == EXIT_OK
    df = _read(tmp_path, cli.PRICES_FILE)
    assert list(df.columns) == PRICE_COLUMNS and len(df) == 1
    assert 2.5 < df[PRICE_STR][0] < 5.
    assert df['Nprime'][0] == 6 and df['scheme'][0] == 'MCS2'
    assert list(_read(tmp_path, cli.SURFACE_FILE).columns) == SURFACE_COLUMNS
    assert 'set1 MCS2 (100, 100):' in capsys.readouterr().out


def test_price_invalid_config(tmp_path):
    assert cmd_price(_small_config(tmp_path, scheme='euler')) == EXIT_VALIDATION
    assert cmd_price(_small_config(tmp_path, spots=[(-1., 100.)])) == EXIT_VALIDATION


def test_price_solver_failure(tmp_path):
    config = _small_config(tmp_path, scheme='cnfe', linear_solver='bicgstab', tol=1e-30, max_iter=1)
    assert cmd_price(config) == EXIT_SOLVER


def test_converge(tmp_path):
    config = _small_config(tmp_path, schemes=['mcs', 'ietr'], ns=[2, 4], reference_steps=10)
    assert cmd_converge(config) == EXIT_OK
    df = _read(tmp_path, cli.CONVERGENCE_FILE)
    assert list(df.columns) == CONVERGENCE_COLUMNS and len(df) == 4


def test_theta_applies_to_all_adi_schemes(tmp_path, monkeypatch):
    config = _small_config(tmp_path, theta=0.5, schemes=['MCS', 'mcs2', 'cnfe', 'sc2a']).validate()
    expected = {'mcs': 0.5, 'mcs2': 0.5, 'sc2a': 0.5}
    assert cli.study_thetas(config) == expected
    assert cli.study_thetas(_small_config(tmp_path).validate()) is None

    captured = {}

    def _study(*args, **kwargs):
        captured['thetas'] = args[6]
        return pd.DataFrame(columns=CONVERGENCE_COLUMNS)

    monkeypatch.setattr(cli, 'convergence_study', _study)
    assert cmd_converge(config) == EXIT_OK
    assert captured['thetas'] == expected


def test_greeks(tmp_path):
    config = _small_config(tmp_path, n=2, greek_errors=True, schemes=['mcs2'], ns=[2], reference_steps=6)
    assert cmd_greeks(config) == EXIT_OK
    assert list(_read(tmp_path, cli.GREEKS_FILE).columns) == GREEK_SURFACE_COLUMNS
    df = _read(tmp_path, cli.GREEK_ERRORS_FILE)
    assert list(df.columns) == GREEK_ERROR_COLUMNS and len(df) == 5


def test_greeks_without_error_study(tmp_path):
    assert cmd_greeks(_small_config(tmp_path, n=2)) == EXIT_OK
    assert not os.path.exists(os.path.join(str(tmp_path), cli.GREEK_ERRORS_FILE))


def test_stability(tmp_path):
    config = _small_config(tmp_path, parts=['1a', '2a', '3b'], samples=100, n_max=10)
    assert cmd_stability(config) == EXIT_OK
    df = _read(tmp_path, cli.STABILITY_FILE)
    assert list(df.columns) == STABILITY_COLUMNS and df['passed'].all()


def test_stability_violation_exit_status(tmp_path, monkeypatch):
    violation = BoundViolation('2a', 0j, -1 + 0j, -1 + 0j, 0.1 + 0j, 3, 1.5)
    monkeypatch.setattr(cli, 'verify_bounds', lambda *args, **kwargs: BoundReport('mcs', '2a', 1, 1.5, [violation]))
    assert cmd_stability(_small_config(tmp_path, parts=['2a'])) == EXIT_SOLVER
    assert not _read(tmp_path, cli.STABILITY_FILE)['passed'].any()


def test_mc(tmp_path, capsys):
    config = _small_config(tmp_path, spots=[(100., 100.), (90., 110.)], paths=2000, seed=3)
    assert cmd_mc(config) == EXIT_OK
    df = _read(tmp_path, cli.MC_FILE)
    assert list(df.columns) == MC_COLUMNS and len(df) == 2
    assert (df['paths'] == 2000).all()
    assert '+-' in capsys.readouterr().out


def test_mc_zero_spot(tmp_path):
    assert cmd_mc(_small_config(tmp_path, spots=[(0., 100.)], paths=100)) == EXIT_VALIDATION


def test_bench_integral(tmp_path):
    assert cmd_bench_integral(_small_config(tmp_path, bench_ms=[4, 8], repeats=1)) == EXIT_OK
    df = _read(tmp_path, cli.BENCH_FILE)
    assert list(df.columns) == BENCH_COLUMNS and list(df['m']) == [4, 8]


@pytest.fixture
def parse_flags():
    def _parse(*argv):
        flags.FLAGS.unparse_flags()
        flags.FLAGS(['prog'] + list(argv))
        return flags.FLAGS

    yield _parse
    flags.FLAGS.unparse_flags()
    remove_log_handlers()


def test_flags_override_defaults(parse_flags):
    args = parse_flags('--set=2', '--m=50', '--spot=90,100', '--spot=110,110', '--schemes=mcs,cnfe', '--ns=10,20',
                       '--log_level=2', '--antithetic')
    config = load_run_config(args).validate()
    assert config.param_set == 'set2'
    assert config.m1 == config.m2 == 50
    assert config.spots == [(90., 100.), (110., 110.)]
    assert config.schemes == ['mcs', 'cnfe'] and config.ns == [10, 20]
    assert config.log_level == 10 and config.antithetic


def test_flags_override_config_file(parse_flags):
    args = parse_flags(f'--config={os.path.join(CONFIG_DIR, "set3.json")}', '--n=10', '--m1=30')
    config = load_run_config(args)
    assert config.param_set == 'set3' and config.n == 10 and config.m1 == 30 and config.m2 == 400
    assert config.output == 'output/set3'


def test_missing_config_file(parse_flags, tmp_path):
    args = parse_flags(f'--config={tmp_path / "none.json"}')
    with pytest.raises(ValueError):
        load_run_config(args)


def test_run_program(parse_flags, tmp_path):
    out_dir = str(tmp_path / 'price')
    parse_flags(f'--output={out_dir}', '--m=8', '--n=2', '--spot=100,100', '--linear_solver=direct', '--log_level=1',
                '--clear')
    assert run_program(cmd_price, 'price') == EXIT_OK
    for file_name in (ARGS_FILE, CONFIG_FILE, 'price.log', cli.PRICES_FILE):
        assert os.path.isfile(os.path.join(out_dir, file_name))
    with open(os.path.join(out_dir, ARGS_FILE)) as fp:
        saved = json.load(fp)
    assert saved['m'] == 8 and saved['spot'] == ['100,100'] and 'verbosity' not in saved
    assert RunConfig.load_json(os.path.join(out_dir, CONFIG_FILE)).m1 == 8

import logging
import os
import numpy as np
import pandas as pd
import pytest
from kou_pide.util.cmd_line import str2bool, str2log_level, str2spot, str2int_list, save_args
from kou_pide.util.data import records_to_frame, save_csv
from kou_pide.util.io import CACHE_DIR_ENV, create_clear_dir, save_object, load_object, get_cache_dir
from kou_pide.util.logging import change_log_handler, remove_log_handlers
from kou_pide.util.math import convergence_slope, log_uniform, max_row_sum_norm
from kou_pide.util.mp import run_parallel, num_processes


def _square_sum(a, b):
    return a * a + b


def test_str2bool():
    assert str2bool('yes') and str2bool(True) and not str2bool('0')
    with pytest.raises(ValueError):
        str2bool('maybe')


@pytest.mark.parametrize('value,level', [('0', logging.WARN), (1, logging.INFO), ('2', logging.DEBUG),
                                         ('error', logging.ERROR), (35, 35)])
def test_str2log_level(value, level):
    assert str2log_level(value) == level


def test_str2log_level_invalid():
    with pytest.raises(ValueError):
        str2log_level('loud')


def test_str2spot():
    assert str2spot('90, 110') == (90., 110.)
    assert str2spot([100, 100]) == (100., 100.)
    with pytest.raises(ValueError):
        str2spot('100')


def test_str2int_list():
    assert str2int_list('20,40, 80') == [20, 40, 80]
    assert str2int_list(['1', 2]) == [1, 2]


def test_convergence_slope():
    ns = np.array([20, 40, 80, 160])
    assert convergence_slope(ns, 3. * ns ** -2.) == pytest.approx(2.)
    with pytest.raises(ValueError):
        convergence_slope(ns, np.array([1., 0., 1., 1.]))


def test_log_uniform(rng):
    x = log_uniform(rng, 1e-3, 1e3, 10000)
    assert np.all((x >= 1e-3) & (x <= 1e3))
    assert np.mean(x < 1.) == pytest.approx(0.5, abs=0.03)


def test_max_row_sum_norm():
    a = np.array([[[1., -2.], [0.5, 0.5]], [[0., 0.], [3j, 4.]]])
    np.testing.assert_allclose(max_row_sum_norm(a), [3., 7.])


def test_num_processes():
    assert num_processes(None) == 1
    assert num_processes(3) == 3
    assert num_processes(-1) == (os.cpu_count() or 1)


@pytest.mark.parametrize('processes', [1, 2])
def test_run_parallel_keeps_order(processes):
    args = [(i, 1) for i in range(6)]
    assert run_parallel(_square_sum, args, processes=processes, use_tqdm=False) == [i * i + 1 for i in range(6)]
    assert run_parallel(_square_sum, [], processes=processes) == []


def test_save_csv_exact_floats(tmp_path):
    df = records_to_frame([{'b': 0.1 + 0.2, 'a': 1}, {'a': 2, 'b': np.pi}], ['a', 'b'])
    assert list(df.columns) == ['a', 'b']
    file_path = str(tmp_path / 'out.csv')
    save_csv(df, file_path, ['b'])
    loaded = pd.read_csv(file_path, float_precision='round_trip')
    assert list(loaded.columns) == ['b']
    assert loaded['b'][0] == 0.1 + 0.2 and loaded['b'][1] == np.pi
    with open(file_path, 'rb') as fp:
        assert b'\r\n' not in fp.read()


def test_objects_and_dirs(tmp_path):
    out_dir = str(tmp_path / 'a')
    create_clear_dir(out_dir)
    file_path = os.path.join(out_dir, 'obj.pkl.gz')
    save_object({'x': np.arange(3)}, file_path)
    np.testing.assert_array_equal(load_object(file_path)['x'], np.arange(3))
    create_clear_dir(out_dir, clear=True)
    assert os.listdir(out_dir) == []


def test_cache_dir_environment(tmp_path, monkeypatch):
    assert get_cache_dir(str(tmp_path / 'given')) == str(tmp_path / 'given')
    monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path / 'env'))
    assert get_cache_dir(str(tmp_path / 'given')) == str(tmp_path / 'env')
    assert os.path.isdir(str(tmp_path / 'env'))


def test_change_log_handler(tmp_path):
    log_file = str(tmp_path / 'run.log')
    change_log_handler(log_file, logging.INFO, console=False)
    logging.debug('hidden')
    logging.info('visible')
    remove_log_handlers()
    with open(log_file) as fp:
        text = fp.read()
    assert 'visible' in text and 'hidden' not in text


def test_save_args(tmp_path):
    file_path = str(tmp_path / 'args.json')
    save_args({'m': np.int64(5), 'ns': [1, 2]}, file_path)
    assert os.path.isfile(file_path)

import json
import os
import pytest
from kou_pide.config import RunConfig
from kou_pide.errors import ValidationError
from kou_pide.model import TABLE_SPOTS

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, 'config')


def test_defaults_are_valid():
    config = RunConfig().validate()
    assert config.param_set == 'set1' and config.scheme == 'mcs2'
    assert len(config.spots) == len(TABLE_SPOTS) ** 2
    assert config.scheme_spec().steps == 300


def test_labels_are_normalized():
    config = RunConfig(param_set='2', scheme='MCS', schemes=['CNFE', 'sc2a']).validate()
    assert config.param_set == 'set2' and config.scheme == 'mcs' and config.schemes == ['cnfe', 'sc2a']


def test_param_overrides():
    config = RunConfig(param_overrides={'lam': 0., 'rho': -0.2})
    params = config.params()
    assert params.lam == 0. and params.rho == -0.2 and params.sigma1 == 0.12
    with pytest.raises(ValidationError):
        RunConfig(param_overrides={'rho': 2.}).validate()


@pytest.mark.parametrize('kwargs', [
    dict(param_set='set9'), dict(scheme='euler'), dict(m1=1), dict(d=0.), dict(n=0), dict(theta=-0.5), dict(l=0),
    dict(tol=0.), dict(ilu_fill=0.5), dict(linear_solver='gmres'), dict(spots=[(100., 5000.)]), dict(ns=[]),
    dict(reference_steps=0), dict(parts=['1a', '9z']), dict(samples=0), dict(gamma=0.), dict(paths=0),
    dict(paths=11, antithetic=True), dict(bench_ms=[1]), dict(repeats=0), dict(schemes=['mcs', 'rk4'])])
def test_invalid(kwargs):
    with pytest.raises(ValidationError):
        RunConfig(**kwargs).validate()


def test_json_round_trip(tmp_path):
    config = RunConfig(param_set='set3', m1=50, m2=60, spots=[(90., 110.)], schemes=['mcs'], antithetic=True,
                       param_overrides={'lam': 4.})
    file_path = str(tmp_path / 'config.json')
    config.save_json(file_path)
    with open(file_path) as fp:
        assert json.load(fp)['spots'] == [[90., 110.]]
    loaded = RunConfig.load_json(file_path)
    assert vars(loaded) == vars(config)
    assert config.spots == [(90., 110.)]


def test_load_fills_missing_fields(tmp_path):
    file_path = str(tmp_path / 'partial.json')
    with open(file_path, 'w') as fp:
        json.dump({'py/object': 'kou_pide.config.RunConfig', 'm1': 50, 'spots': [[100, 100]]}, fp)
    config = RunConfig.load_json(file_path)
    assert config.m1 == 50 and config.m2 == 400 and config.scheme == 'mcs2'
    assert config.spots == [(100., 100.)]
    config.validate()


def test_load_rejects_other_objects(tmp_path):
    file_path = str(tmp_path / 'list.json')
    with open(file_path, 'w') as fp:
        json.dump([1, 2], fp)
    with pytest.raises(ValidationError):
        RunConfig.load_json(file_path)


@pytest.mark.parametrize('label', ['set1', 'set2', 'set3'])
def test_shipped_configs(label):
    config = RunConfig.load_json(os.path.join(CONFIG_DIR, f'{label}.json')).validate()
    assert config.param_set == label
    assert config.output.endswith(label)

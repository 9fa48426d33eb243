import gzip
import json
import os
import pickle
import shutil
import numpy as np
from typing import Dict, Optional

CACHE_DIR_ENV = 'KOU_PIDE_CACHE'
DEFAULT_CACHE_DIR = os.path.join(os.path.expanduser('~'), '.cache', 'kou_pide')


class _NpEncoder(json.JSONEncoder):
    """
    Supports encoding of numpy data types.
    See: https://stackoverflow.com/a/57915246/16031961
    """

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return super().default(obj)


def create_clear_dir(dir_path: str, clear: bool = False):
    """
    Creates a directory in the given path. If it exists, optionally clears the directory.
    :param str dir_path: the path to the directory to create/clear.
    :param bool clear: whether to clear the directory if it exists.
    """
    if clear and os.path.exists(dir_path):
        shutil.rmtree(dir_path)
    os.makedirs(dir_path, exist_ok=True)


def save_dict_json(dictionary: Dict, file_path: str):
    """
    Saves a dictionary as indented JSON, converting numpy scalars and arrays.
    :param dict dictionary: the dictionary to save.
    :param str file_path: the JSON file.
    """
    with open(file_path, 'w') as fp:
        json.dump(dictionary, fp, indent=4, cls=_NpEncoder)


def save_object(obj, file_path: str, compress_gzip: bool = True):
    """
    Pickles an object, e.g., a cached reference solution, writing to a temporary file first.
    :param obj: the object to pickle.
    :param str file_path: the destination file.
    :param bool compress_gzip: whether to gzip the pickle.
    """
    tmp_path = f'{file_path}.{os.getpid()}.tmp'
    with gzip.open(tmp_path, 'wb') if compress_gzip else open(tmp_path, 'wb') as file:
        pickle.dump(obj, file, protocol=pickle.HIGHEST_PROTOCOL)
    os.replace(tmp_path, file_path)  # concurrent studies may write the same file


def load_object(file_path: str):
    """
    Unpickles an object saved by `save_object`, gzipped or not.
    :param str file_path: the pickle file.
    :return: the unpickled object.
    """
    try:
        with gzip.open(file_path, 'rb') as file:
            return pickle.load(file)
    except OSError:
        with open(file_path, 'rb') as file:
            return pickle.load(file)


def get_cache_dir(cache_dir: Optional[str] = None) -> str:
    """
    Gets the directory where expensive reference solutions are cached, creating it if needed. The environment variable
    `KOU_PIDE_CACHE` takes precedence over the given directory.
    :param str cache_dir: the cache directory to use when the environment variable is not set.
    :rtype: str
    :return: the path to the cache directory.
    """
    cache_dir = os.environ.get(CACHE_DIR_ENV) or cache_dir or DEFAULT_CACHE_DIR
    create_clear_dir(cache_dir)
    return cache_dir

import logging
from enum import IntEnum
from typing import List, Tuple, Union, Iterable
from .io import save_dict_json


def save_args(args: dict, file_path: str):
    """
    Saves the given program arguments to a json file.
    :param dict args: the arguments to save, e.g., `{k: FLAGS[k].value for k in FLAGS}`.
    :param str file_path: the path to the json file where to save the arguments.
    """
    args = {k: v.name if isinstance(v, IntEnum) else v for k, v in args.items()}
    save_dict_json(args, file_path)


def str2bool(v: Union[str, bool]) -> bool:
    """
    Converts the given string to a boolean value.
    :param str v: the argument value to be converted.
    :rtype: bool
    :return: the boolean value corresponding to the given argument.
    """
    if isinstance(v, bool):
        return v
    if v.lower() in ('yes', 'true', 't', 'y', '1'):
        return True
    if v.lower() in ('no', 'false', 'f', 'n', '0'):
        return False
    raise ValueError(f'Boolean value expected, got: {v}')


def str2log_level(v: Union[str, int]) -> int:
    """
    Converts the given string to a logging level value. Can either be 0, 1, or 2, corresponding to logging levels
    `WARN`, `INFO` or `DEBUG`, respectively, the string values of correct log levels, or an int representing a custom
    log level.
    :param str or int v: the argument value to be converted.
    :rtype: int
    :return: the log level corresponding to the given argument.
    """
    try:
        v = int(v)
    except ValueError:
        pass
    if isinstance(v, str):
        v = logging.getLevelName(v.upper())
        if isinstance(v, int):
            return v
    if isinstance(v, int):
        return logging.WARN if v == 0 else logging.INFO if v == 1 else logging.DEBUG if v == 2 else v

    raise ValueError(f'Valid log level expected, got: {v}')


def str2spot(v: Union[str, Iterable[float]]) -> Tuple[float, float]:
    """
    Converts a string of the form `s1,s2` into a pair of asset prices.
    :param str v: the string to be converted, or an already parsed pair.
    :rtype: tuple[float, float]
    :return: the spot prices of the two assets.
    """
    if not isinstance(v, str):
        s1, s2 = v
        return float(s1), float(s2)
    parts = [p for p in v.replace(' ', '').split(',') if p != '']
    if len(parts) != 2:
        raise ValueError(f'Spot has to be given as "s1,s2", got: {v}')
    return float(parts[0]), float(parts[1])


def str2int_list(v: Union[str, Iterable[int]]) -> List[int]:
    """
    Converts a comma-separated string of integers into a list.
    :param str v: the string to be converted, e.g., `20,40,80`, or an already parsed iterable.
    :rtype: list[int]
    :return: the list of integers.
    """
    if isinstance(v, str):
        return [int(p) for p in v.replace(' ', '').split(',') if p != '']
    return [int(p) for p in v]

import logging
import pandas as pd
from typing import List, Dict, Sequence, Optional

CSV_FLOAT_FORMAT = '%.17g'


def records_to_frame(records: List[Dict], columns: Sequence[str]) -> pd.DataFrame:
    """
    Creates a dataframe from the given records with a fixed column order.
    :param list[dict] records: the records, one dictionary per row.
    :param list[str] columns: the columns, in the order in which they are to appear.
    :rtype: pd.DataFrame
    :return: the dataframe with the records.
    """
    df = pd.DataFrame.from_records(records, columns=list(columns))
    return df[list(columns)]


def save_csv(df: pd.DataFrame, file_path: str, columns: Optional[Sequence[str]] = None):
    """
    Saves the given dataframe to a CSV file with a header row and floats printed with 17 significant digits, such that
    values round-trip exactly.
    :param pd.DataFrame df: the dataframe to be saved.
    :param str file_path: the path to the CSV file.
    :param list[str] columns: the columns to save, in order. If `None`, all columns are saved.
    """
    if columns is not None:
        df = df[list(columns)]
    df.to_csv(file_path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logging.info(f'Saved {len(df)} records to:\n\t{file_path}')

import json
from contextlib import contextmanager
from logging import Logger
from pathlib import Path
from time import perf_counter

import pandas as pd

from natscc.color import Color
from natscc.config import RunConfig, load_config
from natscc.errors import ConfigError
from natscc.logger import get_logger


class NsccUtils():
    def __init__(self, config: RunConfig = None, logger: Logger = None):
        self.log = logger or get_logger('natscc')
        self.config = config or load_config()
        self.timings = {}

    @property
    def output_dir(self) -> Path:
        output = self.config.output_dir
        output.mkdir(parents=True, exist_ok=True)
        return output

    @staticmethod
    def display_successful(msg: str):
        Color().print_message(msg, 'green')

    @staticmethod
    def display_failed(msg: str):
        Color().print_message(msg, 'red')

    @contextmanager
    def timed(self, label: str):
        """Log and record the wall time of a block

        Args:
            label (str): name recorded in self.timings
        """
        start = perf_counter()
        try:
            yield
        finally:
            self.timings[label] = round(perf_counter() - start, 3)
            self.log.info('%s finished in %.3f s', label, self.timings[label])

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        """Write a frame to the output directory with round-trip float precision

        Args:
            frame (pd.DataFrame): data to write
            name (str): file name

        Returns:
            Path: written file
        """
        path = self.output_dir / name
        frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
        self.log.debug('Wrote %s', path)
        return path

    def write_json(self, data: dict, name: str) -> Path:
        path = self.output_dir / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + '\n')
        self.log.debug('Wrote %s', path)
        return path

    def read_csv(self, name: str) -> pd.DataFrame:
        """Read a result file written by an earlier command

        Raises:
            ConfigError: the file does not exist
        """
        path = self.config.output_dir / name
        if not path.is_file():
            raise ConfigError(f'Missing result file {path}, run the scc command first')
        return pd.read_csv(path, dtype={'iso': str})

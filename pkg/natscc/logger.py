import logging
from pathlib import Path
from time import gmtime


LOG_FORMAT = '[%(asctime)s][%(levelname)s][%(module)s,%(lineno)d]: %(message)s'
LOG_DIR = Path(__file__).parent / 'logs'


def _log_mapping(level: str) -> int:
    """Level name (any case) to logging level, INFO for unknown names"""
    # getLevelNamesMapping is 3.11+; on 3.10 read the same table it copies
    mapping = logging.getLevelNamesMapping() if hasattr(logging, 'getLevelNamesMapping') \
        else dict(logging._nameToLevel)
    return mapping.get(str(level).upper(), logging.INFO)


def _add_file_handler(logger: logging.Logger, log_file: Path, formatter: logging.Formatter) -> bool:
    """Attach <log_dir>/<name>.log. The CLI and the Monte Carlo workers of one run share the file.

    Args:
        logger (logging.Logger): logger to attach to
        log_file (Path): log file path, its directory is created when missing
        formatter (logging.Formatter): record formatter

    Returns:
        bool: False when the directory or the file cannot be created
    """
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_file)
    except OSError as error:
        print(f'Failed to create log file {log_file}: {error}')
        return False
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    return True


def get_logger(name: str = 'natscc', level: str = None, dir_name: str = '') -> logging.Logger:
    """Get the named logger, creating its console and file handlers on first use. An existing logger keeps its level
    unless one is given, so a --log-level from the command line sticks for the whole run.

    Args:
        name (str, optional): logger and log file name. Defaults to 'natscc'.
        level (str, optional): level name. Defaults to None (info for a new logger).
        dir_name (str, optional): log directory. Defaults to '' (natscc/logs).

    Returns:
        logging.Logger: the logger
    """
    logger = logging.getLogger(name)
    if logger.handlers and level is None:
        return logger
    level = _log_mapping(level or 'info')
    logger.setLevel(level)
    if not logger.handlers:
        formatter = logging.Formatter(LOG_FORMAT)
        formatter.converter = gmtime
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)
        _add_file_handler(logger, (Path(dir_name) if dir_name else LOG_DIR) / f'{name}.log', formatter)
    for handler in logger.handlers:
        handler.setLevel(level)
    return logger

from concurrent.futures import ThreadPoolExecutor
import logging
import sys


LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


class StderrLogger(logging.StreamHandler):
    def __init__(self):
        super().__init__(sys.stderr)
        self.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))


def configure_logging(level="WARNING"):
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, StderrLogger):
            root.removeHandler(handler)
    root.addHandler(StderrLogger())
    root.setLevel(getattr(logging, str(level).upper(), logging.WARNING))


def run_tasks(function, items, workers=1, message=None):
    """Apply ``function`` to every item, in a thread pool when ``workers > 1``. Order is kept."""
    items = list(items)
    if message:
        logging.debug(f"{message}: {len(items)} tasks on {max(1, workers)} workers")
    if workers is None or workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))

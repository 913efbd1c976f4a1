"""Exception hierarchy. The CLI maps each category to its own exit code
(2 is left to argparse usage errors)."""


class AapsoError(Exception):
    category = "error"
    exit_code = 1


class DatasetError(AapsoError, ValueError):
    category = "dataset"
    exit_code = 3


class ConfigError(AapsoError, ValueError):
    category = "config"
    exit_code = 4

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class RecordsError(AapsoError, ValueError):
    category = "records"
    exit_code = 5

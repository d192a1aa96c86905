import logging


log = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_TOLERANCE = 2


class GenericModule(object):
    """One experiment command. ``run`` does the computation, ``write_to_run`` writes the module's tables and plots
    through ``resource_open(name, extension)``, which returns a writable text file inside the run directory."""

    NAME = "Abstract Generic Module"
    COMMAND = None

    def __init__(self):
        self.status = "completed"
        self.exit_code = EXIT_SUCCESS
        self.notes = []
        self.extra = {}

    def __enter__(self):
        return self

    def __exit__(self, type, value, traceback):
        pass

    def note(self, message):
        log.warning(message)
        self.notes.append(message)

    def fail(self, message, exit_code=EXIT_FAILURE):
        self.note(message)
        self.status = "failed"
        self.exit_code = exit_code

    def run(self, config, jobs=1):
        pass

    def write_to_run(self, resource_open, config):
        pass

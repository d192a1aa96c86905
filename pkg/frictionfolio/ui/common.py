from datetime import datetime
import logging
import sys
import time

from frictionfolio.exceptions.common.exceptions import FrictionfolioError, InvalidArgumentError
from frictionfolio.model.experiments.config import ExperimentConfig
from frictionfolio.ui.formatter import FrictionfolioFormatter
from frictionfolio.util.common.assets import open_asset
from frictionfolio.util.common.rundir import RunDirectory, default_output_root


log = logging.getLogger(__name__)


def setup_logging(quiet=False, verbose=False, stream=None):
    if not stream:
        stream = sys.stdout
    handler = logging.StreamHandler(stream=stream)
    handler.setFormatter(FrictionfolioFormatter())
    if quiet:
        # above CRITICAL so that module loggers are silenced too
        logging.root.setLevel(logging.CRITICAL + 1)
    elif verbose:
        logging.root.setLevel(logging.DEBUG)
    else:
        logging.root.setLevel(logging.INFO)
    logging.root.addHandler(handler)
    return handler


def load_modules():
    all_modules = []
    with open_asset("modulelist.txt") as f:
        for line in f:
            line = line.rstrip('\n')
            if not line or line[0] == '#':
                continue
            components = line.split('.')
            mod = __import__("frictionfolio.modules." + line, globals(), locals(), [components[-1]])
            all_modules.append((line, mod.__dict__[components[-1]]))
    return all_modules


def find_module(command):
    for module_name, module_class in load_modules():
        if module_class.COMMAND == command:
            return module_name, module_class
    raise InvalidArgumentError("No experiment module runs the \"{}\" command".format(command))


def run_experiment(command, config_path=None, overrides=None, seed=None, output_root=None, jobs=1):
    """Resolves the configuration, runs the command's module and writes its outputs and ``manifest.json`` into
    ``<output_root>/<command>-<config hash>``. Returns ``(exit code, run directory)``."""
    module_name, module_class = find_module(command)
    config = ExperimentConfig.load(command, config_path, overrides, seed)
    if output_root is None:
        output_root = default_output_root()

    run_dir = RunDirectory(output_root, command, config.hash).create()
    log.info("Running {} into {}".format(module_class.NAME, run_dir.path))
    start_time = time.time()

    with module_class() as module:
        try:
            module.run(config, jobs)
            run_dir.timings["run"] = time.time() - start_time
            module.write_to_run(lambda name, extension="csv": run_dir.get_resource(module_name, name, extension, "w"),
                                config)
        except FrictionfolioError:
            run_dir.status = "error"
            run_dir.notes.extend(module.notes)
            run_dir.write_manifest(config.to_json_rep(), config.seed)
            raise
        run_dir.status = module.status
        run_dir.notes.extend(module.notes)
        run_dir.extra.update(module.extra)

    run_dir.timings["total"] = time.time() - start_time
    run_dir.write_manifest(config.to_json_rep(), config.seed)
    log.info("Finished {} in {:.2f}s, finished at {}".format(
        module_class.NAME, run_dir.timings["total"], datetime.now().strftime('%I:%M:%S %p')))
    return module.exit_code, run_dir

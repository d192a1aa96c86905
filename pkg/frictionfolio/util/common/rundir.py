import json
import logging
import os

from frictionfolio.exceptions.common.exceptions import FileAccessError


log = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
OUTPUT_ROOT_ENV = "FRICTIONFOLIO_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "frictionfolio-runs"


def default_output_root():
    return os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT)


class RunDirectory(object):
    """The directory holding every file one experiment run writes, plus a ``manifest.json`` describing the run.

    Resources are addressed by module name and resource name, and the manifest keeps track of which file each
    resource was written to."""

    def __init__(self, output_root, command, config_hash):
        self.command = command
        self.config_hash = config_hash
        self.path = os.path.join(output_root, "{}-{}".format(command, config_hash))
        self.status = "running"
        self.notes = []
        self.timings = {}
        self.extra = {}
        self._resources = {}

    def create(self):
        log.debug("Creating run directory {}".format(self.path))
        try:
            os.makedirs(self.path, exist_ok=True)
        except OSError as e:
            raise FileAccessError("Could not create run directory {}: {}".format(self.path, e))
        return self

    def resource_path(self, module_name, resource_name, extension):
        if module_name not in self._resources:
            self._resources[module_name] = {}
        if resource_name not in self._resources[module_name]:
            self._resources[module_name][resource_name] = resource_name + "." + extension
        return os.path.join(self.path, self._resources[module_name][resource_name])

    def get_resource(self, module_name, resource_name, extension="csv", mode="r"):
        fname = self.resource_path(module_name, resource_name, extension)
        if not os.path.exists(os.path.dirname(fname)):
            os.makedirs(os.path.dirname(fname))
        newline = "\n" if "w" in mode else None
        return open(fname, mode, encoding="utf-8", newline=newline)

    def files(self):
        return sorted(name for resources in self._resources.values() for name in resources.values())

    def manifest(self, config, seed):
        manifest = {
            "command": self.command,
            "config": config,
            "config_hash": self.config_hash,
            "seed": seed,
            "files": self.files(),
            "status": self.status,
            "notes": self.notes,
            "timings": self.timings,
        }
        manifest.update(self.extra)
        return manifest

    def write_manifest(self, config, seed):
        with open(os.path.join(self.path, MANIFEST_FILENAME), "w", encoding="utf-8") as f:
            json.dump(self.manifest(config, seed), f, indent=2, sort_keys=True)
            f.write("\n")

    @staticmethod
    def load_manifest(path):
        with open(os.path.join(path, MANIFEST_FILENAME), "r", encoding="utf-8") as f:
            return json.load(f)

from .manifest import MANIFEST_NAME, RunManifest, file_sha256
from .scenarios import (
    bundled_scenario_path,
    dump_scenario,
    generate_random_scenario,
    get_bundled_scenarios,
    load_bundled_scenario,
    load_scenario,
    parse_scenario,
    scenario_to_dict,
)

__all__ = [
    'MANIFEST_NAME',
    'RunManifest',
    'file_sha256',
    'bundled_scenario_path',
    'dump_scenario',
    'generate_random_scenario',
    'get_bundled_scenarios',
    'load_bundled_scenario',
    'load_scenario',
    'parse_scenario',
    'scenario_to_dict'
]

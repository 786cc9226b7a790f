"""Access to the JSON schemas shipped with the package."""

import json
from importlib import resources

NAMES = ("settings", "inequality", "state", "opt_result", "bell_maximum", "threshold",
         "sweep", "manifest", "reducibility", "lhv")


def load_schema(name):
    if name not in NAMES:
        raise KeyError(name)
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)

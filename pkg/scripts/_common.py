"""Small helper: expose a dataclass config as command-line flags."""
import argparse
import dataclasses
import json


def parse_config(cls, description: str):
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        if isinstance(default, (list, tuple)):
            p.add_argument(f"--{f.name.replace('_', '-')}", default=default, type=json.loads,
                           help=f"JSON list (default {json.dumps(list(default))})")
        else:
            p.add_argument(f"--{f.name.replace('_', '-')}", default=default, type=type(default) if default is not None else str)
    return cls(**vars(p.parse_args()))


def write_rows(path, rows: list[dict]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

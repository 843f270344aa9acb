"""Run every config in scripts/configs through the CLI and summarize exit codes.

Outputs land in scripts/out/. Usage: python scripts/run_configs.py [name ...]
"""

import argparse
import os
from pathlib import Path

from slidegal.cli import main

HERE = Path(__file__).resolve().parent
COMMAND = {"sweep": "converge", "degenerate": "check"}


def run(names):
    os.chdir(HERE)
    Path("out").mkdir(exist_ok=True)
    codes = {}
    for path in sorted(Path("configs").glob("*.yaml")):
        if names and path.stem not in names:
            continue
        cmd = COMMAND.get(path.stem, "simulate")
        print(f"== {cmd} {path}")
        codes[path.stem] = main([cmd, str(path)])
    print()
    for name, code in codes.items():
        print(f"{name:12s} exit {code}")
    return codes


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", help="config stems to run (default: all)")
    run(parser.parse_args().names)

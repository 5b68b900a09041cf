"""Run every shipped config and report status and wall time."""

import argparse
import sys
import time
from pathlib import Path

from vifw import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("configs", nargs="*", type=Path)
    args = p.parse_args(argv)
    paths = args.configs or sorted(CONFIGS.glob("*.json"))
    failed = 0
    for path in paths:
        t0 = time.perf_counter()
        status = cli.main(["run", str(path)])
        print(f"{path.name}: exit {status}, {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        failed += status != 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

"""Per-request fulfillment, wastage and sigma of every strategy on the bundled fixture."""

import sys
from importlib import resources

from faces.cli import main

if __name__ == "__main__":
    with resources.as_file(resources.files("faces.data") / "comparison.json") as path:
        sys.exit(main(["run", "--scenario", str(path), "--all"]))

"""Write every shipped catalog entry to data/<family>/<name>.yaml."""

import argparse
from pathlib import Path

from ksol.catalog import load_builtin
from ksol.catalog.io import export


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    root = Path(args.out)
    for entry in load_builtin():
        family, name = entry.id.split("/")
        path = root / family / f"{name}.yaml"
        path.parent.mkdir(parents=True, exist_ok=True)
        export(entry, path)
        print(path)


if __name__ == "__main__":
    main()

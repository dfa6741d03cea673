"""Regenerate src/rcmap/data/surface17.json from the frequency-group layout."""
import json
import pathlib

from rcmap.config import surface17_tree

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "rcmap" / "data" / "surface17.json"

if __name__ == "__main__":
    OUT.write_text(json.dumps(surface17_tree(), indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")

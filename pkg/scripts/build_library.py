#!/usr/bin/env python3
"""Build the paired clean/messy instance library and print a short summary.

Usage:
    python scripts/build_library.py --root out/library [--profile default]

Equivalent to `weaksdp library --root ... --profile ...`; kept as a script so
the library can be rebuilt without installing the console entry point.
"""

from __future__ import annotations

import argparse
from collections import Counter

from weaksdp import LIBRARY_PROFILES, library_build


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", required=True, help="output directory")
    parser.add_argument("--profile", choices=sorted(LIBRARY_PROFILES), default="default")
    args = parser.parse_args()
    manifest = library_build(args.root, args.profile)
    by_category = Counter(e["category"] for e in manifest["instances"])
    print(f"profile {manifest['profile']}: {manifest['count']} instances")
    for category, count in sorted(by_category.items()):
        print(f"  {category}: {count} ({count // 2} clean/messy pairs)")
    print(f"manifest: {args.root}/manifest.json")


if __name__ == "__main__":
    main()

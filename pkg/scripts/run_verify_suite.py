#!/usr/bin/env python3
"""Run the full acceptance battery and print one line per criterion."""
import sys

from degseq.acceptance import run_battery


def main() -> int:
    results = run_battery()
    failed = [r for r in results if not r.passed]
    print(f"\n{len(results) - len(failed)}/{len(results)} criteria passed")
    return 0 if not failed else 5


if __name__ == "__main__":
    sys.exit(main())

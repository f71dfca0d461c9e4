#!/usr/bin/env python3
"""Offline audit of an account store.

For every account small enough for the brute-force oracle, confirm the
registered public graphs really are isomorphic.  A mismatch means the
record could never authenticate and was likely forged or corrupted.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from gizkp.storage import AccountStore, audit_small_accounts


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("store", help="path to accounts.jsonl")
    parser.add_argument("--max-n", type=int, default=10)
    args = parser.parse_args()

    store = AccountStore(args.store)
    results = audit_small_accounts(store, max_n=args.max_n)
    skipped = len(store) - len(results)
    bad = [login for login, ok in results.items() if not ok]
    for login, ok in sorted(results.items()):
        print(f"{'ok ' if ok else 'BAD'} {login}")
    print(f"\naudited {len(results)} accounts (skipped {skipped} with n > {args.max_n}), {len(bad)} bad")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

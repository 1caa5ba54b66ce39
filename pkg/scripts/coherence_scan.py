#!/usr/bin/env python3
"""Build every dictionary family at one prime and print its coherence profile.

    python3 scripts/coherence_scan.py --p 7 --translations 8
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from srip.dictionaries import (  # noqa: E402
    build_extended_oscillator_dictionary,
    build_heisenberg_dictionary,
    build_oscillator_dictionary,
    coherence_report,
)
from srip.field import PrimeField  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--translations", type=int, default=8,
                    help="seeded translation subsample for the extended family")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    field = PrimeField(args.p)
    dictionaries = [
        build_heisenberg_dictionary(field),
        build_oscillator_dictionary(field),
        build_extended_oscillator_dictionary(
            field,
            translation_subsample=None if args.p <= 5 else args.translations,
            subsample_seed=args.seed,
        ),
    ]
    print(f"{'kind':>22} {'bases':>6} {'atoms':>6} {'mu':>4} "
          f"{'max sqrt(p)|<,>|':>17} {'within-basis dev':>17}")
    for D in dictionaries:
        rep = coherence_report(D)
        print(f"{D.kind:>22} {D.basis_count:>6} {D.atom_count:>6} {D.mu:>4.0f} "
              f"{rep.max_scaled_coherence:>17.9f} {rep.max_within_basis_deviation:>17.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

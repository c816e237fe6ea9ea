"""Print the equations, classes and correlation table of every built-in scenario."""

import argparse

from qil.scenarios import load_corpus, run_analyze, run_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true", help="also run the fixtures and oracle verification")
    args = ap.parse_args()
    for name, sc in load_corpus().items():
        print(f"== {name}")
        print(run_analyze(sc.circuit).render())
    if args.check:
        report = run_corpus()
        print(report.render(), end="")
        return 0 if report.ok else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Cross-check random Bell-class circuits against the statevector oracle."""

import argparse
import collections
import logging
import time

import numpy as np

from qil.dsl import format_circuit
from qil.scenarios import random_circuit, random_measurements, run_verify

log = logging.getLogger("fuzz")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--circuits", type=int, default=500)
    ap.add_argument("--max-qubits", type=int, default=6)
    ap.add_argument("--max-gates", type=int, default=20)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--measure", action="store_true", help="append a random measurement script")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    rng = np.random.default_rng(args.seed)
    counts = collections.Counter()
    t0 = time.time()
    for k in range(args.circuits):
        n = int(rng.integers(1, args.max_qubits + 1))
        doc = random_circuit(rng, n, int(rng.integers(0, args.max_gates + 1)))
        if args.measure:
            doc.directives.extend(random_measurements(rng, doc, int(rng.integers(0, n + 1))))
        report = run_verify(doc, trials=args.trials, seed=k)
        if report.coverage != "representable":
            counts["not representable"] += 1
        elif report.ok:
            counts["pass"] += 1
        else:
            counts["FAIL"] += 1
            log.error("circuit %d failed:\n%s%s", k, format_circuit(doc), "".join(f"  {c.name} {c.detail}\n" for c in report.failures))
    log.info("%s in %.1fs", dict(counts), time.time() - t0)
    return 1 if counts["FAIL"] else 0


if __name__ == "__main__":
    raise SystemExit(main())

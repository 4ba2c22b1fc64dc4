import argparse
import json
import logging
import sys

from frobenius_pushforward.config import load_config
from frobenius_pushforward.exceptions import ResourceBoundExceeded
from frobenius_pushforward.fsig import empirical_sequence, feasible_e_values
from frobenius_pushforward.helpers import configure_logging
from frobenius_pushforward.monomial import MonomialData, monomial_poly


def sweep_rows(md, primes, e_max, target, max_size, workers=1):
    """One row per (p, e) with the exact s_e and, for monomials, the gap to the limit."""
    f_by_prime = {p: monomial_poly(md, p) for p in primes}
    for p in primes:
        e_values = feasible_e_values(target, p, md.n, e_max, max_size)
        if not e_values:
            logging.warning(f"skipping p={p}: e=1 already exceeds max_size={max_size}")
            continue
        report = empirical_sequence(f_by_prime[p], p, e_values, target, max_size=max_size, workers=workers)
        gaps = dict(report.gaps())
        for e, s in report.empirical:
            row = {}
            row["dvec"] = list(md.dvec)
            row["target"] = target
            row["p"] = p
            row["e"] = e
            row["s"] = str(s)
            row["closed_form"] = str(report.closed_form)
            row["gap"] = str(gaps[e])
            yield row


def batch_signature_sweep(dvec, primes, e_max, target, output_file, max_size, workers=1):
    md = MonomialData(dvec)
    with open(output_file, "a") as f:
        for row in sweep_rows(md, primes, e_max, target, max_size, workers):
            print(f"p={row['p']} e={row['e']}: s_e = {row['s']} (gap {row['gap']})")
            f.write(json.dumps(row) + "\n")


def main():
    config = load_config()
    parser = argparse.ArgumentParser()
    parser.add_argument("dvec", help="Monomial exponents, e.g. 2,1")
    parser.add_argument("output_file", help="JSON lines file to append to")
    parser.add_argument("--primes", default="3,5", help="Comma separated primes")
    parser.add_argument("--emax", type=int, default=2)
    parser.add_argument("--type", choices=["uv", "z2"], default="uv")
    parser.add_argument("--max-size", type=int, default=config["max_size"])
    parser.add_argument("--workers", type=int, default=config["workers"])
    args = parser.parse_args()
    configure_logging(config["log_level"])
    try:
        dvec = tuple(int(d) for d in args.dvec.split(","))
        primes = [int(p) for p in args.primes.split(",")]
        batch_signature_sweep(dvec, primes, args.emax, args.type, args.output_file, args.max_size, args.workers)
    except (ValueError, ResourceBoundExceeded) as e:
        sys.exit(f"error: {str(e)}")


if __name__ == "__main__":
    main()

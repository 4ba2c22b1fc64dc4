import argparse
import logging
import sys

from frobenius_pushforward.config import load_config
from frobenius_pushforward.exceptions import ResourceBoundExceeded, ValidationError, check_resource_bound
from frobenius_pushforward.frobenius import FrobBasis, matrix_power
from frobenius_pushforward.fsig import (
    TARGETS, SignatureReport, closed_form, empirical_sequence, feasible_e_values
)
from frobenius_pushforward.helpers import configure_logging
from frobenius_pushforward.hypersurface import (
    free_rank_fk, free_rank_uv, free_rank_z2, presentation_fk, uv_decomposition
)
from frobenius_pushforward.matfac import trivial_summand_counts, verify_matfac
from frobenius_pushforward.monomial import MonomialData, decomposition_report, dvec_of, monomial_poly
from frobenius_pushforward.reports import free_rank_report, render, verify_report
from frobenius_pushforward.ring import max_variable_index, parse_poly


EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


def parse_dvec(text):
    try:
        dvec = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValidationError(f"--dvec expects comma separated integers, got {text!r}") from None
    return MonomialData(dvec).dvec


def require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ValidationError(f"{args.command} needs --{name.replace('_', '-')}")


def input_poly(args):
    """The polynomial named by --f or --dvec, over F_p in n variables."""
    require(args, "p")
    if args.f is not None:
        n = args.n or max_variable_index(args.f)
        return parse_poly(args.f, args.p, n)
    if args.dvec is not None:
        return monomial_poly(MonomialData(parse_dvec(args.dvec)), args.p)
    raise ValidationError(f"{args.command} needs --f or --dvec")


def basis_for(f, args):
    basis = FrobBasis(args.p, args.e, f.ring.ngens)
    check_resource_bound(basis.size, args.max_size)
    return basis


def cmd_matrix(args):
    f = input_poly(args)
    basis = basis_for(f, args)
    power = next((value for value in (args.power, args.k) if value is not None), 1)
    logging.info(f"building M(f^{power}, {args.e}) for f = {f}, r_e = {basis.size}")
    return matrix_power(f, power, basis).to_dict()


def cmd_fsignature(args):
    require(args, "type")
    if args.dvec is not None:
        dvec = parse_dvec(args.dvec)
    elif args.f is not None:
        require(args, "p")
        dvec = dvec_of(input_poly(args))
    else:
        raise ValidationError("fsignature needs --f or --dvec")
    if args.emax is None:
        if dvec is None:
            raise ValidationError("a non-monomial f has no closed form; pass --p and --emax")
        return SignatureReport(target=args.type, dvec=dvec, closed_form=closed_form(args.type, dvec)).to_dict()
    if args.emax < 1:
        raise ValidationError(f"--emax must be at least 1, got {args.emax}")
    f = input_poly(args)
    e_values = feasible_e_values(args.type, args.p, f.ring.ngens, args.emax, args.max_size)
    if not e_values:
        raise ResourceBoundExceeded(f"even e=1 exceeds max_size={args.max_size}")
    report = empirical_sequence(f, args.p, e_values, args.type, max_size=args.max_size, workers=args.workers)
    return report.to_dict()


def cmd_decompose(args):
    f = input_poly(args)
    basis = basis_for(f, args)
    dvec = dvec_of(f)
    if dvec is not None and len(dvec) == f.ring.ngens:
        return decomposition_report(MonomialData(dvec), args.p, args.e, workers=args.workers).to_dict()
    return uv_decomposition(f, basis, verify=args.verify).to_dict()


def cmd_freerank(args):
    f = input_poly(args)
    basis = basis_for(f, args)
    if args.k is not None:
        return free_rank_report("fk", args.p, args.e, f, free_rank_fk(f, args.k, basis))
    target = args.type or "uv"
    if target == "uv":
        free_rank = free_rank_uv(f, basis, workers=args.workers)
    else:
        free_rank = free_rank_z2(f, basis)
    return free_rank_report(target, args.p, args.e, f, free_rank)


def cmd_verify(args):
    require(args, "k")
    f = input_poly(args)
    basis = basis_for(f, args)
    mf = presentation_fk(f, args.k, basis, verify=False)
    holds = verify_matfac(mf.phi, mf.psi, f)
    counts = trivial_summand_counts(mf) if holds else None
    matfac = mf if args.matrices else None
    return verify_report(args.p, args.e, args.k, f, mf.size, holds, counts, matfac)


COMMANDS = {
    "matrix": cmd_matrix,
    "fsignature": cmd_fsignature,
    "decompose": cmd_decompose,
    "freerank": cmd_freerank,
    "verify": cmd_verify,
}


def build_parser(config):
    parser = argparse.ArgumentParser(
        prog="frobenius_pushforward",
        description="Frobenius pushforwards, matrix factorizations and F-signatures of hypersurfaces"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("matrix", "Matrix of relations M(f^k, e)"),
        ("fsignature", "Closed-form and empirical F-signatures"),
        ("decompose", "Summand decomposition of F_*^e(S[[u,v]]/(f+uv))"),
        ("freerank", "Free rank of F_*^e for f+uv, f+z^2 or S/f^k"),
        ("verify", "Check that (M(f^k), M(f^{q-k})) factors f"),
    ]:
        command = subparsers.add_parser(name, help=help_text)
        command.add_argument("--f", help="Polynomial, e.g. \"x1^2 + x1*x2\"")
        command.add_argument("--dvec", help="Monomial exponents, e.g. 2,1")
        command.add_argument("--p", type=int, help="Characteristic")
        command.add_argument("--e", type=int, default=1, help="Frobenius power (default 1)")
        command.add_argument("--emax", type=int, help="Largest e of an empirical sweep")
        command.add_argument("--k", type=int, help="Power of f")
        command.add_argument("--power", type=int, help="Power of f for the matrix command")
        command.add_argument("--n", type=int, help="Number of variables (default: largest index in --f)")
        command.add_argument("--type", choices=TARGETS, help="Hypersurface: f+uv or f+z^2")
        command.add_argument("--format", dest="output_format", choices=["json", "csv"],
                             default=config["output_format"], help="Report format")
        command.add_argument("--max-size", type=int, default=config["max_size"],
                             help="Refuse matrices larger than this")
        command.add_argument("--workers", type=int, default=config["workers"], help="Worker threads")
        command.add_argument("--log-level", default=config["log_level"], help="Logging level")
        if name == "verify":
            command.add_argument("--matrices", action="store_true", help="Include phi and psi in the report")
    parser.set_defaults(verify=config["verify_factorizations"])
    return parser


def main(argv=None):
    config = load_config()
    parser = build_parser(config)
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        report = COMMANDS[args.command](args)
    except ValidationError as e:
        logging.debug(f"{args.command} rejected its input", exc_info=True)
        print(f"error: {str(e)}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceBoundExceeded as e:
        logging.debug(f"{args.command} hit the size bound", exc_info=True)
        print(f"error: {str(e)}", file=sys.stderr)
        return EXIT_RESOURCE
    print(render(report, args.output_format))
    return 0

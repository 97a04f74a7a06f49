"""geoent command line: measure | schmidt | chain | family | fig2."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import plot
from .closest import NoConvergenceError, SolverConfig, find_extrema
from .qstate import PureState, StateFormatError, read_state
from .schmidt import (BipartiteSplit, chain_min_over_orders, qubit_split_quadratic,
                      schmidt_chain, schmidt_decompose)
from .symmetric import (DEFAULT_FIG2_FAMILIES, SymmetricFamily, build_state, closed_form_nq,
                        fig2_table)

EXIT_OK, EXIT_INPUT, EXIT_NOCONV = 0, 1, 2
DEFAULT_MAX_QUBITS = 12
VERIFY_MAX_Q = 7


class InputError(Exception):
    """Anything that maps to exit code 1."""


def max_qubits() -> int:
    raw = os.environ.get("GEOENT_MAX_QUBITS", str(DEFAULT_MAX_QUBITS))
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"GEOENT_MAX_QUBITS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InputError("GEOENT_MAX_QUBITS must be positive")
    return cap


def _load(args) -> tuple[PureState, str]:
    if not args.state:
        raise InputError("--state FILE is required")
    try:
        with open(args.state, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"{args.state}: {exc.strerror}") from None
    try:
        psi = read_state(data.decode("utf-8"))
    except UnicodeDecodeError:
        raise InputError(f"{args.state}: not UTF-8 text") from None
    except StateFormatError as exc:
        raise InputError(f"{args.state}: {exc}") from None
    cap = max_qubits()
    if psi.shape.n > 2 ** cap:
        raise InputError(f"{args.state}: {psi.shape.n} amplitudes exceed the limit 2^{cap} "
                         "(raise GEOENT_MAX_QUBITS)")
    return psi, hashlib.sha256(data).hexdigest()


def _out(args, line: str = "") -> None:
    if not args.quiet:
        print(line)


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(restarts=args.restarts, tol_residual=args.tol, rng_seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _vec(v) -> list:
    return [[float(z.real), float(z.imag)] for z in v]


def _extremum_dict(e) -> dict:
    return {
        "norm_product": e.norm_product, "norms": list(e.norms), "cos_theta": e.cos_theta,
        "dist_sq": e.dist_sq, "dist_sq_normalized": e.dist_sq_normalized,
        "residual": e.residual, "sweeps": e.sweeps, "label": e.label, "start": e.start,
        "hits": e.hits, "factors": [_vec(f) for f in e.product.factors],
    }


def cmd_measure(args) -> dict:
    psi, digest = _load(args)
    cfg = _config(args)
    report = find_extrema(psi, cfg)
    best = report.best
    _out(args, f"entanglement: {report.entanglement:.12g}")
    _out(args, f"cos_theta: {best.cos_theta:.12g}")
    _out(args, f"theta: {best.theta:.12g}")
    _out(args, f"D_C^2: {best.dist_sq:.12g}")
    _out(args, f"D_N^2: {best.dist_sq_normalized:.12g}")
    _out(args, f"norm_product: {best.norm_product:.12g}")
    _out(args, "norms: " + " ".join(f"{n:.12g}" for n in best.norms))
    _out(args, f"residual: {best.residual:.3e}")
    _out(args, f"extrema: {len(report.extrema)}")
    if args.all_extrema:
        _out(args, "rank norm_product cos_theta residual label hits norms")
        for k, e in enumerate(report.extrema):
            norms = ",".join(f"{n:.8g}" for n in e.norms)
            _out(args, f"{k} {e.norm_product:.12g} {e.cos_theta:.12g} {e.residual:.3e} "
                       f"{e.label} {e.hits} {norms}")
    results = {"entanglement": report.entanglement, "best": _extremum_dict(best)}
    if args.all_extrema:
        results["extrema"] = [_extremum_dict(e) for e in report.extrema]
    return {"input_digest": digest, "config": vars_of(cfg), "results": results}


def vars_of(cfg: SolverConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def cmd_schmidt(args) -> dict:
    psi, digest = _load(args)
    nf = len(psi.dims)
    if (args.split is None) == (args.qubit is None):
        raise InputError("give exactly one of --split or --qubit")
    try:
        if args.split is not None:
            split = BipartiteSplit.parse(args.split, nf)
        else:
            split = BipartiteSplit.of([args.qubit], nf)
            split.validate(nf)
            if not 0 <= args.qubit < nf:
                raise ValueError(f"no factor {args.qubit}")
    except ValueError as exc:
        raise InputError(f"invalid split: {exc}") from None
    dec = schmidt_decompose(psi, split)
    entropy = dec.entropy()
    left = ",".join(map(str, split.left))
    right = ",".join(map(str, split.right))
    _out(args, f"split: {left}|{right}")
    _out(args, "p: " + " ".join(f"{p:.12g}" for p in dec.coefficients))
    _out(args, f"entropy_bits: {entropy:.12g}")
    results = {"split": [list(split.left), list(split.right)],
               "coefficients": [float(p) for p in dec.coefficients], "entropy": entropy}
    rows = [(f"p_{k}", float(p)) for k, p in enumerate(dec.coefficients)]
    rows.append(("entropy_bits", entropy))
    if args.qubit is not None:
        try:
            quad = qubit_split_quadratic(psi, args.qubit)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        for name in ("c_invariant", "mu_plus", "mu_minus", "theta_max", "theta_critical"):
            value = getattr(quad, name)
            _out(args, f"{name}: {value:.12g}")
            results[name] = value
            rows.append((name, value))
    if args.csv:
        plot.write_text(args.csv, "quantity,value\n" + "".join(
            f"{k},{plot.fmt12(v)}\n" for k, v in rows))
    return {"input_digest": digest, "config": {}, "results": results}


def _parse_order(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InputError(f"bad order {text!r}") from None


def cmd_chain(args) -> dict:
    psi, digest = _load(args)
    if (args.order is None) == (not args.min_over_orders):
        raise InputError("give exactly one of --order or --min-over-orders")
    try:
        if args.min_over_orders:
            _, chain = chain_min_over_orders(psi)
        else:
            chain = schmidt_chain(psi, _parse_order(args.order))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _out(args, "order: " + ",".join(map(str, chain.order)))
    for k, st in enumerate(chain.stages):
        coeffs = " ".join(f"{p:.12g}" for p in st.coefficients)
        _out(args, f"stage {k}: qubit {st.qubit} p = [{coeffs}] selected {st.selected}")
    _out(args, f"chain_norm: {chain.chain_norm:.12g}")
    _out(args, f"entanglement_chain: {chain.entanglement_chain:.12g}")
    results = {
        "order": list(chain.order), "chain_norm": chain.chain_norm,
        "entanglement_chain": chain.entanglement_chain,
        "stages": [{"qubit": st.qubit, "coefficients": list(st.coefficients),
                    "selected": st.selected} for st in chain.stages],
    }
    return {"input_digest": digest, "config": {"min_over_orders": bool(args.min_over_orders)},
            "results": results}


def cmd_family(args) -> dict:
    try:
        fam = SymmetricFamily.parse(args.family, args.q)
    except ValueError as exc:
        raise InputError(f"invalid family: {exc}") from None
    cf = closed_form_nq(fam)
    results = {"family": fam.name, "q": fam.q, "n_q": cf.n_q_exact,
               "entanglement_branch": cf.entanglement_branch,
               "n_q_asymptotic": cf.n_q_asymptotic,
               "ansatz": [cf.ansatz.alpha0, cf.ansatz.alpha1]}
    _out(args, f"family: {fam.name} q={fam.q}")
    if fam.q <= max_qubits():
        psi = build_state(fam)
        support = int(np.count_nonzero(psi.amplitudes))
        _out(args, f"state: {fam.q} qubits, {support} nonzero amplitudes of {psi.shape.n}")
    else:
        _out(args, f"state: not built ({fam.q} qubits exceeds GEOENT_MAX_QUBITS)")
    _out(args, f"N^q: {cf.n_q_exact:.12g}")
    _out(args, f"entanglement_branch: {cf.entanglement_branch:.12g} ({cf.label})")
    asym = "none" if cf.n_q_asymptotic is None else f"{cf.n_q_asymptotic:.12g}"
    _out(args, f"N^q_asymptotic: {asym}")
    _out(args, f"ansatz: alpha0={cf.ansatz.alpha0:.12g} alpha1={cf.ansatz.alpha1:.12g}")
    cfg = None
    if args.verify:
        if fam.q > VERIFY_MAX_Q:
            raise InputError(f"--verify is limited to q <= {VERIFY_MAX_Q}")
        cfg = _config(args)
        report = find_extrema(build_state(fam), cfg)
        branch = min(report.extrema, key=lambda e: abs(e.norm_product - cf.n_q_exact))
        gap = abs(branch.norm_product - cf.n_q_exact)
        _out(args, f"solver_best_norm_product: {report.best.norm_product:.12g}")
        _out(args, f"solver_branch_norm_product: {branch.norm_product:.12g} (gap {gap:.3e})")
        results["solver"] = {"best_norm_product": report.best.norm_product,
                             "branch_norm_product": branch.norm_product, "gap": gap}
    return {"input_digest": None, "config": vars_of(cfg) if cfg else {}, "results": results}


def cmd_fig2(args) -> dict:
    families = tuple(s for s in args.families.split(",") if s) if args.families \
        else DEFAULT_FIG2_FAMILIES
    try:
        rows = fig2_table(args.qmin, args.qmax, families)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.solver:
        rows += _solver_rows(args, families)
    text = plot.to_csv(rows)
    if args.csv:
        plot.write_text(args.csv, text)
    else:
        _out(args, text.rstrip("\n"))
    if args.svg:
        plot.write_text(args.svg, plot.to_svg(rows))
    if args.csv or args.svg:
        _out(args, f"{len(rows)} rows, {len(families)} series")
    return {"input_digest": None, "config": {"qmin": args.qmin, "qmax": args.qmax},
            "results": {"rows": [list(r) for r in rows]}}


def _solver_rows(args, families):
    """Global measure 1 - best.norm_product from the solver, q <= VERIFY_MAX_Q only."""
    cfg = _config(args)
    rows = []
    for spec in families:
        for q in range(args.qmin, min(args.qmax, VERIFY_MAX_Q) + 1):
            fam = SymmetricFamily.parse(spec, q)
            rows.append((q, fam.name + ":solver", find_extrema(build_state(fam), cfg).entanglement))
    return rows


COMMANDS = {"measure": cmd_measure, "schmidt": cmd_schmidt, "chain": cmd_chain,
            "family": cmd_family, "fig2": cmd_fig2}


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value
    p.add_argument("--state", default=d(None), help="state file")
    p.add_argument("--seed", type=int, default=d(0), help="PRNG seed (default 0)")
    p.add_argument("--restarts", type=int, default=d(32), help="random restarts (default 32)")
    p.add_argument("--tol", type=float, default=d(1e-10), help="stationarity residual tolerance")
    p.add_argument("--csv", default=d(None), help="write CSV output here")
    p.add_argument("--svg", default=d(None), help="write SVG output here")
    p.add_argument("--json", default=d(None), help="write a JSON run report here")
    p.add_argument("--quiet", action="store_true", default=d(False), help="no stdout report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoent",
                                     description="Geometric entanglement of pure multipartite states.")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="nearest product state and entanglement")
    _add_common(p, suppress=True)
    p.add_argument("--all-extrema", action="store_true", help="list every extremum found")

    p = sub.add_parser("schmidt", help="Schmidt coefficients across a split")
    _add_common(p, suppress=True)
    p.add_argument("--split", help='e.g. "0,2|1,3"')
    p.add_argument("--qubit", type=int, help="split a single qubit off")

    p = sub.add_parser("chain", help="sequential single-qubit Schmidt chain")
    _add_common(p, suppress=True)
    p.add_argument("--order", help='e.g. "2,0,1"')
    p.add_argument("--min-over-orders", action="store_true")

    p = sub.add_parser("family", help="closed forms for a symmetric family")
    _add_common(p, suppress=True)
    p.add_argument("--family", required=True, help="ghz:P | w | ring | dicke:K")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--verify", action="store_true", help=f"solver cross-check (q <= {VERIFY_MAX_Q})")

    p = sub.add_parser("fig2", help="entanglement vs q table and chart")
    _add_common(p, suppress=True)
    p.add_argument("--qmin", type=int, default=3)
    p.add_argument("--qmax", type=int, default=20)
    p.add_argument("--families", default=None,
                   help="comma-separated family specs (default: " + ",".join(DEFAULT_FIG2_FAMILIES) + ")")
    p.add_argument("--solver", action="store_true",
                   help=f"add solver-computed global values as extra series (q <= {VERIFY_MAX_Q})")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        payload = COMMANDS[args.command](args)
        code = EXIT_OK
    except InputError as exc:
        print(f"geoent: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"geoent: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergenceError as exc:
        print(f"geoent: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    if args.json:
        report = {"command": ["geoent"] + argv, **payload,
                  "wall_time": round(time.perf_counter() - start, 6)}
        try:
            plot.write_text(args.json, json.dumps(report, indent=2, sort_keys=True,
                                                  default=_json_default) + "\n")
        except OSError as exc:
            print(f"geoent: error: {args.json}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    return code


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    raise TypeError(f"cannot serialise {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())

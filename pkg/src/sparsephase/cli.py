"""``sparsephase`` command line: file-based pipeline stages.

Exit codes: 0 ok, 2 usage, 3 validation, 4 numerical consistency.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .appendix import SWEEP_N_RANGE, conjecture_sweep
from .classify import ConfigClassification, classify_design
from .design import build_sparse_unitary, design_from_json, resource_comparison
from .engine import (CoincidenceReport, all_rates, input_config, parse_config,
                     rate_with_residual, sample_counts, validate_unitary)
from .errors import SparsePhaseError, ValidationError
from .estimate import estimate, rates_from_counts
from .fileio import (counts_from_json, counts_to_json, manifest, read_gram, read_json, read_rates,
                     read_unitary, write_json, write_manifest, write_rates, write_unitary)
from .graphs import connectivity_graph, enhanced_graph, minor_graph, pure_cycle_check, to_dot
from .photons import GramMatrix

EXIT_USAGE = 2
EXIT_IO = 3


def _photons(text: str) -> int:
    n = int(text)
    if n < 3:
        raise argparse.ArgumentTypeError(f"need n >= 3, got {n}")
    return n


def _ports(text: str) -> tuple:
    try:
        ports = parse_config(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ports, got {text!r}") from None
    if not ports:
        raise argparse.ArgumentTypeError("empty port list")
    return ports


def _n_range(text: str) -> tuple:
    """``"3"``, ``"3..5"``, ``"3-5"`` or ``"3:5"`` (inclusive)."""
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from None
    a, b = SWEEP_N_RANGE
    if lo > hi or lo < a or hi > b:
        raise argparse.ArgumentTypeError(f"n range {lo}..{hi} outside the supported {a}..{b}")
    return lo, hi


def _positive(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError(f"need a positive integer, got {k}")
    return k


def _record(out: Path, command: str, inputs, params: dict, seed=None) -> None:
    write_manifest(out, manifest(command, inputs, params, seed, __version__))


def _load_unitary(path):
    return validate_unitary(read_unitary(path))


def cmd_design(args) -> int:
    d = build_sparse_unitary(args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = {"n": args.n}
    for name, write in (("unitary.json", lambda p: write_unitary(p, d.U)),
                        ("design.json", lambda p: write_json(p, d.to_json()))):
        write(out / name)
        _record(out / name, "design", [], params)
    print(f"wrote {out / 'unitary.json'} and {out / 'design.json'} (defect {d.U.defect:.1e})")
    return 0


def cmd_simulate(args) -> int:
    U = _load_unitary(args.unitary)
    G = GramMatrix(read_gram(args.gram))
    v = input_config(args.input, U.m)
    if args.all:
        report = all_rates(U, G, v, cap=args.cap, workers=args.workers)
    else:
        rate, im = rate_with_residual(U, G, v, args.config)
        eta = tuple(sorted(args.config))
        report = CoincidenceReport({eta: rate}, 0.0, {eta: im})
    write_rates(args.out, report)
    params = {"input": list(v), "config": None if args.all else list(args.config), "cap": args.cap}
    _record(args.out, "simulate", [args.unitary, args.gram], params)
    return 0


def cmd_sample(args) -> int:
    report = read_rates(args.rates)
    counts = sample_counts(report, args.shots, args.seed)
    write_json(args.out, counts_to_json(counts))
    _record(args.out, "sample", [args.rates], {"shots": args.shots}, args.seed)
    return 0


def cmd_classify(args) -> int:
    c = classify_design(design_from_json(read_json(args.design)))
    audit = c.partition_audit()
    write_json(args.out, {**c.to_json(), "audit": audit})
    _record(args.out, "classify", [args.design], {})
    print(f"xi {len(c.xi)}, zeta {len(c.zeta)}, chi_rest {len(c.chi_rest)}, audit ok: {audit['ok']}")
    return 0


def cmd_estimate(args) -> int:
    design = design_from_json(read_json(args.design))
    if args.classification:
        c = ConfigClassification.from_json(read_json(args.classification))
        if c.n != design.n:
            raise ValidationError(f"classification is for n={c.n}, design for n={design.n}")
    else:
        c = classify_design(design)
    if args.counts:
        source = args.counts
        rates = rates_from_counts(counts_from_json(read_json(args.counts)))
    else:
        source = args.rates
        rates = read_rates(args.rates)
    result = estimate(rates, c, design.n)
    write_json(args.out, result.to_json())
    inputs = [source, args.design] + ([args.classification] if args.classification else [])
    _record(args.out, "estimate", inputs, {"mode": result.diagnostics["mode"]})
    print(f"|psi| = {result.phase:.10g}, amplitude = {result.amplitude:.10g}")
    return 0


def cmd_graphs(args) -> int:
    U = _load_unitary(args.unitary)
    v = input_config(args.input, U.m)
    gc = connectivity_graph(U)
    ge = enhanced_graph(minor_graph(gc), v)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = {"input": list(v), "format": args.format}
    if args.format == "dot":
        files = {"connectivity.dot": to_dot(gc), "enhanced.dot": to_dot(ge)}
        for name, text in files.items():
            (out / name).write_text(text)
    else:
        files = {"connectivity.json": gc.to_json(), "enhanced.json": ge.to_json()}
        for name, obj in files.items():
            write_json(out / name, obj)
    for name in files:
        _record(out / name, "graphs", [args.unitary], params)
    verdict = pure_cycle_check(ge)
    print(f"enhanced graph: {'pure cycle ' + str(verdict.cycle) if verdict else 'not a pure cycle'}")
    return 0


def cmd_verify_appendix(args) -> int:
    lo, hi = args.n_range
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in range(lo, hi + 1):
        res = conjecture_sweep(n, args.samples, args.seed, workers=args.workers)
        path = out / f"sweep_n{n}.json"
        write_json(path, res.to_json())
        _record(path, "verify-appendix", [], {"n": n, "samples": args.samples}, args.seed)
        print(f"n={n}: bound {res.bound:.12g}, fourier {res.fourier_value:.12g}, "
              f"max random {res.max_random_value:.12g}, violations {len(res.violations)}")
    return 0


_RESOURCE_COLUMNS = ("scheme", "depth", "beamsplitters", "modes", "internal_params")


def cmd_compare_resources(args) -> int:
    table = resource_comparison(args.n)
    rows = [["sparse"] + [table["sparse"][k] for k in _RESOURCE_COLUMNS[1:]],
            ["all_connected"] + [table["all_connected"][k] for k in _RESOURCE_COLUMNS[1:]]]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_RESOURCE_COLUMNS)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        ac = table["all_connected"]
        lines = [f"n = {args.n}", f"{'':16}{'sparse':>8}{'all-connected':>16}"]
        lines.append(f"{'depth':16}{2:>8}{ac['depth']:>16}  {ac['depth_scaling']}")
        lines.append(f"{'beamsplitters':16}{2 * args.n:>8}{ac['beamsplitters']:>16}  "
                     f"{ac['beamsplitter_scaling']}")
        lines.append(f"{'modes':16}{2 * args.n:>8}{ac['modes']:>16}")
        lines.append(f"{'internal params':16}{0:>8}{'d >= ' + str(ac['internal_params']):>16}")
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _record(args.out, "compare-resources", [], {"n": args.n, "format": args.format})
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsephase", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("design", help="build the 2n-mode sparse interferometer")
    s.add_argument("--n", type=_photons, required=True)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="exact coincidence rates")
    s.add_argument("--unitary", required=True)
    s.add_argument("--gram", required=True)
    s.add_argument("--input", type=_ports, required=True, help="input ports, e.g. 1,3,5,7")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", type=_ports, help="one output configuration")
    g.add_argument("--all", action="store_true", help="every collision-free configuration")
    s.add_argument("--cap", type=_positive, default=8, help="largest photon number allowed")
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sample", help="seeded shot-noise counts from a rates file")
    s.add_argument("--rates", required=True)
    s.add_argument("--shots", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("classify", help="partition output configurations of a design")
    s.add_argument("--design", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("estimate", help="pairwise overlaps and collective phase")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--counts")
    g.add_argument("--rates")
    s.add_argument("--design", required=True)
    s.add_argument("--classification")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("graphs", help="connectivity and enhanced-distinguishability graphs")
    s.add_argument("--unitary", required=True)
    s.add_argument("--input", type=_ports, required=True)
    s.add_argument("--format", choices=("dot", "json"), default="dot")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_graphs)

    s = sub.add_parser("verify-appendix", help="Fourier bound sweep over Haar unitaries")
    s.add_argument("--n-range", type=_n_range, required=True, help="e.g. 3..5")
    s.add_argument("--samples", type=_positive, default=1000)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_verify_appendix)

    s = sub.add_parser("compare-resources", help="optical resources against an all-connected multiport")
    s.add_argument("--n", type=_photons, required=True)
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compare_resources)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        return args.func(args)
    except SparsePhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

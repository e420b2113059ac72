"""Command line front end: reproducible sampling, verification, and curves.

Every stochastic command requires --seed; outputs are byte-identical for
identical invocations.  Exit codes: 0 success, 1 verification suite failed,
2 argument or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import InputDomainError, NumericalError
from .painleve import solve_hastings_mcleod, spiked_edge_cdf, tw_goe_cdf
from .sampling import (
    RobinSAOConfig,
    SpikeConfig,
    default_sao_config,
    sample_multi_spike_spectra,
    sample_pencil_spectra,
    sample_secular_spectra,
    sample_spiked_spectra,
    sao_smallest_eigenvalues,
)
from .serialize import write_curve_csv, write_report, write_samples_csv, write_sidecar
from . import suites
from .airy import density_blind

_CONSTRUCTIONS = ("bidiagonal", "secular", "pencil", "multispike", "sao")
_SUITES = ("equivalence", "hardedge", "softedge-w0", "softedge-w", "density-blind", "pde-residual")
_CURVES = ("tw-goe", "spiked-edge", "density-blind", "painleve-table", "hyp1f1")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (required for stochastic commands)")
    parser.add_argument("--out", type=str, default=None, help="output path prefix")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (results are thread-count independent)")


def _spike_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikedwishart", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="draw eigenvalue samples and write CSV + JSON sidecar")
    p_sample.add_argument("--construction", choices=_CONSTRUCTIONS, required=True)
    p_sample.add_argument("--beta", type=float, required=True)
    p_sample.add_argument("--n", type=float, default=None)
    p_sample.add_argument("--N", type=int, default=None)
    p_sample.add_argument("--b", type=_spike_list, default=(1.0,), help="spike(s), comma separated for multispike")
    p_sample.add_argument("--samples", type=int, default=100)
    p_sample.add_argument("--w", type=float, default=math.inf, help="SAO Robin parameter (inf = Dirichlet)")
    p_sample.add_argument("--L", type=float, default=None, help="SAO domain length")
    p_sample.add_argument("--h", type=float, default=0.02, help="SAO grid step")
    p_sample.add_argument("--k", type=int, default=1, help="SAO eigenvalue count")
    _add_common(p_sample)

    p_verify = sub.add_parser("verify", help="run a named verification suite, write a JSON report")
    p_verify.add_argument("--suite", choices=_SUITES, required=True)
    p_verify.add_argument("--beta", type=float, default=None)
    p_verify.add_argument("--n", type=float, default=None)
    p_verify.add_argument("--N", type=int, default=None)
    p_verify.add_argument("--b", type=float, default=None)
    p_verify.add_argument("--samples", type=int, default=None)
    _add_common(p_verify)

    p_curves = sub.add_parser("curves", help="emit (abscissa, value) CSV curves")
    p_curves.add_argument("--curve", choices=_CURVES, required=True)
    p_curves.add_argument("--s-min", dest="s_min", type=float, default=-6.0)
    p_curves.add_argument("--s-max", dest="s_max", type=float, default=4.0)
    p_curves.add_argument("--step", type=float, default=0.05)
    p_curves.add_argument("--w", type=float, default=0.0)
    p_curves.add_argument("--beta", type=float, default=2.0)
    p_curves.add_argument("--N", type=int, default=3)
    p_curves.add_argument("--x", type=_spike_list, default=(1.0, 2.0, 3.0), help="points for the hyp1f1 curve")
    p_curves.add_argument("--c-min", dest="c_min", type=float, default=-1.0)
    p_curves.add_argument("--c-max", dest="c_max", type=float, default=1.0)
    _add_common(p_curves)

    return parser


def _require_seed(args) -> int:
    if args.seed is None:
        raise InputDomainError("--seed is required for stochastic commands")
    return int(args.seed)


def _cmd_sample(args) -> int:
    seed = _require_seed(args)
    rng = np.random.default_rng([seed, 0])
    construction = args.construction
    out = args.out or f"{construction}-samples"
    if construction == "sao":
        if args.L is None:
            cfg = default_sao_config(beta=args.beta, w=args.w, k=args.k, h=args.h)
        else:
            cfg = RobinSAOConfig(beta=args.beta, w=args.w, L=args.L, h=args.h, k=args.k)
        values = sao_smallest_eigenvalues(cfg, rng, args.samples)
        columns = [f"eig{i + 1}" for i in range(args.k)]
        params = {"beta": args.beta, "w": args.w, "L": cfg.L, "h": cfg.h, "k": cfg.k}
    else:
        if args.n is None or args.N is None:
            raise InputDomainError("--n and --N are required for this construction")
        cfg = SpikeConfig(beta=args.beta, n=args.n, N=args.N, spikes=args.b)
        if construction == "bidiagonal":
            values = sample_spiked_spectra(cfg, rng, args.samples)
        elif construction == "secular":
            values = sample_secular_spectra(cfg, rng, args.samples)
        elif construction == "pencil":
            values = sample_pencil_spectra(cfg, rng, args.samples)
        else:
            values = sample_multi_spike_spectra(cfg, rng, args.samples)
        columns = [f"lambda{i + 1}" for i in range(values.shape[1])]
        params = {"beta": cfg.beta, "n": cfg.n, "N": cfg.N, "spikes": list(cfg.spikes)}
    write_samples_csv(f"{out}.csv", values, columns)
    write_sidecar(
        f"{out}.json",
        construction=construction,
        seed=seed,
        n_samples=args.samples,
        columns=columns,
        params=params,
    )
    return 0


def _cmd_verify(args) -> int:
    name = args.suite
    if name == "equivalence":
        seed = _require_seed(args)
        if args.beta is None:
            report = suites.suite_equivalence_all(n_samples=args.samples or 10_000, seed=seed)
        else:
            if args.n is None or args.N is None or args.b is None:
                raise InputDomainError("equivalence needs --beta --n --N --b (or none of them)")
            report = suites.suite_equivalence(
                args.beta, args.n, args.N, args.b, n_samples=args.samples or 10_000, seed=seed
            )
    elif name == "hardedge":
        report = suites.suite_hardedge(seed=_require_seed(args), n_samples=args.samples or 100_000)
    elif name == "softedge-w0":
        report = suites.suite_softedge_w0(
            seed=_require_seed(args),
            n_goe=args.samples or 10_000,
            n_b4=args.samples or 10_000,
        )
    elif name == "softedge-w":
        report = suites.suite_softedge_w(seed=_require_seed(args), n_samples=args.samples or 10_000)
    elif name == "density-blind":
        report = suites.suite_density_blind(seed=_require_seed(args), n_samples=args.samples or 10_000)
    else:
        report = suites.suite_pde_residual()
    out = args.out or f"report-{name}.json"
    if name == "density-blind":
        # histogram CSV alongside the report, for overlay plotting
        bins = report["bins"]
        write_curve_csv(
            str(out).replace(".json", "") + "-bins.csv",
            {
                "s_lo": np.array([b["s_lo"] for b in bins]),
                "s_hi": np.array([b["s_hi"] for b in bins]),
                "count": np.array([float(b["count"]) for b in bins]),
                "expected": np.array([b["expected"] for b in bins]),
            },
        )
    write_report(out, report)
    print(json.dumps({"suite": name, "passed": report["passed"], "report": out}))
    return 0 if report["passed"] else 1


def _cmd_curves(args) -> int:
    out = args.out or f"curve-{args.curve}.csv"
    if args.curve in ("tw-goe", "spiked-edge", "painleve-table"):
        table = solve_hastings_mcleod()
        if args.curve == "painleve-table":
            table.to_csv(out)
            return 0
        grid = np.arange(args.s_min, args.s_max + 1e-12, args.step)
        if grid.size < 2:
            raise InputDomainError("empty curve grid")
        if args.curve == "tw-goe":
            vals = tw_goe_cdf(table, grid)
        else:
            vals = spiked_edge_cdf(table, grid, args.w)
        write_curve_csv(out, {"s": grid, "cdf": np.atleast_1d(vals)})
        return 0
    if args.curve == "density-blind":
        if args.w > 0:
            raise InputDomainError("density-blind supports w <= 0 only; use Monte Carlo for w > 0")
        grid = np.arange(args.s_min, args.s_max + 1e-12, args.step)
        vals = np.array([density_blind(float(x), args.w) for x in grid])
        write_curve_csv(out, {"X": grid, "rho": vals})
        return 0
    # hyp1f1 sweep over c at fixed points
    from .densities import hyp1f1_spiked

    grid = np.arange(args.c_min, args.c_max + 1e-12, args.step)
    x = np.asarray(args.x, dtype=float)
    vals = np.array([hyp1f1_spiked(args.beta, x.size, float(c), x) for c in grid])
    write_curve_csv(out, {"c": grid, "value": vals})
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_curves(args)
    except InputDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

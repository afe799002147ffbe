"""Command-line front end.

Verbs::

    wavekrylov solve --config run.json [--out DIR] [--seed N]
    wavekrylov filter-curve --config run.json [--omega-grid MIN:MAX:COUNT] [--out DIR]
    wavekrylov spectrum --config run.json [--out DIR]
    wavekrylov gen laplacian_2d_rect nx=40 ny=30 lx=4 ly=3 [--out DIR]

Exit status: 0 success, 1 usage/config error, 2 fewer eigenpairs accepted than
requested (results are still written).
"""
import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import problems
from .filters import FilterError, FilterSpec, filter_curve, write_filter_csv
from .krylov import SolverConfig, SolverError, solve
from .mmio import MatrixMarketError
from .problems import ProblemError
from .sparse import SparseError
from .stepper import StepperError, estimate_max_omega, stable_tau

log = logging.getLogger("wavekrylov")

EXIT_OK, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2

# accepted spellings for builtin generator parameters
_ALIASES = {"n": "n_cells", "len": "length", "L": "length"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: dict = None
    omega_min: float = 0.0
    omega_max: float = 1.0
    steps_L: object = 100
    tau: float = None
    m_max: int = 40
    n_accept: int = 1
    residual_tol: float = 1e-5
    seed: int = 0
    output_dir: str = "."
    power_iters: int = 100
    cfl_safety: float = 0.95
    omega_grid: str = None
    oracle_cap: int = problems.ORACLE_CAP
    base_dir: str = field(default=".", repr=False)
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d, base_dir="."):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__ if f not in ("base_dir", "raw")}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**d, base_dir=base_dir, raw=dict(d))
        cfg.validate()
        return cfg

    def validate(self):
        if self.problem is not None:
            if not isinstance(self.problem, dict):
                raise ConfigError("'problem' must be an object")
            if "name" not in self.problem and "matrix_market" not in self.problem:
                raise ConfigError("'problem' needs 'name' or 'matrix_market'")
        if not 0 <= self.omega_min < self.omega_max:
            raise ConfigError("need 0 <= omega_min < omega_max")
        for L in self.steps_list:
            if not isinstance(L, int) or L < 1:
                raise ConfigError("steps_L must be a positive integer (or list of them)")
        if self.tau is not None and not self.tau > 0:
            raise ConfigError("tau must be positive")
        if self.m_max < 1 or self.n_accept < 1:
            raise ConfigError("m_max and n_accept must be >= 1")
        if not self.residual_tol > 0:
            raise ConfigError("residual_tol must be positive")
        if not 0 < self.cfl_safety < 1:
            raise ConfigError("cfl_safety must lie in (0, 1)")

    @property
    def steps_list(self):
        return self.steps_L if isinstance(self.steps_L, list) else [self.steps_L]

    def pencil(self):
        if self.problem is None:
            raise ConfigError("config needs a 'problem' entry")
        return build_problem(self.problem, self.base_dir)

    def resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def load_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"config not found: {path}")
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    return RunConfig.from_dict(d, base_dir=os.path.dirname(os.path.abspath(path)))


def build_problem(spec, base_dir="."):
    """Pencil from a ``{"name": ..., params}`` or ``{"matrix_market": {"S":..,"M":..}}`` dict."""
    if "matrix_market" in spec:
        mm = spec["matrix_market"]
        try:
            pS, pM = mm["S"], mm["M"]
        except (KeyError, TypeError):
            raise ConfigError("matrix_market needs 'S' and 'M' paths") from None
        join = (lambda p: p if os.path.isabs(p) else os.path.join(base_dir, p))
        return problems.load_matrix_market(join(pS), join(pM))
    name = spec["name"]
    if name not in problems.BUILTIN:
        raise ConfigError(
            f"unknown problem '{name}'; available: {', '.join(sorted(problems.BUILTIN))}")
    params = {_ALIASES.get(k, k): v for k, v in spec.items() if k != "name"}
    try:
        return problems.BUILTIN[name](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


def _fmt(x):
    return f"{x:.17g}"


def _json_dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _resolve_tau(cfg, pencil):
    if cfg.tau is not None:
        return cfg.tau, "config", None
    est, _ = estimate_max_omega(pencil.minv, pencil.stiffness, iters=cfg.power_iters,
                                seed=cfg.seed)
    return stable_tau(est, cfg.cfl_safety), "power_iteration", est


def _outdir(args, cfg):
    out = args.out or (cfg.resolve(cfg.output_dir) if cfg else ".")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_solve(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    pencil = cfg.pencil()
    tau, tau_source, est = _resolve_tau(cfg, pencil)
    L = cfg.steps_list[0]
    spec = FilterSpec(cfg.omega_min, cfg.omega_max, tau, L)
    sc = SolverConfig(spec, m_max=cfg.m_max, n_accept_target=cfg.n_accept,
                      residual_tol=cfg.residual_tol, seed=cfg.seed,
                      power_iters=cfg.power_iters)
    result = solve(pencil, sc)
    out = _outdir(args, cfg)

    echo = dict(cfg.raw, seed=cfg.seed)
    results = {
        "config_echo": echo,
        "tau": tau,
        "tau_source": tau_source,
        "omega_max_estimate": est if est is not None else result.omega_max_estimate,
        "cfl_safety": cfg.cfl_safety,
        "power_iters": cfg.power_iters,
        "L": L,
        "T": L * tau,
        "m_reached": result.m_reached,
        "spmv_count": result.spmv_count,
        "spmv_breakdown": result.spmv_breakdown,
        "stop_reason": result.stop_reason,
        "accepted": [{"omega": p.omega, "omega_sq": p.omega_sq, "residual": p.residual,
                      "mu": p.mu} for p in result.accepted],
        "wall_time": result.wall_time,
    }
    if result.warning:
        results["warning"] = result.warning
    _json_dump(results, os.path.join(out, "results.json"))

    with open(os.path.join(out, "history.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "pair_index", "omega", "residual", "mu", "accepted"])
        for rep in result.history:
            for j, p in enumerate(rep.pairs):
                w.writerow([rep.step, j, _fmt(p.omega), _fmt(p.residual), _fmt(p.mu),
                            "true" if p.accepted else "false"])
    log.info("accepted %d pair(s) at m=%d", len(result.accepted), result.m_reached)
    return EXIT_INCOMPLETE if result.warning else EXIT_OK


def parse_grid(text):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigError(f"omega grid must look like MIN:MAX:COUNT, got {text!r}") from None
    if count < 1 or lo < 0 or hi < lo:
        raise ConfigError(f"invalid omega grid {text!r}")
    return np.linspace(lo, hi, count)


def cmd_filter_curve(args):
    cfg = load_config(args.config)
    grid_text = args.omega_grid or cfg.omega_grid or f"0:{max(10.0, 3 * cfg.omega_max)}:1001"
    omegas = parse_grid(grid_text)
    if cfg.tau is None:
        pencil = cfg.pencil()
        tau, tau_source, _ = _resolve_tau(cfg, pencil)
    else:
        tau, tau_source = cfg.tau, "config"
    out = _outdir(args, cfg)
    files = []
    for L in cfg.steps_list:
        spec = FilterSpec(cfg.omega_min, cfg.omega_max, tau, L)
        name = "filter.csv" if len(cfg.steps_list) == 1 else f"filter_L{L}.csv"
        write_filter_csv(filter_curve(spec, omegas), os.path.join(out, name))
        files.append({"file": name, "L": L, "T": L * tau})
    _json_dump({"tau": tau, "tau_source": tau_source, "omega_grid": grid_text,
                "omega_min": cfg.omega_min, "omega_max": cfg.omega_max, "curves": files},
               os.path.join(out, "filter_meta.json"))
    return EXIT_OK


def cmd_spectrum(args):
    cfg = load_config(args.config)
    pencil = cfg.pencil()
    w2, _ = problems.dense_reference_eigs(pencil, cap=cfg.oracle_cap)
    omegas = np.sqrt(np.maximum(w2, 0.0))
    out = _outdir(args, cfg)
    analytic = pencil.analytic_spectrum
    meta = {"label": pencil.label, "n": pencil.n}
    with open(os.path.join(out, "spectrum.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["index", "omega", "omega_sq"] + (["analytic_omega"] if analytic is not None else [])
        w.writerow(header)
        for i, (om, om2) in enumerate(zip(omegas, w2)):
            row = [i, _fmt(om), _fmt(om2)]
            if analytic is not None:
                row.append(_fmt(analytic[i]))
            w.writerow(row)
    if analytic is not None:
        meta["max_analytic_deviation_omega_sq"] = float(np.abs(w2 - analytic ** 2).max())
    _json_dump(meta, os.path.join(out, "spectrum_meta.json"))
    return EXIT_OK


def _parse_value(text):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    raise ConfigError(f"cannot parse parameter value {text!r}")


def cmd_gen(args):
    if args.config:
        cfg = load_config(args.config)
        spec = cfg.problem
        if spec is None:
            raise ConfigError("config needs a 'problem' entry")
    else:
        if not args.problem:
            raise ConfigError("gen needs a problem name (or --config)")
        spec = {"name": args.problem}
        for item in args.params:
            if "=" not in item:
                raise ConfigError(f"parameters must be key=value, got {item!r}")
            k, v = item.split("=", 1)
            spec[k] = _parse_value(v)
        cfg = None
    if "name" not in spec:
        raise ConfigError("gen works on builtin problems only")
    pencil = build_problem(spec)
    out = _outdir(args, cfg)
    stem = args.stem or spec["name"]
    pS = os.path.join(out, f"{stem}_S.mtx")
    pM = os.path.join(out, f"{stem}_M.mtx")
    problems.save_matrix_market(pencil, pS, pM)
    side = {"problem": spec["name"], "params": pencil.params, "label": pencil.label,
            "n": pencil.n, "S": os.path.basename(pS), "M": os.path.basename(pM),
            "analytic_spectrum": (pencil.analytic_spectrum.tolist()
                                  if pencil.analytic_spectrum is not None else None)}
    _json_dump(side, os.path.join(out, f"{stem}.json"))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser():
    p = _Parser(prog="wavekrylov", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run the filtered Krylov solver")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("filter-curve", help="tabulate the discrete filter")
    f.add_argument("--config", required=True)
    f.add_argument("--out")
    f.add_argument("--omega-grid")
    f.set_defaults(func=cmd_filter_curve)

    sp = sub.add_parser("spectrum", help="dense reference spectrum")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    g = sub.add_parser("gen", help="write a builtin pencil as Matrix Market files")
    g.add_argument("problem", nargs="?")
    g.add_argument("params", nargs="*", help="key=value generator parameters")
    g.add_argument("--config")
    g.add_argument("--out")
    g.add_argument("--stem")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ProblemError, MatrixMarketError, SparseError, SolverError,
            FilterError, StepperError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

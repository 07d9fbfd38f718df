"""Command-line interface: ``spinnet verify|run|lattice validate|export-schur``.

Exit codes: 0 success, 1 verification or validation failure, 2 usage error,
3 budget exhausted before the sweep finished.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import yaml

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2, 3
OUTPUT_ENV = "SPINNET_OUTPUT_DIR"

CONFIG_SCHEMA = """\
config file (YAML):
  problem:
    kind: triangular | kagome
    n: even int >= 4           (triangular only)
    j1: float = 1.0            (triangular only)
    j2: float = 0.0            (triangular only)
    lattice_file: path         (kagome only; default is the bundled 18-site cluster)
  ansatz:
    kinds: [two-vertex-triangular | three-vertex-triangular | three-vertex-kagome, ...]
    p: [ints]  or  {kind: [ints], ...}
  seeds: int >= 1
  master_seed: int = 0
  optimizer: {learning_rate, beta1, beta2, epsilon, max_iters, stall_window,
              stall_tol, init_alpha, symmetry_check_every}
  output_dir: path             (default: $SPINNET_OUTPUT_DIR or ./spinnet-output)
  budget:
    max_seconds: float > 0     (no new cells start after this)
    max_memory_mb: float > 0   (refuse configs whose statevectors would not fit)
"""


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


def load_config(path) -> dict:
    """Parse and validate a run config, collecting every problem before raising."""
    from .vqe import ANSATZ_KINDS, OptimizerConfig

    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: parse error: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    problems = []
    prob = raw.get("problem") or {}
    kind = prob.get("kind")
    if kind not in ("triangular", "kagome"):
        problems.append(f"problem.kind: expected 'triangular' or 'kagome', got {kind!r}")
    n = prob.get("n")
    if kind == "triangular" and (not isinstance(n, int) or n < 4 or n % 2):
        problems.append(f"problem.n: expected an even int >= 4, got {n!r}")
    if kind == "triangular" and isinstance(n, int) and n > 20:
        problems.append(f"problem.n: {n} exceeds the supported 20 qubits")
    lattice_file = prob.get("lattice_file")
    if lattice_file is not None:
        lattice_file = str((path.parent / lattice_file).resolve()) if not Path(lattice_file).is_absolute() \
            else lattice_file
        if not Path(lattice_file).exists():
            problems.append(f"problem.lattice_file: {lattice_file} does not exist")
    for key in ("j1", "j2"):
        if key in prob and not isinstance(prob[key], (int, float)):
            problems.append(f"problem.{key}: expected a number")
    ans = raw.get("ansatz") or {}
    kinds = ans.get("kinds") or []
    if not kinds:
        problems.append("ansatz.kinds: must list at least one ansatz")
    for k in kinds:
        if k not in ANSATZ_KINDS:
            problems.append(f"ansatz.kinds: unknown kind {k!r}")
        elif kind == "kagome" and k != "three-vertex-kagome":
            problems.append(f"ansatz.kinds: {k} does not apply to the kagome problem")
        elif kind == "triangular" and k == "three-vertex-kagome":
            problems.append("ansatz.kinds: three-vertex-kagome needs problem.kind = kagome")
    p = ans.get("p")
    p_map = p if isinstance(p, dict) else {k: p for k in kinds}
    for k in kinds:
        grid = p_map.get(k)
        if not isinstance(grid, list) or not grid or not all(isinstance(v, int) and v >= 1 for v in grid):
            problems.append(f"ansatz.p[{k}]: expected a non-empty list of ints >= 1, got {grid!r}")
    seeds = raw.get("seeds")
    if not isinstance(seeds, int) or seeds < 1:
        problems.append(f"seeds: expected an int >= 1, got {seeds!r}")
    opt_raw = raw.get("optimizer") or {}
    unknown = set(opt_raw) - set(OptimizerConfig.__dataclass_fields__)
    if unknown:
        problems.append(f"optimizer: unknown keys {sorted(unknown)}")
    optimizer = None
    if not unknown:
        try:
            optimizer = OptimizerConfig(**opt_raw)
        except (TypeError, ValueError) as exc:
            problems.append(f"optimizer: {exc}")
    budget = raw.get("budget") or {}
    for key in ("max_seconds", "max_memory_mb"):
        if key in budget and not (isinstance(budget[key], (int, float)) and budget[key] > 0):
            problems.append(f"budget.{key}: must be positive")
    n_eff = 18 if kind == "kagome" else n
    if isinstance(n_eff, int) and "max_memory_mb" in budget and isinstance(budget["max_memory_mb"], (int, float)):
        # a handful of live statevectors per optimisation
        need = 8 * 16 * 2**n_eff / 2**20
        if need > budget["max_memory_mb"]:
            problems.append(f"budget.max_memory_mb: about {need:.0f} MB needed for n={n_eff}")
    if problems:
        raise ConfigError(problems)
    out = raw.get("output_dir") or os.environ.get(OUTPUT_ENV) or "spinnet-output"
    return {
        "problem": {"kind": kind, "n": n_eff, "j1": float(prob.get("j1", 1.0)), "j2": float(prob.get("j2", 0.0)),
                    "lattice_file": lattice_file},
        "kinds": list(kinds),
        "p": {k: list(p_map[k]) for k in kinds},
        "seeds": seeds,
        "master_seed": int(raw.get("master_seed", 0)),
        "optimizer": optimizer,
        "output_dir": out,
        "max_seconds": budget.get("max_seconds"),
    }


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = list(SUITES) if args.suite == "all" else [args.suite]
    checks = run_suites(names)
    failed = [c for c in checks if not c.ok]
    if args.json:
        print(json.dumps({"suites": names, "passed": not failed, "checks": [c.as_dict() for c in checks]}, indent=2))
    else:
        for c in checks:
            print(c.line())
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_run(args) -> int:
    from .vqe import Problem, experiment_sweep

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print("invalid config:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_FAIL
    pc = cfg["problem"]
    problem = Problem(pc["kind"], pc["n"], pc["j1"], pc["j2"], pc["lattice_file"])
    result = experiment_sweep(problem, cfg["kinds"], None, cfg["seeds"], cfg["optimizer"], cfg["output_dir"],
                              cfg["master_seed"], cfg["max_seconds"], args.jobs, p_for_kind=cfg["p"])
    print(f"{len(result.records)} records ({result.skipped} reused) in {cfg['output_dir']}")
    if result.truncated:
        print("budget exhausted: sweep truncated", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_lattice_validate(args) -> int:
    from .hamiltonian import load_lattice, validate_lattice

    try:
        spec = load_lattice(args.path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    checks = validate_lattice(spec, kagome=not args.generic)
    for c in checks:
        print(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail and not c.ok else ""))
    print(f"{spec.n} sites, {len(spec.edges)} edges, {len(spec.triangles)} triangles, "
          f"{len(spec.singlet_matching)} singlet pairs")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_FAIL


def cmd_export_schur(args) -> int:
    from .schur import MAX_QUBITS, build_schur, export_schur_csv

    if not 1 <= args.n <= MAX_QUBITS:
        print(f"error: n must be in [1, {MAX_QUBITS}]", file=sys.stderr)
        return EXIT_USAGE
    s = build_schur(args.n, args.convention)
    if args.output == "-":
        export_schur_csv(s, sys.stdout)
        return EXIT_OK
    out = Path(args.output) if args.output else Path(os.environ.get(OUTPUT_ENV, ".")) / f"schur-{args.n}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    export_schur_csv(s, out)
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinnet", description="SU(2)-equivariant circuit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("suite", choices=["schur", "generators", "twirl", "gradients", "all"])
    v.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="run a VQE sweep from a config file",
                       epilog=CONFIG_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("config")
    r.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")
    r.set_defaults(func=cmd_run)

    lat = sub.add_parser("lattice", help="lattice spec tools")
    lsub = lat.add_subparsers(dest="lattice_command", required=True)
    lv = lsub.add_parser("validate", help="check a lattice spec file")
    lv.add_argument("path")
    lv.add_argument("--generic", action="store_true", help="skip the Kagome-specific checks")
    lv.set_defaults(func=cmd_lattice_validate)

    e = sub.add_parser("export-schur", help="write the n-qubit Schur transform as CSV")
    e.add_argument("n", type=int)
    e.add_argument("--output", "-o", help="file path, or - for stdout")
    e.add_argument("--convention", default="tableau-parity", choices=["tableau-parity", "cg-product"])
    e.set_defaults(func=cmd_export_schur)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Commands: ``entropy``, ``mi``, ``cond-entropy``, ``spectrum``, ``test``,
``benchmark``, ``replay``.  Inputs are headerless CSV files (rows =
observations, columns = dimensions).  Every output embeds a run manifest —
the resolved configuration, seed, library version, backend, and input
digests — and ``replay`` re-executes a manifest to byte-identical output.

Exit codes: 0 success/accept, 2 usage or input error, 3 independence
rejected, 4 numeric error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from itertools import product

import numpy as np

from . import __version__
from ._accel import active_backend
from .benchmark_data import DENSITY_IDS, RANDOM_DENSITY, BenchmarkScenario
from .entropy import (
    conditional_entropy,
    gram_entropy,
    joint_entropy,
    mutual_information,
    renyi_entropy,
)
from .errors import InputError, NumericError
from .independence import (
    STATISTICS,
    TestConfig,
    acceptance_rate,
    draw_permutations,
    run_test,
)
from .kernels import GaussianKernel, gram, median_heuristic, to_density

SCHEMA_VERSION = 1
_EXIT_REJECT = 3
_EXIT_USAGE = 2
_EXIT_NUMERIC = 4


# ---------------------------------------------------------------------------
# input handling

def read_matrix(path: str) -> np.ndarray:
    """Parse a headerless CSV of floats, reporting the offending line."""
    rows: list[list[float]] = []
    width = None
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            try:
                row = [float(tok) for tok in tokens]
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed number in CSV row") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(
                    f"{path}:{lineno}: expected {width} columns, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(path: str, values: np.ndarray) -> None:
    """Serialize a matrix at 17 significant digits (exact float round trip)."""
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        for row in values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                h.update(chunk)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return h.hexdigest()


def _split_cols(matrix: np.ndarray, cols: str, path: str) -> tuple[np.ndarray, np.ndarray]:
    """``--cols A:B``: x takes the first A columns, y the next B."""
    try:
        a_txt, b_txt = cols.split(":")
        a, b = int(a_txt), int(b_txt)
    except ValueError:
        raise InputError(f"--cols expects 'A:B' with integer widths, got {cols!r}") from None
    if a < 1 or b < 1 or a + b > matrix.shape[1]:
        raise InputError(
            f"--cols {cols}: needs {a}+{b} columns, {path} has {matrix.shape[1]}"
        )
    return matrix[:, :a], matrix[:, a : a + b]


def _load_xy(config: dict, inputs: list[dict]) -> tuple[np.ndarray, np.ndarray]:
    arrays = {rec["role"]: read_matrix(rec["path"]) for rec in inputs}
    if config.get("cols"):
        x, y = _split_cols(arrays["xy"], config["cols"], inputs[0]["path"])
    else:
        x, y = arrays["x"], arrays["y"]
    if x.shape[0] != y.shape[0]:
        raise InputError(f"row count mismatch: {x.shape[0]} vs {y.shape[0]}")
    return x, y


# ---------------------------------------------------------------------------
# manifest plumbing

def build_manifest(command: str, config: dict, inputs: list[dict]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "version": __version__,
        "backend": active_backend(),
        "inputs": [
            {"role": rec["role"], "path": rec["path"], "sha256": rec["sha256"]}
            for rec in inputs
        ],
    }


def _manifest_line(manifest: dict) -> str:
    return "# manifest: " + json.dumps(manifest, sort_keys=True, separators=(",", ":"))


def _json_output(manifest: dict, payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "manifest": manifest}
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _resolve_sigma(sigma_cfg, data: np.ndarray) -> float:
    if sigma_cfg == "median":
        return median_heuristic(data)
    return float(sigma_cfg)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("GRAMENTROPY_SEED", "").strip()
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"GRAMENTROPY_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_sigma_flag(text: str):
    if text == "median":
        return "median"
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"--sigma expects a number or 'median', got {text!r}") from None
    if not value > 0.0:
        raise InputError(f"--sigma must be positive, got {text!r}")
    return value


def _parse_angle(token: str) -> float:
    token = token.strip().lower()
    if "pi" in token:
        if token == "pi":
            return math.pi
        if token.startswith("pi/"):
            return math.pi / float(token[3:])
        raise InputError(f"cannot parse angle {token!r}; use radians or 'pi/<k>'")
    return float(token)


def _perm_digest(perms: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(perms.shape).encode())
    h.update(np.ascontiguousarray(perms, dtype=np.int64).tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# command handlers (pure: config + inputs -> exit code, output text)

def _run_entropy(config: dict, inputs: list[dict]) -> tuple[int, str]:
    data = read_matrix(inputs[0]["path"])
    sigma = _resolve_sigma(config["sigma"], data)
    g = gram(data, GaussianKernel(sigma))
    state = to_density(g)
    bits = renyi_entropy(state, config["alpha"])
    spectrum = state.spectrum.eigenvalues
    manifest = build_manifest("entropy", config, inputs)
    if config["json"]:
        payload = {
            "result": {
                "n": int(data.shape[0]),
                "d": int(data.shape[1]),
                "sigma": sigma,
                "alpha": config["alpha"],
                "entropy_bits": bits,
                "top_eigenvalues": [float(v) for v in spectrum[:10]],
            }
        }
        return 0, _json_output(manifest, payload)
    lines = [
        _manifest_line(manifest),
        f"n = {data.shape[0]}",
        f"d = {data.shape[1]}",
        f"sigma = {_fmt(sigma)}",
        f"alpha = {_fmt(config['alpha'])}",
        f"entropy_bits = {_fmt(bits)}",
        "top_eigenvalues = " + " ".join(_fmt(v) for v in spectrum[:10]),
    ]
    return 0, "\n".join(lines) + "\n"


def _run_info(config: dict, inputs: list[dict]) -> tuple[int, str]:
    x, y = _load_xy(config, inputs)
    gx = gram(x, GaussianKernel(_resolve_sigma(config["sigma"], x)))
    gy = gram(y, GaussianKernel(_resolve_sigma(config["sigma"], y)))
    alpha = config["alpha"]
    hx = gram_entropy(gx, alpha)
    hy = gram_entropy(gy, alpha)
    hxy = joint_entropy(gx, gy, alpha)
    if config["command"] == "mi":
        value = mutual_information(gx, gy, alpha)
        key = "mutual_information_bits"
    else:
        value = conditional_entropy(gx, gy, alpha)
        key = "conditional_entropy_bits"
    manifest = build_manifest(config["command"], config, inputs)
    if config["json"]:
        payload = {
            "result": {
                key: value,
                "h_x_bits": hx,
                "h_y_bits": hy,
                "joint_bits": hxy,
            }
        }
        return 0, _json_output(manifest, payload)
    lines = [
        _manifest_line(manifest),
        f"{key} = {_fmt(value)}",
        f"h_x_bits = {_fmt(hx)}",
        f"h_y_bits = {_fmt(hy)}",
        f"joint_bits = {_fmt(hxy)}",
    ]
    return 0, "\n".join(lines) + "\n"


def _run_spectrum(config: dict, inputs: list[dict]) -> tuple[int, str]:
    data = read_matrix(inputs[0]["path"])
    sigma = _resolve_sigma(config["sigma"], data)
    state = to_density(gram(data, GaussianKernel(sigma)))
    eigenvalues = state.spectrum.eigenvalues
    manifest = build_manifest("spectrum", config, inputs)
    if config["json"]:
        payload = {"result": {"sigma": sigma, "eigenvalues": [float(v) for v in eigenvalues]}}
        return 0, _json_output(manifest, payload)
    lines = [_manifest_line(manifest), f"# sigma = {_fmt(sigma)}"]
    lines.extend(_fmt(v) for v in eigenvalues)
    return 0, "\n".join(lines) + "\n"


def _run_test(config: dict, inputs: list[dict]) -> tuple[int, str]:
    x, y = _load_xy(config, inputs)
    stats = list(STATISTICS) if config["stat"] == "all" else [config["stat"]]
    cfg = TestConfig(
        alpha=config["alpha"],
        sigma_x=None if config["sigma"] == "median" else float(config["sigma"]),
        sigma_y=None if config["sigma"] == "median" else float(config["sigma"]),
        k=config["k"],
        tau=config["tau"],
        seed=config["seed"],
    )
    n = x.shape[0]
    shared = (
        draw_permutations(n, cfg.k, np.random.default_rng(cfg.seed))
        if config["share_perms"]
        else None
    )
    results = []
    for idx, stat in enumerate(stats):
        if shared is not None:
            perms = shared
        else:
            rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, idx)))
            perms = draw_permutations(n, cfg.k, rng)
        res = run_test(x, y, cfg, stat=stat, permutations=perms)
        nulls = np.asarray(res.null_values)
        results.append(
            {
                "stat": stat,
                "gap": res.gap,
                "threshold": res.threshold,
                "accept_h0": res.accept_h0,
                "null": {
                    "k": int(nulls.size),
                    "min": float(nulls.min()),
                    "median": float(np.median(nulls)),
                    "max": float(nulls.max()),
                },
                "perm_digest": _perm_digest(perms),
            }
        )
    manifest = build_manifest("test", config, inputs)
    text = _json_output(manifest, {"results": results})
    exit_code = 0 if results[0]["accept_h0"] else _EXIT_REJECT
    return exit_code, text


def _run_benchmark(config: dict, inputs: list[dict]) -> tuple[int, str]:
    angles = config["angles"]
    dims = config["dims"]
    sizes = config["sizes"]
    stats = config["stats"]
    cells = list(product(angles, dims, sizes, stats))
    if len(cells) > config["max_cells"]:
        raise InputError(
            f"grid has {len(cells)} cells, above the --max-cells budget of "
            f"{config['max_cells']}"
        )
    cfg = TestConfig(
        alpha=config["alpha"],
        sigma_x=None if config["sigma"] == "median" else float(config["sigma"]),
        sigma_y=None if config["sigma"] == "median" else float(config["sigma"]),
        k=config["k"],
        tau=config["tau"],
        seed=config["seed"],
    )
    manifest = build_manifest("benchmark", config, inputs)
    lines = [_manifest_line(manifest), "angle,d,n,stat,rate,trials,seed"]
    for angle, d, n, stat in cells:
        scenario = BenchmarkScenario(
            density_x=config["density_x"],
            density_y=config["density_y"],
            theta=angle,
            d=d,
            n=n,
            seed=config["seed"],
        )
        rate = acceptance_rate(scenario, cfg, config["trials"], stat=stat)
        lines.append(
            f"{_fmt(angle)},{d},{n},{stat},{_fmt(rate)},{config['trials']},{config['seed']}"
        )
    return 0, "\n".join(lines) + "\n"


_HANDLERS = {
    "entropy": _run_entropy,
    "mi": _run_info,
    "cond-entropy": _run_info,
    "spectrum": _run_spectrum,
    "test": _run_test,
    "benchmark": _run_benchmark,
}


# ---------------------------------------------------------------------------
# replay

def _extract_manifest(path: str) -> dict:
    with open(path, "r") as fh:
        head = fh.read()
    try:
        doc = json.loads(head)
        if isinstance(doc, dict) and "manifest" in doc:
            return doc["manifest"]
        if isinstance(doc, dict) and "command" in doc:
            return doc
    except json.JSONDecodeError:
        for line in head.splitlines():
            if line.startswith("# manifest: "):
                return json.loads(line[len("# manifest: ") :])
    raise InputError(f"{path}: no run manifest found")


def _run_replay(manifest_path: str) -> tuple[int, str]:
    manifest = _extract_manifest(manifest_path)
    command = manifest.get("command")
    if command not in _HANDLERS:
        raise InputError(f"manifest names unknown command {command!r}")
    if manifest.get("backend") and manifest["backend"] != active_backend():
        print(
            f"warning: manifest was produced with backend {manifest['backend']!r}, "
            f"running {active_backend()!r}",
            file=sys.stderr,
        )
    inputs = []
    for rec in manifest.get("inputs", []):
        digest = _sha256_file(rec["path"])
        if digest != rec["sha256"]:
            raise InputError(
                f"{rec['path']}: content changed since the manifest was written"
            )
        inputs.append({"role": rec["role"], "path": rec["path"], "sha256": digest})
    return _HANDLERS[command](manifest["config"], inputs)


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser, *, sigma=True, alpha=True, seed=True,
                json_flag=True) -> None:
    if sigma:
        p.add_argument("--sigma", default="median",
                       help="kernel width: a positive number or 'median' (default)")
    if alpha:
        p.add_argument("--alpha", type=float, default=1.01,
                       help="entropy order (default 1.01)")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $GRAMENTROPY_SEED or 0)")
    if json_flag:
        p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--out", default=None, help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gramentropy",
        description="Matrix-based entropy, mutual information, and independence tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Renyi entropy of one sample")
    p.add_argument("input", help="CSV file (rows = observations)")
    p.add_argument("--kernel", choices=["gaussian"], default="gaussian")
    _add_common(p)

    for name, help_text in (
        ("mi", "mutual information between two samples"),
        ("cond-entropy", "conditional entropy of x given y"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input_x", help="CSV for x (or the combined file with --cols)")
        p.add_argument("input_y", nargs="?", default=None, help="CSV for y")
        p.add_argument("--cols", default=None,
                       help="'A:B': x = first A columns, y = next B columns")
        p.add_argument("--kernel", choices=["gaussian"], default="gaussian")
        _add_common(p)

    p = sub.add_parser("spectrum", help="density spectrum of one sample")
    p.add_argument("input")
    p.add_argument("--kernel", choices=["gaussian"], default="gaussian")
    _add_common(p, alpha=False, seed=False)

    p = sub.add_parser("test", help="permutation independence test")
    p.add_argument("input_x")
    p.add_argument("input_y", nargs="?", default=None)
    p.add_argument("--cols", default=None,
                   help="'A:B': x = first A columns, y = next B columns")
    p.add_argument("--kernel", choices=["gaussian"], default="gaussian")
    p.add_argument("--stat", choices=list(STATISTICS) + ["all"], default="gap")
    p.add_argument("--k", type=int, default=100, help="permutation count (default 100)")
    p.add_argument("--tau", type=float, default=0.05, help="significance level")
    p.add_argument("--share-perms", action="store_true",
                   help="evaluate every statistic on one shared permutation set")
    _add_common(p, json_flag=False)

    p = sub.add_parser("benchmark", help="acceptance-rate grid (CSV output)")
    p.add_argument("--angles", default="0",
                   help="comma list of rotation angles; accepts 'pi/<k>' tokens")
    p.add_argument("--dims", default="1", help="comma list of dimensions from {1,2,3}")
    p.add_argument("--sizes", default="128", help="comma list of sample sizes")
    p.add_argument("--stats", default="gap",
                   help=f"comma list from {{{','.join(STATISTICS)}}}")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--density-x", default=RANDOM_DENSITY,
                   help=f"density id or '{RANDOM_DENSITY}' (per-trial uniform draw)")
    p.add_argument("--density-y", default=RANDOM_DENSITY)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--max-cells", type=int, default=64,
                   help="refuse grids larger than this many cells")
    _add_common(p, json_flag=False)

    p = sub.add_parser("replay", help="re-run a manifest (or a file embedding one)")
    p.add_argument("manifest", help="manifest JSON, or an output file that embeds one")
    p.add_argument("--out", default=None)

    p = sub.add_parser("densities", help="list benchmark density ids")
    p.add_argument("--out", default=None)

    return parser


def _file_inputs(cmd: str, args) -> tuple[dict, list[dict]]:
    """Resolve the per-command config dict and input records."""
    if cmd == "entropy":
        config = {
            "command": cmd,
            "kernel": args.kernel,
            "sigma": _parse_sigma_flag(args.sigma),
            "alpha": float(args.alpha),
            "seed": _resolve_seed(args),
            "json": bool(args.json),
        }
        inputs = [{"role": "data", "path": args.input, "sha256": _sha256_file(args.input)}]
        return config, inputs
    if cmd in ("mi", "cond-entropy", "test"):
        if (args.input_y is None) == (args.cols is None):
            raise InputError("supply either two input files or one file with --cols")
        config = {
            "command": cmd,
            "kernel": args.kernel,
            "sigma": _parse_sigma_flag(args.sigma),
            "alpha": float(args.alpha),
            "seed": _resolve_seed(args),
            "cols": args.cols,
        }
        if cmd == "test":
            config.update(
                {
                    "stat": args.stat,
                    "k": int(args.k),
                    "tau": float(args.tau),
                    "share_perms": bool(args.share_perms),
                }
            )
        else:
            config["json"] = bool(args.json)
        if args.cols:
            inputs = [
                {"role": "xy", "path": args.input_x, "sha256": _sha256_file(args.input_x)}
            ]
        else:
            inputs = [
                {"role": "x", "path": args.input_x, "sha256": _sha256_file(args.input_x)},
                {"role": "y", "path": args.input_y, "sha256": _sha256_file(args.input_y)},
            ]
        return config, inputs
    if cmd == "spectrum":
        config = {
            "command": cmd,
            "kernel": args.kernel,
            "sigma": _parse_sigma_flag(args.sigma),
            "json": bool(args.json),
        }
        inputs = [{"role": "data", "path": args.input, "sha256": _sha256_file(args.input)}]
        return config, inputs
    if cmd == "benchmark":
        for name in (args.density_x, args.density_y):
            if name != RANDOM_DENSITY and name not in DENSITY_IDS:
                raise InputError(f"unknown density {name!r}; see 'gramentropy densities'")
        stats = [s.strip() for s in args.stats.split(",") if s.strip()]
        for s in stats:
            if s not in STATISTICS:
                raise InputError(f"unknown statistic {s!r}; choose from {STATISTICS}")
        config = {
            "command": cmd,
            "angles": [_parse_angle(t) for t in args.angles.split(",") if t.strip()],
            "dims": [int(t) for t in args.dims.split(",") if t.strip()],
            "sizes": [int(t) for t in args.sizes.split(",") if t.strip()],
            "stats": stats,
            "trials": int(args.trials),
            "density_x": args.density_x,
            "density_y": args.density_y,
            "sigma": _parse_sigma_flag(args.sigma),
            "alpha": float(args.alpha),
            "k": int(args.k),
            "tau": float(args.tau),
            "seed": _resolve_seed(args),
            "max_cells": int(args.max_cells),
        }
        return config, []
    raise InputError(f"unhandled command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            code, text = _run_replay(args.manifest)
        elif args.command == "densities":
            code, text = 0, "\n".join(DENSITY_IDS) + "\n"
        else:
            config, inputs = _file_inputs(args.command, args)
            code, text = _HANDLERS[args.command](config, inputs)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()

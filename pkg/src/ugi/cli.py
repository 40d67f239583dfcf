"""Command line interface: ``ugi eval``, ``ugi oracle`` and ``ugi verify``.

Every invocation prints exactly one JSON record (or writes it to ``--out``).
Exit codes: 0 success, 1 usage error, 2 malformed or mismatched matrix
input, 3 numerical failure.

Matrix files are JSON documents::

    {"rows": 2, "cols": 2, "data": [[[1.0, 0.0], [0.0, 0.5]], [[0.0, 0.0], [1.0, 0.0]]]}

where every entry is a ``[re, im]`` pair.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import integrals, oracles
from .errors import InputError, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
KINDS = ("i1", "i2", "i2rect", "i3")
NEEDS = {"i1": "ab", "i2": "abcd", "i2rect": "abcd", "i3": "ab"}
SERIES_TOL = 1e-6
MC_NSIGMA = 5.0
DEFAULT_SAMPLES = 200_000
DEFAULT_MAX_WEIGHT = 24


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ file formats


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(doc) -> np.ndarray:
    """Parse and validate a MatrixFile document."""
    if not isinstance(doc, dict) or not {"rows", "cols", "data"} <= doc.keys():
        raise InputError("matrix file must be an object with rows, cols and data")
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
        raise InputError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows:
        raise InputError(f"data must hold {rows} rows")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"row {i} must hold {cols} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
                or not all(math.isfinite(x) for x in entry)
            ):
                raise InputError(f"entry ({i}, {j}) must be a pair [re, im] of finite numbers")
            out[i, j] = complex(entry[0], entry[1])
    return out


def read_matrix(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return matrix_from_json(doc)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_matrix(path: str, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(matrix_to_json(m)))


def dumps(record) -> str:
    """Serialise a record; floats use the shortest round-tripping repr."""
    return json.dumps(record, indent=2, allow_nan=False) + "\n"


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _real(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def digest(m: np.ndarray) -> str:
    return hashlib.sha256(json.dumps(matrix_to_json(m)).encode()).hexdigest()


# ------------------------------------------------------------------ inputs


def random_matrices(kind: str, n: int, m: Optional[int], seed: int) -> dict:
    """I.i.d. entries uniform on the complex disk of radius ``1/sqrt(n)``."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(1,))))
    if kind == "i2rect":
        if m is None:
            raise UsageError("--random i2rect needs --m")
        shapes = {"a": (n, m), "b": (m, n), "c": (n, m), "d": (m, n)}
    else:
        shapes = {k: (n, n) for k in NEEDS[kind]}
    out = {}
    for name, shape in shapes.items():
        radius = np.sqrt(rng.random(shape)) / np.sqrt(n)
        out[name] = radius * np.exp(2j * np.pi * rng.random(shape))
    return out


def load_inputs(args) -> dict:
    if getattr(args, "random", False):
        if args.n is None or args.n < 1:
            raise UsageError("--random needs --n >= 1")
        return random_matrices(args.kind, args.n, args.m, args.seed)
    mats = {}
    for name in NEEDS[args.kind]:
        path = getattr(args, name)
        if path is None:
            raise UsageError(f"{args.kind} needs --{name}")
        mats[name] = read_matrix(path)
    return mats


def _input_block(mats: dict) -> dict:
    return {k.upper(): {"shape": list(v.shape), "sha256": digest(v)} for k, v in mats.items()}


# --------------------------------------------------------------- computing


def closed_form(kind, mats, nu) -> integrals.IntegralResult:
    a, b = mats["a"], mats["b"]
    if kind == "i1":
        return integrals.eval_i1(a, b, nu)
    if kind == "i3":
        return integrals.eval_i3(a, b)
    c, d = mats["c"], mats["d"]
    if kind == "i2":
        return integrals.eval_i2(a, b, c, d, nu)
    return integrals.eval_i2_rect(a, b, c, d)


def monte_carlo(kind, mats, nu, eta, samples, seed, workers) -> oracles.MCEstimate:
    a, b = mats["a"], mats["b"]
    if kind == "i1":
        return oracles.mc_i1(a, b, nu, samples, seed, workers)
    if kind == "i3":
        return oracles.mc_i3(a, b, samples, seed, workers)
    c, d = mats["c"], mats["d"]
    if kind == "i2":
        return oracles.mc_i2(a, b, c, d, nu, samples, seed, workers)
    return oracles.mc_i2_rect_det(a, b, c, d, nu, eta, samples, seed, workers)


def series(kind, mats, nu, max_weight) -> Optional[oracles.SeriesEstimate]:
    if kind == "i1":
        return oracles.series_i1(mats["a"], mats["b"], nu, max_weight)
    if kind == "i2":
        return oracles.series_i2(mats["a"], mats["b"], mats["c"], mats["d"], nu, max_weight)
    return None


def _closed_diag(res: integrals.IntegralResult) -> dict:
    return {
        "spectra": [[_pair(z) for z in s.values] for s in res.spectra_used],
        "confluent_path": res.confluent_path,
        "min_gap": _real(res.min_gap_seen),
        "clustering_tolerance": res.clustering_tolerance,
        "kernel_truncation": res.kernel_truncation,
    }


def _mc_diag(est: oracles.MCEstimate) -> dict:
    return {
        "mean": _pair(est.mean),
        "stderr": [est.stderr_real, est.stderr_imag],
        "samples": est.samples,
        "seed": est.seed,
        "norm_warning": est.norm_warning,
    }


def _series_diag(est: oracles.SeriesEstimate) -> dict:
    return {
        "value": _pair(est.value),
        "max_weight": est.max_weight,
        "last_shell_magnitude": est.last_shell_magnitude,
        "terms": est.terms,
    }


def _command(args) -> dict:
    cmd = {"subcommand": args.command, "kind": args.kind}
    for key in ("mode", "nu", "eta", "random", "n", "m", "samples", "max_weight", "seed"):
        if hasattr(args, key):
            cmd[key] = getattr(args, key)
    return cmd


def run_eval(args) -> dict:
    mats = load_inputs(args)
    res = closed_form(args.kind, mats, args.nu)
    diag = _closed_diag(res)
    if res.conjecture:
        diag["conjecture"] = True
    return {
        "command": _command(args),
        "inputs": _input_block(mats),
        "value": _pair(res.value),
        "diagnostics": diag,
        "status": "ok",
    }


def run_oracle(args) -> dict:
    mats = load_inputs(args)
    if args.mode == "series":
        est = series(args.kind, mats, args.nu, args.max_weight)
        if est is None:
            raise UsageError(f"no series oracle for {args.kind}")
        return {
            "command": _command(args),
            "inputs": _input_block(mats),
            "value": _pair(est.value),
            "diagnostics": _series_diag(est),
            "status": "ok",
        }
    est = monte_carlo(args.kind, mats, args.nu, args.eta, args.samples, args.seed, args.workers)
    diag = _mc_diag(est)
    if args.kind == "i2rect":
        diag["conjecture"] = True
    return {
        "command": _command(args),
        "inputs": _input_block(mats),
        "value": _pair(est.mean),
        "diagnostics": diag,
        "status": "warn" if est.norm_warning else "ok",
    }


def run_verify(args) -> dict:
    mats = load_inputs(args)
    res = closed_form(args.kind, mats, args.nu)
    value = res.value
    diag = {"closed_form": _closed_diag(res)}
    failed = False
    ser = series(args.kind, mats, args.nu, args.max_weight)
    if ser is not None:
        rel = abs(ser.value - value) / max(abs(value), np.finfo(float).tiny)
        diag["series"] = _series_diag(ser)
        diag["series"]["relative_error"] = _real(rel)
        failed |= not rel <= SERIES_TOL
    else:
        diag["series"] = None
    est = monte_carlo(args.kind, mats, args.nu, 0, args.samples, args.seed, args.workers)
    z = est.zscores(value)
    diag["mc"] = _mc_diag(est)
    diag["mc"]["zscores"] = [_real(x) for x in z]
    failed |= not max(z) <= MC_NSIGMA
    if res.conjecture:
        diag["conjecture"] = True
    status = "fail" if failed else ("warn" if est.norm_warning else "ok")
    return {
        "command": _command(args),
        "inputs": _input_block(mats),
        "value": _pair(value),
        "diagnostics": diag,
        "status": status,
    }


# ------------------------------------------------------------------ parser


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _samples(text: str) -> int:
    value = int(text)
    if value < oracles.MIN_SAMPLES:
        raise argparse.ArgumentTypeError(f"need at least {oracles.MIN_SAMPLES} samples")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ugi", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, nu=True):
        p.add_argument("kind", choices=KINDS)
        for name in "abcd":
            p.add_argument(f"--{name}", metavar="PATH", help=f"matrix file for {name.upper()}")
        if nu:
            p.add_argument("--nu", type=_nonneg, default=0)
        p.add_argument("--out", metavar="PATH", help="write the record here instead of stdout")

    def sampling(p):
        p.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES)
        p.add_argument("--max-weight", type=_nonneg, default=DEFAULT_MAX_WEIGHT)
        p.add_argument("--seed", type=_seed, default=None, help="default: $UGI_SEED or 0")
        p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo shards")

    p = sub.add_parser("eval", help="evaluate a closed form")
    common(p)
    p.set_defaults(func=run_eval)

    p = sub.add_parser("oracle", help="run the Monte Carlo or character-series oracle")
    common(p)
    p.add_argument("--eta", type=int, default=0, help="power of det V (i2rect only)")
    p.add_argument("--mode", choices=("mc", "series"), default="mc")
    sampling(p)
    p.set_defaults(func=run_oracle)

    p = sub.add_parser("verify", help="compare closed form, series and Monte Carlo")
    common(p)
    p.add_argument("--random", action="store_true", help="generate the matrices from --seed")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    sampling(p)
    p.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        try:
            args.seed = _seed(os.environ.get("UGI_SEED", "0"))
        except (ValueError, argparse.ArgumentTypeError):
            print("ugi: error: UGI_SEED must be an unsigned 64-bit integer", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "eta", 0) and args.kind != "i2rect":
        print("ugi: error: --eta only applies to i2rect", file=sys.stderr)
        return EXIT_USAGE
    try:
        record = args.func(args)
    except UsageError as exc:
        print(f"ugi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"ugi: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"ugi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = dumps(record)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

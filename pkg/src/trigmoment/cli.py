"""Command-line front end.

Exit codes: 0 success, 1 input/computational error, 2 moments not
solvable (``check``) or residuals above tolerance (``verify``).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidMomentsError, MissingFieldError, MomentProblemError, NotSolvableError, ParameterError
from .hilbert import DEFAULT_RANK_TOL, factor_gram
from .isometry import build_isometry, defect_numbers, is_determinate
from .moments import (
    DEFAULT_PSD_TOL,
    AtomicMeasure,
    MomentSequence,
    blocks_from_json,
    build_toeplitz,
    check_solvable,
    decode_matrix,
    load_measure,
    load_moments,
    measure_to_json,
    read_json,
    relative_tol,
    toeplitz_from_blocks,
)
from .nevanlinna import SchurParameter, default_samples, herglotz_values, taylor_moments
from .solutions import canonical_solution, recover_distribution, verify_solution
from .testkit import random_unitary

EXIT_OK, EXIT_ERROR, EXIT_UNSOLVABLE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path
    output: Path | None
    psd_tol: float
    rank_tol: float
    radius: float
    samples: int | None
    poisson_r: float
    grid: int
    phi: str | None
    seed: int
    threads: int
    measure: Path | None = None
    taylor: int | None = None
    verify_tol: float = 1e-8

    def __post_init__(self):
        if self.psd_tol <= 0 or self.rank_tol <= 0 or self.verify_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not (0 < self.radius < 1 and 0 < self.poisson_r < 1):
            raise ValueError("radii must lie in (0, 1)")
        if self.threads < 1:
            raise ValueError("--threads must be >= 1")


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text)


def _summary(obj: dict, cfg: RunConfig) -> None:
    stream = sys.stdout if cfg.output is not None else sys.stderr
    stream.write(json.dumps(obj) + "\n")


def _pipeline(cfg: RunConfig, ms: MomentSequence):
    ps = factor_gram(build_toeplitz(ms, rel_tol=cfg.psd_tol), cfg.rank_tol)
    return build_isometry(ps, cfg.rank_tol)


def _read_phi_file(path: str) -> SchurParameter:
    obj = read_json(path)
    if "phi" in obj:
        return SchurParameter.constant(decode_matrix(obj["phi"], None, "phi"))
    if "coefficients" in obj:
        return SchurParameter([decode_matrix(M, None, f"coefficients[{k}]")
                               for k, M in enumerate(obj["coefficients"])])
    raise MissingFieldError(f"{path}: expected field 'phi' or 'coefficients'")


def _parameter(cfg: RunConfig, m: int, default: str) -> SchurParameter:
    spec = cfg.phi or default
    if spec == "zero":
        return SchurParameter.zero(m)
    if spec == "unitary":
        return SchurParameter.constant(random_unitary(m, np.random.default_rng(cfg.seed)).reshape(m, m))
    if spec.startswith("file:"):
        return _read_phi_file(spec[5:])
    raise ParameterError(f"unknown --phi value {spec!r}")


def cmd_check(cfg: RunConfig) -> int:
    raw = blocks_from_json(read_json(cfg.input), cfg.input)
    T = toeplitz_from_blocks(raw)
    if np.linalg.norm(raw[0] - raw[0].conj().T, 2) > relative_tol(raw[0]):
        raise InvalidMomentsError("S_0 is not Hermitian")
    tol = relative_tol(T, cfg.psd_tol)
    if np.linalg.eigvalsh(0.5 * (raw[0] + raw[0].conj().T))[0] < -relative_tol(raw[0]):
        # S_0 itself fails the test; the sequence cannot be constructed
        _emit(json.dumps({"solvable": False, "lambda_min": float(np.linalg.eigvalsh(T)[0])}) + "\n", cfg)
        return EXIT_UNSOLVABLE
    ms = MomentSequence(raw)
    solvable, lam = check_solvable(build_toeplitz(ms, tol))
    report: dict = {"solvable": solvable, "lambda_min": lam}
    if not solvable:
        _emit(json.dumps(report) + "\n", cfg)
        return EXIT_UNSOLVABLE
    if ms.d == 0:
        eig = np.linalg.eigvalsh(ms.moments[0])
        rank = int(np.sum(eig > cfg.rank_tol * max(eig.max(), 0.0))) if eig.max() > 0 else 0
        report.update(r=rank, tau=None, defect_numbers=None, determinate=rank == 0,
                      note="d = 0: any F with F(2pi) = S_0 solves; indeterminate unless S_0 = 0")
    else:
        ir = _pipeline(cfg, ms)
        report.update(r=ir.r, tau=ir.tau, defect_numbers=list(defect_numbers(ir)),
                      determinate=is_determinate(ir))
    _emit(json.dumps(report) + "\n", cfg)
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    ms = load_moments(cfg.input)
    if ms.d == 0:
        mu = AtomicMeasure.from_pairs(ms.p, [(0.0, ms.moments[0])] if np.any(ms.moments[0]) else [])
    else:
        ir = _pipeline(cfg, ms)
        m = ir.Q_ND.shape[1]
        phi = _parameter(cfg, m, "unitary")
        phi.check_for(ir)
        mu = canonical_solution(ir, phi)
    residuals = verify_solution(mu, ms)
    _emit(json.dumps(measure_to_json(mu)) + "\n", cfg)
    _summary({"atoms": len(mu), "max_residual": float(max(residuals))}, cfg)
    return EXIT_OK


def _require_parameterization(ms: MomentSequence) -> None:
    if ms.d == 0:
        raise ParameterError("the parameterization needs d >= 1")


def cmd_evaluate(cfg: RunConfig) -> int:
    ms = load_moments(cfg.input)
    _require_parameterization(ms)
    ir = _pipeline(cfg, ms)
    phi = _parameter(cfg, ir.Q_ND.shape[1], "zero")
    n = cfg.samples or default_samples(ms.d)
    zetas = cfg.radius * np.exp(2j * np.pi * np.arange(n) / n)
    values = herglotz_values(ir, phi, zetas, threads=cfg.threads)
    p = ms.p
    header = ["zeta.re", "zeta.im"] + [f"M[{i}][{j}].{part}" for i in range(p) for j in range(p) for part in ("re", "im")]
    lines = [",".join(header)]
    for z, M in zip(zetas, values):
        row = [f"{z.real:.17g}", f"{z.imag:.17g}"]
        for w in M.reshape(-1):
            row += [f"{w.real:.17g}", f"{w.imag:.17g}"]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", cfg)
    if cfg.taylor is not None:
        n_max = max(cfg.taylor, ms.d)
        n_samples = max(default_samples(ms.d), 1 << (4 * n_max - 1).bit_length())
        est = taylor_moments(ir, phi, n_max, radius=0.5, n_samples=n_samples)
        res = [float(np.linalg.norm(est[k] - ms.moments[k], 2)) for k in range(ms.d + 1)]
        _summary({
            "taylor_moments": [[[[float(z.real), float(z.imag)] for z in row] for row in S] for S in est],
            "residuals": [float(x) for x in res],
        }, cfg)
    return EXIT_OK


def cmd_recover(cfg: RunConfig) -> int:
    ms = load_moments(cfg.input)
    _require_parameterization(ms)
    ir = _pipeline(cfg, ms)
    phi = _parameter(cfg, ir.Q_ND.shape[1], "zero")
    ds = recover_distribution(ir, phi, grid=cfg.grid, radius=cfg.poisson_r, threads=cfg.threads)
    ds.write_csv(cfg.output if cfg.output is not None else sys.stdout)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.measure is None:
        raise ParameterError("verify needs --measure PATH")
    ms = load_moments(cfg.input)
    mu = load_measure(cfg.measure)
    res = verify_solution(mu, ms)
    tol = cfg.verify_tol * max(1.0, float(np.linalg.norm(ms.moments[0], 2)))
    ok = max(res) <= tol
    _emit(json.dumps({"residuals": [float(x) for x in res], "ok": ok}) + "\n", cfg)
    return EXIT_OK if ok else EXIT_UNSOLVABLE


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "evaluate": cmd_evaluate,
    "recover": cmd_recover,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trigmoment", description="Truncated matrix trigonometric moment problem.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", type=Path, help="moment JSON file")
        sp.add_argument("--output", "-o", type=Path, default=None)
        sp.add_argument("--psd-tol", type=float, default=DEFAULT_PSD_TOL, help="relative PSD tolerance")
        sp.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL, help="relative rank tolerance")
        sp.add_argument("--radius", type=float, default=0.5, help="ring radius for evaluate")
        sp.add_argument("--samples", type=int, default=None, help="ring samples for evaluate")
        sp.add_argument("--poisson-r", type=float, default=0.99)
        sp.add_argument("--grid", type=int, default=512, help="number of grid intervals for recover")
        sp.add_argument("--phi", default=None, help="zero | unitary | file:PATH")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        if name == "verify":
            sp.add_argument("--measure", type=Path, required=True)
            sp.add_argument("--verify-tol", type=float, default=1e-8)
        if name == "evaluate":
            sp.add_argument("--taylor", type=int, default=None, metavar="N_MAX",
                            help="also report Taylor-recovered moments up to N_MAX")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command, input=args.input, output=args.output,
            psd_tol=args.psd_tol, rank_tol=args.rank_tol, radius=args.radius,
            samples=args.samples, poisson_r=args.poisson_r, grid=args.grid,
            phi=args.phi, seed=args.seed, threads=args.threads,
            measure=getattr(args, "measure", None), taylor=getattr(args, "taylor", None),
            verify_tol=getattr(args, "verify_tol", 1e-8),
        )
        return COMMANDS[cfg.command](cfg)
    except NotSolvableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except (MomentProblemError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""``grassdyn`` command-line entry point.

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import io as gio
from .delta import delta_leading_law, delta_poly
from .errors import (DegenerateOrbitError, GrassdynError, InvalidInputError, InvarianceViolationError,
                     SingularMatrixError, UnsupportedStructureError)
from .grassmann import random_subspace, random_unit_vectors
from .jordan import bounds, recover_structure
from .orbits import (circular_distance, diagonal_blocks, duality_check, esp2sup_membership, kronecker_find,
                     norm_ratio_invariant, orbit_grassmann_density, orbit_point_density,
                     projection_rank_lock)
from .recipes import RECIPES, run_recipe
from .reduction import ChiView, reduce, verify_reduction
from .report import REPORT_FORMAT, VERSION, RunConfig, RunReport

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
INPUT_ERRORS = (InvalidInputError, UnsupportedStructureError, SingularMatrixError, InvarianceViolationError)


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _structure_for(T, structure, tol):
    return structure if structure is not None else recover_structure(T, tol=tol)


# -- command handlers: (config) -> (verdicts, payload, extras) -----------------

def _jordan(cfg: RunConfig):
    T, given = gio.load_operator(cfg.inputs["in"])
    st = recover_structure(T, tol=cfg.tolerances["tol"])
    return {"recovered": True}, {"structure": st.to_dict(), "given": given.to_dict() if given else None}


def _bounds(cfg: RunConfig):
    T, given = gio.load_operator(cfg.inputs["in"])
    st = _structure_for(T, given, cfg.tolerances["tol"])
    return {"computed": True}, bounds(st).to_dict()


def _reduce(cfg: RunConfig):
    T, given = gio.load_operator(cfg.inputs["op"])
    st = _structure_for(T, given, 1e-8)
    basis = gio.load_vectors(cfg.inputs["basis"])
    note = None
    if given is None and st.transform is not None:
        # express the basis in Jordan coordinates: x' = P^-1 x
        basis = np.linalg.solve(st.transform, basis.T).T
        note = "basis mapped to Jordan coordinates of the recovered structure"
    view = ChiView.of(st)
    rb = reduce(view, basis, tol=cfg.tolerances["tol"])
    chk = verify_reduction(rb, view, basis)
    payload = rb.to_dict()
    payload["report"] = chk.to_dict()
    payload["structure"] = st.to_dict()
    if note:
        payload["note"] = note
    return {"reduction_properties": chk.passed}, payload


def _delta(cfg: RunConfig):
    n = cfg.options["n"]
    p = delta_poly(n)
    payload = {"n": n, "coefficients": p.as_strings(), "degree": p.degree, "polynomial": str(p)}
    if cfg.options.get("eval") is not None:
        payload["value"] = str(p(cfg.options["eval"]))
    return {"leading_coefficient_law": p.degree == n and p.leading == delta_leading_law(n)}, payload


def _trace_path(cfg):
    return cfg.options.get("plot_data")


def _density(cfg: RunConfig, grassmann: bool):
    T, _ = gio.load_operator(cfg.inputs["op"])
    M = gio.load_subspace(cfg.inputs["subspace"])
    rng = np.random.default_rng(cfg.seed)
    count = cfg.options["targets"]
    trace_target = 0 if _trace_path(cfg) else None
    if grassmann:
        targets = [random_subspace(rng, M.ambient_dim, M.dim) for _ in range(count)]
        rep = orbit_grassmann_density(T, M, targets, cfg.K, cfg.eps, seed=cfg.seed,
                                      threads=cfg.options.get("threads"), trace_target=trace_target)
    else:
        if cfg.inputs.get("targets_file"):
            targets = gio.load_vectors(cfg.inputs["targets_file"])
        else:
            targets = random_unit_vectors(rng, M.ambient_dim, count)
        rep = orbit_point_density(T, M, targets, cfg.K, cfg.eps, seed=cfg.seed,
                                  threads=cfg.options.get("threads"), trace_target=trace_target)
    if trace_target is not None and rep.targets:
        gio.write_trace_csv(_trace_path(cfg), rep.trace)
    payload = rep.to_dict()
    elapsed = payload.pop("elapsed")
    return {"all_targets_hit": rep.all_hit}, payload, {"scan": elapsed}


def _kronecker(cfg: RunConfig):
    angles, phases = cfg.options["angles"], cfg.options["phases"]
    k = kronecker_find(angles, phases, cfg.eps, cfg.K)
    payload = {"angles": angles, "phases": phases, "k": k}
    if k is None:
        return {"found": False}, payload
    d = [float(circular_distance(k * t, p)) for t, p in zip(angles, phases)]
    payload["distances"] = d
    return {"found": True, "reverified": all(v < cfg.eps for v in d)}, payload


def _duality(cfg: RunConfig):
    T, _ = gio.load_operator(cfg.inputs["op"])
    M = gio.load_subspace(cfg.inputs["subspace"])
    resid = duality_check(T, M, cfg.options["imax"])
    tol = cfg.tolerances["tol"]
    return {"duality_residual": resid < tol}, {"residual": resid, "imax": cfg.options["imax"], "threshold": tol}


def _invariants(cfg: RunConfig):
    T, _ = gio.load_operator(cfg.inputs["op"])
    verdicts, payload = {}, {}
    K = cfg.K
    if cfg.inputs.get("subspace"):
        M = gio.load_subspace(cfg.inputs["subspace"])
        if M.dim == 2 and M.ambient_dim == 4:
            mem = esp2sup_membership(M)
            payload["membership"] = mem.to_dict()
            if mem and diagonal_blocks(T) == [2, 2]:
                lock = projection_rank_lock(T, M, K)
                payload["lock"] = lock.to_dict()
                verdicts["lock_holds"] = lock.holds
    if cfg.options.get("vector") is not None:
        rep = norm_ratio_invariant(T, cfg.options["vector"], K, target=cfg.options.get("target"))
        payload["norm_ratio"] = rep.to_dict()
        verdicts["norm_ratio_holds"] = rep.holds
    if not payload:
        raise InvalidInputError("nothing to check: give --subspace (a 2-plane of R^4) and/or --vector")
    return verdicts, payload


def _recipe(cfg: RunConfig):
    return run_recipe(cfg.options["name"])


HANDLERS = {
    "jordan": _jordan, "bounds": _bounds, "reduce": _reduce, "delta": _delta,
    "density": lambda c: _density(c, False), "grass-density": lambda c: _density(c, True),
    "kronecker": _kronecker, "duality": _duality, "invariants": _invariants, "recipe": _recipe,
}


def run(config: RunConfig) -> RunReport:
    t0 = time.perf_counter()
    out = HANDLERS[config.command](config)
    verdicts, payload = out[0], out[1]
    timings = dict(out[2]) if len(out) > 2 else {}
    timings["total"] = time.perf_counter() - t0
    report = RunReport(config, verdicts, payload, timings)
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(report.to_json())
    return report


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grassdyn", description="Orbit dynamics of linear operators on R^N.")
    p.add_argument("--version", action="version", version=f"grassdyn {VERSION} (report format {REPORT_FORMAT})")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, K=None, eps=None, tol=None, seed=False):
        sp.add_argument("--out", help="write the JSON report here as well as to stdout")
        if K is not None:
            sp.add_argument("--K", type=int, default=K, help=f"iterate budget (default {K})")
        if eps is not None:
            sp.add_argument("--eps", type=float, default=eps, help=f"hit threshold (default {eps})")
        if tol is not None:
            sp.add_argument("--tol", type=float, default=tol, help=f"tolerance (default {tol})")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("jordan", help="recover real Jordan structure of a matrix")
    sp.add_argument("--in", dest="inp", required=True)
    common(sp, tol=1e-8)

    sp = sub.add_parser("bounds", help="supercyclicity lower bounds")
    sp.add_argument("--in", dest="inp", required=True)
    common(sp, tol=1e-8)

    sp = sub.add_parser("reduce", help="staircase reduction of a basis")
    sp.add_argument("--op", required=True)
    sp.add_argument("--basis", required=True)
    common(sp, tol=1e-10)

    sp = sub.add_parser("delta", help="exact Delta_n polynomial")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eval", type=int, default=None)
    common(sp)

    for name, eps in (("density", 0.05), ("grass-density", 0.02)):
        sp = sub.add_parser(name, help="empirical orbit density scan")
        sp.add_argument("--op", required=True)
        sp.add_argument("--subspace", required=True)
        sp.add_argument("--targets", type=int, default=100, help="number of random targets")
        if name == "density":
            sp.add_argument("--targets-file", default=None, help="explicit target vectors (rows)")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--plot-data", default=None, help="CSV trace (k, distance) for the first target")
        common(sp, K=100_000, eps=eps, seed=True)

    sp = sub.add_parser("kronecker", help="first iterate approximating given phases")
    sp.add_argument("--angles", type=_floats, required=True)
    sp.add_argument("--phases", type=_floats, required=True)
    common(sp, K=10_000_000, eps=0.01)

    sp = sub.add_parser("duality", help="complement/dual-operator orbit identity")
    sp.add_argument("--op", required=True)
    sp.add_argument("--subspace", required=True)
    sp.add_argument("--imax", type=int, default=200)
    common(sp, tol=1e-8)

    sp = sub.add_parser("invariants", help="exact orbit obstructions")
    sp.add_argument("--op", required=True)
    sp.add_argument("--subspace", default=None)
    sp.add_argument("--vector", type=_floats, default=None)
    sp.add_argument("--target", type=_floats, default=None)
    common(sp, K=10_000)

    sp = sub.add_parser("recipe", help="bundled experiment")
    sp.add_argument("name", choices=sorted(RECIPES))
    common(sp)
    return p


def config_from_args(a: argparse.Namespace) -> RunConfig:
    cmd = a.command
    inputs, options, tols = {}, {}, {}
    for key in ("inp", "op", "basis", "subspace", "targets_file"):
        v = getattr(a, key, None)
        if v is not None:
            inputs["in" if key == "inp" else key] = v
    if getattr(a, "tol", None) is not None:
        tols["tol"] = a.tol
    for key in ("n", "eval", "targets", "threads", "plot_data", "angles", "phases", "imax", "vector",
                "target", "name"):
        if hasattr(a, key):
            options[key] = getattr(a, key)
    return RunConfig(cmd, getattr(a, "seed", None), tols, getattr(a, "K", None), getattr(a, "eps", None),
                     inputs, a.out, options)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except gio.ParseError as exc:
        print(f"grassdyn: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as exc:
        print(f"grassdyn: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateOrbitError as exc:
        print(f"grassdyn: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except GrassdynError as exc:
        print(f"grassdyn: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"grassdyn: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(report.to_json())
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

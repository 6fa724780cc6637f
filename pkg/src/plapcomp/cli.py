"""Command-line runner: eigenvalue solves, verification suites and sweeps.

Every command writes a CSV table preceded by a ``#`` comment block with the
package version, a SHA-256 of the canonical configuration and the
tolerances.  Rows are computed by pure functions of their parameters, so the
table is byte-identical whatever the worker count.

Exit status: 0 when every row holds or is inconclusive, 1 when some row is
violated or errored, 2 on a configuration error (nothing is written then).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .comparison import (bochner_check, cheng_gap_check, laplace_comparison_norm_check,
                         lichnerowicz_empirical_check, p_laplace_comparison_check,
                         volume_doubling_check)
from .errors import DomainError, ProfileError
from .functions import RadialFunction, builtin_test_functions
from .model import ModelSpace
from .radial import (DEFAULT_GRID, DEFAULT_TOL, solve_first_dirichlet_model,
                     solve_first_dirichlet_profile, solve_first_neumann_radial)
from .rearrangement import coarea_audit, faber_krahn_check, isoperimetric_check, obata_check
from .reports import ERROR, HOLDS, INCONCLUSIVE, VIOLATED, BoundReport
from .warped import curvature_report, integral_curvature_norm, min_ricci_K, parse_profile

SUITES = ("bochner", "p-comparison", "doubling", "laplace-norm", "cheng", "lichnerowicz",
          "faber-krahn", "obata", "isoperimetric", "coarea")
TARGETS = ("model-eigen", "warped-eigen", "curvature") + SUITES
AXES = ("n", "p", "q", "K", "radius", "r0", "alpha", "a", "C_s", "D", "tol")
COLUMNS = ("suite", "profile", "n", "p", "q", "K", "radius", "r0", "t", "alpha",
           "lhs", "rhs", "slack", "measured_norm", "verdict", "details")
CLOSED_ONLY = ("lichnerowicz", "faber-krahn", "obata", "isoperimetric")
OUTPUT_ENV = "PLAPCOMP_OUTPUT_DIR"
COAREA_ROWS = 16


class ConfigError(Exception):
    """One or more parameters fail the preconditions of the requested run."""

    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


# ------------------------------------------------------------ parameter set-up


def _default_q(n):
    return max(2.0, n / 2.0 + 0.5)


def _build_profile(P):
    K = P["K_profile"]
    return parse_profile(P["profile"], P["n"], K=K, D=P["D"])


def _psi_limit(K):
    return math.pi / math.sqrt(K) if K > 0 else math.inf


def _resolve(P):
    """Fill in derived parameters (numeric K, q, profile name) or raise ConfigError."""
    P = dict(P)
    problems = []
    n = P["n"]
    if not (isinstance(n, int) and n >= 2):
        problems.append(f"n must be an integer >= 2, got {n}")
    if not P["p"] > 1:
        problems.append(f"p must exceed 1, got {P['p']}")
    if not 0 < P["tol"] <= 1e-2:
        problems.append(f"tol must lie in (0, 1e-2], got {P['tol']}")
    if P["grid"] < 64:
        problems.append(f"grid must be at least 64, got {P['grid']}")
    if not P["alpha"] > 0:
        problems.append(f"alpha must be positive, got {P['alpha']}")
    if not P["C_s"] > 0:
        problems.append(f"C_s must be positive, got {P['C_s']}")
    if P["radius"] is not None and not P["radius"] > 0:
        problems.append(f"radius must be positive, got {P['radius']}")
    if P["r0"] is not None and not P["r0"] > 0:
        problems.append(f"r0 must be positive, got {P['r0']}")
    if P["D"] is not None and not P["D"] > 0:
        problems.append(f"D must be positive, got {P['D']}")
    auto = P["K"] == "auto-min"
    if not auto and not math.isfinite(P["K"]):
        problems.append(f"K must be finite or auto-min, got {P['K']}")
    if problems:
        raise ConfigError(problems)

    P["q"] = _default_q(n) if P["q"] is None else P["q"]
    if not P["q"] > n / 2.0:
        problems.append(f"q must exceed n/2 = {n / 2}, got {P['q']}")
    P["K_profile"] = 1.0 if auto or P["K"] <= 0 else P["K"]
    try:
        prof = _build_profile(P)
    except (DomainError, ProfileError, OSError, ValueError) as exc:
        raise ConfigError(problems + [f"profile {P['profile']!r}: {exc}"]) from None
    P["K"] = min_ricci_K(prof) if auto else float(P["K"])
    P["K_source"] = "auto-min" if auto else "given"
    P["profile_name"] = prof.name
    P["closed"] = prof.closed
    P["D_profile"] = prof.D
    if problems:
        raise ConfigError(problems)
    return P


def _suite_problems(target, P):
    """Precondition violations of one target at resolved parameters."""
    out = []
    n, p, q, K, r, D = P["n"], P["p"], P["q"], P["K"], P["radius"], P["D_profile"]
    if target in CLOSED_ONLY and not P["closed"]:
        out.append(f"{target} needs a closed profile, {P['profile_name']} is not")
    if target in CLOSED_ONLY and not K > 0:
        out.append(f"{target} needs K > 0, got {K}")
    if target == "lichnerowicz" and p < 2:
        out.append(f"lichnerowicz needs p >= 2, got {p}")
    if target == "cheng" and not max(q, p / 2.0) > n / 2.0:
        out.append(f"cheng needs max(q, p/2) > n/2, got q={q}, p={p}")
    if r is not None:
        if target in ("cheng", "faber-krahn", "isoperimetric", "laplace-norm") and not r < D:
            out.append(f"{target} needs radius < {D}, got {r}")
        if target in ("cheng", "laplace-norm") and not r < _psi_limit(K):
            out.append(f"{target} needs radius < pi/sqrt(K) = {_psi_limit(K)}, got {r}")
        if target in ("doubling", "coarea", "warped-eigen", "curvature") and r > D * (1 + 1e-12):
            out.append(f"{target} needs radius <= {D}, got {r}")
        if target == "doubling" and r > ModelSpace(n, K).diameter * (1 + 1e-12):
            out.append(f"doubling needs radius <= model diameter {ModelSpace(n, K).diameter}, got {r}")
        if target == "model-eigen" and K > 0 and not r < _psi_limit(K):
            out.append(f"model-eigen needs radius < pi/sqrt(K) = {_psi_limit(K)}, got {r}")
    if target == "model-eigen" and r is None:
        out.append("model-eigen needs --r")
    if P["r0"] is not None and r is not None and not P["r0"] < r:
        out.append(f"r0 must be smaller than radius, got r0={P['r0']}, radius={r}")
    if target == "warped-eigen" and P["bc"] == "neumann" and not P["closed"]:
        out.append("neumann needs a closed profile")
    return out


# ------------------------------------------------------------------ row making


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _base_row(target, P, **over):
    row = {"suite": target, "profile": P["profile_name"], "n": P["n"], "p": P["p"], "q": P["q"],
           "K": P["K"], "radius": P["radius"], "r0": P["r0"], "t": None, "alpha": P["alpha"],
           "lhs": None, "rhs": None, "slack": None, "measured_norm": None,
           "verdict": INCONCLUSIVE, "details": {}}
    if target == "model-eigen":
        row["profile"] = f"model(n={P['n']},K={P['K']!r})"
    row.update(over)
    return row


def _report_row(target, P, rep: BoundReport, extra=None):
    ins = rep.inputs
    details = dict(rep.details)
    details["band"] = rep.band
    for key in ("function",):
        if key in ins:
            details[key] = ins[key]
    if extra:
        details.update(extra)
    return _base_row(
        target, P, radius=ins.get("radius", P["radius"]), r0=ins.get("r0", P["r0"]),
        t=ins.get("t"), lhs=rep.lhs, rhs=rep.rhs, slack=rep.slack,
        measured_norm=ins.get("measured_norm"), verdict=rep.verdict, details=details)


def _skip_row(target, P, reasons):
    return _base_row(target, P, details={"skipped": reasons})


# ----------------------------------------------------------------- the targets


def _grid_points(T, k=8):
    return [T * (j + 0.5) / k for j in range(k)]


def _run_bochner(P, prof):
    rows = []
    for f in builtin_test_functions(prof.D):
        for t in _grid_points(prof.D):
            rows.append(_report_row("bochner", P, bochner_check(prof, P["p"], f, t)))
    return rows


def _run_p_comparison(P, prof):
    T = min(prof.D, _psi_limit(P["K"]))
    rows = []
    for f in builtin_test_functions(T):
        for t in _grid_points(T):
            rows.append(_report_row("p-comparison", P, p_laplace_comparison_check(prof, P["K"], P["p"], f, t)))
    return rows


def _run_doubling(P, prof):
    rmax = min(prof.D, ModelSpace(P["n"], P["K"]).diameter)
    if P["radius"] is not None:
        pairs = [(P["r0"] if P["r0"] is not None else 0.5 * P["radius"], P["radius"])]
    else:
        pairs = [(0.25 * rmax, 0.5 * rmax), (0.25 * rmax, rmax), (0.5 * rmax, rmax)]
    return [_report_row("doubling", P, volume_doubling_check(prof, P["K"], P["q"], r, r0))
            for r0, r in pairs]


def _run_laplace_norm(P, prof):
    T = min(prof.D, _psi_limit(P["K"]))
    radii = [P["radius"]] if P["radius"] is not None else [0.5 * T, 0.9 * T]
    return [_report_row("laplace-norm", P, laplace_comparison_norm_check(prof, P["K"], P["q"], r))
            for r in radii]


def _run_cheng(P, prof):
    r = P["radius"] if P["radius"] is not None else 0.5 * min(prof.D, _psi_limit(P["K"]))
    return [_report_row("cheng", P, cheng_gap_check(prof, P["K"], P["p"], P["q"], r, P["tol"]))]


def _run_lichnerowicz(P, prof):
    rep = lichnerowicz_empirical_check(prof, P["K"], P["p"], P["q"], P["tol"], C_s=P["C_s"])
    return [_report_row("lichnerowicz", P, rep)]


def _run_faber_krahn(P, prof):
    R = P["radius"] if P["radius"] is not None else 0.5 * prof.D
    rep = faber_krahn_check(prof, P["K"], P["p"], R, P["alpha"], P["q"], P["tol"])
    return [_report_row("faber-krahn", P, rep)]


def _run_obata(P, prof):
    return [_report_row("obata", P, obata_check(prof, P["K"], P["p"], P["alpha"], P["q"], P["tol"]))]


def _run_isoperimetric(P, prof):
    radii = [P["radius"]] if P["radius"] is not None else [0.25 * prof.D, 0.5 * prof.D, 0.75 * prof.D]
    return [_report_row("isoperimetric", P, isoperimetric_check(prof, P["K"], r, P["alpha"], P["q"]))
            for r in radii]


def _run_coarea(P, prof):
    if P["radius"] is not None:
        R = P["radius"]
    else:
        R = 0.5 * prof.D if prof.closed else prof.D
    p = P["p"]
    res = solve_first_dirichlet_profile(prof, R, p, P["tol"])
    f = RadialFunction.from_samples(res.t, np.maximum(res.f, 0.0), res.fprime, "ground state")
    lsp = coarea_audit(f, prof, radius=R, p=p, n_thresholds=COAREA_ROWS)
    spread = float(np.max(lsp.levels.v) - np.min(lsp.levels.v))
    delta = 1e-3 * spread
    errs = lsp.coarea_errors(delta)
    V1 = lsp.levels.distribution(lsp.thresholds - delta)
    rows = []
    for i, tau in enumerate(lsp.thresholds):
        rows.append(_base_row(
            "coarea", P, radius=R, lhs=float((V1[i] - lsp.superlevel_volumes[i]) / delta),
            rhs=float(lsp.gradient_coarea[i]),
            details={"level": float(tau), "superlevel_volume": float(lsp.superlevel_volumes[i]),
                     "boundary_area": float(lsp.boundary_areas[i]), "holder_ok": bool(lsp.holder_ok[i]),
                     "flagged": bool(lsp.flagged[i]), "delta": delta, "relative_error": float(errs[i]),
                     "row": "level"}))
    finest = np.nanmax(lsp.coarea_errors(delta / 4.0))
    # below this the quotient is exact up to interpolation noise and has no order
    if finest < 1e-6:
        order = math.nan
        note = "difference quotient exact to interpolation accuracy: order undefined"
    else:
        order = lsp.coarea_order(delta)
        note = "measured order over three halvings"
    rep = BoundReport("coarea", order, 0.9, order - 0.9, {"radius": R}, band=0.0,
                      details={"delta": delta, "finest_error": float(finest), "note": note,
                               "holder_ok": bool(np.all(lsp.holder_ok)), "row": "order"})
    rows.append(_report_row("coarea", P, rep))
    return rows


def _run_model_eigen(P, prof):
    model = ModelSpace(P["n"], P["K"])
    res = solve_first_dirichlet_model(model, P["radius"], P["p"], P["tol"], P["grid"])
    return [_base_row("model-eigen", P, lhs=res.lam,
                      measured_norm=0.0,
                      details={"residual": res.residual, "bracket_width": res.bracket_width,
                               "zero_count": res.zero_count,
                               "sturm_monotone": res.extra["sturm_monotone"]})]


def _run_warped_eigen(P, prof):
    if P["bc"] == "neumann":
        res = solve_first_neumann_radial(prof, P["p"], P["tol"], P["grid"])
        R = prof.D
        eps = integral_curvature_norm(prof, P["K"], P["q"])
        details = {"nodal_radius": res.nodal_radius, "orthogonality": res.extra.get("orthogonality"),
                   "nodal_deviation": res.extra.get("nodal_deviation"), "nodal_ok": res.extra.get("nodal_ok")}
    else:
        R = P["radius"] if P["radius"] is not None else (0.5 * prof.D if prof.closed else prof.D)
        res = solve_first_dirichlet_profile(prof, R, P["p"], P["tol"], P["grid"])
        eps = integral_curvature_norm(prof, P["K"], P["q"], R)
        details = {"zero_count": res.zero_count, "sturm_monotone": res.extra["sturm_monotone"]}
    details.update({"bc": P["bc"], "residual": res.residual, "bracket_width": res.bracket_width})
    return [_base_row("warped-eigen", P, radius=R, lhs=res.lam, measured_norm=eps, details=details)]


def _run_curvature(P, prof):
    R = P["radius"]
    rep = curvature_report(prof, P["K"], [P["q"]], R, P["grid"])
    q = P["q"]
    psi = rep.psi[np.isfinite(rep.psi)]
    return [_base_row("curvature", P, radius=rep.radius, lhs=rep.norms[q], rhs=rep.norms_refined[q],
                      measured_norm=rep.norms[q],
                      details={"min_ricci_K": min_ricci_K(prof), "min_rho": float(np.min(rep.rho_min)),
                               "max_ric_minus": float(np.max(rep.ric_minus_K)),
                               "max_psi": float(np.max(psi)) if psi.size else math.nan,
                               "grid": P["grid"], "refined_grid": 2 * P["grid"]})]


RUNNERS = {
    "bochner": _run_bochner, "p-comparison": _run_p_comparison, "doubling": _run_doubling,
    "laplace-norm": _run_laplace_norm, "cheng": _run_cheng, "lichnerowicz": _run_lichnerowicz,
    "faber-krahn": _run_faber_krahn, "obata": _run_obata, "isoperimetric": _run_isoperimetric,
    "coarea": _run_coarea, "model-eigen": _run_model_eigen, "warped-eigen": _run_warped_eigen,
    "curvature": _run_curvature,
}


def execute(task):
    """Run one (target, parameters) task; failures become error rows."""
    target, P = task
    if P.get("skip"):
        return [_skip_row(target, P, P["skip"])]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rows = RUNNERS[target](P, _build_profile(P))
        except Exception as exc:  # noqa: BLE001 - any failure is recorded in its row
            rows = [_base_row(target, P, verdict=ERROR,
                              details={"error": f"{type(exc).__name__}: {exc}"})]
    if caught:
        msgs = sorted({str(w.message) for w in caught})
        for row in rows:
            row["details"]["warnings"] = msgs
    return rows


# ------------------------------------------------------------------ assembling


def _params_from_args(args):
    K = args.K
    if K != "auto-min":
        try:
            K = float(K)
        except ValueError:
            raise ConfigError([f"K must be a number or auto-min, got {K!r}"]) from None
    return {"n": args.n, "p": args.p, "q": args.q, "K": K, "radius": args.radius, "r0": args.r0,
            "alpha": args.alpha, "C_s": args.C_s, "tol": args.tol, "grid": args.grid,
            "profile": args.profile, "D": args.D, "bc": getattr(args, "bc", "dirichlet")}


def _with_axis(P, axis, value):
    P = dict(P)
    if axis == "a":
        kind, _, arg = P["profile"].partition(":")
        if kind != "perturbed-sphere":
            raise ConfigError([f"axis 'a' needs a perturbed-sphere profile, got {P['profile']!r}"])
        parts = [s for s in arg.split(",") if s]
        m = parts[1] if len(parts) > 1 else "2"
        P["profile"] = f"perturbed-sphere:{value!r},{m}"
    elif axis == "n":
        P["n"] = int(value)
    elif axis == "K" and value == "auto-min":
        P["K"] = value
    else:
        P[axis] = float(value)
    return P


def _parse_values(axis, text):
    out = []
    problems = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if axis == "K" and item == "auto-min":
            out.append(item)
            continue
        try:
            v = float(item)
        except ValueError:
            problems.append(f"sweep value {item!r} is not a number")
            continue
        if axis == "n" and v != int(v):
            problems.append(f"n must be an integer, got {item}")
        out.append(int(v) if axis == "n" else v)
    if not out and not problems:
        problems.append("sweep needs at least one value")
    if problems:
        raise ConfigError(problems)
    return out


def build_tasks(args):
    """Validated task list for a parsed command line; raises ConfigError."""
    base = _params_from_args(args)
    cmd = args.command
    if cmd in ("model-eigen", "warped-eigen", "curvature"):
        P = _resolve(base)
        problems = _suite_problems(cmd, P)
        if problems:
            raise ConfigError(problems)
        return [(cmd, P)]
    if cmd == "verify":
        P = _resolve(base)
        if args.suite == "all":
            tasks = []
            for s in SUITES:
                problems = _suite_problems(s, P)
                tasks.append((s, dict(P, skip=problems) if problems else P))
            return tasks
        problems = _suite_problems(args.suite, P)
        if problems:
            raise ConfigError(problems)
        return [(args.suite, P)]
    # sweep
    if args.axis not in AXES:
        raise ConfigError([f"axis must be one of {', '.join(AXES)}, got {args.axis!r}"])
    values = _parse_values(args.axis, args.values)
    targets = list(SUITES) if args.target == "all" else [args.target]
    _resolve(base)
    tasks = []
    for v in values:
        Pv = _with_axis(base, args.axis, v)
        try:
            Pv = _resolve(Pv)
        except ConfigError as exc:
            Pv = _unresolved(Pv)
            for t in targets:
                tasks.append((t, dict(Pv, error=exc.problems)))
            continue
        for t in targets:
            problems = _suite_problems(t, Pv)
            tasks.append((t, dict(Pv, error=problems) if problems else Pv))
    return tasks


def _unresolved(P):
    """Echo-only parameters for a sweep value that failed validation."""
    P = dict(P, profile_name=P["profile"])
    if P["K"] == "auto-min":
        P["K"] = math.nan
    if P["q"] is None:
        P["q"] = _default_q(P["n"])
    return P


def _execute_or_flag(task):
    target, P = task
    if P.get("error"):
        return [_base_row(target, P, verdict=ERROR, details={"error": "; ".join(P["error"])})]
    return execute(task)


def run_tasks(tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        results = [_execute_or_flag(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_execute_or_flag, tasks))
    return [row for rows in results for row in rows]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def config_record(args):
    """Canonical configuration: everything that determines the rows."""
    rec = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "jobs", "func")}
    if rec.get("profile", "").startswith("table:"):
        path = rec["profile"][len("table:"):]
        try:
            with open(path, "rb") as fh:
                rec["table_sha256"] = hashlib.sha256(fh.read()).hexdigest()
        except OSError:
            pass
    return rec


def render(args, rows):
    rec = config_record(args)
    canon = json.dumps(rec, sort_keys=True, separators=(",", ":"))
    buf = io.StringIO()
    buf.write(f"# plapcomp {__version__}\n")
    buf.write(f"# config {canon}\n")
    buf.write(f"# config-sha256 {hashlib.sha256(canon.encode()).hexdigest()}\n")
    buf.write(f"# tolerances tol={args.tol!r} grid={args.grid} band=max(1e-08,100*bracket_width)\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        details = json.dumps(_clean(row["details"]), sort_keys=True, separators=(",", ":"))
        writer.writerow([_fmt(row[c]) for c in COLUMNS[:-1]] + [details])
    return buf.getvalue()


def _output_path(args):
    if args.output:
        return args.output
    outdir = os.environ.get(OUTPUT_ENV)
    if outdir:
        name = args.command
        if args.command == "verify":
            name += f"-{args.suite}"
        elif args.command == "sweep":
            name += f"-{args.target}-{args.axis}"
        return os.path.join(outdir, name + ".csv")
    return None


def _write(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def summarize(rows):
    counts = {v: 0 for v in (HOLDS, VIOLATED, INCONCLUSIVE, ERROR)}
    for row in rows:
        counts[row["verdict"]] += 1
    return counts


# --------------------------------------------------------------------- parsing


def _add_common(sp):
    sp.add_argument("--n", type=int, default=2, help="dimension (default 2)")
    sp.add_argument("--p", type=float, default=2.0, help="p-Laplacian exponent (default 2)")
    sp.add_argument("--q", type=float, default=None, help="curvature norm exponent (default max(2, n/2 + 0.5))")
    sp.add_argument("--K", default="1", help="comparison curvature, or auto-min (default 1)")
    sp.add_argument("--r", "--radius", dest="radius", type=float, default=None, help="ball radius")
    sp.add_argument("--r0", type=float, default=None, help="inner radius for volume ratios")
    sp.add_argument("--alpha", type=float, default=1.0, help="isoperimetric constant (default 1)")
    sp.add_argument("--C-s", dest="C_s", type=float, default=1.0,
                    help="Sobolev constant, user supplied (default 1)")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative eigenvalue tolerance")
    sp.add_argument("--grid", type=int, default=DEFAULT_GRID, help="output grid size")
    sp.add_argument("--profile", default="sphere",
                    help="sphere | flat | hyperbolic | perturbed-sphere:a,m | table:<path>")
    sp.add_argument("--D", type=float, default=None, help="profile length for flat and hyperbolic (default 1)")
    sp.add_argument("--output", default=None, help=f"CSV path (default ${OUTPUT_ENV}/<command>.csv or stdout)")
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")


def build_parser():
    ap = argparse.ArgumentParser(prog="plapcomp", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"plapcomp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("model-eigen", help="first Dirichlet eigenvalue of a model ball")
    _add_common(sp)
    sp = sub.add_parser("warped-eigen", help="first eigenvalue on a warped profile")
    _add_common(sp)
    sp.add_argument("--bc", choices=("dirichlet", "neumann"), default="dirichlet")
    sp = sub.add_parser("curvature", help="curvature samples and integral norms of a profile")
    _add_common(sp)
    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", choices=SUITES + ("all",))
    _add_common(sp)
    sp = sub.add_parser("sweep", help="sweep one parameter of a target")
    _add_common(sp)
    sp.add_argument("--axis", required=True, help=f"one of {', '.join(AXES)}")
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.add_argument("--target", required=True, choices=TARGETS + ("all",))
    sp.add_argument("--bc", choices=("dirichlet", "neumann"), default="dirichlet")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("plapcomp: config error: jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        tasks = build_tasks(args)
    except ConfigError as exc:
        for msg in exc.problems:
            print(f"plapcomp: config error: {msg}", file=sys.stderr)
        return 2
    rows = run_tasks(tasks, args.jobs)
    text = render(args, rows)
    path = _output_path(args)
    if path is None:
        sys.stdout.write(text)
    else:
        _write(path, text)
    counts = summarize(rows)
    bad = counts[VIOLATED] + counts[ERROR]
    print(f"plapcomp: {len(rows)} rows: {counts[HOLDS]} holds, {counts[VIOLATED]} violated, "
          f"{counts[INCONCLUSIVE]} inconclusive, {counts[ERROR]} error", file=sys.stderr)
    return 1 if bad else 0

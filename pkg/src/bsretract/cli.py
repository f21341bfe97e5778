"""Command-line surface, JSON/CSV I/O, and the batch verification harness.

Commands: census, construct, flow, retract, pipeline, verify, suite.
Exit codes: 0 success, 1 hard invariant violated (suite), 2 bad input,
3 flow budget exhausted, 4 predicted structure absent.
Every run emits a manifest that fully determines it; outputs are
byte-deterministic for identical manifests.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from .bsrep import (
    Rep,
    direct_sum,
    from_orbit_datum,
    random_rep,
    relation_residual,
    rep_from_json,
    rep_to_json,
)
from .census import OrbitDatum, enumerate_orbits, order_bound, validate_parameters
from .compactify import averaged_form, detect_finite_order, generated_group, normality_exponent
from .errors import BsretractError, PipelineStageError, STRUCTURAL_ERRORS
from .kempfness import FlowConfig, flow, kn_energy, moment_map, verify_minimal
from .numerics import eigvals, hs_norm, snap_root_of_unity
from .retraction import certify_and_retract, full_pipeline, verify_unitary_rep

EXIT_OK = 0
EXIT_HARD_VIOLATION = 1
EXIT_BAD_INPUT = 2
EXIT_FLOW_BUDGET = 3
EXIT_STRUCTURAL = 4


# ---------------------------------------------------------------- I/O helpers

def canonical_json(doc) -> str:
    """Deterministic JSON encoding: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, indent=2, separators=(",", ": "))


def _fmt(x: float) -> str:
    """Fixed 17-significant-digit float formatting for CSV outputs."""
    return format(float(x), ".17g")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_rep(path: str, tol: float = 1e-8) -> Rep:
    return rep_from_json(json.loads(_read_text(path)), tol=tol)


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


# ------------------------------------------------------------------ manifests

def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def build_manifest(command: str, parameters: dict, inputs: dict, outputs: list) -> dict:
    """Manifest whose hash covers the command, parameters and input hashes;
    output paths and the outcome summary are attached but not hashed, so
    identical computations hash identically wherever they are written."""
    body = {"command": command, "parameters": parameters, "inputs": inputs}
    return {
        **body,
        "outputs": sorted(str(x) for x in outputs if x),
        "hash": _sha256_text(canonical_json(body)),
    }


def _emit_manifest(manifest: dict, outcome: dict, out_path: str | None) -> None:
    doc = {**manifest, "outcome": outcome}
    if out_path and out_path != "-":
        Path(str(out_path) + ".manifest.json").write_text(canonical_json(doc) + "\n")


# ----------------------------------------------------------------- CLI group

@click.group()
def main():
    """Construct Baumslag-Solitar representations, flow them to minimal
    vectors, verify the predicted finite-order structure, and retract
    them onto unitary representations."""


# -------------------------------------------------------------------- census

@main.command("census")
@click.argument("p", type=int)
@click.argument("q", type=int)
@click.option("--n-max", default=4, show_default=True, help="Largest cycle length.")
@click.option("--out", default="-", help="JSON-lines output path.")
@click.option("--csv", "csv_path", default=None, help="Summary CSV path (k, N, orbits).")
def cmd_census(p, q, n_max, out, csv_path):
    """Enumerate exponent orbits for the group parameters P Q."""
    try:
        data = enumerate_orbits(p, q, n_max)
    except ValueError as exc:
        _fail(EXIT_BAD_INPUT, str(exc))
    lines = "".join(json.dumps(d.to_json(), sort_keys=True) + "\n" for d in data)
    _write_text(out, lines)
    counts: dict[tuple[int, int], int] = {}
    for d in data:
        counts[(d.k, d.N)] = counts.get((d.k, d.N), 0) + 1
    if csv_path:
        rows = ["k,N,orbits"] + [f"{k},{n},{c}" for (k, n), c in sorted(counts.items())]
        _write_text(csv_path, "\n".join(rows) + "\n")
    manifest = build_manifest(
        "census", {"p": p, "q": q, "n_max": n_max}, {}, [out, csv_path or ""]
    )
    _emit_manifest(manifest, {"records": len(data)}, out)
    click.echo(f"census: {len(data)} orbit records", err=True)


# ----------------------------------------------------------------- construct

def _parse_orbit_spec(spec: str, p: int, q: int) -> OrbitDatum:
    mod_part, _, orbit_part = spec.partition(":")
    modulus = int(mod_part)
    orbit = tuple(int(x) for x in orbit_part.split(",")) if orbit_part else (0,)
    u = q * pow(p, -1, modulus) % modulus if modulus > 1 else 0
    return OrbitDatum(p, q, modulus, u, orbit, len(orbit))


@main.command("construct")
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--orbit", "orbits", multiple=True,
              help="Block spec 'N:m1,m2,...'; repeat for direct sums.")
@click.option("--chi", "chis", multiple=True,
              help="Closing scale per block, complex literal like '0.5+1.2j'.")
@click.option("--random", "random_n", type=int, default=None,
              help="Draw a random representation of this dimension instead.")
@click.option("--seed", default=0, show_default=True)
@click.option("--sl", is_flag=True, help="Normalize to determinant one.")
@click.option("--out", default="-")
def cmd_construct(p, q, orbits, chis, random_n, seed, sl, out):
    """Build a representation from orbit blocks or at random."""
    try:
        validate_parameters(p, q)
        if random_n is not None:
            rep = random_rep(p, q, random_n, seed, sl=sl)
        elif orbits:
            blocks = []
            for i, spec in enumerate(orbits):
                chi = complex(chis[i]) if i < len(chis) else 1.0 + 0.0j
                blocks.append(from_orbit_datum(_parse_orbit_spec(spec, p, q), chi, sl=sl))
            rep = blocks[0]
            for blk in blocks[1:]:
                rep = direct_sum(rep, blk)
        else:
            _fail(EXIT_BAD_INPUT, "provide --random N or at least one --orbit")
    except (ValueError, BsretractError) as exc:
        _fail(EXIT_BAD_INPUT, str(exc))
    _write_text(out, canonical_json(rep_to_json(rep)) + "\n")
    manifest = build_manifest(
        "construct",
        {"p": p, "q": q, "orbits": list(orbits), "chis": list(chis),
         "random_n": random_n, "seed": seed, "sl": sl},
        {},
        [out],
    )
    _emit_manifest(manifest, {"residual": relation_residual(rep)}, out)


# ---------------------------------------------------------------------- flow

def _trace_csv(trace) -> str:
    rows = ["iter,energy,moment_norm,step"]
    for r in trace.records:
        rows.append(
            f"{r.iteration},{_fmt(r.energy)},{_fmt(r.moment_norm)},{_fmt(r.step)}"
        )
    return "\n".join(rows) + "\n"


def _path_csv(path) -> str:
    rows = ["t,residual,unitarity_defect_a"]
    for t, res, defect in path.rows():
        rows.append(f"{_fmt(t)},{_fmt(res)},{_fmt(defect)}")
    return "\n".join(rows) + "\n"


_flow_options = [
    click.option("--tol", default=1e-10, show_default=True),
    click.option("--max-iter", default=10**5, show_default=True),
    click.option("--eta0", default=0.1, show_default=True),
    click.option("--sl", is_flag=True, help="Traceless moment-map projection."),
]


def _with(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return deco


@main.command("flow")
@click.option("--in", "in_path", default="-", help="Rep JSON input.")
@click.option("--out", default="-", help="Endpoint Rep JSON.")
@click.option("--trace-csv", default=None, help="Per-iteration CSV.")
@_with(_flow_options)
def cmd_flow(in_path, out, trace_csv, tol, max_iter, eta0, sl):
    """Run the moment-map gradient flow on a representation."""
    try:
        rep = _load_rep(in_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(EXIT_BAD_INPUT, f"bad input: {exc}")
    cfg = FlowConfig(tol=tol, max_iter=max_iter, eta0=eta0, sl_mode=sl)
    final, trace = flow(rep, cfg)
    _write_text(out, canonical_json(rep_to_json(final)) + "\n")
    if trace_csv:
        _write_text(trace_csv, _trace_csv(trace))
    last = trace.records[-1]
    manifest = build_manifest(
        "flow",
        {"tol": tol, "max_iter": max_iter, "eta0": eta0, "sl": sl},
        {"rep": _sha256_text(canonical_json(rep_to_json(rep)))},
        [out, trace_csv or ""],
    )
    _emit_manifest(
        manifest,
        {"outcome": trace.outcome, "iterations": trace.iterations,
         "moment_norm": last.moment_norm, "energy": last.energy},
        out,
    )
    click.echo(
        f"flow: {trace.outcome} after {trace.iterations} iterations, "
        f"|mu| = {last.moment_norm:.3e}",
        err=True,
    )
    if not trace.converged:
        sys.exit(EXIT_FLOW_BUDGET)


# ----------------------------------------------------------- retract/pipeline

def _emit_pipeline_outputs(endpoint, diag, path, out, diag_path, path_csv):
    if endpoint is not None:
        _write_text(out, canonical_json(rep_to_json(endpoint)) + "\n")
    if diag_path:
        _write_text(diag_path, canonical_json(diag.to_dict()) + "\n")
    if path_csv and path is not None:
        _write_text(path_csv, _path_csv(path))


@main.command("retract")
@click.option("--in", "in_path", default="-")
@click.option("--out", default="-")
@click.option("--diag", "diag_path", default=None, help="Diagnostics JSON path.")
@click.option("--path-csv", default=None, help="Per-sample CSV of the path.")
@click.option("--samples", default=100, show_default=True)
@click.option("--snap-tol", default=1e-6, show_default=True)
def cmd_retract(in_path, out, diag_path, path_csv, samples, snap_tol):
    """Certify finite-order structure and retract A to its unitary factor
    (no flow; input should already be near a minimal vector)."""
    try:
        rep = _load_rep(in_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(EXIT_BAD_INPUT, f"bad input: {exc}")
    manifest = build_manifest(
        "retract",
        {"samples": samples, "snap_tol": snap_tol},
        {"rep": _sha256_text(canonical_json(rep_to_json(rep)))},
        [out, diag_path or "", path_csv or ""],
    )
    try:
        endpoint, path, diag = certify_and_retract(
            rep, snap_tol=snap_tol, num_samples=samples
        )
    except PipelineStageError as exc:
        _emit_pipeline_outputs(None, exc.diagnostics, None, out, diag_path, path_csv)
        _emit_manifest(manifest, exc.diagnostics.to_dict(), out)
        _fail(EXIT_STRUCTURAL, str(exc))
    except ValueError as exc:
        _fail(EXIT_BAD_INPUT, str(exc))
    _emit_pipeline_outputs(endpoint, diag, path, out, diag_path, path_csv)
    _emit_manifest(manifest, diag.to_dict(), out)
    sys.exit(EXIT_OK if verify_unitary_rep(endpoint, 1e-8) else EXIT_STRUCTURAL)


@main.command("pipeline")
@click.option("--in", "in_path", default="-")
@click.option("--out", default="-")
@click.option("--diag", "diag_path", default=None)
@click.option("--path-csv", default=None)
@click.option("--trace-csv", default=None)
@click.option("--samples", default=100, show_default=True)
@click.option("--snap-tol", default=1e-6, show_default=True)
@_with(_flow_options)
def cmd_pipeline(in_path, out, diag_path, path_csv, trace_csv, samples, snap_tol,
                 tol, max_iter, eta0, sl):
    """Flow, certify, and retract: Rep JSON in, unitary Rep JSON out."""
    try:
        rep = _load_rep(in_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(EXIT_BAD_INPUT, f"bad input: {exc}")
    cfg = FlowConfig(tol=tol, max_iter=max_iter, eta0=eta0, sl_mode=sl)
    manifest = build_manifest(
        "pipeline",
        {"tol": tol, "max_iter": max_iter, "eta0": eta0, "sl": sl,
         "samples": samples, "snap_tol": snap_tol},
        {"rep": _sha256_text(canonical_json(rep_to_json(rep)))},
        [out, diag_path or "", path_csv or "", trace_csv or ""],
    )
    try:
        endpoint, diag = full_pipeline(
            rep, cfg, num_samples=samples, snap_tol=snap_tol
        )
    except PipelineStageError as exc:
        diag = exc.diagnostics
        _emit_pipeline_outputs(None, diag, None, out, diag_path, path_csv)
        if trace_csv and diag.flow_trace is not None:
            _write_text(trace_csv, _trace_csv(diag.flow_trace))
        _emit_manifest(manifest, diag.to_dict(), out)
        _fail(EXIT_STRUCTURAL, str(exc))
    except ValueError as exc:
        _fail(EXIT_BAD_INPUT, str(exc))
    _write_text(out, canonical_json(rep_to_json(endpoint)) + "\n")
    if diag_path:
        _write_text(diag_path, canonical_json(diag.to_dict()) + "\n")
    if trace_csv:
        _write_text(trace_csv, _trace_csv(diag.flow_trace))
    if path_csv and diag.retraction_path is not None:
        _write_text(path_csv, _path_csv(diag.retraction_path))
    _emit_manifest(manifest, diag.to_dict(), out)
    if diag.outcome == "iter_budget":
        click.echo("pipeline: flow budget exhausted", err=True)
        sys.exit(EXIT_FLOW_BUDGET)
    sys.exit(EXIT_OK if verify_unitary_rep(endpoint, 1e-8) else EXIT_STRUCTURAL)


# -------------------------------------------------------------------- verify

@main.command("verify")
@click.option("--in", "in_path", default="-")
@click.option("--out", default="-")
@click.option("--snap-tol", default=1e-6, show_default=True)
@click.option("--minimality-samples", default=0, show_default=True,
              help="Sampling minimality check; 0 skips it.")
@click.option("--seed", default=0, show_default=True)
@click.option("--karcher", is_flag=True,
              help="Also report the geodesic-barycenter form deviation.")
def cmd_verify(in_path, out, snap_tol, minimality_samples, seed, karcher):
    """Report the structural certificates of a representation."""
    try:
        rep = rep_from_json(json.loads(_read_text(in_path)), validate=False)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(EXIT_BAD_INPUT, f"bad input: {exc}")
    res = relation_residual(rep)
    report = {
        "p": rep.group.p, "q": rep.group.q, "n": rep.n,
        "relation_residual": res,
        "in_variety": bool(res <= 1e-8),
        "kn_energy": kn_energy(rep),
        "moment_norm": hs_norm(moment_map(rep)),
        "order_bound": order_bound(rep.group.p, rep.group.q, rep.n),
        "unitarity_defect_a": hs_norm(rep.A.conj().T @ rep.A - np.eye(rep.n)),
        "unitarity_defect_b": hs_norm(rep.B.conj().T @ rep.B - np.eye(rep.n)),
        "detected_order": None,
        "normality_exponent": None,
        "kappa_invariance_defect": None,
        "kappa_identity_defect": None,
    }
    if not report["in_variety"]:
        _write_text(out, canonical_json(report) + "\n")
        _fail(EXIT_BAD_INPUT, f"relation residual {res:.3e} too large to certify")
    exit_code = EXIT_OK
    try:
        order = detect_finite_order(rep.B, report["order_bound"], snap_tol)
        report["detected_order"] = order
        cyc = generated_group(rep.B, order)
        form = averaged_form(cyc)
        report["kappa_invariance_defect"] = max(
            hs_norm(h.conj().T @ form.Q @ h - form.Q) for h in cyc.elements
        )
        report["kappa_identity_defect"] = hs_norm(form.Q - np.eye(rep.n))
        if karcher:
            from .compactify import karcher_form

            kf = karcher_form(cyc)
            report["karcher_invariance_defect"] = max(
                hs_norm(h.conj().T @ kf.Q @ h - kf.Q) for h in cyc.elements
            )
        report["normality_exponent"] = normality_exponent(rep, snap_tol, order=order)
    except STRUCTURAL_ERRORS as exc:
        report["structural_failure"] = f"{type(exc).__name__}: {exc}"
        exit_code = EXIT_STRUCTURAL
    if minimality_samples > 0:
        m = verify_minimal(rep, minimality_samples, seed=seed)
        report["minimality"] = {
            "passed": m.passed, "margin": m.margin, "samples": m.samples,
        }
    _write_text(out, canonical_json(report) + "\n")
    manifest = build_manifest(
        "verify",
        {"snap_tol": snap_tol, "minimality_samples": minimality_samples, "seed": seed},
        {"rep": _sha256_text(canonical_json(rep_to_json(rep)))},
        [out],
    )
    _emit_manifest(manifest, {"exit": exit_code}, out)
    sys.exit(exit_code)


# --------------------------------------------------------------------- suite

def derive_seed(base_seed: int, p: int, q: int, n: int, index: int) -> int:
    """Stable per-task seed for the counter-based generator."""
    key = f"{base_seed}:{p}:{q}:{n}:{index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def run_one(task: tuple) -> dict:
    """One grid cell: draw, flow, certify, retract, check every invariant.

    Returns a plain-dict record; hard invariant violations are collected
    under "violations".  Module-level so process pools can pickle it.
    """
    p, q, n, seed, cfg_dict, num_samples, snap_tol, check_idempotence = task
    cfg = FlowConfig(**cfg_dict)
    rep = random_rep(p, q, n, seed, sl=cfg.sl_mode)
    res0 = relation_residual(rep)
    manifest = build_manifest(
        "pipeline",
        {"p": p, "q": q, "n": n, "seed": seed, **cfg_dict,
         "num_samples": num_samples, "snap_tol": snap_tol},
        {},
        [],
    )
    record: dict = {
        "p": p, "q": q, "n": n, "seed": seed,
        "manifest_hash": manifest["hash"],
        "initial_residual": res0,
        "violations": [],
    }
    violations = record["violations"]
    residual_bound = 1e-8 + 10.0 * res0

    def note_flow(diag):
        trace = diag.flow_trace
        record["flow_outcome"] = trace.outcome
        record["iterations"] = trace.iterations
        record["reached_1e-8"] = trace.first_below(1e-8)
        record["max_flow_residual"] = trace.max_residual()
        record["final_moment_norm"] = diag.final_moment_norm
        if not trace.energy_monotone():
            violations.append("energy increased along an accepted step")
        if record["max_flow_residual"] > residual_bound:
            violations.append(
                f"flow residual {record['max_flow_residual']:.3e} exceeded bound"
            )

    try:
        endpoint, diag = full_pipeline(
            rep, cfg, num_samples=num_samples, snap_tol=snap_tol
        )
    except PipelineStageError as exc:
        note_flow(exc.diagnostics)
        record["outcome"] = "structural_failure"
        record["failed_stage"] = exc.stage
        record["error"] = str(exc)
        violations.append(f"structural failure at {exc.stage}")
        return record, manifest
    note_flow(diag)
    record["outcome"] = diag.outcome
    if diag.outcome == "iter_budget":
        return record, manifest

    record["detected_order"] = diag.detected_order
    record["order_bound"] = diag.order_bound
    record["normality_exponent"] = diag.normality_exponent
    record["max_path_residual"] = diag.max_path_residual
    record["endpoint_defect_a"] = diag.endpoint_defect_a
    record["endpoint_defect_b"] = diag.endpoint_defect_b
    if diag.detected_order > diag.order_bound:
        violations.append(
            f"order {diag.detected_order} exceeds bound {diag.order_bound}"
        )
    try:
        for lam in eigvals(endpoint.B):
            root = snap_root_of_unity(lam, diag.order_bound, snap_tol)
            if not any(abs(p**k - q**k) % root.N == 0 for k in range(1, n + 1)):
                violations.append(
                    f"eigenvalue order {root.N} divides no |p^k - q^k|, k <= {n}"
                )
    except BsretractError as exc:
        violations.append(f"endpoint eigenvalue failed to snap: {exc}")
    if diag.max_path_residual > residual_bound:
        violations.append(
            f"path residual {diag.max_path_residual:.3e} exceeded bound"
        )
    if not verify_unitary_rep(endpoint, 1e-8):
        violations.append("endpoint failed the unitary-representation check")
    if check_idempotence:
        try:
            endpoint2, diag2 = full_pipeline(
                endpoint, cfg, num_samples=num_samples, snap_tol=snap_tol
            )
            delta = max(
                hs_norm(endpoint2.A - endpoint.A), hs_norm(endpoint2.B - endpoint.B)
            )
            record["idempotence_delta"] = delta
            if diag2.outcome != "ok" or delta > 1e-9:
                violations.append(f"pipeline not idempotent: delta {delta:.3e}")
        except (BsretractError, ValueError) as exc:
            violations.append(f"pipeline rerun failed: {exc}")
    return record, manifest


def _worker_count(requested: int | None) -> int:
    cap = os.environ.get("BSRETRACT_THREADS")
    cap = int(cap) if cap else None
    workers = requested or min(4, os.cpu_count() or 1)
    if cap is not None:
        workers = max(1, min(workers, cap))
    return workers


def run_suite(
    pairs: list[tuple[int, int]],
    n_max: int,
    seeds: int,
    cfg: FlowConfig,
    *,
    base_seed: int = 0,
    num_samples: int = 100,
    snap_tol: float = 1e-6,
    check_idempotence: bool = False,
    workers: int | None = None,
) -> dict:
    """Sweep random representations over the grid and aggregate invariants."""
    cfg_dict = {
        "tol": cfg.tol, "max_iter": cfg.max_iter, "eta0": cfg.eta0,
        "armijo": cfg.armijo, "shrink": cfg.shrink, "sl_mode": cfg.sl_mode,
    }
    tasks = [
        (p, q, n, derive_seed(base_seed, p, q, n, i), cfg_dict,
         num_samples, snap_tol, check_idempotence)
        for (p, q) in pairs
        for n in range(1, n_max + 1)
        for i in range(seeds)
    ]
    workers = _worker_count(workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, tasks, chunksize=4))
    else:
        results = [run_one(t) for t in tasks]
    records = [r for r, _ in results]
    manifests = {m["hash"]: m for _, m in results}
    total = len(records)
    converged = [r for r in records if r.get("outcome") == "ok"]
    crossed = [r for r in records if r.get("reached_1e-8") is not None]
    violations = [
        {"p": r["p"], "q": r["q"], "n": r["n"], "seed": r["seed"], "what": v}
        for r in records
        for v in r["violations"]
    ]
    orders: dict[str, int] = {}
    exponents: dict[str, int] = {}
    for r in converged:
        okey = str(r["detected_order"])
        orders[okey] = orders.get(okey, 0) + 1
        jkey = str(r["normality_exponent"])
        exponents[jkey] = exponents.get(jkey, 0) + 1
    iterations = [r.get("iterations", 0) for r in records]
    summary = {
        "total_runs": total,
        "converged": len(converged),
        "converged_rate": len(converged) / total if total else 1.0,
        "reached_1e-8": len(crossed),
        "reached_1e-8_rate": len(crossed) / total if total else 1.0,
        "hard_violations": len(violations),
        "violations": violations,
        "order_histogram": orders,
        "exponent_histogram": exponents,
        "max_iterations": max(iterations, default=0),
        "mean_iterations": sum(iterations) / total if total else 0.0,
    }
    return {"summary": summary, "runs": records, "manifests": manifests}


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


@main.command("suite")
@click.option("--p-list", default="1,2,3", show_default=True)
@click.option("--q-list", default="1,2,3", show_default=True)
@click.option("--pairs", "pairs_spec", default=None,
              help="Explicit 'p:q,p:q' pairs; every pair must be valid.")
@click.option("--n-max", default=3, show_default=True)
@click.option("--seeds", default=5, show_default=True)
@click.option("--base-seed", default=0, show_default=True)
@click.option("--samples", default=100, show_default=True)
@click.option("--snap-tol", default=1e-6, show_default=True)
@click.option("--idempotence", is_flag=True, help="Also re-run each pipeline on its output.")
@click.option("--report", default="-", help="Report JSON path.")
@click.option("--workers", default=None, type=int,
              help="Worker processes (BSRETRACT_THREADS caps this).")
@_with(_flow_options)
def cmd_suite(p_list, q_list, pairs_spec, n_max, seeds, base_seed, samples,
              snap_tol, idempotence, report, workers, tol, max_iter, eta0, sl):
    """Sweep the grid, run the full pipeline on every cell, aggregate."""
    if pairs_spec:
        pairs = []
        for item in pairs_spec.split(","):
            ps, _, qs = item.partition(":")
            try:
                validate_parameters(int(ps), int(qs))
            except ValueError as exc:
                _fail(EXIT_BAD_INPUT, str(exc))
            pairs.append((int(ps), int(qs)))
    else:
        pairs = []
        for p in _parse_int_list(p_list):
            for q in _parse_int_list(q_list):
                try:
                    validate_parameters(p, q)
                except ValueError:
                    continue
                pairs.append((p, q))
    cfg = FlowConfig(tol=tol, max_iter=max_iter, eta0=eta0, sl_mode=sl)
    doc = run_suite(
        pairs, n_max, seeds, cfg,
        base_seed=base_seed, num_samples=samples, snap_tol=snap_tol,
        check_idempotence=idempotence, workers=workers,
    )
    manifest = build_manifest(
        "suite",
        {"pairs": [list(x) for x in pairs], "n_max": n_max, "seeds": seeds,
         "base_seed": base_seed, "samples": samples, "snap_tol": snap_tol,
         "idempotence": idempotence, **{
             "tol": tol, "max_iter": max_iter, "eta0": eta0, "sl": sl}},
        {},
        [report],
    )
    doc["manifest"] = manifest
    _write_text(report, canonical_json(doc) + "\n")
    _emit_manifest(manifest, doc["summary"], report)
    s = doc["summary"]
    click.echo(
        f"suite: {s['converged']}/{s['total_runs']} converged, "
        f"{s['hard_violations']} hard violations",
        err=True,
    )
    if s["hard_violations"]:
        sys.exit(EXIT_HARD_VIOLATION)


if __name__ == "__main__":
    main()

"""End-to-end runs: spectrum scans, quench experiments, toy-model overlays.

Each subcommand reads an optional flat config file (``key = value``),
lets any key be overridden by the flag of the same name, writes CSV/JSON
outputs into --out, and finishes with a manifest that echoes every
parameter and carries a sha256 for every file it produced.

Exit codes: 0 success, 2 parameter error, 3 coverage or convergence
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, runio
from .operators import ModelParams, build_hamiltonian
from .quench import (QuenchSpec, TruncationError, compute_weights, le_series,
                     minimum_populated_gap, truncate_by_weight)
from .spectral import (ConvergenceError, ResourceError, dense_diagonalize,
                       ground_state_search, lanczos_lowest_k, spectrum_scan)
from .subsystem import (ObservableSeries, check_bounds, sample_reduced_series)
from .timestats import (SamplingPlan, histogram, truncated_le_distribution,
                        two_mode_density, two_mode_edges)
from .toymodel import ToyParams, toy_ds, toy_ds_density

OBSERVABLES = ("loschmidt", "trace_distance", "magnetization")
DEFAULT_SEARCH_SECTORS = (0, 1, 2, 3)


def _parse_h_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"--h-grid expects lo:hi:step, got {spec!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad h grid {spec!r}")
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1) if lo + i * step <= hi + 1e-12]


def _solve_post(hmat, params, n_up, solver, k, seed, cache_dir):
    """Eigendata for the evolution Hamiltonian, possibly from cache."""
    if solver == "auto":
        solver = "dense"  # every desk-scale sector fits the dense cap
    cache = runio.EigenCache(cache_dir) if cache_dir else None
    cache_hit = False
    eigen = None
    key = None
    if cache is not None:
        key = cache.key(params.n_sites, n_up, params.j1, params.j2, params.h_s,
                        params.subsystem_offset, solver, k)
        eigen = cache.load(key)
        cache_hit = eigen is not None
    if eigen is None:
        if solver == "dense":
            eigen = dense_diagonalize(hmat)
        elif solver == "lanczos":
            eigen = lanczos_lowest_k(hmat, min(k, hmat.dim), seed)
        else:
            raise ValueError(f"unknown solver {solver!r}")
        if cache is not None:
            cache.store(key, eigen)
    return eigen, solver, cache_hit


def run_quench(config: dict) -> str:
    """Full quench pipeline; returns the output directory."""
    out = config["out"]
    os.makedirs(out, exist_ok=True)
    t_start = time.time()

    n = int(config.get("n", 16))
    ns = int(config.get("ns", 4))
    j1 = float(config.get("j1", 1.0))
    j2 = float(config.get("j2", 0.0))
    hi = float(config.get("hi", 0.2))
    hf = float(config.get("hf", 0.0))
    samples = int(config.get("samples", 400000))
    seed = int(config.get("seed", 42))
    nmax = config.get("nmax")
    nmax = int(nmax) if nmax not in (None, "", "none") else None
    solver = str(config.get("solver", "auto"))
    k = int(config.get("k", 500))
    renorm = _truthy(config.get("renormalize_truncation", False))
    observables = _parse_observables(config.get("observables", ",".join(OBSERVABLES)))
    sectors = _parse_sectors(config.get("search_sectors", DEFAULT_SEARCH_SECTORS))
    sampling_coverage = float(config.get("sampling_coverage", 1 - 1e-4))
    cache_dir = config.get("cache")

    pre = ModelParams(n, ns, j1=j1, j2=j2, h_s=hi)
    post = pre.with_field(hf)
    spec = QuenchSpec(pre, post)

    search = ground_state_search(pre, sectors, seed=seed)
    basis = search.basis
    hmat = build_hamiltonian(post, basis)
    eigen, solver_used, cache_hit = _solve_post(hmat, post, basis.n_up, solver,
                                                k, seed, cache_dir)

    q_full = compute_weights(search.vector, eigen, renormalize=renorm)
    q_samp = truncate_by_weight(q_full, target_coverage=sampling_coverage)
    blocks_full = q_full.block_weights()
    block_energies = q_full.block_energies()

    files = []
    # per-mode weight spectrum
    runio.write_csv(os.path.join(out, "spectrum_weights.csv"), ["energy", "weight"],
                    zip(q_full.eigen.energies, q_full.p))
    files.append("spectrum_weights.csv")

    gap = minimum_populated_gap(q_samp)
    identity_quench = spec.is_identity or gap is None
    if gap is None:
        plan = SamplingPlan(t_max=100 * 2 * np.pi, n_samples=samples, seed=seed)
    else:
        plan = SamplingPlan.for_gap(gap, n_samples=samples, seed=seed)
    times = plan.times()

    distributions = {}
    bounds_report = None
    series = None
    if "loschmidt" in observables:
        distributions["loschmidt"] = histogram(le_series(q_samp, times))
    if "trace_distance" in observables or "magnetization" in observables:
        series = sample_reduced_series(q_samp, basis, ns, times)
        if "trace_distance" in observables:
            distributions["trace_distance"] = histogram(series.ds)
        if "magnetization" in observables:
            distributions["magnetization"] = histogram(series.ms)
    for name, dist in distributions.items():
        files += runio.write_distribution(out, name, dist, plan, q_samp.coverage)

    if series is not None:
        obs_list = []
        if "magnetization" in observables:
            obs_list.append(ObservableSeries(
                "magnetization", series.ms, series.ms_mean_analytic, -0.5, 0.5))
        bounds_report = check_bounds(q_samp, basis, ns, series.ds, obs_list)
        runio.write_json(os.path.join(out, "bounds.json"), bounds_report.to_dict())
        files.append("bounds.json")

    # analytic overlays
    order = np.argsort(-blocks_full)
    p0 = float(blocks_full[order[0]])
    p1 = float(blocks_full[order[1]]) if len(blocks_full) > 1 else 0.0
    overlays = {}
    if p1 > 1e-12:
        x1, x2 = two_mode_edges(p0, p1)
        xs = np.linspace(x1, x2, 1001)[1:-1]
        forms = two_mode_density(p0, p1, xs)
        runio.write_csv(os.path.join(out, "overlay_two_mode.csv"),
                        ["x", "density_arcsine", "density_with_background"],
                        zip(xs, forms.arcsine, forms.with_background))
        files.append("overlay_two_mode.csv")
        overlays["two_mode"] = {"p0": p0, "p1": p1, "x1": x1, "x2": x2}

        edge = float(np.sqrt(p0 * p1))
        xs_toy = np.linspace(0.0, edge, 1001)[:-1]
        dens = (2 / np.pi) / np.sqrt(p0 * p1 - xs_toy ** 2)
        runio.write_csv(os.path.join(out, "overlay_toy_ds.csv"), ["x", "density"],
                        zip(xs_toy, dens))
        files.append("overlay_toy_ds.csv")
        overlays["toy_ds"] = {"edge": edge}
    if nmax is not None and "loschmidt" in observables:
        trunc = truncated_le_distribution(q_samp, nmax, plan)
        files += runio.write_distribution(out, "overlay_truncated_le", trunc,
                                          plan, q_samp.coverage)
        overlays["truncated_le"] = {
            "n_max": nmax,
            "sup_ecdf_distance_to_full":
                distributions["loschmidt"].sup_ecdf_distance(trunc),
        }

    manifest = {
        "tool": {"name": "spinquench", "version": __version__},
        "command": "quench",
        "params": {
            "n": n, "ns": ns, "j1": j1, "j2": j2, "h_i": hi, "h_f": hf,
            "subsystem_offset": 0,
            "observables": sorted(observables),
            "search_sectors": list(sectors),
        },
        "plan": plan.to_dict(),
        "engine": {
            "method": eigen.method_tag,
            "solver_requested": solver,
            "solver_used": solver_used,
            "cache_hit": cache_hit,
            "n_computed": q_full.n_modes,
            "ground_search": {
                "winning_sector": search.total_sz,
                "n_up": search.n_up,
                "sector_dim": basis.dim,
                "degenerate": search.degenerate,
                "per_sector": [
                    {"total_sz": sz, "n_up": nu, "e0": e0, "method": m}
                    for sz, nu, e0, m in search.per_sector],
            },
            "coverage_full": q_full.coverage,
            "renormalized": q_full.renormalized,
            "sampling_modes": q_samp.n_modes,
            "sampling_coverage": q_samp.coverage,
            "sampling_deficit": q_samp.coverage_deficit,
            "le_mean": q_full.le_mean,
            "d_eff": q_full.d_eff,
            "identity_quench": identity_quench,
            "degeneracy_blocks": {
                "count": len(blocks_full),
                "populated": int((blocks_full > 1e-8).sum()),
                "nontrivial_sizes": [
                    len(g) for g in q_full.eigen.degeneracy_groups if len(g) > 1],
            },
            "top_block_weights": [float(w) for w in np.sort(blocks_full)[::-1][:8]],
            "p_ground_block": float(blocks_full[int(np.argmin(block_energies))]),
        },
        "derived": {
            name: runio.distribution_payload(dist, plan, q_samp.coverage)["moments"]
            for name, dist in distributions.items()
        },
        "overlays": overlays,
        "bounds": bounds_report.to_dict() if bounds_report else None,
        "wall_clock_seconds": time.time() - t_start,
    }
    manifest["files"] = {name: runio.sha256_file(os.path.join(out, name))
                         for name in files}
    runio.write_json(os.path.join(out, "manifest.json"), manifest)
    return out


def run_spectrum(config: dict) -> str:
    out = config["out"]
    os.makedirs(out, exist_ok=True)
    t_start = time.time()

    n = int(config.get("n", 16))
    ns = int(config.get("ns", 4))
    j1 = float(config.get("j1", 1.0))
    j2_list = [float(v) for v in str(config.get("j2", "0")).split(",")]
    levels = int(config.get("levels", 5))
    h_grid = _parse_h_grid(str(config.get("h_grid", "0:4:0.25")))
    seed = int(config.get("seed", 42))

    files = []
    for j2 in j2_list:
        params = ModelParams(n, ns, j1=j1, j2=j2, h_s=0.0)
        rows = spectrum_scan(params, h_grid, levels, seed=seed)
        name = f"spectrum_j2_{runio.fmt(j2)}.csv"
        runio.write_csv(os.path.join(out, name),
                        ["h"] + [f"E{i}" for i in range(levels)],
                        [[h] + es for h, es in rows])
        files.append(name)

    manifest = {
        "tool": {"name": "spinquench", "version": __version__},
        "command": "spectrum",
        "params": {"n": n, "ns": ns, "j1": j1, "j2_list": j2_list,
                   "levels": levels, "h_grid": h_grid, "seed": seed},
        "wall_clock_seconds": time.time() - t_start,
    }
    manifest["files"] = {name: runio.sha256_file(os.path.join(out, name))
                         for name in files}
    runio.write_json(os.path.join(out, "manifest.json"), manifest)
    return out


def run_toy(config: dict) -> str:
    out = config["out"]
    os.makedirs(out, exist_ok=True)
    t_start = time.time()

    p1 = float(config.get("p1", 0.86))
    p2 = float(config.get("p2", 0.13))
    omega = float(config.get("omega", 1.0))
    phi = float(config.get("phi", 0.0))
    samples = int(config.get("samples", 400000))
    seed = int(config.get("seed", 42))

    params = ToyParams(p1, p2, omega, phi)
    degenerate_delta = params.edge == 0.0
    if not degenerate_delta and omega == 0.0:
        raise ValueError("omega must be nonzero for a nontrivial toy distribution")

    files = []
    if degenerate_delta:
        plan = SamplingPlan(t_max=100 * 2 * np.pi, n_samples=samples, seed=seed)
    else:
        plan = SamplingPlan.for_gap(abs(omega), n_samples=samples, seed=seed,
                                    periods=1000)
    dist = histogram(toy_ds(params, plan.times()))
    files += runio.write_distribution(out, "toy_histogram", dist, plan, 1.0)

    if degenerate_delta:
        runio.write_csv(os.path.join(out, "toy_density.csv"), ["x", "density"], [])
    else:
        xs = np.linspace(0.0, params.edge, 1001)[:-1]
        runio.write_csv(os.path.join(out, "toy_density.csv"), ["x", "density"],
                        zip(xs, toy_ds_density(params, xs)))
    files.append("toy_density.csv")

    manifest = {
        "tool": {"name": "spinquench", "version": __version__},
        "command": "toy",
        "params": {"p1": p1, "p2": p2, "omega": omega, "phi": phi,
                   "samples": samples, "seed": seed},
        "plan": plan.to_dict(),
        "derived": {"edge": params.edge, "degenerate_delta": degenerate_delta,
                    "moments": runio.distribution_payload(dist, plan, 1.0)["moments"]},
        "wall_clock_seconds": time.time() - t_start,
    }
    manifest["files"] = {name: runio.sha256_file(os.path.join(out, name))
                         for name in files}
    runio.write_json(os.path.join(out, "manifest.json"), manifest)
    return out


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _parse_observables(value):
    if isinstance(value, (list, tuple, set)):
        names = set(value)
    else:
        names = {v.strip() for v in str(value).split(",") if v.strip()}
    bad = names - set(OBSERVABLES)
    if bad:
        raise ValueError(f"unknown observables: {sorted(bad)}")
    if not names:
        raise ValueError("at least one observable is required")
    return names


def _parse_sectors(value):
    if isinstance(value, (list, tuple)):
        return [float(v) if float(v) % 1 else int(float(v)) for v in value]
    return [float(v) if float(v) % 1 else int(float(v))
            for v in str(value).split(",") if v.strip()]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spinquench",
        description="Local quenches on frustrated spin-1/2 Heisenberg rings: "
                    "spectra, quench statistics, and toy-model overlays.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=False, help="output directory")
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)

    pq = sub.add_parser("quench", parents=[common],
                        help="run one quench experiment end to end")
    pq.add_argument("--n", type=int)
    pq.add_argument("--ns", type=int)
    pq.add_argument("--j2", type=float)
    pq.add_argument("--hi", type=float)
    pq.add_argument("--hf", type=float)
    pq.add_argument("--nmax", type=int)
    pq.add_argument("--solver", choices=("auto", "dense", "lanczos"))
    pq.add_argument("--k", type=int)
    pq.add_argument("--observables")
    pq.add_argument("--cache", help="eigendata cache directory")
    pq.add_argument("--renormalize-truncation", action="store_true", default=None)

    ps = sub.add_parser("spectrum", parents=[common],
                        help="scan the lowest levels against the local field")
    ps.add_argument("--n", type=int)
    ps.add_argument("--ns", type=int)
    ps.add_argument("--j2", help="comma-separated coupling list")
    ps.add_argument("--h-grid", dest="h_grid", help="lo:hi:step")
    ps.add_argument("--levels", type=int)

    pt = sub.add_parser("toy", parents=[common],
                        help="two-eigenstate toy model sampling and overlay")
    pt.add_argument("--p1", type=float)
    pt.add_argument("--p2", type=float)
    pt.add_argument("--omega", type=float)
    pt.add_argument("--phi", type=float)
    return parser


RUNNERS = {"quench": run_quench, "spectrum": run_spectrum, "toy": run_toy}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    config = {}
    if args.config:
        config.update(runio.parse_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        config[key] = value
    if not config.get("out"):
        print("error: --out is required (flag or config key)", file=sys.stderr)
        return 2

    try:
        out = RUNNERS[args.command](config)
    except TruncationError as err:
        print(f"error: coverage failure: {err}", file=sys.stderr)
        return 3
    except ConvergenceError as err:
        print(f"error: solver did not converge: {err}", file=sys.stderr)
        return 3
    except (ValueError, ResourceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Configuration-driven experiment runner.

Subcommands compute entropy, mutual information, negativity, g-function
tables, collapse fits and free-fermion scans from JSON configs, writing CSV
rows with a fixed column set and optional SVG line plots.

Exit codes: 0 success, 1 check or solver failure, 2 config error,
3 budget refusal.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import scaling
from .cache import cached_ground_state
from .channels import identity_channel, make_dephasing, make_depolarizing
from .dmrg import DMRGConvergenceError
from .free_fermion import (
    amplitude_damping,
    gaussian_log_negativity,
    gaussian_mutual_information,
    gaussian_renyi_entropy,
    ns_ground_covariance,
)
from .replica import (
    BudgetExceeded,
    NumericalFailure,
    Region,
    renyi_entropy_region,
    renyi_mutual_information,
    renyi_negativity,
    whole_chain_log_z,
)
from .spin_model import build_tfim

logger = logging.getLogger("chancrit")

CSV_COLUMNS = ["scenario", "L", "region", "p", "theta_tilde", "n",
               "quantity", "value", "stderr", "window", "chi", "wall_time"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

_AXIS_SCHEMA = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        {"type": "object", "additionalProperties": False,
         "properties": {"theta_tilde": {"type": "number", "minimum": 0.0, "maximum": 1.0}},
         "required": ["theta_tilde"]},
        {"type": "object", "additionalProperties": False,
         "properties": {"plane": {"enum": ["xz", "yz"]},
                        "theta": {"type": "number"}},
         "required": ["plane", "theta"]},
    ]
}

_INTERVAL = {"type": "array", "minItems": 2, "maxItems": 2,
             "items": {"type": "integer", "minimum": 1}}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario", "model", "channel"],
    "properties": {
        "scenario": {"type": "string", "minLength": 1},
        "model": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "L": {"type": "integer", "minimum": 2},
                "L_list": {"type": "array", "minItems": 1,
                           "items": {"type": "integer", "minimum": 2}},
                "periodic": {"type": "boolean"},
            },
        },
        "channel": {
            "type": "object", "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["dephasing", "depolarizing",
                                  "amplitude_damping", "identity"]},
                "p": {"type": "number", "minimum": 0.0, "maximum": 1.0},
                "p_list": {"type": "array", "minItems": 1,
                           "items": {"type": "number", "minimum": 0.0, "maximum": 1.0}},
                "axis": _AXIS_SCHEMA,
                "theta_tilde_list": {"type": "array", "minItems": 1,
                                     "items": {"type": "number",
                                               "minimum": 0.0, "maximum": 1.0}},
            },
        },
        "renyi_n": {
            "type": "array", "minItems": 1,
            "items": {"oneOf": [{"type": "integer", "minimum": 2},
                                {"enum": ["von_neumann"]}]},
        },
        "regions": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "type": {"enum": ["whole", "prefix", "intervals", "pairs"]},
                "sizes": {"type": "array", "minItems": 1,
                          "items": {"type": "integer", "minimum": 1}},
                "intervals": {"type": "array", "minItems": 1, "items": _INTERVAL},
                "pairs": {"type": "array", "minItems": 1,
                          "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                    "items": _INTERVAL}},
            },
            "required": ["type"],
        },
        "collapse": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "parameter": {"enum": ["p", "theta_tilde"]},
                "p_c": {"type": "number"},
                "delta_l": {"type": "integer", "minimum": 1},
            },
            "required": ["parameter", "p_c"],
        },
        "fit": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["single_interval", "cross_ratio"]},
                "eta_max": {"type": "number"},
            },
        },
        "delta_l": {"type": "integer", "minimum": 1},
        "chi_max": {"type": "integer", "minimum": 2},
        "energy_tol": {"type": "number", "exclusiveMinimum": 0.0},
        "seed": {"type": "integer", "minimum": 0},
        "flop_budget": {"type": "number", "exclusiveMinimum": 0.0},
        "memory_budget": {"type": "number", "exclusiveMinimum": 0.0},
        "output": {"type": "string"},
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class ResultRow:
    scenario: str
    L: object = ""
    region: str = ""
    p: object = ""
    theta_tilde: object = ""
    n: object = ""
    quantity: str = ""
    value: object = ""
    stderr: object = ""
    window: str = ""
    chi: object = ""
    wall_time: object = ""

    def sort_key(self):
        return (self.scenario, _num_key(self.L), _num_key(self.p),
                str(self.region), _num_key(self.theta_tilde),
                str(self.n), self.quantity)

    def as_list(self):
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


def _num_key(v):
    if v == "" or v is None:
        return (0, 0.0)
    return (1, float(v))


def _fmt(v):
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def load_config(path):
    """Parse and schema-validate a JSON experiment config."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {exc.message}") from exc
    return raw


def axis_vector(spec):
    """Resolve an axis spec to a unit 3-vector in the Pauli (x, y, z) basis."""
    if isinstance(spec, (list, tuple)):
        return np.asarray(spec, dtype=float)
    if "theta_tilde" in spec:
        ang = 0.5 * np.pi * spec["theta_tilde"]
        return np.array([np.sin(ang), 0.0, np.cos(ang)])
    ang = spec["theta"]
    if spec["plane"] == "yz":
        return np.array([0.0, np.sin(ang), np.cos(ang)])
    return np.array([np.sin(ang), 0.0, np.cos(ang)])


def build_channel(kind, p, axis_spec):
    if kind == "identity":
        return identity_channel()
    if kind == "depolarizing":
        return make_depolarizing(p)
    if kind == "dephasing":
        if axis_spec is None:
            raise ConfigError("dephasing channel requires an axis")
        return make_dephasing(p, axis_vector(axis_spec))
    raise ConfigError(f"channel kind {kind!r} is not a spin channel")


def _channel_points(cfg):
    """Expand the channel block into (p, theta_tilde, channel) sweep points."""
    ch = cfg["channel"]
    kind = ch["kind"]
    ps = ch.get("p_list", [ch.get("p", 1.0)])
    thetas = ch.get("theta_tilde_list")
    points = []
    if thetas is not None:
        if kind != "dephasing":
            raise ConfigError("theta_tilde_list only applies to dephasing")
        for tt in thetas:
            for p in ps:
                points.append((p, tt, build_channel(kind, p, {"theta_tilde": tt})))
    else:
        axis = ch.get("axis")
        tt = axis.get("theta_tilde", "") if isinstance(axis, dict) else ""
        for p in ps:
            points.append((p, tt, build_channel(kind, p, axis)))
    return points


def _sizes(cfg):
    model = cfg.get("model", {})
    if "L_list" in model:
        return list(model["L_list"])
    if "L" in model:
        return [model["L"]]
    raise ConfigError("model requires L or L_list")


def _regions(cfg, L):
    spec = cfg.get("regions", {"type": "whole"})
    kind = spec["type"]
    if kind == "whole":
        return [("whole", Region.full(L))]
    if kind == "prefix":
        return [(f"1-{s}", Region.interval(1, s, L)) for s in spec["sizes"] if s < L]
    if kind == "intervals":
        out = []
        for a, b in spec["intervals"]:
            if b <= L:
                out.append((f"{a}-{b}", Region.interval(a, b, L)))
        return out
    raise ConfigError(f"regions type {kind!r} not valid here")


def _region_pairs(cfg, L):
    spec = cfg.get("regions")
    if spec is None or spec["type"] != "pairs":
        raise ConfigError("this subcommand requires regions of type 'pairs'")
    out = []
    for (a1, b1), (a2, b2) in spec["pairs"]:
        if b1 <= L and b2 <= L:
            label = f"{a1}-{b1}+{a2}-{b2}"
            out.append((label, Region.interval(a1, b1, L), Region.interval(a2, b2, L)))
    return out


def _renyi_orders(cfg, default=(2,)):
    return cfg.get("renyi_n", list(default))


def _budget_kwargs(cfg):
    out = {}
    if "flop_budget" in cfg:
        out["flop_budget"] = cfg["flop_budget"]
    if "memory_budget" in cfg:
        out["memory_budget"] = cfg["memory_budget"]
    return out


class RunState:
    """Shared run context: cache, thread count, exit status accumulation."""

    def __init__(self, cfg, cache_dir, seed=None, threads=1):
        self.cfg = cfg
        self.cache_dir = cache_dir
        self.seed = cfg.get("seed", 0) if seed is None else seed
        self.chi_max = cfg.get("chi_max", 48)
        self.energy_tol = cfg.get("energy_tol", 1e-10)
        self.periodic = cfg.get("model", {}).get("periodic", True)
        self.threads = max(1, threads)
        self.refused = False
        self.failed = False
        self._states = {}

    def ground_state(self, L):
        if L not in self._states:
            spec = build_tfim(L, self.periodic)
            self._states[L] = cached_ground_state(
                spec, self.chi_max, self.cache_dir,
                energy_tol=self.energy_tol, seed=self.seed)
        return self._states[L]

    def exit_code(self):
        if self.failed:
            return EXIT_FAILURE
        if self.refused:
            return EXIT_BUDGET
        return EXIT_OK


def _run_jobs(state, jobs):
    """Execute closures over independent points, across threads if asked.

    Parallelism is only across jobs, never inside a contraction, so the
    emitted rows are identical for any thread count (write_csv sorts).
    """
    if state.threads == 1 or len(jobs) <= 1:
        rows = [job() for job in jobs]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=state.threads) as pool:
            rows = list(pool.map(lambda job: job(), jobs))
    return [r for group in rows for r in group]


def _guarded(state, fn, *args, **kwargs):
    """Run one contraction; on refusal/failure return None and mark state."""
    try:
        return fn(*args, **kwargs)
    except BudgetExceeded as exc:
        logger.warning("budget refusal: %s", exc)
        state.refused = True
    except (NumericalFailure, DMRGConvergenceError) as exc:
        logger.error("solver failure: %s", exc)
        state.failed = True
    return None


def _row(state, scenario, **kw):
    return ResultRow(scenario=scenario, chi=kw.pop("chi", state.chi_max), **kw)


def _point_job(state, cfg, fn, quantity, L, label, p, tt, n, args):
    budget = _budget_kwargs(cfg)

    def job():
        t0 = time.perf_counter()
        val = _guarded(state, fn, *args, **budget)
        return [_row(state, cfg["scenario"], L=L, region=label, p=p,
                     theta_tilde=tt, n=n, quantity=quantity, value=val,
                     wall_time=time.perf_counter() - t0)]

    return job


def run_entropy(cfg, state):
    jobs = []
    for L in _sizes(cfg):
        mps = state.ground_state(L)
        for p, tt, channel in _channel_points(cfg):
            for label, region in _regions(cfg, L):
                for n in _renyi_orders(cfg):
                    jobs.append(_point_job(state, cfg, renyi_entropy_region, "S",
                                           L, label, p, tt, n,
                                           (mps, channel, n, region)))
    return _run_jobs(state, jobs)


def _mi_pairs(cfg, L):
    """Region pairs for mutual information; prefix means A vs complement."""
    spec = cfg.get("regions")
    if spec is None:
        raise ConfigError("mutual-info requires a regions block")
    if spec["type"] == "pairs":
        return _region_pairs(cfg, L)
    if spec["type"] == "prefix":
        out = []
        for size in spec["sizes"]:
            if size >= L:
                continue
            a = Region.interval(1, size, L)
            out.append((f"1-{size}", a, a.complement()))
        return out
    raise ConfigError("mutual-info regions must be 'pairs' or 'prefix'")


def _pair_cross_ratio(label, L):
    """Cross ratio of a 'a-b+c-d' labelled interval pair on the ring."""
    first, second = label.split("+")
    a1, b1 = (int(t) for t in first.split("-"))
    a2, b2 = (int(t) for t in second.split("-"))
    return scaling.cross_ratio(a1 - 1, b1, a2 - 1, b2, L)


def _fit_rows(cfg, state, rows):
    """Scaling-dimension fits over the mutual information rows."""
    fit_spec = cfg.get("fit")
    if not fit_spec:
        return []
    kind = fit_spec.get("kind", "single_interval")
    out = []
    groups = {}
    for r in rows:
        if r.quantity != "I" or r.value is None:
            continue
        groups.setdefault((r.L, r.p, r.theta_tilde, r.n), []).append(r)
    for (L, p, tt, n), grp in sorted(groups.items(),
                                     key=lambda kv: str(kv[0])):
        try:
            if kind == "single_interval":
                points = [(int(r.region.split("-")[1]), r.value) for r in grp]
                fit = scaling.fit_single_interval_dimension(points, L, n)
            else:
                points = [(_pair_cross_ratio(r.region, L), r.value) for r in grp]
                fit = scaling.fit_cross_ratio_dimension(
                    points, eta_max=fit_spec.get("eta_max", 0.1))
        except ValueError as exc:
            logger.error("fit failed at L=%s p=%s: %s", L, p, exc)
            state.failed = True
            continue
        out.append(_row(state, cfg["scenario"], L=L, p=p, theta_tilde=tt, n=n,
                        quantity="delta", value=fit.delta, stderr=fit.stderr,
                        window=json.dumps(fit.window, sort_keys=True)))
    return out


def run_mutual_info(cfg, state):
    jobs = []
    for L in _sizes(cfg):
        mps = state.ground_state(L)
        for p, tt, channel in _channel_points(cfg):
            for label, ra, rb in _mi_pairs(cfg, L):
                for n in _renyi_orders(cfg):
                    jobs.append(_point_job(state, cfg, renyi_mutual_information,
                                           "I", L, label, p, tt, n,
                                           (mps, channel, n, ra, rb)))
    rows = _run_jobs(state, jobs)
    rows.extend(_fit_rows(cfg, state, rows))
    return rows


def run_negativity(cfg, state):
    jobs = []
    for L in _sizes(cfg):
        mps = state.ground_state(L)
        for p, tt, channel in _channel_points(cfg):
            for label, region in _regions(cfg, L):
                for n in _renyi_orders(cfg, default=(3,)):
                    jobs.append(_point_job(state, cfg, renyi_negativity, "N",
                                           L, label, p, tt, n,
                                           (mps, channel, n, region)))
    return _run_jobs(state, jobs)


def run_gfunction(cfg, state):
    """logZ over the L grid per channel point, plus central-difference logg."""
    rows = []
    budget = _budget_kwargs(cfg)
    sizes = _sizes(cfg)
    delta_l = cfg.get("delta_l", 4)
    for p, tt, channel in _channel_points(cfg):
        for n in _renyi_orders(cfg):
            log_z = {}
            for L in sizes:
                mps = state.ground_state(L)
                t0 = time.perf_counter()
                val = _guarded(state, whole_chain_log_z, mps, channel, n, **budget)
                rows.append(_row(state, cfg["scenario"], L=L, region="whole",
                                 p=p, theta_tilde=tt, n=n, quantity="logZ",
                                 value=val, wall_time=time.perf_counter() - t0))
                if val is not None:
                    log_z[L] = val
            if len(log_z) >= 3:
                ls = sorted(log_z)
                try:
                    mids, logg = scaling.g_from_log_z(ls, [log_z[l] for l in ls],
                                                      delta_l=delta_l)
                except ValueError as exc:
                    logger.warning("skipping logg: %s", exc)
                    continue
                for L, g in zip(mids, logg):
                    rows.append(_row(state, cfg["scenario"], L=int(L), region="whole",
                                     p=p, theta_tilde=tt, n=n, quantity="logg",
                                     value=float(g)))
    return rows


def run_collapse(cfg, state):
    """g-function table plus a data-collapse fit of the flow exponent nu."""
    if "collapse" not in cfg:
        raise ConfigError("collapse subcommand requires a 'collapse' block")
    rows = run_gfunction(cfg, state)
    spec = cfg["collapse"]
    param_col = spec["parameter"]
    for n in _renyi_orders(cfg):
        samples = []
        for r in rows:
            if r.quantity == "logg" and r.n == n and r.value is not None:
                param = r.p if param_col == "p" else r.theta_tilde
                samples.append((float(param), float(r.L), float(r.value)))
        try:
            fit = scaling.collapse_fit(samples, spec["p_c"])
        except ValueError as exc:
            logger.error("collapse fit failed: %s", exc)
            state.failed = True
            continue
        rows.append(_row(state, cfg["scenario"], n=n, quantity="nu",
                         value=fit.nu, stderr="",
                         window=json.dumps(fit.window, sort_keys=True),
                         p=spec["p_c"] if param_col == "p" else "",
                         theta_tilde=spec["p_c"] if param_col == "theta_tilde" else ""))
    return rows


def run_fermion(cfg, state):
    """Free-fermion amplitude damping scan: entropies, MI, negativity, logg."""
    ch = cfg["channel"]
    if ch["kind"] != "amplitude_damping":
        raise ConfigError("fermion subcommand requires an amplitude_damping channel")
    rows = []
    sizes = _sizes(cfg)
    delta_l = cfg.get("delta_l", 4)
    ps = ch.get("p_list", [ch.get("p", 0.5)])
    orders = _renyi_orders(cfg)
    reg_spec = cfg.get("regions", {"type": "whole"})
    for n in orders:
        for p in ps:
            log_z = {}
            for L in sizes:
                cov = amplitude_damping(ns_ground_covariance(L), p)
                full = Region.full(L)
                t0 = time.perf_counter()
                s_full = gaussian_renyi_entropy(cov, full, n)
                rows.append(_row(state, cfg["scenario"], L=L, region="whole",
                                 p=p, n=n, quantity="S", value=s_full, chi="",
                                 wall_time=time.perf_counter() - t0))
                pref = 1.0 if n == "von_neumann" else n - 1.0
                log_z[L] = -pref * s_full
                if reg_spec["type"] == "prefix":
                    for size in reg_spec["sizes"]:
                        if size >= L:
                            continue
                        region = Region.interval(1, size, L)
                        s = gaussian_renyi_entropy(cov, region, n)
                        rows.append(_row(state, cfg["scenario"], L=L,
                                         region=f"1-{size}", p=p, n=n,
                                         quantity="S", value=s, chi=""))
                        if n == orders[0]:
                            neg = gaussian_log_negativity(cov, region)
                            rows.append(_row(state, cfg["scenario"], L=L,
                                             region=f"1-{size}", p=p, n="",
                                             quantity="N", value=neg, chi=""))
                elif reg_spec["type"] == "pairs":
                    for (a1, b1), (a2, b2) in reg_spec["pairs"]:
                        if b1 > L or b2 > L:
                            continue
                        ra = Region.interval(a1, b1, L)
                        rb = Region.interval(a2, b2, L)
                        mi = gaussian_mutual_information(cov, ra, rb, n)
                        rows.append(_row(state, cfg["scenario"], L=L,
                                         region=f"{a1}-{b1}+{a2}-{b2}", p=p,
                                         n=n, quantity="I", value=mi, chi=""))
            if len(log_z) >= 3:
                ls = sorted(log_z)
                try:
                    mids, logg = scaling.g_from_log_z(ls, [log_z[l] for l in ls],
                                                      delta_l=delta_l)
                except ValueError:
                    continue
                for L, g in zip(mids, logg):
                    rows.append(_row(state, cfg["scenario"], L=int(L),
                                     region="whole", p=p, n=n, quantity="logg",
                                     value=float(g), chi=""))
    return rows


def run_ground_state(cfg, state):
    """Warm the ground-state cache; reports but emits no result rows."""
    for L in _sizes(cfg):
        t0 = time.perf_counter()
        mps = state.ground_state(L)
        dims = [t.shape[2] for t in mps.tensors[:-1]]
        logger.info("L=%d ground state ready in %.1fs, max bond dim %d",
                    L, time.perf_counter() - t0, max(dims))
    return []


def write_csv(rows, path):
    rows = sorted(rows, key=lambda r: r.sort_key())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(r.as_list())


def run_oracle_check():
    """Cross-oracle consistency suite at small sizes; returns failure list."""
    from .analytic import TwoSiteInputs, two_site_renyi_mi
    from .dense_oracle import (
        dense_oracle_entropies,
        dense_oracle_mutual_information,
        dense_oracle_negativity,
    )
    from .fermion_oracle import (
        oracle_log_negativity,
        oracle_mutual_information,
        oracle_renyi_entropy,
    )
    from .spin_model import connected_correlator, ground_state_dense, local_expectation

    failures = []

    def check(name, got, want, tol):
        delta = abs(got - want)
        ok = delta <= tol
        print(f"{'PASS' if ok else 'FAIL'}  {name}: |delta| = {delta:.3e} "
              f"(tol {tol:.0e})")
        if not ok:
            failures.append(name)

    L = 6
    spec = build_tfim(L, periodic=True)
    dense = ground_state_dense(spec)
    mps = dense.to_mps()
    channels = {
        "deph-z(p=0.5)": make_dephasing(0.5, "z"),
        "deph-zx(p=1)": make_dephasing(1.0, axis_vector({"theta_tilde": 0.8})),
        "depol(p=0.3)": make_depolarizing(0.3),
    }
    region = Region.interval(1, 3, L)
    pair = (Region.interval(1, 2, L), Region.interval(4, 5, L))
    for cname, ch in channels.items():
        for n in (2, 3):
            s_mps = renyi_entropy_region(mps, ch, n, region)
            s_dense = dense_oracle_entropies(dense, ch, n, region)
            check(f"entropy {cname} n={n} dense vs mps", s_mps, s_dense, 1e-8)
        n_mps = renyi_negativity(mps, ch, 3, region)
        n_dense = dense_oracle_negativity(dense, ch, 3, region)
        check(f"negativity {cname} n=3 dense vs mps", n_mps, n_dense, 1e-8)
        i_mps = renyi_mutual_information(mps, ch, 2, *pair)
        i_dense = dense_oracle_mutual_information(dense, ch, 2, *pair)
        check(f"mutual info {cname} n=2 dense vs mps", i_mps, i_dense, 1e-8)

    x = local_expectation(dense, "z", 0)
    c = connected_correlator(dense, "z", 0, 3)
    full_z = make_dephasing(1.0, "z")
    for n in (2, 3):
        ana = two_site_renyi_mi(TwoSiteInputs(x=x, C=c, n=n))
        num = dense_oracle_mutual_information(dense, full_z, n,
                                              Region.interval(1, 1, L),
                                              Region.interval(4, 4, L))
        check(f"two-site analytic vs dense n={n}", ana, num, 1e-10)

    cov = amplitude_damping(ns_ground_covariance(L), 0.4)
    ra, rb = Region.interval(1, 2, L), Region.interval(4, 5, L)
    for n in (2, 3, "von_neumann"):
        g = gaussian_renyi_entropy(cov, ra, n)
        o = oracle_renyi_entropy(cov, ra, n)
        check(f"gaussian entropy p=0.4 n={n}", g, o, 1e-6)
    check("gaussian mutual info p=0.4 n=2",
          gaussian_mutual_information(cov, ra, rb, 2),
          oracle_mutual_information(cov, ra, rb, 2), 1e-6)
    check("gaussian negativity p=0.4",
          gaussian_log_negativity(cov, ra),
          oracle_log_negativity(cov, ra), 1e-6)
    return failures


def run_plot(args):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = []
    with open(args.input) as fh:
        for rec in csv.DictReader(fh):
            if args.quantity and rec["quantity"] != args.quantity:
                continue
            if rec["value"] == "" or rec[args.x] == "":
                continue
            rows.append(rec)
    if not rows:
        raise ConfigError("no rows match the plot selection")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    keys = sorted({r.get(args.group_by, "") for r in rows}) if args.group_by else [None]
    for key in keys:
        sel = [r for r in rows if args.group_by is None
               or r.get(args.group_by, "") == key]
        pts = sorted((float(r[args.x]), float(r[args.y])) for r in sel)
        xs, ys = zip(*pts)
        label = f"{args.group_by}={key}" if args.group_by else None
        ax.plot(xs, ys, "o-", ms=3, label=label)
    if args.logx:
        ax.set_xscale("log")
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y if args.y != "value" else (args.quantity or "value"))
    if args.group_by:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    plt.close(fig)


RUNNERS = {
    "ground-state": run_ground_state,
    "entropy": run_entropy,
    "mutual-info": run_mutual_info,
    "negativity": run_negativity,
    "gfunction": run_gfunction,
    "collapse": run_collapse,
    "fermion": run_fermion,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chancrit",
        description="entanglement diagnostics of critical chains under local channels")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default=None, help="CSV output path")
        p.add_argument("--cache-dir", default=".chancrit-cache")
        p.add_argument("--threads", type=int, default=1,
                       help="parallelism across independent jobs")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    for name in RUNNERS:
        common(sub.add_parser(name))
    sub.add_parser("oracle-check",
                   help="run the cross-oracle consistency suite")
    plot = sub.add_parser("plot", help="render a CSV column pair as an SVG")
    plot.add_argument("--in", dest="input", required=True)
    plot.add_argument("--out", required=True)
    plot.add_argument("--x", default="L")
    plot.add_argument("--y", default="value")
    plot.add_argument("--quantity", default=None)
    plot.add_argument("--group-by", dest="group_by", default=None)
    plot.add_argument("--logx", action="store_true")
    plot.add_argument("--logy", action="store_true")
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)

    if args.command == "oracle-check":
        failures = run_oracle_check()
        if failures:
            print(f"{len(failures)} oracle check(s) failed")
            return EXIT_FAILURE
        print("all oracle checks passed")
        return EXIT_OK

    if args.command == "plot":
        try:
            run_plot(args)
        except (ConfigError, OSError) as exc:
            logger.error("%s", exc)
            return EXIT_CONFIG
        return EXIT_OK

    try:
        cfg = load_config(args.config)
        state = RunState(cfg, args.cache_dir, seed=args.seed, threads=args.threads)
        rows = RUNNERS[args.command](cfg, state)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG

    out = args.out or cfg.get("output")
    if out:
        write_csv(rows, out)
        logger.info("wrote %d rows to %s", len(rows), out)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in sorted(rows, key=lambda rr: rr.sort_key()):
            writer.writerow(r.as_list())
    return state.exit_code()


if __name__ == "__main__":
    sys.exit(main())

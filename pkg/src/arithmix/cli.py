"""Experiment driver: configuration, caching, sweeps, and report emission.

Subcommands mirror the library modules. Reports are CSV for long data and
JSON for summaries and verification rows; report paths also render PNG
figures next to the delimited files. All randomness is seeded from the
config, so reruns with the same config are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .class_action import LabelingError, build_packet, packet_census
from .eigenvalues import (
    MAX_CUTOFF,
    deligne_violations,
    get_tau,
    hecke_inequality_check,
    sieve_product,
    sparse_sum,
    squarefree_sum,
    truncated_l_one,
)
from .local_factors import (
    arch_rs_integral,
    arch_tate,
    basis_orthonormality,
    invariant_dimension,
    tate_ramified_level_bound,
    tate_unramified,
    verify_equivariance,
    verify_recovering,
)
from .mixing import CSV_HEADER, L_CAP, packet_report, report_rows, shift_q
from .quadforms import (
    CacheError,
    class_number,
    fundamental_disc_mask,
    get_class_group,
    minimal_represented,
    principal_form,
    squarefree_mask,
)
from .sphere import admissible, csv_rows, point_count

ENV_CACHE = "ARITHMIX_CACHE_DIR"
SHIFT_POLICIES = ("all", "minimal-q", "explicit")
LOCAL_PRIMES = (2, 3, 5)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs for every sweep; flat key=value file plus CLI overrides."""

    d_min: int = 3
    d_max: int = 300
    squarefree_only: bool = True
    l_max: int = 8
    tau_cutoff: int = 100_000
    shift_policy: str = "all"
    shifts: str = ""
    prime_cap: int = 20
    output_dir: str = "out"
    cache_dir: str = "cache"
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.d_min > self.d_max:
            raise ValueError(f"empty d range [{self.d_min}, {self.d_max}]")
        if not (0 <= self.l_max <= L_CAP):
            raise ValueError(f"l_max {self.l_max} outside [0, {L_CAP}]")
        if not (1 <= self.tau_cutoff <= MAX_CUTOFF):
            raise ValueError(f"tau_cutoff {self.tau_cutoff} outside [1, {MAX_CUTOFF}]")
        if self.shift_policy not in SHIFT_POLICIES:
            raise ValueError(f"shift_policy {self.shift_policy!r} not in {SHIFT_POLICIES}")
        if self.shift_policy == "explicit" and not self.explicit_shifts():
            raise ValueError("explicit shift policy needs a nonempty shifts list")
        if self.prime_cap < 3:
            raise ValueError("prime_cap below the smallest usable generator prime")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def explicit_shifts(self) -> list[int]:
        return [int(t) for t in self.shifts.split(",") if t.strip() != ""]


_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, raw: str):
    target = ExperimentConfig.__dataclass_fields__[name].type
    if target == "bool":
        low = raw.strip().lower()
        if low not in _BOOL_WORDS:
            raise ValueError(f"config key {name}: {raw!r} is not a boolean")
        return _BOOL_WORDS[low]
    if target == "int":
        return int(raw)
    return raw.strip()


def load_config_file(path: str) -> dict:
    """Flat key=value lines; '#' comments; unknown keys are refused."""
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _coerce(key, raw)
    return out


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then config file, then env cache dir, then CLI flags."""
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    env_cache = os.environ.get(ENV_CACHE)
    if env_cache:
        values["cache_dir"] = env_cache
    for f in fields(ExperimentConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# small output helpers


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def write_csv(path: str, header: str, rows: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def vrow(name: str, params: str, lhs, rhs, tol: float) -> dict:
    residual = abs(lhs - rhs)
    return {
        "name": name,
        "params": params,
        "lhs": _as_jsonable(lhs),
        "rhs": _as_jsonable(rhs),
        "residual": float(residual),
        "pass": bool(residual <= tol),
    }


def _as_jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _save_figure(fig, path: str) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": None})


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def sweep_ds(cfg: ExperimentConfig) -> list[int]:
    """Admissible d in range, optionally restricted to squarefree ones."""
    lo = max(cfg.d_min, 1)
    if lo > cfg.d_max:
        return []
    mask = squarefree_mask(cfg.d_max)
    out = []
    for d in range(lo, cfg.d_max + 1):
        if not admissible(d):
            continue
        if cfg.squarefree_only and not mask[d]:
            continue
        out.append(d)
    return out


def shifts_for(cfg: ExperimentConfig, pkt) -> list[int] | None:
    """Shift indexes requested by the policy, clipped to the group order."""
    h = pkt.group.h
    if cfg.shift_policy == "all":
        return None  # packet_report takes every class
    if cfg.shift_policy == "explicit":
        chosen = [s for s in cfg.explicit_shifts() if 0 <= s < h]
        return sorted(set(chosen)) or [0]
    # minimal-q: identity as baseline plus the cheapest nontrivial class
    if h == 1:
        return [0]
    best = min(range(1, h), key=lambda s: (shift_q(pkt, s), s))
    return [0, best]


# ---------------------------------------------------------------------------
# forms


def run_forms(cfg: ExperimentConfig) -> int:
    """Class-group sweep over fundamental discriminants up to 4*d_max."""
    _ensure_dir(cfg.output_dir)
    limit = 4 * cfg.d_max
    mask = fundamental_disc_mask(limit)
    rows = []
    violations = []
    h_by_disc = {}
    for n in range(3, limit + 1):
        if not mask[n]:
            continue
        disc = -n
        group = get_class_group(disc, cache_dir=cfg.cache_dir)
        h_by_disc[disc] = group.h
        bound = (2 / math.pi) * math.sqrt(n) + 1
        for idx, form in enumerate(group.elements):
            q = minimal_represented(form)
            ok = q <= bound
            if not ok:
                violations.append((disc, idx))
            rows.append(
                f"{disc},{idx},{form.a},{form.b},{form.c},{q},{repr(bound)},{int(ok)}"
            )
    verify = [
        vrow("minkowski_violations", f"fundamental |D| <= {limit}", len(violations), 0, 0),
    ]
    for disc, known in ((-23, 3), (-47, 5), (-71, 7), (-163, 1)):
        if -disc <= limit:
            verify.append(vrow("class_number", f"disc={disc}", h_by_disc[disc], known, 0))
    write_csv(
        os.path.join(cfg.output_dir, "forms.csv"),
        "disc,class_index,a,b,c,min_represented,minkowski_bound,within_bound",
        rows,
    )
    write_json(os.path.join(cfg.output_dir, "forms_verify.json"), verify)

    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    discs = sorted(h_by_disc)
    ax.plot([math.sqrt(-D) for D in discs], [h_by_disc[D] for D in discs], ".", ms=3)
    ax.set_xlabel("sqrt |disc|")
    ax.set_ylabel("class number")
    ax.set_title("class number growth")
    fig.tight_layout()
    _save_figure(fig, os.path.join(cfg.output_dir, "forms.png"))
    plt.close(fig)
    return sum(1 for row in verify if not row["pass"])


# ---------------------------------------------------------------------------
# sphere


def run_sphere(cfg: ExperimentConfig) -> int:
    """Lattice points and rotation orbits for every admissible d in range."""
    _ensure_dir(cfg.output_dir)
    ds = sweep_ds(cfg)
    rows = []
    counts = {}
    for d in ds:
        counts[d] = point_count(d)
        for d_, x, y, z, canonical, orbit_size in csv_rows(d):
            rows.append(f"{d_},{x},{y},{z},{canonical},{orbit_size}")
    write_csv(
        os.path.join(cfg.output_dir, "sphere_points.csv"),
        "d,x,y,z,is_canonical,orbit_size",
        rows,
    )
    sq = squarefree_mask(cfg.d_max)
    bad = 0
    checked = 0
    for d in ds:
        if d % 8 == 3 and d > 3 and sq[d]:
            checked += 1
            if counts[d] != 24 * class_number(-d):
                bad += 1
    verify = [
        vrow("count_is_24h", f"squarefree d=3 mod 8 in range, {checked} checked", bad, 0, 0)
    ]
    write_json(os.path.join(cfg.output_dir, "sphere_verify.json"), verify)

    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    if ds:
        ax.plot(ds, [counts[d] for d in ds], ".", ms=3)
    ax.set_xlabel("d")
    ax.set_ylabel("lattice points")
    ax.set_title("sphere point counts")
    fig.tight_layout()
    _save_figure(fig, os.path.join(cfg.output_dir, "sphere.png"))
    plt.close(fig)
    return sum(1 for row in verify if not row["pass"])


# ---------------------------------------------------------------------------
# orbit (packet construction)


def run_orbit(cfg: ExperimentConfig) -> int:
    """Packet sweep: orbit sizes, matched discriminants, census columns."""
    _ensure_dir(cfg.output_dir)
    rows = []
    failures = 0
    size_mismatch = 0
    for d in sweep_ds(cfg):
        try:
            pkt = build_packet(d, cache_dir=cfg.cache_dir, prime_cap=cfg.prime_cap)
        except LabelingError as exc:
            _log(f"orbit: skip d={d}: {exc}")
            failures += 1
            continue
        census = packet_census(d, pkt)
        h = pkt.group.h
        if census["packet_size"] != h:
            size_mismatch += 1
        rows.append(
            ",".join(
                str(v)
                for v in (
                    d,
                    pkt.disc_matched,
                    h,
                    census["packet_size"],
                    census["points"],
                    census["quotient_size"],
                    census["packets_observed"],
                    census["two_power_omega"],
                )
            )
        )
    verify = [
        vrow("packet_size_is_h", "matched class number per d", size_mismatch, 0, 0),
        vrow("labeling_failures", "packets built without abort", failures, 0, 0),
    ]
    write_csv(
        os.path.join(cfg.output_dir, "packets.csv"),
        "d,disc_matched,h_class,packet_size,points,quotient_size,packets_observed,two_power_omega",
        rows,
    )
    write_json(os.path.join(cfg.output_dir, "packets_verify.json"), verify)
    return failures + size_mismatch


# ---------------------------------------------------------------------------
# mix


def _mix_one(d: int, cfg: ExperimentConfig):
    """(d, csv rows, summary record, error) for one packet; picklable."""
    try:
        pkt = build_packet(d, cache_dir=cfg.cache_dir, prime_cap=cfg.prime_cap)
    except LabelingError as exc:
        return d, [], None, str(exc)
    rep = packet_report(pkt, cfg.l_max, shifts=shifts_for(cfg, pkt))
    n_harm = (cfg.l_max + 1) ** 2
    joint_abs = np.abs(rep.joint_diag[:, 1:n_harm])  # drop the constant harmonic
    record = {
        "d": d,
        "disc_matched": rep.disc_matched,
        "h_class": rep.h_class,
        "parseval_max": rep.parseval_max,
        "discrepancy": rep.discrepancy,
        "shift_q": list(rep.shift_q),
        "joint_abs": [[float(v) for v in row] for row in joint_abs],
    }
    return d, report_rows(rep), record, None


BIN_EDGES = (0.0, 0.05, 0.1, 0.2, 0.4, 0.7, 1.01)


def _joint_bins(records: list[dict]) -> list[dict]:
    """Median |joint period| binned by q / sqrt(|disc|)."""
    pools: list[list[float]] = [[] for _ in range(len(BIN_EDGES) - 1)]
    for rec in records:
        root = math.sqrt(abs(rec["disc_matched"]))
        for q, vals in zip(rec["shift_q"], rec["joint_abs"]):
            ratio = q / root
            for b in range(len(BIN_EDGES) - 1):
                if BIN_EDGES[b] <= ratio < BIN_EDGES[b + 1]:
                    pools[b].extend(vals)
                    break
    out = []
    for b, pool in enumerate(pools):
        out.append(
            {
                "q_over_sqrt_disc_lo": BIN_EDGES[b],
                "q_over_sqrt_disc_hi": BIN_EDGES[b + 1],
                "count": len(pool),
                "median_abs_joint": statistics.median(pool) if pool else None,
            }
        )
    return out


def run_mix(cfg: ExperimentConfig) -> int:
    """Weyl/twisted/joint sweep with the Parseval check on every packet."""
    _ensure_dir(cfg.output_dir)
    ds = sweep_ds(cfg)
    rows: list[str] = []
    records: list[dict] = []
    skipped: list[dict] = []
    if cfg.workers > 1 and len(ds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_mix_one, ds, [cfg] * len(ds), chunksize=4))
    else:
        results = [_mix_one(d, cfg) for d in ds]
    results.sort(key=lambda item: item[0])  # writers merge in d order
    for d, d_rows, record, err in results:
        if err is not None:
            _log(f"mix: skip d={d}: {err}")
            skipped.append({"d": d, "reason": err})
            continue
        rows.extend(d_rows)
        records.append(record)
    write_csv(os.path.join(cfg.output_dir, "mixing.csv"), CSV_HEADER, rows)

    parseval_max = max((r["parseval_max"] for r in records), default=0.0)
    summary = {
        "d_count": len(records),
        "d_range": [cfg.d_min, cfg.d_max],
        "l_max": cfg.l_max,
        "shift_policy": cfg.shift_policy,
        "parseval_max": parseval_max,
        "median_discrepancy": (
            statistics.median(r["discrepancy"] for r in records) if records else None
        ),
        "joint_by_q_bin": _joint_bins(records),
        "skipped": skipped,
    }
    write_json(os.path.join(cfg.output_dir, "mixing_summary.json"), summary)
    verify = [
        vrow("parseval_max", f"{len(records)} packets, l_max={cfg.l_max}", parseval_max, 0.0, 1e-9),
        vrow("labeling_failures", "packets built without abort", len(skipped), 0, 0),
    ]
    write_json(os.path.join(cfg.output_dir, "mixing_verify.json"), verify)

    plt = _plt()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    if records:
        axes[0].plot(
            [r["d"] for r in records], [r["discrepancy"] for r in records], ".", ms=3
        )
    axes[0].set_xlabel("d")
    axes[0].set_ylabel(f"discrepancy (l <= {max(cfg.l_max, 1)})")
    axes[0].set_title("packet discrepancy")
    bins = summary["joint_by_q_bin"]
    centers = [0.5 * (b["q_over_sqrt_disc_lo"] + b["q_over_sqrt_disc_hi"]) for b in bins]
    medians = [b["median_abs_joint"] for b in bins]
    kept = [(c, m) for c, m in zip(centers, medians) if m is not None]
    if kept:
        axes[1].plot([c for c, _ in kept], [m for _, m in kept], "o-")
    axes[1].set_xlabel("q / sqrt|disc|")
    axes[1].set_ylabel("median |joint period|")
    axes[1].set_title("mixing decay")
    fig.tight_layout()
    _save_figure(fig, os.path.join(cfg.output_dir, "mixing.png"))
    plt.close(fig)
    return sum(1 for row in verify if not row["pass"])


# ---------------------------------------------------------------------------
# sums


def run_sums(cfg: ExperimentConfig) -> int:
    """Tau-table sweep: sparse sums per discriminant plus global checks."""
    _ensure_dir(cfg.output_dir)
    tab = get_tau(cfg.tau_cutoff, cfg.cache_dir)
    prime_grid = min(10_000, cfg.tau_cutoff)
    verify = [
        vrow("deligne_violations", f"p <= {tab.cutoff}", len(deligne_violations(tab)), 0, 0),
        vrow(
            "hecke_inequality_failures",
            f"p <= {prime_grid}",
            len(hecke_inequality_check(tab, prime_grid)),
            0,
            0,
        ),
    ]
    if cfg.tau_cutoff >= 20_000:
        lhs = truncated_l_one(-23, 20_000)
        verify.append(
            vrow("l_one_class_number", "disc=-23, X=20000", lhs, 3 * math.pi / math.sqrt(23), 0.05)
        )
    mask = fundamental_disc_mask(4 * cfg.d_max)
    discs = [-n for n in range(3, 4 * cfg.d_max + 1) if mask[n]][:8]
    rows = []
    Y = min(cfg.tau_cutoff, 2000)
    X = min(cfg.tau_cutoff, 3000)
    for disc in discs:
        form = principal_form(disc)
        sp_val = sparse_sum(tab, Y, form)
        sv_val = sieve_product(form, min(X, 1000))
        sq_val = squarefree_sum(tab, form, X)
        rows.append(
            f"{disc},{form.a},{form.b},{form.c},{Y},{repr(sp_val)},{repr(sv_val)},{X},{repr(sq_val)}"
        )
    write_csv(
        os.path.join(cfg.output_dir, "sums.csv"),
        "disc,a,b,c,Y,sparse_sum,sieve_product,X,squarefree_sum",
        rows,
    )
    write_json(os.path.join(cfg.output_dir, "sums_verify.json"), verify)

    plt = _plt()
    from sympy import primerange

    lams = [tab.lam(p) for p in primerange(2, prime_grid + 1)]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(lams, bins=40, range=(-2, 2), density=True)
    ax.set_xlabel("lambda(p)")
    ax.set_ylabel("density")
    ax.set_title(f"normalized coefficients at primes up to {prime_grid}")
    fig.tight_layout()
    _save_figure(fig, os.path.join(cfg.output_dir, "sums.png"))
    plt.close(fig)
    return sum(1 for row in verify if not row["pass"])


# ---------------------------------------------------------------------------
# local


def _local_grid():
    for p in LOCAL_PRIMES:
        for k in range(1, 5):
            for f in (0, 1):
                if k < 2 * f or (p == 2 and f == 1):
                    continue
                yield p, k, f


def run_local(cfg: ExperimentConfig) -> int:
    """Exact p-adic identity grid plus local/archimedean integral checks."""
    _ensure_dir(cfg.output_dir)
    verify = []
    rows = []
    for p, k, f in _local_grid():
        rec = verify_recovering(p, k, f, n_samples=200, seed=cfg.seed)
        eq = verify_equivariance(p, k, f, n_samples=100, seed=cfg.seed)
        for row in rec:
            rows.append(
                f"{p},{k},{f},{row['j']},{row['chi_r']},recovering,{row['samples']},{row['mismatches']}"
            )
        for row in eq:
            rows.append(
                f"{p},{k},{f},{row['j']},{row['chi_r']},equivariance,{row['samples']},{row['failures']}"
            )
        verify.append(
            vrow("recovering_mismatches", f"p={p} k={k} f={f}",
                 sum(r["mismatches"] for r in rec), 0, 0)
        )
        verify.append(
            vrow("equivariance_failures", f"p={p} k={k} f={f}",
                 sum(r["failures"] for r in eq), 0, 0)
        )
    dim_bad = 0
    for p in LOCAL_PRIMES:
        for k in range(6):
            for f in range(3):
                if invariant_dimension(p, k, f) != max(0, k - 2 * f + 1):
                    dim_bad += 1
    verify.append(vrow("invariant_dimension_grid", "p in {2,3,5}, k<=5, f<=2", dim_bad, 0, 0))
    for p, k, f in ((3, 1, 0), (2, 2, 0), (5, 2, 1), (3, 4, 1), (2, 4, 0), (5, 4, 0)):
        verify.append(
            vrow("orthonormality_residual", f"p={p} k={k} f={f}",
                 basis_orthonormality(p, k, f), 0.0, 0.0)
        )
    for p in LOCAL_PRIMES:
        for s in (1.0, 1.5, 2.0, complex(1.0, 0.5)):
            for split_type in ("split", "inert", "ramified"):
                closed, truncated = tate_unramified(p, split_type, s)
                verify.append(
                    vrow("tate_truncation", f"p={p} type={split_type} s={s}",
                         closed, truncated, 1e-12)
                )
        lhs, bound = tate_ramified_level_bound(p, 1.0)
        verify.append(
            {
                "name": "tate_level_bound",
                "params": f"p={p} s=1.0",
                "lhs": lhs,
                "rhs": bound,
                "residual": max(0.0, lhs - bound),
                "pass": bool(lhs <= bound + 1e-15),
            }
        )
    for i in range(20):
        s = 0.5 + 0.25 * i if i < 10 else complex(0.75 + 0.25 * (i - 10), 0.5)
        numeric, closed = arch_tate(s)
        verify.append(vrow("arch_tate", f"s={s}", numeric, closed, 1e-10))
    rs_grid = [
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 2.0),
        (0.3, 0.0, 1.0),
        (0.25, 0.25, 1.5),
        (0.4, 0.2, 1.25),
        (0.5j, 0.0, 1.0),
        (0.3j, 0.2j, 0.75),
        (0.5j, 0.5j, 1.0),
        (0.2, 0.1j, 1.0),
        (0.0, 0.0, 3.0),
    ]
    for nu1, nu2, s in rs_grid:
        numeric, closed = arch_rs_integral(nu1, nu2, s)
        verify.append(
            vrow("arch_bessel_mellin", f"nu1={nu1} nu2={nu2} s={s}", numeric, closed, 1e-6)
        )
    write_csv(
        os.path.join(cfg.output_dir, "local.csv"),
        "p,k,f,j,chi_r,check,samples,failures",
        rows,
    )
    write_json(os.path.join(cfg.output_dir, "local_verify.json"), verify)
    return sum(1 for row in verify if not row["pass"])


# ---------------------------------------------------------------------------
# entry point


RUNNERS = {
    "forms": run_forms,
    "sphere": run_sphere,
    "orbit": run_orbit,
    "mix": run_mix,
    "sums": run_sums,
    "local": run_local,
}


def run_all(cfg: ExperimentConfig) -> int:
    failures = 0
    for name in ("forms", "sphere", "orbit", "mix", "sums", "local"):
        failures += RUNNERS[name](cfg)
    return failures


def _bool_flag(s: str) -> bool:
    low = s.strip().lower()
    if low not in _BOOL_WORDS:
        raise argparse.ArgumentTypeError(f"{s!r} is not a boolean")
    return _BOOL_WORDS[low]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--d-min", dest="d_min", type=int)
    common.add_argument("--d-max", dest="d_max", type=int)
    common.add_argument(
        "--squarefree-only",
        dest="squarefree_only",
        type=_bool_flag,
        metavar="{true,false}",
    )
    common.add_argument("--l-max", dest="l_max", type=int)
    common.add_argument("--tau-cutoff", dest="tau_cutoff", type=int)
    common.add_argument("--shift-policy", dest="shift_policy", choices=SHIFT_POLICIES)
    common.add_argument("--shifts", help="comma-separated class indexes for policy=explicit")
    common.add_argument("--prime-cap", dest="prime_cap", type=int)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    parser = argparse.ArgumentParser(
        prog="arithmix", description="arithmetic equidistribution experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("forms", "sphere", "orbit", "mix", "sums", "local", "all"):
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ValueError, OSError) as exc:
        _log(f"config error: {exc}")
        return 2
    runner = run_all if args.command == "all" else RUNNERS[args.command]
    try:
        failures = runner(cfg)
    except CacheError as exc:
        _log(f"cache error (refusing to rebuild): {exc}")
        return 2
    if failures:
        _log(f"{args.command}: {failures} hard invariant failure(s)")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

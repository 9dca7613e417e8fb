"""``udisc <command> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]``.

Each command reads a JSON config, validates it completely, runs, and writes
CSV/JSON files into ``--out``.  Exit status is 0 on success, 1 when the
experiment itself fails (an ``error.json`` record is written) and 2 on a
bad config (nothing is written).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import budget, construction, entropy, greedy, studies, verifier
from .errors import ConfigError, UdiscError
from .function_space import make_perturbed_riesz, make_trig_real
from .sampling import PointSet, equispaced, sample_iid

DICT_KEYS = {"kind": "trig_real", "max_frequency": None, "perturbation": 0.0,
             "dict_seed": 0, "restrict": None}

SCHEMAS = {
    "construct": {**DICT_KEYS, "v": None, "p": 2.0, "epsilon": 0.5, "c1": 1.0, "c2": 1.0,
                  "max_retries": 100, "subsample_trials": 200, "seed": 0, "search": None},
    "verify": {**DICT_KEYS, "v": None, "p": 2.0, "epsilon": 0.5, "points": None,
               "search": None, "seed": 0},
    "scaling": {**DICT_KEYS, "vs": None, "p": 2.0, "epsilon": 0.5, "seeds": 10,
                "m_max": 1000, "seed": 0},
    "entropy": {**DICT_KEYS, "v": None, "p": 2.0, "ts": None, "metric": "sup",
                "trials": 500, "seed": 0},
    "greedy": {**DICT_KEYS, "algorithm": "ogp", "p": 2.0, "t_weak": 1.0, "m": None,
               "n_targets": 100, "seed": 0, "grid_size": 4096},
    "budget": {"rows": None, "seed": 0},
    "nikolskii": {"vs": None, "p": 4.0, "grid_size": 2**16, "seed": 0},
}

SEARCH_KEYS = {"mode", "enumeration_cap", "n_supports", "restarts", "iterations", "grid_size"}
POINT_KINDS = {"equispaced", "iid", "explicit", "file"}


def _fail(msg):
    raise ConfigError(msg)


def _need(cond, msg):
    if not cond:
        _fail(msg)


def _num(cfg, key, lo=-math.inf, hi=math.inf, integer=False):
    val = cfg[key]
    ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    if integer:
        ok = ok and float(val).is_integer()
    _need(ok and lo <= val <= hi, f"{key} must be a {'integer' if integer else 'number'} "
                                  f"in [{lo}, {hi}], got {val!r}")
    return int(val) if integer else float(val)


def load_config(command: str, text: str, seed_override=None) -> dict:
    """Parse, fill defaults, reject unknown keys and validate ranges."""
    if command not in SCHEMAS:
        _fail(f"unknown command {command!r}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"malformed JSON: {exc}")
    _need(isinstance(raw, dict), "config must be a JSON object")
    schema = SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    _need(not unknown, f"unknown config keys: {unknown}")
    cfg = {**schema, **raw}
    if seed_override is not None:
        cfg["seed"] = seed_override
    missing = sorted(k for k, v in cfg.items() if v is None and k not in ("restrict", "search"))
    _need(not missing, f"missing required keys: {missing}")
    _num(cfg, "seed", 0, 2**64 - 1, integer=True)
    if "kind" in schema:
        _validate_dictionary(cfg)
    globals()[f"_validate_{command}"](cfg)
    return cfg


def _validate_dictionary(cfg):
    _need(cfg["kind"] in ("trig_real", "perturbed_riesz"), f"unknown dictionary kind {cfg['kind']!r}")
    _num(cfg, "max_frequency", 0, 4096, integer=True)
    _num(cfg, "perturbation", 0.0, 0.5 - 1e-12)
    _num(cfg, "dict_seed", 0, 2**64 - 1, integer=True)
    r = cfg["restrict"]
    if r is not None:
        n = 2 * cfg["max_frequency"] + 1
        _need(isinstance(r, list) and r and all(isinstance(i, int) and 0 <= i < n for i in r)
              and len(set(r)) == len(r), "restrict must list distinct element indices")


def _n_elements(cfg):
    return len(cfg["restrict"]) if cfg["restrict"] else 2 * cfg["max_frequency"] + 1


def _validate_search(cfg):
    s = cfg["search"]
    if s is None:
        return
    _need(isinstance(s, dict) and set(s) <= SEARCH_KEYS, f"search keys must be among {sorted(SEARCH_KEYS)}")
    _need(s.get("mode", "exhaustive") in ("exhaustive", "auto", "sampled"), "bad search mode")
    for k in SEARCH_KEYS - {"mode"}:
        if k in s:
            _num(s, k, 1, 10**9, integer=True)


def _validate_common(cfg, v_key="v"):
    if v_key:
        _num(cfg, v_key, 1, _n_elements(cfg), integer=True)
    _num(cfg, "epsilon", 1e-12, 1 - 1e-12)


def _validate_construct(cfg):
    _validate_common(cfg)
    _num(cfg, "p", 1.0, 2.0)
    _num(cfg, "c1", 1e-12)
    _num(cfg, "c2", 1e-12)
    _num(cfg, "max_retries", 0, 10**6, integer=True)
    _num(cfg, "subsample_trials", 0, 10**7, integer=True)
    _validate_search(cfg)


def _validate_verify(cfg):
    _validate_common(cfg)
    _num(cfg, "p", 1.0, 1e6)
    _validate_search(cfg)
    pts = cfg["points"]
    _need(isinstance(pts, dict) and pts.get("kind") in POINT_KINDS,
          f"points must be an object with kind in {sorted(POINT_KINDS)}")
    kind = pts["kind"]
    allowed = {"equispaced": {"kind", "m"}, "iid": {"kind", "m", "seed"},
               "explicit": {"kind", "nodes"}, "file": {"kind", "path"}}[kind]
    _need(set(pts) == allowed, f"points of kind {kind} need exactly {sorted(allowed)}")
    if kind in ("equispaced", "iid"):
        _num(pts, "m", 1, 10**8, integer=True)
    if kind == "iid":
        _num(pts, "seed", 0, 2**64 - 1, integer=True)
    if kind == "explicit":
        _need(isinstance(pts["nodes"], list) and pts["nodes"]
              and all(isinstance(x, (int, float)) and 0 <= x < 1 for x in pts["nodes"]),
              "nodes must be a nonempty list of numbers in [0, 1)")
    if kind == "file":
        _need(isinstance(pts["path"], str) and Path(pts["path"]).is_file(),
              f"point file {pts.get('path')!r} not found")


def _validate_scaling(cfg):
    _validate_common(cfg, v_key=None)
    _need(isinstance(cfg["vs"], list) and cfg["vs"], "vs must be a nonempty list")
    for v in cfg["vs"]:
        _num({"v": v}, "v", 1, _n_elements(cfg), integer=True)
    _num(cfg, "p", 1.0, 1e6)
    seeds = cfg["seeds"]
    if isinstance(seeds, list):
        _need(seeds and all(isinstance(s, int) and s >= 0 for s in seeds), "seeds must be >= 0 integers")
    else:
        _num(cfg, "seeds", 1, 10**6, integer=True)
    _num(cfg, "m_max", 1, 10**7, integer=True)


def _validate_entropy(cfg):
    _num(cfg, "v", 1, _n_elements(cfg), integer=True)
    _num(cfg, "p", 1.0, 1e6)
    _need(isinstance(cfg["ts"], list) and cfg["ts"], "ts must be a nonempty list")
    for t in cfg["ts"]:
        _num({"t": t}, "t", 1e-12)
    _need(cfg["metric"] in ("sup", "l2"), "metric must be sup or l2")
    _num(cfg, "trials", 0, 10**7, integer=True)


def _validate_greedy(cfg):
    _need(cfg["algorithm"] in ("ogp", "wcga"), "algorithm must be ogp or wcga")
    _num(cfg, "p", 2.0, 1e6)
    _need(cfg["algorithm"] == "wcga" or cfg["p"] == 2.0, "ogp works in L2 only")
    _num(cfg, "t_weak", 1e-12, 1.0)
    _num(cfg, "m", 1, _n_elements(cfg), integer=True)
    _num(cfg, "n_targets", 1, 10**6, integer=True)
    _num(cfg, "grid_size", 16, 2**24, integer=True)


def _validate_budget(cfg):
    rows = cfg["rows"]
    _need(isinstance(rows, list) and rows, "rows must be a nonempty list")
    for r in rows:
        _need(isinstance(r, dict) and {"v", "N", "p", "n_hc"} <= set(r) <= {"v", "N", "p", "n_hc", "d"},
              "each row needs v, N, p, n_hc and optionally d")
        r.setdefault("d", 1)
        for k in ("v", "N", "n_hc", "d"):
            _num(r, k, 1, 10**12, integer=True)
        _num(r, "p", 1.0, 1e6)


def _validate_nikolskii(cfg):
    _need(isinstance(cfg["vs"], list) and cfg["vs"], "vs must be a nonempty list")
    for v in cfg["vs"]:
        _num({"v": v}, "v", 1, 20, integer=True)
    _num(cfg, "p", 2.0, 1e6)
    _num(cfg, "grid_size", 16, 2**26, integer=True)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _dictionary(cfg):
    if cfg["kind"] == "trig_real":
        d = make_trig_real(cfg["max_frequency"])
    else:
        d = make_perturbed_riesz(cfg["max_frequency"], cfg["perturbation"], cfg["dict_seed"])
    return d.restrict(cfg["restrict"]) if cfg["restrict"] else d


def _policy(cfg, default_mode="exhaustive"):
    s = dict(cfg.get("search") or {})
    s.setdefault("mode", default_mode)
    return verifier.SearchPolicy(seed=cfg["seed"] % 2**32, **s)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _tag_csv(text: str, tag: dict) -> str:
    """Append ``config_hash`` and ``seed`` columns to every row of a CSV text."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return text
    out = [rows[0] + list(tag)] + [r + [str(v) for v in tag.values()] for r in rows[1:]]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(out)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run_construct(cfg, tag):
    d = _dictionary(cfg)
    params = construction.TwoStageParams(cfg["c1"], cfg["c2"], cfg["epsilon"],
                                         cfg["max_retries"], cfg["subsample_trials"])
    ps, rep = construction.two_stage(d, cfg["v"], cfg["p"], params, cfg["seed"],
                                     _policy(cfg, "auto"))
    doc = json.loads(ps.to_json())
    return {"points.json": ps.to_json()[:-1] + f', "config_hash": "{tag["config_hash"]}"}}\n',
            "report.json": _json({**rep.to_dict(), **tag, "m": doc["m"]})}


def _points(spec) -> PointSet:
    kind = spec["kind"]
    if kind == "equispaced":
        return equispaced(spec["m"])
    if kind == "iid":
        return sample_iid(spec["m"], spec["seed"])
    if kind == "explicit":
        return PointSet(np.array(spec["nodes"], dtype=float))
    return PointSet.from_json(Path(spec["path"]).read_text())


def run_verify(cfg, tag):
    d = _dictionary(cfg)
    xi = _points(cfg["points"])
    rep = verifier.verify_universal(xi, d, cfg["v"], cfg["p"], cfg["epsilon"], _policy(cfg))
    return {"report.json": _json({**rep.to_dict(), **tag, "m": xi.m})}


def run_scaling(cfg, tag):
    d = _dictionary(cfg)
    seeds = cfg["seeds"] if isinstance(cfg["seeds"], list) else list(
        range(cfg["seed"], cfg["seed"] + cfg["seeds"]))
    pts = studies.scaling_study(d, cfg["vs"], cfg["p"], seeds, cfg["m_max"], cfg["epsilon"],
                                verifier.SearchPolicy(mode="exhaustive"))
    rows = [[p.v, p.N, p.p, p.median, ";".join("" if m is None else str(m) for m in p.minimal_m)]
            for p in pts]
    out = {"scaling.csv": _tag_csv(_csv(["v", "N", "p", "median_m", "minimal_m_per_seed"], rows), tag)}
    finite = [p for p in pts if math.isfinite(p.median)]
    summary = {**tag, "seeds": seeds}
    if len(finite) >= 2:
        c, alpha = studies.fit_power_law([p.v for p in finite], [p.median for p in finite])
        summary.update(c=c, alpha=alpha)
    out["scaling_fit.json"] = _json(summary)
    return out


def run_entropy(cfg, tag):
    d = _dictionary(cfg)
    spec = entropy.ClassSpec(d, cfg["v"], cfg["p"])
    rows = []
    for t in cfg["ts"]:
        est = entropy.covering_upper(spec, t, metric=cfg["metric"])
        lo = entropy.packing_lower(spec, t, cfg["trials"], cfg["seed"])
        est.lower_bits, est.count_lower = lo.lower_bits, lo.count_lower
        rows.append(est)
    text = entropy.estimates_to_csv(rows)
    return {"entropy.csv": _tag_csv(text, tag)}


def run_greedy(cfg, tag):
    d = _dictionary(cfg)
    rng = np.random.default_rng(cfg["seed"])
    traces = []
    for _ in range(cfg["n_targets"]):
        a = greedy.random_a1_member(d, rng)
        if cfg["algorithm"] == "ogp":
            traces.append(greedy.ogp(a, d, cfg["m"]))
        else:
            traces.append(greedy.wcga(a, d, cfg["m"], cfg["p"], cfg["t_weak"], cfg["grid_size"]))
    p = cfg["p"]
    C = greedy.fit_constant(traces, lambda m: math.sqrt(p - 1.0) / math.sqrt(m)
                            if p > 2 else 1.0 / math.sqrt(m))
    return {"greedy.csv": _tag_csv(greedy.traces_to_csv(traces), tag),
            "greedy_fit.json": _json({**tag, "fitted_C": C,
                                      "bound": "C*sqrt(p-1)/sqrt(m)" if p > 2 else "C/sqrt(m)"})}


def run_budget(cfg, tag):
    recs = [budget.compare_budgets(r["v"], r["N"], r["p"], r["n_hc"], r["d"]) for r in cfg["rows"]]
    return {"budget.csv": _tag_csv(budget.budgets_to_csv(recs), tag)}


def run_nikolskii(cfg, tag):
    rows = []
    for v in cfg["vs"]:
        ratio, scale = verifier.nikolskii_counterexample(v, cfg["p"], grid_size=cfg["grid_size"])
        rows.append([v, cfg["p"], ratio, scale, ratio / scale])
    text = _csv(["v", "p", "sup_over_lp", "v_pow_1_over_p", "normalized"], rows)
    return {"nikolskii.csv": _tag_csv(text, tag)}


def build_parser():
    ap = argparse.ArgumentParser(prog="udisc", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(SCHEMAS))
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker threads; outputs do not depend on it")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            _fail("--threads must be >= 1")
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            _fail(f"cannot read config: {exc}")
        cfg = load_config(args.command, text, args.seed)
    except ConfigError as exc:
        print(f"udisc: config error: {exc}", file=sys.stderr)
        return 2
    tag = {"config_hash": config_hash(cfg), "seed": cfg["seed"]}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        files = globals()[f"run_{args.command}"](cfg, tag)
    except (UdiscError, ValueError) as exc:
        record = {**tag, "command": args.command, "error": type(exc).__name__, "message": str(exc)}
        (out / "error.json").write_text(_json(record))
        print(f"udisc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name, text in files.items():
        (out / name).write_text(text, newline="")
    return 0


if __name__ == "__main__":
    sys.exit(main())

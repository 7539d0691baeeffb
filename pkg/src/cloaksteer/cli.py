"""Command-line runs: sweeps, traversals, trajectories, hidden-state checks, detection.

Scenario parameters come from a ``key = value`` config file (``--config``)
and/or flags; flags win. Every command writes CSV (LF line endings, floats
with 12 significant digits). Exit codes: 0 success or free space, 1
dynamics detected, 2 usage or data error.

Grids are either comma lists (``0,0.5,1``) or ``start:stop:count`` for
evenly spaced points.
"""

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import channels, cloak, detector, steering

CONFIG_KEYS = ("scenario", "gamma", "J", "a", "R", "L", "k", "omega",
               "y1_grid", "t_grid", "bases", "shots", "seed")
SCENARIOS = ("dephasing", "coupling", "identity")
DEFAULTS = {"R": 1.0, "L": 5.0, "k": 1.0, "omega": 1.0, "bases": "XZ", "shots": 0, "seed": 0}
DEFAULT_SWEEP_POINTS = 50

EXIT_OK = 0
EXIT_DYNAMICS = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def fmt(x):
    return format(float(x), ".12g")


def parse_grid(text, key):
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(num))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{key}: cannot parse grid {text!r}") from None


def read_config(path):
    """Parse a UTF-8 ``key = value`` file with ``#`` comments."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _number(cfg, key, kind=float):
    try:
        return kind(cfg[key])
    except (TypeError, ValueError):
        raise UsageError(f"{key}: invalid value {cfg[key]!r}") from None


def resolve_config(args, need_y1=False):
    """Merge defaults, config file and flags into a validated scenario dict.

    Without either grid, dephasing and coupling runs sweep t over
    [0, 3/gamma] or [0, 2 pi/J] at DEFAULT_SWEEP_POINTS points.
    """
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val

    scenario = cfg.get("scenario")
    if scenario not in SCENARIOS:
        raise UsageError(f"scenario: must be one of {', '.join(SCENARIOS)}, got {scenario!r}")
    out = {"scenario": scenario}
    for key in ("R", "L", "k", "omega"):
        out[key] = _number(cfg, key)
    out["a"] = _number(cfg, "a") if cfg.get("a") is not None else out["R"] / 2
    try:
        out["geometry"] = cloak.CloakGeometry.from_wave(out["R"], out["L"], out["k"], out["omega"], a=out["a"])
    except ValueError as exc:
        raise UsageError(f"a/R/L/k/omega: {exc}") from None

    if scenario == "dephasing":
        if cfg.get("gamma") is None:
            raise UsageError("gamma: required for the dephasing scenario")
        out["rate"] = _number(cfg, "gamma")
        if out["rate"] < 0:
            raise UsageError("gamma: must be non-negative")
    elif scenario == "coupling":
        if cfg.get("J") is None:
            raise UsageError("J: required for the coupling scenario")
        out["rate"] = _number(cfg, "J")
        if out["rate"] < 0:
            raise UsageError("J: must be non-negative")
    else:
        out["rate"] = None

    bases = str(cfg["bases"]).upper()
    if bases not in ("XZ", "XYZ"):
        raise UsageError(f"bases: must be XZ or XYZ, got {cfg['bases']!r}")
    out["n_bases"] = len(bases)
    out["shots"] = _number(cfg, "shots", int)
    if out["shots"] != 0 and out["shots"] < 100:
        raise UsageError("shots: must be 0 (exact) or at least 100")
    out["seed"] = _number(cfg, "seed", int)
    if not 0 <= out["seed"] < 2**64:
        raise UsageError("seed: must be a 64-bit unsigned integer")

    has_y1, has_t = cfg.get("y1_grid") is not None, cfg.get("t_grid") is not None
    if not (has_y1 or has_t or need_y1) and out["rate"]:
        # full decay for dephasing, one full period for coupling
        span = 3.0 if scenario == "dephasing" else 2 * math.pi
        cfg["t_grid"] = f"0:{span / out['rate']!r}:{DEFAULT_SWEEP_POINTS}"
        has_t = True
    if has_y1 == has_t:
        raise UsageError("y1_grid/t_grid: exactly one must be given")
    if need_y1 and not has_y1:
        raise UsageError("y1_grid: required for this command")
    if has_y1:
        out["y1_grid"] = parse_grid(cfg["y1_grid"], "y1_grid")
        for y in out["y1_grid"]:
            if abs(y) > out["L"]:
                raise UsageError(f"y1_grid: |y1| = {abs(y)} exceeds half-span L = {out['L']}")
    else:
        out["t_grid"] = parse_grid(cfg["t_grid"], "t_grid")
        if any(t < 0 for t in out["t_grid"]):
            raise UsageError("t_grid: dwell times must be non-negative")
    return out


def _channel(sc):
    if sc["scenario"] == "dephasing":
        return channels.Dephasing(sc["rate"])
    if sc["scenario"] == "coupling":
        return channels.ExchangeCoupling(sc["rate"])
    return channels.Identity()


def _closed_form(sc, t):
    if sc["scenario"] == "dephasing":
        return steering.dephasing_S_closed_form(sc["rate"], t, sc["n_bases"])
    if sc["scenario"] == "coupling":
        return steering.coupling_S_closed_form(sc["rate"], t, sc["n_bases"])
    return float(sc["n_bases"])


def _time_unit(sc):
    """Scale factor and comment line for emitted time columns."""
    rate = sc["rate"]
    if rate:
        name = "gamma" if sc["scenario"] == "dephasing" else "J"
        return rate, f"# t_s in units of 1/{name} ({name} = {fmt(rate)})"
    return 1.0, "# t_s in units of the input time"


def _point_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def _estimate(sc, t, index):
    task = steering.SteeringTask(_channel(sc), t, steering.default_bases(sc["n_bases"]))
    exact = steering.steering_exact(task)
    sampled = None
    if sc["shots"]:
        sampled = steering.steering_sampled(task, sc["shots"], _point_seed(sc["seed"], index))
    return exact, sampled


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _dwell_times(sc):
    if "t_grid" in sc:
        return sc["t_grid"]
    return [cloak.dwell_time(sc["geometry"], y) for y in sc["y1_grid"]]


def cmd_sweep(sc, out):
    scale, unit = _time_unit(sc)
    out.write(unit + "\n")
    w = _writer(out)
    w.writerow(["t_s", "S_exact", "S_closed_form", "S_sampled", "stderr", "shots"])
    for i, t in enumerate(_dwell_times(sc)):
        exact, sampled = _estimate(sc, t, i)
        row = [fmt(t * scale), fmt(exact.S), fmt(_closed_form(sc, t))]
        if sampled is None:
            row += ["", "", "0"]
        else:
            row += [fmt(sampled.S), fmt(sampled.stderr), str(sampled.shots_per_basis)]
        w.writerow(row)
    return EXIT_OK


def cmd_traverse(sc, out):
    scale, unit = _time_unit(sc)
    out.write(unit + "\n")
    w = _writer(out)
    w.writerow(["y1", "t_s", "S"])
    for i, y in enumerate(sorted(sc["y1_grid"])):
        t = cloak.dwell_time(sc["geometry"], y)
        exact, sampled = _estimate(sc, t, i)
        S = exact.S if sampled is None else sampled.S
        w.writerow([fmt(y), fmt(t * scale), fmt(S)])
    return EXIT_OK


def cmd_trajectories(sc, out, samples_inside):
    if any(y == sc["geometry"].center[1] for y in sc["y1_grid"]):
        raise UsageError("y1_grid: y1 = 0 is the separatrix through the cloak centre; the path is undefined")
    w = _writer(out)
    w.writerow(["y1", "idx", "x", "y"])
    for y in sc["y1_grid"]:
        traj = cloak.trajectory(sc["geometry"], y, samples_inside)
        for idx, (px, py) in enumerate(traj.points):
            w.writerow([fmt(y), idx, fmt(px), fmt(py)])
    return EXIT_OK


def cmd_hidden_state(count, seed, n_bases, out, maximally_mixed=False):
    rng = np.random.default_rng(seed)
    bases = steering.default_bases(n_bases)
    w = _writer(out)
    w.writerow(["ensemble_id", "S"])
    best = -math.inf
    for i in range(count):
        ens = steering.random_ensemble(rng, n_bases, maximally_mixed=maximally_mixed)
        S = steering.hidden_state_S(ens, bases)
        best = max(best, S)
        w.writerow([i, fmt(S)])
    w.writerow(["max_S", fmt(best)])
    return EXIT_OK


DETECT_COLUMNS = ("t_s", "S", "stderr", "shots")


def read_observations(path, mapping=None):
    """Read ``t_s,S,stderr,shots`` records; ``mapping`` renames source columns.

    Empty ``stderr`` or ``shots`` cells read as 0, so sweep output with
    ``--map S=S_exact`` is accepted directly.
    """
    mapping = dict(mapping or {})
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    header, header_line, records = None, 0, []
    for lineno, row in enumerate(csv.reader(lines), 1):
        if not row or (row[0].startswith("#") and header is None):
            continue
        if header is None:
            header, header_line = [c.strip() for c in row], lineno
            cols = {}
            for name in DETECT_COLUMNS:
                src = mapping.get(name, name)
                if src not in header:
                    raise UsageError(f"line {lineno}: missing column {src!r}")
                cols[name] = header.index(src)
            continue
        if len(row) != len(header):
            raise UsageError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            t = float(row[cols["t_s"]])
            S = float(row[cols["S"]])
            err = float(row[cols["stderr"]] or 0)
            shots = int(float(row[cols["shots"]] or 0))
            if not (math.isfinite(t) and math.isfinite(S) and math.isfinite(err)):
                raise ValueError
            records.append(detector.Record(t, S, err, shots))
        except ValueError:
            raise UsageError(f"line {lineno}: malformed record") from None
    if header is None:
        raise UsageError("no header row found")
    if not records:
        raise UsageError(f"line {header_line}: no records after header")
    return detector.ObservationSet(tuple(records))


def cmd_detect(path, N=2, abs_tol=1e-6, z=3.0, mapping=None, out=None):
    out = sys.stdout if out is None else out
    obs = read_observations(path, mapping)
    verdict = detector.detect(obs, N=N, abs_tol=abs_tol, z=z)
    out.write(f"verdict: {verdict.decision}\n")
    out.write(f"max |S - N|: {fmt(verdict.max_deviation)}\n")
    out.write("t_s,S,stderr,consistent_with_max,violates_classical_bound\n")
    for rec, flag in zip(obs.records, verdict.per_record_flags):
        out.write(f"{fmt(rec.t_s)},{fmt(rec.S)},{fmt(rec.stderr)},"
                  f"{str(flag.consistent_with_max).lower()},{str(flag.violates_classical_bound).lower()}\n")
    return EXIT_OK if verdict.free_space else EXIT_DYNAMICS


def _parse_mapping(items):
    mapping = {}
    for item in items or ():
        name, sep, src = item.partition("=")
        if not sep or name not in DETECT_COLUMNS or not src:
            raise UsageError(f"--map: expected NAME=COLUMN with NAME in {', '.join(DETECT_COLUMNS)}, got {item!r}")
        mapping[name] = src
    return mapping


def build_parser():
    scenario = argparse.ArgumentParser(add_help=False)
    g = scenario.add_argument_group("scenario (overrides --config)")
    g.add_argument("--config", help="key = value config file")
    g.add_argument("--scenario", choices=SCENARIOS)
    g.add_argument("--gamma")
    g.add_argument("--J")
    g.add_argument("--a")
    g.add_argument("--R")
    g.add_argument("--L")
    g.add_argument("--k")
    g.add_argument("--omega")
    g.add_argument("--y1-grid", dest="y1_grid")
    g.add_argument("--t-grid", dest="t_grid")
    g.add_argument("--bases")
    g.add_argument("--shots")
    g.add_argument("--seed")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", help="write CSV here instead of stdout")

    p = argparse.ArgumentParser(prog="cloaksteer", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[scenario, output], help="S against dwell time")
    sub.add_parser("traverse", parents=[scenario, output], help="S against impact parameter")
    tr = sub.add_parser("trajectories", parents=[scenario, output], help="trajectory polylines")
    tr.add_argument("--samples-inside", type=int, default=51)
    det = sub.add_parser("detect", help="free space or dynamics from a t_s,S,stderr,shots CSV")
    det.add_argument("path")
    det.add_argument("--N", type=int, default=2, choices=(2, 3))
    det.add_argument("--abs-tol", type=float, default=1e-6)
    det.add_argument("--z", type=float, default=3.0)
    det.add_argument("--map", action="append", metavar="NAME=COLUMN",
                     help="read NAME from COLUMN, e.g. S=S_exact (repeatable)")
    hs = sub.add_parser("hidden-state", parents=[output], help="S of random local-hidden-state ensembles")
    hs.add_argument("--count", type=int, default=1000)
    hs.add_argument("--seed", type=int, default=0)
    hs.add_argument("--bases", default="XZ", choices=("XZ", "XYZ"))
    hs.add_argument("--maximally-mixed", action="store_true", help="force every Bob state to I/2")
    return p


def _run(args, out):
    if args.command == "detect":
        if not args.abs_tol > 0 or not args.z > 0:
            raise UsageError("--abs-tol and --z must be positive")
        return cmd_detect(args.path, args.N, args.abs_tol, args.z, _parse_mapping(args.map), out)
    if args.command == "hidden-state":
        if args.count < 1:
            raise UsageError("--count must be at least 1")
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        return cmd_hidden_state(args.count, args.seed, len(args.bases), out, args.maximally_mixed)
    if args.command == "sweep":
        return cmd_sweep(resolve_config(args), out)
    if args.command == "traverse":
        return cmd_traverse(resolve_config(args, need_y1=True), out)
    if args.command == "trajectories":
        if args.samples_inside < 2:
            raise UsageError("--samples-inside must be at least 2")
        return cmd_trajectories(resolve_config(args, need_y1=True), out, args.samples_inside)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None, stdout=None):
    stdout = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    path = getattr(args, "output", None)
    buf = io.StringIO()
    try:
        code = _run(args, buf)
    except (UsageError, ValueError) as exc:
        print(f"cloaksteer {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            print(f"cloaksteer: cannot write {path}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``semishift <subcommand> [options]``.

Every subcommand reads its parameters from built-in defaults, then an
optional ``--config`` JSON file, then explicit flags (later wins). Unknown
config keys are rejected. Outputs that go to files are written to
``--out-dir`` together with ``manifest.json``, which is itself a valid
config for an identical rerun.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .filters import BankSpec, bank_dimension, is_essential
from .gnn import SemiGcnLayer, TypedGraph, forward, homophily_counts, lloyd, \
    train_node_classifier, two_community_graph
from .graph import Graph, adjacency, graph_from_dict, laplacian, path_graph, read_graph, \
    normalized_adjacency_selfloops
from .lattice import build_lattice, dedup_banks, enumerate_banks
from .spectral import build_shift, genericity_check, perturbed_laplacian
from .subgraph import AGGREGATE_COLUMNS, TRIAL_COLUMNS, LearnConfig, ObservationSet, \
    aggregate_trials, build_support, learn, run_trial

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
RESERVED = ("command", "toolkit_version")


class ConfigError(ValueError):
    pass


# value parsers ---------------------------------------------------------------

def _int_list(text):
    return [int(x) for x in text.split(",")] if isinstance(text, str) else [int(x) for x in text]


def _float_list(text):
    return [float(x) for x in text.split(",")] if isinstance(text, str) else [float(x) for x in text]


def _json_obj(text):
    return json.loads(text) if isinstance(text, str) else dict(text)


def _bool(text):
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes"):
        return True
    if str(text).lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    return lambda x: None if x is None else conv(x)


GLOBALS = {
    "seed": (int, 0, "master random seed"),
    "tol": (_opt(float), None, "numerical tolerance override"),
    "out_dir": (str, ".", "directory for output files"),
    "threads": (int, 1, "worker processes for independent trials"),
}

COMMANDS = {
    "bank-dim": {
        "help": "dimension, essentiality and genericity report for one bank",
        "params": {
            "graph": (str, None, "graph file (edge list or JSON)"),
            "spec": (str, None, 'bank spec JSON {"C": [[...]], "D": [...]}'),
            "shift": (str, "laplacian", "laplacian or adjacency"),
            "perturb": (float, 0.0, "add diag(U[0, perturb]) to the shift"),
            "basis": (str, "spectral", "spectral, chebyshev or monomial"),
        },
        "required": ("graph", "spec"),
    },
    "bank-lattice": {
        "help": "Hasse diagram of banks under inclusion (DOT and JSON)",
        "params": {
            "n": (_opt(int), None, "vertex count (path graph unless --graph)"),
            "graph": (_opt(str), None, "graph file"),
            "specs": (_opt(str), None, "JSON list of bank specs instead of full enumeration"),
            "max_d": (int, 1, "largest degree in the enumeration"),
            "max_k": (int, 2, "largest number of sets in the enumeration"),
            "max_set_size": (_opt(int), None, "largest set size in the enumeration"),
            "guard": (int, 4, "largest n enumerated without --max-set-size"),
            "shift": (str, "laplacian", "laplacian or adjacency"),
            "bottom": (_opt(_bool), None, "adjoin the zero space (default: only when enumerating)"),
        },
        "required": (),
    },
    "learn": {
        "help": "fit F0 and the ambient filter from observations on V0",
        "params": {
            "graph": (str, None, "graph file"),
            "obs": (str, None, 'observation JSON {"V0": [...], "X": [[...]], "Xp": [[...]]}'),
            "r": (int, 1, "degree slack"),
            "beta": (float, 0.6, "regularization weight"),
            "ridge": (float, 1e-8, "diagonal stabilizer"),
            "solver": (str, "direct", "direct or alternating"),
        },
        "required": ("graph", "obs"),
    },
    "experiment": {
        "help": "repeated synthetic filter-recovery trials",
        "params": {
            "graph": (_json_obj, {"kind": "lattice", "rows": 5, "cols": 9},
                      'graph generator as JSON, e.g. {"kind": "random_connected", "n": 47, "p": 0.1}'),
            "v0_fraction": (float, 0.4, "fraction of vertices observed"),
            "V0": (_opt(_int_list), None, "explicit observed vertices"),
            "Ts": (_int_list, list(range(10, 101, 10)), "sample counts"),
            "betas": (_float_list, [0.0, 0.2, 0.4, 0.6, 0.8, 1.0], "regularization weights"),
            "r": (int, 1, "degree slack"),
            "trials": (int, 100, "number of trials"),
            "ridge": (float, 1e-8, "diagonal stabilizer"),
            "lh0_degree": (int, 2, "polynomial degree of the subgraph baseline"),
            "gi_degree": (int, 2, "polynomial degree of the interpolation baseline"),
            "gi_bandwidth": (_opt(int), None, "interpolation bandwidth (default |V0|)"),
            "n_eval": (_opt(int), None, "held-out samples (default T)"),
            "timing": (_bool, False, "record runtime_ms (makes output nondeterministic)"),
        },
        "required": (),
    },
    "homophily": {
        "help": "class homophily scores as CSV",
        "params": {
            "graph": (str, None, "graph file"),
            "labels": (_opt(str), None, "labels file (JSON list); default: graph node_types"),
            "hops": (_int_list, [1], "hop distances (1 and/or 2)"),
            "classes": (_opt(lambda x: [str(c) for c in (x.split(",") if isinstance(x, str) else x)]),
                        None, "classes to score (default: all)"),
        },
        "required": ("graph",),
    },
    "cluster": {
        "help": "k-means partition of feature rows",
        "params": {
            "features": (str, None, "feature matrix (JSON rows or whitespace text)"),
            "k": (int, None, "number of clusters"),
            "max_iter": (int, 300, "iteration cap"),
        },
        "required": ("features", "k"),
    },
    "semigcn-demo": {
        "help": "train a SemiGCN on a synthetic two-community graph",
        "params": {
            "n_per": (int, 20, "vertices per community"),
            "p_in": (float, 0.5, "edge probability inside a community"),
            "p_out": (float, 0.02, "edge probability across communities"),
            "noise": (float, 0.3, "feature noise scale"),
            "train_fraction": (float, 0.5, "fraction of labels observed"),
            "support": (str, "all", "all (one set) or kmeans (one set per degree)"),
            "degrees": (_int_list, [1], "degree per vertex set"),
            "layers": (int, 1, "1 or 2"),
            "hidden": (int, 8, "hidden width for two layers"),
            "epochs": (int, 200, "gradient steps"),
            "lr": (float, 0.5, "learning rate"),
        },
        "required": (),
    },
}


# output helpers --------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def dumps(obj, indent: int | None = 1) -> str:
    """JSON with round-trip exact floats (shortest repr, at most 17 digits)."""
    return json.dumps(_plain(obj), indent=indent, allow_nan=False)


def fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        # shortest string that round-trips exactly (at most 17 significant digits)
        return repr(float(x))
    return str(x)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        values = [row.get(c) for c in columns] if isinstance(row, dict) else row
        w.writerow([fmt_cell(v) for v in values])
    return buf.getvalue()


def _write(out_dir: str, name: str, text: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _manifest(cmd: str, cfg: dict) -> str:
    body = {"command": cmd, "toolkit_version": __version__}
    body.update({k: v for k, v in cfg.items() if k != "out_dir"})
    return dumps(body) + "\n"


# inputs ----------------------------------------------------------------------

def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _shift_matrix(g: Graph, kind: str) -> np.ndarray:
    if kind == "laplacian":
        return laplacian(g)
    if kind == "adjacency":
        return adjacency(g)
    raise ConfigError(f"unknown shift {kind!r}; use laplacian or adjacency")


def obs_to_dict(obs: ObservationSet) -> dict:
    return {"V0": list(obs.V0), "X": obs.X, "Xp": obs.Xp}


def obs_from_dict(d: dict) -> ObservationSet:
    extra = set(d) - {"V0", "X", "Xp"}
    if extra:
        raise ConfigError(f"unknown observation keys {sorted(extra)}")
    return ObservationSet(tuple(d["V0"]), np.array(d["X"], dtype=float),
                          np.array(d["Xp"], dtype=float))


def typed_graph_from_dict(d: dict) -> TypedGraph:
    g = graph_from_dict(d)
    edges = d.get("edges", [])
    etypes = d.get("edge_types", [""] * len(edges))
    return TypedGraph.from_edges(g.n, [(e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in edges],
                                 etypes, d.get("node_types"), g.directed)


# subcommands -----------------------------------------------------------------

def cmd_bank_dim(cfg: dict) -> int:
    g = read_graph(cfg["graph"])
    spec = BankSpec.from_dict(_read_json(cfg["spec"]), g.n)
    S = _shift_matrix(g, cfg["shift"])
    if cfg["perturb"] > 0:
        S = perturbed_laplacian(S, np.random.default_rng(cfg["seed"]), cfg["perturb"])
    s = build_shift(S, cfg["shift"])
    tol = 1e-8 if cfg["tol"] is None else cfg["tol"]
    dim = bank_dimension(spec, s, tol, cfg["basis"])
    rep = genericity_check(s)
    essential = is_essential(spec.sets)
    out = {
        "spec": spec.to_dict(),
        "dimension": dim,
        "essential": essential,
        "genericity": {
            "generic": rep.generic,
            "distinct_eigenvalues": rep.distinct_eigenvalues,
            "min_eigenvalue_gap": rep.min_eigenvalue_gap,
            "nonzero_eigenvector_entries": rep.nonzero_eigenvector_entries,
            "min_eigenvector_entry": rep.min_eigenvector_entry,
            "tol": rep.tol,
        },
        "eigenvalues": s.eigenvalues.tolist() if s.is_symmetric
        else [[z.real, z.imag] for z in s.eigenvalues],
        "predicted_dimension": sum(spec.degrees) + spec.k if essential and rep.generic else None,
    }
    print(dumps(out, indent=None))
    return EXIT_OK


def cmd_bank_lattice(cfg: dict) -> int:
    if cfg["graph"] is not None:
        g = read_graph(cfg["graph"])
        if cfg["n"] is not None and cfg["n"] != g.n:
            raise ConfigError(f"--n {cfg['n']} disagrees with the graph ({g.n} vertices)")
    elif cfg["n"] is not None:
        g = path_graph(cfg["n"])
    else:
        raise ConfigError("bank-lattice needs --n or --graph")
    s = build_shift(_shift_matrix(g, cfg["shift"]), cfg["shift"])
    tol = 1e-8 if cfg["tol"] is None else cfg["tol"]
    if cfg["specs"] is not None:
        raw = _read_json(cfg["specs"])
        raw = raw["specs"] if isinstance(raw, dict) else raw
        specs = [BankSpec.from_dict(d, g.n) for d in raw]
        bottom = False if cfg["bottom"] is None else cfg["bottom"]
    else:
        specs = enumerate_banks(g.n, cfg["max_d"], cfg["max_k"], cfg["max_set_size"], cfg["guard"])
        bottom = True if cfg["bottom"] is None else cfg["bottom"]
    lat = build_lattice(dedup_banks(specs, s, tol), s, tol, adjoin_bottom=bottom)
    _write(cfg["out_dir"], "lattice.dot", lat.to_dot())
    _write(cfg["out_dir"], "lattice.json", dumps(lat.to_dict()) + "\n")
    _write(cfg["out_dir"], "manifest.json", _manifest("bank-lattice", cfg))
    top, bot = lat.top, lat.bottom
    print(dumps({"nodes": len(lat), "edges": len(lat.edges),
                 "top": None if top is None else lat.label(top),
                 "bottom": None if bot is None else lat.label(bot)}, indent=None))
    return EXIT_OK


def cmd_learn(cfg: dict) -> int:
    g = read_graph(cfg["graph"])
    obs = obs_from_dict(_read_json(cfg["obs"]))
    if any(v < 0 or v >= g.n for v in obs.V0):
        raise ConfigError("observation V0 lies outside the graph")
    s = build_shift(laplacian(g), "laplacian")
    lc = LearnConfig(r=cfg["r"], beta=cfg["beta"], ridge=cfg["ridge"], solver=cfg["solver"],
                     **({} if cfg["tol"] is None else {"tol": cfg["tol"]}))
    spec = build_support(g, obs.V0, lc.r)
    res = learn(obs, spec, s, lc)
    out = {"V0": list(obs.V0), "spec": spec.to_dict(),
           "coeffs": [list(a) for a in res.F.coeffs] if res.F is not None else None,
           "F0": res.F0, "objective": res.objective}
    _write(cfg["out_dir"], "learn_result.json", dumps(out) + "\n")
    _write(cfg["out_dir"], "manifest.json", _manifest("learn", cfg))
    print(f"learn: objective={res.objective:.6g} |V0|={len(obs.V0)} bank={spec}")
    return EXIT_OK


def _trial(trial, cfg):
    return run_trial(cfg["graph"], cfg["v0_fraction"], cfg["Ts"], cfg["betas"], r=cfg["r"],
                     seed=cfg["seed"], trial=trial, n_eval=cfg["n_eval"], ridge=cfg["ridge"],
                     lh0_degree=cfg["lh0_degree"], gi_degree=cfg["gi_degree"],
                     gi_bandwidth=cfg["gi_bandwidth"], V0=cfg["V0"], timing=cfg["timing"])


def cmd_experiment(cfg: dict) -> int:
    if "kind" not in cfg["graph"]:
        raise ConfigError('experiment graph needs a "kind"')
    if cfg["trials"] < 1 or not cfg["Ts"] or not cfg["betas"]:
        raise ConfigError("need trials >= 1 and nonempty Ts and betas")
    if min(cfg["Ts"]) < 1:
        raise ConfigError("sample counts must be >= 1")
    os.makedirs(cfg["out_dir"], exist_ok=True)
    run = partial(_trial, cfg=cfg)
    if cfg["threads"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["threads"]) as pool:
            per_trial = list(pool.map(run, range(cfg["trials"])))
    else:
        per_trial = [run(t) for t in range(cfg["trials"])]
    rows = [row for rows in per_trial for row in rows]
    _write(cfg["out_dir"], "trials.csv", csv_text(TRIAL_COLUMNS, rows))
    agg = aggregate_trials(rows)
    _write(cfg["out_dir"], "aggregate.csv", csv_text(AGGREGATE_COLUMNS, agg))
    _write(cfg["out_dir"], "manifest.json", _manifest("experiment", cfg))
    best = min((a for a in agg if a["method"] == "ssi"), key=lambda a: a["mean_eval_error"])
    print(f"experiment: {cfg['trials']} trials, {len(rows)} rows; lowest ssi mean held-out "
          f"error {best['mean_eval_error']:.6g} at beta={best['beta']}, T={best['T']}")
    return EXIT_OK


def cmd_homophily(cfg: dict) -> int:
    raw = None
    if cfg["graph"].endswith(".json"):
        raw = _read_json(cfg["graph"])
        g = graph_from_dict(raw)
    else:
        g = read_graph(cfg["graph"])
    if cfg["labels"] is not None:
        labels = [str(x) for x in _read_json(cfg["labels"])]
    elif raw is not None and "node_types" in raw:
        labels = [str(x) for x in raw["node_types"]]
    else:
        raise ConfigError("no labels: pass --labels or give the graph JSON node_types")
    classes = cfg["classes"] if cfg["classes"] is not None else sorted(set(labels))
    rows = []
    for c in classes:
        for h in cfg["hops"]:
            score, count = homophily_counts(g, labels, c, h)
            rows.append((c, h, float(score), count))
    _write(cfg["out_dir"], "homophily.csv", csv_text(("class", "hops", "score", "count"), rows))
    _write(cfg["out_dir"], "manifest.json", _manifest("homophily", cfg))
    print("homophily: " + " ".join(f"H_{c}^{h}={s:.6g}" for c, h, s, _ in rows))
    return EXIT_OK


def _read_features(path: str) -> np.ndarray:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        X = np.array(json.loads(text), dtype=float)
    else:
        X = np.loadtxt(io.StringIO(text.replace(",", " ")), ndmin=2)
    return X[:, None] if X.ndim == 1 else X


def cmd_cluster(cfg: dict) -> int:
    X = _read_features(cfg["features"])
    res = lloyd(X, cfg["k"], cfg["seed"], cfg["max_iter"])
    C = res.clusters()
    out = {"C": [list(V) for V in C], "objective": res.objective,
           "iterations": res.iterations, "converged": res.converged}
    _write(cfg["out_dir"], "clusters.json", dumps(out) + "\n")
    _write(cfg["out_dir"], "manifest.json", _manifest("cluster", cfg))
    print(f"cluster: {len(C)} clusters, objective {res.objective:.6g}, "
          f"{res.iterations} iterations")
    return EXIT_OK


def cmd_semigcn_demo(cfg: dict) -> int:
    if cfg["layers"] not in (1, 2):
        raise ConfigError("layers must be 1 or 2")
    if not 0 < cfg["train_fraction"] <= 1:
        raise ConfigError("train_fraction must lie in (0, 1]")
    seed = cfg["seed"]
    g, X, y = two_community_graph(cfg["n_per"], cfg["p_in"], cfg["p_out"], cfg["noise"], seed)
    rng = np.random.default_rng([seed, 1])
    mask = np.zeros(g.n, dtype=bool)
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        m = max(1, int(round(cfg["train_fraction"] * idx.size)))
        mask[rng.choice(idx, size=m, replace=False)] = True
    degrees = tuple(cfg["degrees"])
    if cfg["support"] == "all":
        if len(degrees) != 1:
            raise ConfigError("support 'all' takes exactly one degree")
        sets = (tuple(range(g.n)),)
    elif cfg["support"] == "kmeans":
        sets = lloyd(X, len(degrees), seed).clusters()
        if len(sets) != len(degrees):
            raise ConfigError("k-means produced fewer clusters than degrees")
    else:
        raise ConfigError("support must be 'all' or 'kmeans'")
    widths = [X.shape[1]] + ([cfg["hidden"]] if cfg["layers"] == 2 else []) + [2]
    acts = ["relu"] * (len(widths) - 2) + ["softmax"]
    zero = np.random.default_rng(0)
    layers = [SemiGcnLayer.init(sets, degrees, a, b, zero, act)
              for a, b, act in zip(widths, widths[1:], acts)]
    res = train_node_classifier(g, X, y, mask, layers, cfg["epochs"], cfg["lr"], seed=seed)
    pred = forward(X, normalized_adjacency_selfloops(g), res.layers).argmax(axis=1)
    test = float(np.mean(pred[~mask] == y[~mask])) if (~mask).any() else None
    curve = [(e, l, a) for e, (l, a) in enumerate(zip(res.loss, res.accuracy))]
    _write(cfg["out_dir"], "curve.csv", csv_text(("epoch", "loss", "train_accuracy"), curve))
    summary = {"final_loss": res.loss[-1], "train_accuracy": res.accuracy[-1],
               "test_accuracy": test, "sets": [list(V) for V in sets], "degrees": list(degrees)}
    _write(cfg["out_dir"], "result.json", dumps(summary) + "\n")
    _write(cfg["out_dir"], "manifest.json", _manifest("semigcn-demo", cfg))
    print(f"semigcn-demo: loss {res.loss[0]:.4g} -> {res.loss[-1]:.4g}, train accuracy "
          f"{res.accuracy[-1]:.3f}, test accuracy {'n/a' if test is None else f'{test:.3f}'}")
    return EXIT_OK


HANDLERS = {
    "bank-dim": cmd_bank_dim, "bank-lattice": cmd_bank_lattice, "learn": cmd_learn,
    "experiment": cmd_experiment, "homophily": cmd_homophily, "cluster": cmd_cluster,
    "semigcn-demo": cmd_semigcn_demo,
}


# argument handling -----------------------------------------------------------

def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semishift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"semishift {__version__}")
    parser.add_argument("--config", default=argparse.SUPPRESS, help="JSON parameter file")
    for name, (_, _, hlp) in GLOBALS.items():
        parser.add_argument(_flag(name), dest=name, default=argparse.SUPPRESS, help=hlp)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for cmd, info in COMMANDS.items():
        p = sub.add_parser(cmd, help=info["help"], description=info["help"])
        p.add_argument("--config", default=argparse.SUPPRESS, help="JSON parameter file")
        for name, (_, _, hlp) in GLOBALS.items():
            p.add_argument(_flag(name), dest=name, default=argparse.SUPPRESS, help=hlp)
        for name, (_, default, hlp) in info["params"].items():
            shown = "" if default is None else f" (default {default})"
            p.add_argument(_flag(name), dest=name, default=argparse.SUPPRESS, help=hlp + shown)
    return parser


def resolve_config(cmd: str, given: dict, config: dict | None) -> dict:
    """Merge defaults, a config mapping and explicit flags, with validation."""
    schema = {**GLOBALS, **COMMANDS[cmd]["params"]}
    cfg = {k: v[1] for k, v in schema.items()}
    layers = []
    if config is not None:
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(config) - set(schema) - set(RESERVED))
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {unknown}")
        if config.get("command", cmd) != cmd:
            raise ConfigError(f"config was written for {config['command']!r}, not {cmd!r}")
        layers.append(config)
    layers.append(given)
    for layer in layers:
        for k, v in layer.items():
            if k in RESERVED:
                continue
            try:
                cfg[k] = schema[k][0](v)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {k}: {v!r} ({exc})") from None
    missing = [k for k in COMMANDS[cmd]["required"] if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"{cmd} needs {', '.join(_flag(m) for m in missing)}")
    if cfg["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    cmd = args.pop("command", None)
    if cmd is None:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    try:
        path = args.pop("config", None)
        config = _read_json(path) if path is not None else None
        cfg = resolve_config(cmd, args, config)
        return HANDLERS[cmd](cfg)
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"semishift {cmd}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except json.JSONDecodeError as exc:
        print(f"semishift {cmd}: cannot parse JSON: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"semishift {cmd}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

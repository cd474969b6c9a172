"""Operator command line: a thin client over the HTTP service.

Commands talk to the FastAPI app in-process by default; --server points
them at a running instance instead. Settings merge with precedence
command flag > group flag > config file > built-in default, and every
failure exits nonzero after a single JSON line on stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from .data import ALL_SPLITS, ETH_UCY_SPLITS

CONFIG_KEYS = {
    "data_root", "run_dir", "output_format", "seed", "server", "provider", "run",
}
FORMATS = ("table", "csv", "records")


def fail(message: str):
    click.echo(json.dumps({"error": str(message)}), err=True)
    sys.exit(1)


def load_config(path):
    if path is None:
        return {}
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        fail(f"cannot read config {path}: {exc}")
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        fail(f"config {path} must be a mapping")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        fail(f"unknown config key(s) {sorted(unknown)}; allowed: {sorted(CONFIG_KEYS)}")
    return raw


def make_client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def call(client, method, path, **kwargs):
    response = getattr(client, method)(path, **kwargs)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        fail(detail)
    return response.json()


def parse_seeds(text) -> list[int]:
    """Either one integer or an inclusive range like 0..9."""
    text = str(text)
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            fail(f"bad seed range {text!r}; expected e.g. 0..9")
        if hi < lo:
            fail(f"bad seed range {text!r}; end before start")
        return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError:
        fail(f"bad seed {text!r}; expected an integer or a range like 0..9")


class Settings:
    def __init__(self, ctx, **flags):
        self.group = ctx.obj or {}
        self.config = load_config(
            flags.pop("config_path", None) or self.group.get("config_path")
        )
        self.flags = {k: v for k, v in flags.items() if v is not None}

    def get(self, key, default=None):
        if key in self.flags:
            return self.flags[key]
        group_value = self.group.get(key)
        if group_value is not None:
            return group_value
        return self.config.get(key, default)

    def require(self, key, hint):
        value = self.get(key)
        if value is None:
            fail(f"{key} is required ({hint})")
        return value

    @property
    def output_format(self):
        fmt = self.get("output_format", "table")
        if fmt not in FORMATS:
            fail(f"unknown format {fmt!r}; expected one of {FORMATS}")
        return fmt

    def client(self):
        return make_client(self.get("server"))


def heuristic_or_code(value):
    """A registered name, or a path to a candidate source file."""
    path = Path(value)
    if path.is_file():
        return {"code": path.read_text()}
    return {"heuristic": value}


def echo_records(rows):
    for row in rows:
        click.echo(json.dumps(row, sort_keys=True))


def fmt_cell(cell):
    if cell is None:
        return "-"
    return f"{cell['min_ade']:.4f}/{cell['min_fde']:.4f}"


def render_eval(result, fmt):
    records, mean = result["records"], result["mean"]
    if fmt == "records":
        echo_records(records)
        click.echo(json.dumps({"mean": mean}, sort_keys=True))
        return
    header = ["heuristic", "dataset", "seed", "scenes", "min_ade", "min_fde",
              "objective_j"]
    lines = [
        [r["heuristic"], r["dataset"], str(r["seed"]), str(r["scenes"]),
         f"{r['min_ade']:.4f}", f"{r['min_fde']:.4f}", f"{r['objective_j']:.4f}"]
        for r in records
    ]
    lines.append(
        [records[0]["heuristic"], records[0]["dataset"], "mean", "",
         f"{mean['min_ade']:.4f}", f"{mean['min_fde']:.4f}",
         f"{mean['objective_j']:.4f}"]
    )
    if fmt == "csv":
        click.echo(",".join(header))
        for line in lines:
            click.echo(",".join(line))
    else:
        widths = [max(len(h), *(len(l[i]) for l in lines))
                  for i, h in enumerate(header)]
        click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for line in lines:
            click.echo("  ".join(v.ljust(w) for v, w in zip(line, widths)))


def render_bench(result, fmt):
    columns = result["columns"]
    if fmt == "records":
        echo_records(result["rows"])
        return
    if fmt == "csv":
        click.echo(",".join(["heuristic"] + columns))
        for row in result["rows"]:
            cells = [fmt_cell(row["cells"].get(col)) for col in columns]
            click.echo(",".join([row["name"]] + cells))
        return
    header = ["heuristic"] + columns
    lines = [
        [row["name"]] + [fmt_cell(row["cells"].get(col)) for col in columns]
        for row in result["rows"]
    ]
    widths = [max(len(h), *(len(l[i]) for l in lines))
              for i, h in enumerate(header)]
    click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for line in lines:
        click.echo("  ".join(v.ljust(w) for v, w in zip(line, widths)))


@click.group()
@click.option("--data-root", default=None, help="Dataset root directory.")
@click.option("--config", "config_path", default=None,
              help="YAML settings file; flags win on conflict.")
@click.option("--seed", default=None, help="Default seed for all commands.")
@click.option("--format", "output_format", default=None,
              help="Output format: table, csv, or records.")
@click.option("--server", default=None,
              help="Base URL of a running service; in-process when absent.")
@click.pass_context
def main(ctx, data_root, config_path, seed, output_format, server):
    """Evolve, evaluate, and benchmark trajectory prediction heuristics."""
    ctx.obj = {
        "data_root": data_root,
        "config_path": config_path,
        "seed": seed,
        "output_format": output_format,
        "server": server,
    }


@main.command("eval")
@click.option("--heuristic", required=True,
              help="Registered heuristic name or candidate source file.")
@click.option("--dataset", required=True)
@click.option("--k", default=20, show_default=True)
@click.option("--seed", default=None, help="Single seed or range like 0..9.")
@click.option("--data-root", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--format", "output_format", default=None)
@click.pass_context
def cmd_eval(ctx, heuristic, dataset, k, seed, data_root, config_path,
             output_format):
    """Evaluate one heuristic on one split's test scenes."""
    s = Settings(ctx, config_path=config_path, data_root=data_root,
                 seed=seed, output_format=output_format)
    if dataset not in ALL_SPLITS:
        fail(f"unknown dataset {dataset!r}; expected one of {ALL_SPLITS}")
    request = {
        "data_root": str(s.require("data_root", "--data-root or config")),
        "dataset": dataset,
        "k": k,
        "seeds": parse_seeds(s.get("seed", 0)),
    }
    request.update(heuristic_or_code(heuristic))
    result = call(s.client(), "post", "/eval", json=request)
    render_eval(result, s.output_format)


@main.command("stats")
@click.option("--heuristic", required=True,
              help="Registered heuristic name or candidate source file.")
@click.option("--dataset", required=True)
@click.option("--k", default=20, show_default=True)
@click.option("--seed", default=None)
@click.option("--data-root", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--format", "output_format", default=None)
@click.pass_context
def cmd_stats(ctx, heuristic, dataset, k, seed, data_root, config_path,
              output_format):
    """Print a heuristic's best-index histogram block on a split."""
    s = Settings(ctx, config_path=config_path, data_root=data_root,
                 seed=seed, output_format=output_format)
    if dataset not in ALL_SPLITS:
        fail(f"unknown dataset {dataset!r}; expected one of {ALL_SPLITS}")
    seeds = parse_seeds(s.get("seed", 0))
    if len(seeds) != 1:
        fail("stats takes a single seed")
    request = {
        "data_root": str(s.require("data_root", "--data-root or config")),
        "dataset": dataset,
        "k": k,
        "seed": seeds[0],
    }
    request.update(heuristic_or_code(heuristic))
    result = call(s.client(), "post", "/stats", json=request)
    if s.output_format == "records":
        click.echo(json.dumps({"histogram": result["histogram"]}, sort_keys=True))
    else:
        click.echo(result["block"])


@main.command("bench")
@click.option("--table", required=True,
              help="Which table to reproduce: heuristics or xdataset.")
@click.option("--k", default=20, show_default=True)
@click.option("--seed", default=None)
@click.option("--data-root", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--format", "output_format", default=None)
@click.pass_context
def cmd_bench(ctx, table, k, seed, data_root, config_path, output_format):
    """Reproduce a benchmark table over all available datasets."""
    s = Settings(ctx, config_path=config_path, data_root=data_root,
                 seed=seed, output_format=output_format)
    seeds = parse_seeds(s.get("seed", 0))
    if len(seeds) != 1:
        fail("bench takes a single seed")
    request = {
        "data_root": str(s.require("data_root", "--data-root or config")),
        "table": table,
        "k": k,
        "seed": seeds[0],
    }
    result = call(s.client(), "post", "/bench", json=request)
    render_bench(result, s.output_format)


@main.command("evolve")
@click.option("--test", "test_split", required=True,
              help="Held-out split; training uses the other four.")
@click.option("--generations", default=None, type=int)
@click.option("--provider", "provider_kind", default=None,
              help="scripted or http_chat.")
@click.option("--script", "script_path", default=None,
              help="Reply script for the scripted provider.")
@click.option("--run-dir", default=None)
@click.option("--seed", default=None)
@click.option("--data-root", default=None)
@click.option("--config", "config_path", default=None)
@click.option("--format", "output_format", default=None)
@click.pass_context
def cmd_evolve(ctx, test_split, generations, provider_kind, script_path,
               run_dir, seed, data_root, config_path, output_format):
    """Run leave-one-out evolution and score the best on the held-out split."""
    s = Settings(ctx, config_path=config_path, data_root=data_root,
                 seed=seed, output_format=output_format, run_dir=run_dir)
    if test_split not in ETH_UCY_SPLITS:
        fail(f"test split must be one of {ETH_UCY_SPLITS}, got {test_split!r}")
    seeds = parse_seeds(s.get("seed", 0))
    if len(seeds) != 1:
        fail("evolve takes a single seed")

    provider = dict(s.config.get("provider", {}))
    if provider_kind is not None:
        provider["kind"] = provider_kind
    if script_path is not None:
        provider["script_path"] = script_path
    provider.setdefault("kind", "scripted")

    run_options = dict(s.config.get("run", {}))
    run_options["rng_seed"] = seeds[0]
    if generations is not None:
        run_options["max_generations"] = generations

    request = {
        "data_root": str(s.require("data_root", "--data-root or config")),
        "test_split": test_split,
        "run_dir": str(s.get("run_dir") or f"runs/{test_split}-seed{seeds[0]}"),
        "provider": provider,
        "run": run_options,
    }
    result = call(s.client(), "post", "/evolve", json=request)
    if s.output_format == "records":
        click.echo(json.dumps(result, sort_keys=True))
        return
    if result["aborted"]:
        click.echo(f"aborted: {result['aborted']}")
    best = result["best"]
    if best is None:
        fail("run produced no successful candidate")
    click.echo(
        f"best {best['id']} train J={best['objective_j']:.4f} "
        f"(generation {best['generation']})"
    )
    click.echo(f"code: {result['run_dir']}/{best['code_file']}")
    test = result["test"]
    click.echo(
        f"test {test['dataset']}: minADE={test['min_ade']:.4f} "
        f"minFDE={test['min_fde']:.4f} J={test['objective_j']:.4f}"
    )


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

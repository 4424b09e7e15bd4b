"""Command line interface: psi numbers, invariants, stable graphs and verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import __version__
from . import cei as ce
from . import intersection as it
from . import stable_graphs as sg

CACHE_ENV = "CEI_GROUND_CACHE_DIR"
CACHE_FILE = "psi-memo.json"


class InputFileError(click.FileError):
    """Unreadable or malformed input file; exits 2 so that 1 stays reserved for failed checks."""
    exit_code = 2


def _parse_ks(text: str) -> tuple:
    try:
        ks = tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise click.UsageError(f"malformed k-list {text!r}; expected comma-separated integers")
    if not ks:
        raise click.UsageError("empty k-list")
    if any(k < 0 for k in ks):
        raise click.UsageError("exponents must be nonnegative")
    return ks


def _check_stable(g: int, n: int):
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise click.UsageError(f"unstable type (g={g}, n={n})")


def _cache_path():
    d = os.environ.get(CACHE_ENV)
    return os.path.join(d, CACHE_FILE) if d else None


def _load_cache():
    path = _cache_path()
    if path and os.path.exists(path):
        try:
            it.MEMO.load(path)
        except (OSError, ValueError) as exc:
            raise InputFileError(path, hint=f"unreadable memo cache: {exc}")


def _save_cache():
    path = _cache_path()
    if path:
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            it.MEMO.dump(path)
        except OSError as exc:
            raise InputFileError(path, hint=f"cannot write memo cache: {exc}")


def _emit(rows: list, fmt: str, text_line):
    if fmt == "json":
        click.echo(json.dumps(rows, indent=1, sort_keys=True))
    elif fmt == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        click.echo(buf.getvalue(), nl=False)
    else:
        for r in rows:
            click.echo(text_line(r))


def _manifest(command: str, params: dict, fixture_text: str | None, start: float):
    digest = hashlib.sha256(fixture_text.encode()).hexdigest()[:16] if fixture_text else None
    return {"command": command, "parameters": params, "version": __version__,
            "fixture_hash": digest, "elapsed": round(time.time() - start, 3)}


FORMAT = click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text",
                      show_default=True, help="Output format.")
MANIFEST = click.option("--manifest", is_flag=True, help="Print a run manifest to stderr.")


@click.group()
@click.version_option(__version__)
def main():
    """Exact enumerative invariants of the ground field and their verification suites."""


@main.command(short_help="Psi-class intersection number.")
@click.option("-g", "genus", type=int, required=True, help="Genus.")
@click.option("-k", "ks", required=True, help="Comma-separated psi exponents, e.g. 1,0,0.")
@click.option("--method", type=click.Choice(it.METHODS), default="default", show_default=True)
@FORMAT
@MANIFEST
def psi(genus, ks, method, fmt, manifest):
    """Intersection number <tau_k1 ... tau_kn>_g."""
    start = time.time()
    ks = _parse_ks(ks)
    _check_stable(genus, len(ks))
    _load_cache()
    try:
        value = it.psi_intersection(genus, ks, method)
    except it.UnsupportedMethod as exc:
        raise click.UsageError(str(exc))
    _save_cache()
    rows = [{"g": genus, "ks": list(ks), "value": it.format_rational(value)}]
    _emit(rows, fmt, lambda r: r["value"])
    if manifest:
        click.echo(json.dumps(_manifest("psi", {"g": genus, "ks": list(ks), "method": method}, None, start)),
                   err=True)


@main.command(short_help="Invariant of the ground field, with the dimension check.")
@click.option("-g", "genus", type=int, required=True, help="Genus.")
@click.option("-k", "ks", required=True, help="Comma-separated exponents of u.")
@click.option("--vertex-coefficient", is_flag=True, help="Print the string vertex coefficient (value / n!).")
@FORMAT
@MANIFEST
def cei(genus, ks, vertex_coefficient, fmt, manifest):
    """Invariant <u^k1 ... u^kn>_g of the ground field, with the dimension check."""
    start = time.time()
    ks = _parse_ks(ks)
    _check_stable(genus, len(ks))
    _load_cache()
    rec = ce.cei_record(genus, ks, vertex_coefficient)
    _save_cache()
    _emit([rec], fmt, lambda r: r["value"] + ("" if r["dimension_ok"] else "  (off dimension)"))
    if manifest:
        click.echo(json.dumps(_manifest("cei", {"g": genus, "ks": list(ks)}, None, start)), err=True)


def _table_rows(args):
    g, n = args
    return [{"g": g, "n": n, "ks": list(ks), "value": it.format_rational(v)} for g, n, ks, v in it.table_rows(g, n)]


@main.command()
@click.option("--max-genus", type=int, default=2, show_default=True)
@click.option("--max-n", type=int, default=4, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@FORMAT
def table(max_genus, max_n, jobs, fmt):
    """All on-dimension psi numbers for g <= max-genus, n <= max-n."""
    if max_genus < 0 or max_n < 1:
        raise click.UsageError("need max-genus >= 0 and max-n >= 1")
    _load_cache()
    types = [(g, n) for g in range(max_genus + 1) for n in range(1, max_n + 1) if 2 * g - 2 + n > 0]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_table_rows, types))
    else:
        parts = [_table_rows(t) for t in types]
    _save_cache()
    rows = [r for p in parts for r in p]
    _emit(rows, fmt, lambda r: f"g={r['g']} k={','.join(map(str, r['ks']))} {r['value']}")


@main.command(short_help="Stable graphs or contraction chains.")
@click.option("-g", "genus", type=int, required=True)
@click.option("-n", "n", type=int, required=True)
@click.option("--chains", type=int, default=None, help="List strict contraction chains of this length.")
@FORMAT
def graphs(genus, n, chains, fmt):
    """Stable graphs of type (g, n) with automorphism orders, or contraction chains."""
    from .dgla import graph_code
    _check_stable(genus, n)
    if chains is not None:
        if chains < 0:
            raise click.UsageError("chain length must be nonnegative")
        rows = []
        for c in sg.enumerate_contraction_chains(genus, n, chains):
            rows.append({"base": graph_code(c.base), "steps": [list(s) for s in c.steps]})
        _emit(rows, fmt, lambda r: f"{r['base']}  steps {r['steps']}")
        if fmt == "text":
            click.echo(f"total {len(rows)}")
        return
    rows = []
    for G in sg.enumerate_stable_graphs(genus, n):
        rows.append({"graph": graph_code(G), "vertices": G.nv, "edges": len(G.edges),
                     "aut": sg.automorphism_order(G)})
    _emit(rows, fmt, lambda r: f"{r['graph']}  |Aut| = {r['aut']}")
    if fmt == "text":
        click.echo(f"total {len(rows)}")


def _run(args):
    from . import suites
    from .operad_fixture import OperadFixture
    name, text, quick = args
    F = OperadFixture.from_text(text) if text is not None else None
    return [(l.render(), l.ok) for l in suites.run_suite(name, F, quick)]


@main.command(short_help="Run verification suites.")
@click.argument("suite", type=click.Choice(["operad", "feynman", "trivialization", "dgla", "resolution", "all"]))
@click.option("--fixture", "fixture_path", type=click.Path(dir_okay=False), default=None,
              help="Fixture file to verify instead of the packaged torus fixture.")
@click.option("--quick", is_flag=True, help="Smaller truncations.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Run suites in parallel.")
@MANIFEST
def verify(suite, fixture_path, quick, jobs, manifest):
    """Run verification suites; print one line per check and the first counterexample."""
    from . import suites
    from .operad_fixture import FixtureFormatError, OperadFixture
    start = time.time()
    text = None
    if fixture_path is not None:
        try:
            with open(fixture_path) as fh:
                text = fh.read()
            OperadFixture.from_text(text)
        except OSError as exc:
            raise InputFileError(fixture_path, hint=str(exc))
        except (FixtureFormatError, ValueError, KeyError) as exc:
            raise InputFileError(fixture_path, hint=f"malformed fixture: {exc}")
    names = list(suites.SUITES) if suite == "all" else [suite]
    tasks = [(n, text, quick) for n in names]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run, tasks))
    else:
        results = [_run(t) for t in tasks]
    ok = True
    for name, lines in zip(names, results):
        for text_line, good in lines:
            click.echo(text_line)
            ok &= good
        click.echo(f"{'PASS' if all(g for _, g in lines) else 'FAIL'} suite {name}")
    if manifest:
        click.echo(json.dumps(_manifest("verify", {"suite": suite, "quick": quick, "fixture": fixture_path},
                                        text, start)), err=True)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()

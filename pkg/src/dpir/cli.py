"""Command-line front end.

A thin client over the service handlers: each subcommand builds the same
request model the HTTP API accepts, executes it in-process (or against a
running service via --server), and writes the report envelope as JSON or,
for curves, CSV.  Outputs are written atomically and are byte-identical for
identical invocations.

Exit codes: 0 success, 2 usage error, 3 domain/validation error, 4 I/O error.
"""

from __future__ import annotations

import functools
import inspect
import json
import os
import sys
import tempfile

import click
import httpx
from pydantic import ValidationError

from . import errors as errors_module
from .errors import DomainError, FamilyParseError
from .patterns import load_family
from .service import handlers
from .service.models import (
    BoundRequest,
    FamilyDocument,
    FamilySpec,
    Figure1Request,
    Prop5Request,
    ProtocolAuditRequest,
    ProtocolRunRequest,
    Report,
    SuffcondRequest,
)

_ROUTES = {
    "figure1": ("/figure1", handlers.handle_figure1),
    "bound": ("/bound", handlers.handle_bound),
    "suffcond": ("/suffcond", handlers.handle_suffcond),
    "prop5": ("/prop5", handlers.handle_prop5),
    "protocol-run": ("/protocol/run", handlers.handle_protocol_run),
    "protocol-audit": ("/protocol/audit", handlers.handle_protocol_audit),
}

_ERROR_TYPES = {
    name: obj
    for name, obj in vars(errors_module).items()
    if inspect.isclass(obj) and issubclass(obj, DomainError)
}


def _call(subcommand: str, request, server: str | None) -> Report:
    path, handler = _ROUTES[subcommand]
    if server is None:
        return handler(request)
    resp = httpx.post(
        server.rstrip("/") + path, json=request.model_dump(), timeout=600.0
    )
    if resp.status_code == 400:
        body = resp.json().get("error", {})
        cls = _ERROR_TYPES.get(body.get("type", ""), DomainError)
        raise cls(body.get("message", "remote domain error"))
    resp.raise_for_status()
    return Report.model_validate(resp.json())


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dpir-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _to_csv(report: Report) -> str:
    columns = report.results["columns"]
    lines = [",".join(columns)]
    for row in report.results["rows"]:
        lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(report: Report, out: str | None, fmt: str) -> None:
    if fmt == "csv":
        if "rows" not in report.results:
            raise click.UsageError("csv format is only available for tabular reports")
        text = _to_csv(report)
    else:
        text = report.model_dump_json(indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        _write_atomic(out, text)


def _guarded(fn):
    """Map failures to the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (DomainError, ValidationError) as exc:
            name = type(exc).__name__ if isinstance(exc, DomainError) else "ValidationError"
            click.echo(
                json.dumps({"error": {"type": name, "message": str(exc)}}),
                err=True,
            )
            raise SystemExit(3)
        except (OSError, httpx.HTTPError) as exc:
            click.echo(
                json.dumps({"error": {"type": "IOError", "message": str(exc)}}),
                err=True,
            )
            raise SystemExit(4)

    return wrapper


def _family_options(fn):
    fn = click.option("--family", "family_path", type=str, default=None,
                      help="Path to a family document (JSON).")(fn)
    fn = click.option("--depth", type=int, default=None,
                      help="Chain depth for the nested kind.")(fn)
    fn = click.option("--M", "M", type=int, default=None,
                      help="Pattern size for disjoint/nested kinds.")(fn)
    fn = click.option("--K", "K", type=int, default=None, help="Alphabet size.")(fn)
    fn = click.option("--kind",
                      type=click.Choice(["exact", "disjoint", "nested", "circular"]),
                      default=None, help="Builtin family kind.")(fn)
    return fn


def _family_spec(kind, K, M, depth, family_path) -> FamilySpec:
    if (kind is None) == (family_path is None):
        raise click.UsageError("give exactly one of --kind or --family")
    if family_path is not None:
        try:
            with open(family_path, "r", encoding="utf-8") as fh:
                fam = load_family(fh.read())
        except FileNotFoundError as exc:
            raise FamilyParseError(f"cannot read family document: {exc}")
        doc = FamilyDocument(K=fam.K, label=fam.label,
                             sets=[list(s) for s in fam.sets])
        return FamilySpec(document=doc)
    return FamilySpec(kind=kind, K=K, M=M, depth=depth)


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise click.UsageError(f"{flag} expects comma-separated integers, got {text!r}")


_out_option = click.option("--out", type=str, default=None,
                           help="Output path (stdout when omitted).")
_server_option = click.option("--server", type=str, default=None,
                              help="Base URL of a running dpir service.")


@click.group()
@click.version_option(package_name="dpir")
def cli() -> None:
    """Bound curves, converse reports, and protocol experiments for private
    search over dependent messages."""


@cli.command("figure1")
@click.option("--K", "K_max", type=int, required=True,
              help="Largest alphabet size (curve runs K = 2..K).")
@click.option("--N", "N_list", type=str, required=True,
              help="Comma-separated server counts, e.g. 2,3,4,5.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@_out_option
@_server_option
@_guarded
def cmd_figure1(K_max, N_list, fmt, out, server):
    """Normalized exact-search bound versus alphabet size, per server count."""
    req = Figure1Request(K_max=K_max, N_list=_parse_int_list(N_list, "--N"))
    _emit(_call("figure1", req, server), out, fmt)


@cli.command("bound")
@_family_options
@click.option("--N", "N", type=int, required=True, help="Server count.")
@click.option("--strategy", type=click.Choice(["exhaustive", "greedy"]),
              default=None, help="Sequence optimization strategy.")
@click.option("--sequence", type=str, default=None,
              help="Evaluate one explicit sequence, e.g. 1,3,2.")
@click.option("--max-len", type=int, default=None,
              help="Truncate the optimized sequence at this depth.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@_out_option
@_server_option
@_guarded
def cmd_bound(kind, K, M, depth, family_path, N, strategy, sequence, max_len,
              fmt, out, server):
    """Converse download bound for one family."""
    if sequence is not None:
        strategy = None
    elif strategy is None:
        strategy = "exhaustive"
    req = BoundRequest(
        family=_family_spec(kind, K, M, depth, family_path),
        N=N,
        strategy=strategy,
        sequence=_parse_int_list(sequence, "--sequence") if sequence else None,
        max_len=max_len,
    )
    _emit(_call("bound", req, server), out, fmt)


@cli.command("suffcond")
@_family_options
@click.option("--sequence", type=str, required=True,
              help="Message sequence to profile, e.g. 1,2,3.")
@click.option("--horizon", type=int, required=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@_out_option
@_server_option
@_guarded
def cmd_suffcond(kind, K, M, depth, family_path, sequence, horizon, fmt, out, server):
    """Normalized mutual-information profile along a message sequence."""
    req = SuffcondRequest(
        family=_family_spec(kind, K, M, depth, family_path),
        sequence=_parse_int_list(sequence, "--sequence"),
        horizon=horizon,
    )
    _emit(_call("suffcond", req, server), out, fmt)


@cli.command("prop5")
@click.option("--K", "K", type=int, required=True, help="Even alphabet size >= 8.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@_out_option
@_server_option
@_guarded
def cmd_prop5(K, fmt, out, server):
    """Exhaustive circular-family triple scan."""
    _emit(_call("prop5", Prop5Request(K=K), server), out, fmt)


@cli.command("protocol-run")
@_family_options
@click.option("--N", "N", type=int, required=True, help="Server count.")
@click.option("--L", "L", type=int, required=True, help="Records per dataset.")
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--seed", type=int, required=True, help="Master seed (required).")
@click.option("--target-failure", type=float, default=1e-3, show_default=True)
@click.option("--block-length", type=int, default=4096, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@_out_option
@_server_option
@_guarded
def cmd_protocol_run(kind, K, M, depth, family_path, N, L, trials, seed,
                     target_failure, block_length, fmt, out, server):
    """Run seeded protocol sessions and report error rate and download rate."""
    req = ProtocolRunRequest(
        family=_family_spec(kind, K, M, depth, family_path),
        N=N, L=L, trials=trials, seed=seed,
        target_failure=target_failure, block_length=block_length,
    )
    _emit(_call("protocol-run", req, server), out, fmt)


@cli.command("protocol-audit")
@_family_options
@click.option("--N", "N", type=int, required=True, help="Server count.")
@click.option("--trials", type=int, default=10000, show_default=True,
              help="Sessions per audited theta.")
@click.option("--seed", type=int, required=True, help="Master seed (required).")
@click.option("--thetas", type=str, default=None,
              help="Comma-separated thetas to audit (default 1,2,mu).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@_out_option
@_server_option
@_guarded
def cmd_protocol_audit(kind, K, M, depth, family_path, N, trials, seed, thetas,
                       fmt, out, server):
    """Statistical and structural audit of query privacy."""
    req = ProtocolAuditRequest(
        family=_family_spec(kind, K, M, depth, family_path),
        N=N, trials=trials, seed=seed,
        thetas=_parse_int_list(thetas, "--thetas") if thetas else None,
    )
    _emit(_call("protocol-audit", req, server), out, fmt)


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    sys.exit(0)


if __name__ == "__main__":
    main()

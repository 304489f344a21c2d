"""Subcommand handlers shared by the HTTP app and the CLI.

Each handler takes a validated request model and returns a Report envelope;
domain failures propagate as DomainError for the caller to map (HTTP 400 /
exit code 3).
"""

from __future__ import annotations

from dataclasses import asdict

from .. import __version__, bounds, constructions
from ..protocol import privacy_audit, rate_experiment
from .models import (
    BoundRequest,
    Figure1Request,
    Prop5Request,
    ProtocolAuditRequest,
    ProtocolRunRequest,
    Report,
    SuffcondRequest,
)


def _report(subcommand: str, config, results: dict) -> Report:
    return Report(
        tool_version=__version__,
        subcommand=subcommand,
        config=config.model_dump(exclude_none=True),
        results=results,
    )


def handle_figure1(req: Figure1Request) -> Report:
    rows = bounds.figure1_curve(req.K_max, req.N_list)
    table = [
        [K, N, value, bounds.asymptote_reciprocal(N)]
        for K, N, value in rows
    ]
    return _report("figure1", req, {
        "columns": ["K", "N", "normalized_bound", "asymptote"],
        "rows": table,
    })


def handle_bound(req: BoundRequest) -> Report:
    model = bounds.PatternFamilyModel(req.family.build())
    if req.sequence is not None:
        report = bounds.converse_bound(model, req.N, req.sequence)
    else:
        strategy = req.strategy or "exhaustive"
        report = bounds.best_sequence(model, req.N, strategy, max_len=req.max_len)
    return _report("bound", req, asdict(report))


def handle_suffcond(req: SuffcondRequest) -> Report:
    model = bounds.PatternFamilyModel(req.family.build())
    profile = bounds.sufficient_condition_profile(model, req.sequence, req.horizon)
    return _report("suffcond", req, {
        "sequence": list(req.sequence),
        "horizon": req.horizon,
        "rho": profile,
        "max_rho": max(profile),
    })


def handle_prop5(req: Prop5Request) -> Report:
    report = constructions.prop5_triple_scan(req.K)
    return _report("prop5", req, asdict(report))


def handle_protocol_run(req: ProtocolRunRequest) -> Report:
    report = rate_experiment(
        req.family.build(),
        req.N,
        req.L,
        req.trials,
        req.seed,
        target_failure=req.target_failure,
        block_length=req.block_length,
        sessions_per_dataset=req.sessions_per_dataset,
    )
    return _report("protocol-run", req, asdict(report))


def handle_protocol_audit(req: ProtocolAuditRequest) -> Report:
    report = privacy_audit(
        req.family.build(),
        req.N,
        req.trials,
        req.seed,
        thetas=tuple(req.thetas) if req.thetas else None,
        significance=req.significance,
    )
    return _report("protocol-audit", req, asdict(report))

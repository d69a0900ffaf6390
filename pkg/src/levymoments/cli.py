"""Command-line client for the levymoments service layer.

Each subcommand builds a pydantic request, executes it in process (default)
or against a running server (--server URL), and renders the response as CSV
or JSON. Exit codes: 0 ok, 2 domain error, 3 convergence failure, 4 io; a
machine-readable {"error": ...} document goes to stderr on failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import service as svc
from .service import ServiceError

_ENDPOINTS = {
    "moment": ("/v1/moment", svc.MomentRequest, svc.MomentResponse, svc.run_moment),
    "bgamma": ("/v1/bgamma", svc.BgammaRequest, svc.BgammaResponse, svc.run_bgamma),
    "zeta": ("/v1/zeta", svc.ZetaRequest, svc.ZetaResponse, svc.run_zeta),
    "symmetric": ("/v1/symmetric", svc.SymmetricRequest, svc.SymmetricResponse, svc.run_symmetric),
    "verify-conv": ("/v1/verify-conv", svc.VerifyConvRequest, svc.VerifyConvResponse, svc.run_verify_conv),
    "mc": ("/v1/mc", svc.McRequest, svc.McResponse, svc.run_mc),
}


def _execute(command: str, request, server: Optional[str]):
    path, _, resp_model, handler = _ENDPOINTS[command]
    if not server:
        return handler(request)
    import httpx

    try:
        r = httpx.post(server.rstrip("/") + path, json=request.model_dump(), timeout=3600.0)
    except httpx.HTTPError as exc:
        raise ServiceError("io", f"server unreachable: {exc}") from exc
    if r.status_code != 200:
        try:
            err = r.json()["error"]
            raise ServiceError(err.get("code", "domain"), err.get("message", r.text))
        except (KeyError, json.JSONDecodeError):
            raise ServiceError("io", f"server returned {r.status_code}: {r.text[:300]}")
    return resp_model.model_validate(r.json())


def _merge_config(ctx: click.Context, config: Optional[str], values: dict) -> dict:
    """Config-file defaults with explicit flags winning (warning on clash)."""
    if not config:
        return values
    try:
        doc = json.loads(Path(config).read_text())
    except OSError as exc:
        raise ServiceError("io", f"cannot read config: {exc}") from exc
    merged = dict(values)
    for key, cfg_val in doc.items():
        if key not in values:
            continue
        src = ctx.get_parameter_source(key)
        explicit = src is not None and src.name == "COMMANDLINE"
        if explicit:
            if values[key] != cfg_val and cfg_val is not None:
                click.echo(f"warning: flag --{key.replace('_', '-')} overrides config value", err=True)
        else:
            merged[key] = cfg_val
    return merged


def _rows_for(resp) -> tuple[list[str], list[dict], list[str]]:
    """(CSV header, row dicts, leading comment lines) per response type."""
    if isinstance(resp, (svc.MomentResponse, svc.McResponse)):
        rows = [r.model_dump() for r in resp.rows]
        if isinstance(resp, svc.MomentResponse):
            for r in rows:
                r["warnings"] = ";".join(r["warnings"])
        return list(rows[0].keys()), rows, []
    if isinstance(resp, svc.BgammaResponse):
        rows = [r.model_dump() for r in resp.rows]
        return list(rows[0].keys()), rows, [f"# gamma_phi={resp.gamma_phi!r}"]
    if isinstance(resp, svc.ZetaResponse):
        return ["s", "value"], [{"s": resp.s, "value": resp.value}], []
    if isinstance(resp, svc.SymmetricResponse):
        row = {"op": resp.op, "t": resp.t, "value": resp.value, "variant": resp.variant or ""}
        return list(row.keys()), [row], []
    if isinstance(resp, svc.VerifyConvResponse):
        row = resp.model_dump(exclude={"schema_version", "command"})
        return list(row.keys()), [row], []
    raise TypeError(f"no CSV layout for {type(resp)!r}")


def _emit(resp, fmt: str, output: str) -> None:
    if fmt == "json":
        text = resp.model_dump_json(indent=2) + "\n"
    else:
        header, rows, comments = _rows_for(resp)
        buf = io.StringIO()
        for line in comments:
            buf.write(line + "\n")
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


def _run(ctx, command, request):
    opts = ctx.obj
    resp = _execute(command, request, opts["server"])
    _emit(resp, opts["format"], opts["output"])


def _fail(exc: ServiceError):
    sys.stderr.write(json.dumps({"error": {"code": exc.code, "message": exc.message}}) + "\n")
    sys.exit(exc.exit_code)


def _floats(values: tuple[str, ...]) -> list[float]:
    out: list[float] = []
    for v in values:
        out.extend(float(p) for p in str(v).split(",") if p != "")
    return out


def _complexes(values: tuple[str, ...]) -> list[svc.ComplexModel]:
    return [svc.ComplexModel.parse(v) for v in values]


@click.group()
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--output", default="-", show_default=True, help="output path or - for stdout")
@click.option("--server", default=None, help="execute against a running service at this base URL")
@click.pass_context
def main(ctx, fmt, output, server):
    """Moments of exponential functionals of Levy processes."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, output=output, server=server)


@main.command()
@click.option("--phi", required=True, help="family shorthand (log1p, linear:2, power:0.5, ...) or JSON")
@click.option("--z", required=True, help="complex order re[,im]")
@click.option("--t", "ts", multiple=True, required=True, help="horizon(s), repeatable or comma-separated")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--k-max", type=int, default=svc.sm.K_MAX_DEFAULT, show_default=True)
@click.option("--force", is_flag=True, help="proceed despite failed hypothesis checks")
@click.option("--config", default=None, help="JSON file with default parameter values")
@click.pass_context
def moment(ctx, phi, z, ts, tol, k_max, force, config):
    """Series moment E[I^z(t)] for a subordinator's Bernstein exponent."""
    try:
        vals = _merge_config(ctx, config, {"phi": phi, "z": z, "t": list(ts), "tol": tol, "k_max": k_max, "force": force})
        req = svc.MomentRequest(
            phi=svc.PhiModel.from_shorthand(vals["phi"]) if isinstance(vals["phi"], str) else svc.PhiModel.model_validate(vals["phi"]),
            z=svc.ComplexModel.parse(vals["z"]),
            t=_floats(tuple(vals["t"]) if isinstance(vals["t"], (list, tuple)) else (vals["t"],)),
            tol=vals["tol"],
            k_max=vals["k_max"],
            force=vals["force"],
        )
        _run(ctx, "moment", req)
    except ServiceError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ServiceError("domain", str(exc)))


@main.command()
@click.option("--phi", required=True)
@click.option("--z", "zs", multiple=True, required=True, help="evaluation point(s) re[,im]")
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.pass_context
def bgamma(ctx, phi, zs, tol):
    """Bernstein-Gamma values W_phi(z) plus gamma_phi."""
    try:
        req = svc.BgammaRequest(phi=svc.PhiModel.from_shorthand(phi), z=_complexes(zs), tol=tol)
        _run(ctx, "bgamma", req)
    except ServiceError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ServiceError("domain", str(exc)))


@main.command()
@click.option("--s", type=float, required=True)
@click.pass_context
def zeta(ctx, s):
    """Riemann zeta via the Gamma-subordinator moment identity."""
    try:
        _run(ctx, "zeta", svc.ZetaRequest(s=s))
    except ServiceError as exc:
        _fail(exc)


@main.group()
def symmetric():
    """Symmetric-process moment identities."""


def _sym_run(ctx, **kwargs):
    try:
        _run(ctx, "symmetric", svc.SymmetricRequest(**kwargs))
    except ServiceError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ServiceError("domain", str(exc)))


@symmetric.command("half-neg")
@click.option("--t", type=float, required=True)
@click.pass_context
def sym_half_neg(ctx, t):
    """Universal E[I^{-1/2}(t)] = t^{-1/2} (non compound Poisson)."""
    _sym_run(ctx, op="half_neg", t=t)


@symmetric.command("cp-half-neg")
@click.option("--lam", type=float, required=True)
@click.option("--t", type=float, required=True)
@click.option("--variant", type=click.Choice(["paper", "laplace_derived"]), default="laplace_derived", show_default=True)
@click.pass_context
def sym_cp_half_neg(ctx, lam, t, variant):
    """Compound Poisson half-negative moment (both published variants)."""
    _sym_run(ctx, op="cp_half_neg", t=t, lam=lam, variant=variant)


@symmetric.command("half-pos")
@click.option("--psi-half", type=float, required=True, help="Psi(1/2)")
@click.option("--t", type=float, required=True)
@click.pass_context
def sym_half_pos(ctx, psi_half, t):
    """E[I^{1/2}(t)] from Psi(1/2)."""
    _sym_run(ctx, op="half_pos", t=t, psi_half=psi_half)


@symmetric.command("n-minus-half")
@click.option("--psi", "psis", type=float, multiple=True, required=True, help="Psi(k-1/2), k = 1..n")
@click.option("--t", type=float, required=True)
@click.option("--cells", type=int, default=4096, show_default=True)
@click.pass_context
def sym_n_minus_half(ctx, psis, t, cells):
    """E[I^{n-1/2}(t)] by iterated convolution."""
    _sym_run(ctx, op="n_minus_half", t=t, psi_values=list(psis), n_cells=cells)


@main.command("verify-conv")
@click.option("--z", required=True)
@click.option("--t", type=float, required=True)
@click.option("--curve-f", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--curve-g", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cp-lambda", type=float, default=None)
@click.option("--cells", type=int, default=4096, show_default=True)
@click.pass_context
def verify_conv(ctx, z, t, curve_f, curve_g, cp_lambda, cells):
    """Check the convolution identity against tabulated moment curves."""
    try:
        from .convolution import TabulatedFunction

        f = TabulatedFunction.from_csv(Path(curve_f).read_text())
        g = TabulatedFunction.from_csv(Path(curve_g).read_text())
        req = svc.VerifyConvRequest(
            z=svc.ComplexModel.parse(z),
            t=t,
            curve_f=svc.CurveModel.from_tabulated(f),
            curve_g=svc.CurveModel.from_tabulated(g),
            cp_lambda=cp_lambda,
            n_cells=cells,
        )
        _run(ctx, "verify-conv", req)
    except OSError as exc:
        _fail(ServiceError("io", str(exc)))
    except ServiceError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ServiceError("domain", str(exc)))


@main.command()
@click.option("--kind", type=click.Choice(list(svc.mc.KINDS)), required=True)
@click.option("--z", "zs", multiple=True, required=True)
@click.option("--t", "ts", multiple=True, required=True)
@click.option("--paths", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scheme", type=click.Choice(["auto", "grid", "events"]), default="auto", show_default=True)
@click.option("--h", type=float, default=2.0 ** -12, help="grid step for grid schemes")
@click.option("--d", type=float, default=1.0, help="drift (drift kind)")
@click.option("--sigma2", type=float, default=1.0, help="Brownian variance rate")
@click.option("--lam", type=float, default=1.0, help="jump intensity (compound Poisson kinds)")
@click.option("--jump", type=click.Choice(["exponential", "normal", "uniform", "constant"]), default="exponential")
@click.option("--jump-scale", type=float, default=1.0)
@click.option("--phi", default=None, help="Bernstein spec for truncated_custom")
@click.option("--eps", type=float, default=1e-4, help="small-jump cutoff (events schemes)")
@click.option("--killing-q", type=float, default=0.0)
@click.option("--antithetic", is_flag=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_context
def mc(ctx, kind, zs, ts, paths, seed, scheme, h, d, sigma2, lam, jump, jump_scale, phi, eps, killing_q, antithetic, workers):
    """Monte-Carlo estimates of E[I^z(t)] from simulated Levy paths."""
    try:
        req = svc.McRequest(
            kind=kind,
            z=_complexes(zs),
            t=_floats(ts),
            n_paths=paths,
            seed=seed,
            scheme=scheme,
            h=h,
            d=d,
            sigma2=sigma2,
            lam=lam,
            jump=svc.JumpModel(name=jump, scale=jump_scale),
            phi=svc.PhiModel.from_shorthand(phi) if phi else None,
            eps=eps,
            killing_q=killing_q,
            antithetic=antithetic,
            workers=workers,
        )
        _run(ctx, "mc", req)
    except ServiceError as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ServiceError("domain", str(exc)))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("levymoments.api:app", host=host, port=port)


if __name__ == "__main__":
    main()

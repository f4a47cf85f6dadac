"""Command-line client for the sensing service.

Thin by design: every subcommand builds a scenario request, sends it to
the HTTP API (an in-process instance by default, or a remote server via
--server), and writes whatever CSV the service returned. `serve` starts
the API under uvicorn.
"""

from __future__ import annotations

import asyncio
import os
import sys
from pathlib import Path

import click
import httpx

from .scenario import load_scenario


def _post(server, path, payload):
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.post(path, json=payload)
    else:
        # no server given: mount the app in-process over an ASGI transport
        from .service import app

        async def _go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://ddsense.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        resp = asyncio.run(_go())
    if resp.status_code != 200:
        raise click.ClickException(f"{path} failed ({resp.status_code}): {resp.text}")
    return resp.json()


def _scenario_payload(config, seed, trials, mode):
    model = load_scenario(config)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if trials is not None:
        overrides["trials"] = trials
    if mode is not None:
        overrides["mode"] = mode
    if overrides:
        model = model.model_copy(update=overrides)
    return model.model_dump()


def _parallel_value(parallel: str) -> int:
    if parallel == "auto":
        return os.cpu_count() or 1
    try:
        value = int(parallel)
    except ValueError:
        raise click.ClickException("--parallel expects an integer or 'auto'")
    if value < 1:
        raise click.ClickException("--parallel must be >= 1")
    return value


config_opt = click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None)
seed_opt = click.option("--seed", type=int, default=None, help="override scenario seed")
trials_opt = click.option("--trials", type=int, default=None, help="override trial count")
mode_opt = click.option(
    "--mode", type=click.Choice(["fractional", "integer", "ofdm"]), default=None
)
parallel_opt = click.option("--parallel", default="1", help="worker processes or 'auto'")


@click.group()
@click.option("--server", default=None, help="URL of a running service; default runs in-process")
@click.pass_context
def main(ctx, server):
    """Delay-Doppler sensing simulator and estimator."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@config_opt
@out_opt
@seed_opt
@mode_opt
@click.option("--trial", type=int, default=0, help="trial index to simulate")
@click.option("--dump", default="", help="comma list of matrices to dump: dd,corr,fasttime")
@click.pass_context
def sim(ctx, config, out, seed, mode, trial, dump):
    """Simulate one frame and report per-target estimates."""
    dumps = [d for d in dump.split(",") if d]
    for d in dumps:
        if d not in ("dd", "corr", "fasttime"):
            raise click.ClickException(f"unknown dump key {d!r}")
    payload = {
        "scenario": _scenario_payload(config, seed, None, mode),
        "trial": trial,
        "dump": dumps,
    }
    data = _post(ctx.obj["server"], "/simulate", payload)
    if data["censored"]:
        click.echo(f"censored: {data['detail']}")
    else:
        for i, (t, re_m, ve) in enumerate(
            zip(data["truth"], data["range_errors_m"], data["velocity_errors_mps"])
        ):
            e = data["estimates"][i] if i < len(data["estimates"]) else None
            click.echo(
                f"target {i}: truth (l={t['l_tau']:.3f}, k={t['k_nu']:.3f}) "
                f"range err {re_m:+.3f} m, velocity err {ve:+.3f} m/s"
            )
    base = Path(out).with_suffix("") if out else Path("ddsense_sim")
    if out:
        Path(out).write_text(data["estimates_csv"])
        click.echo(f"wrote {out}")
    for key, text in data["dumps"].items():
        path = Path(f"{base}_{key}.csv")
        path.write_text(text)
        click.echo(f"wrote {path}")


@main.command()
@config_opt
@out_opt
@seed_opt
@trials_opt
@mode_opt
@parallel_opt
@click.pass_context
def mc(ctx, config, out, seed, trials, mode, parallel):
    """Monte Carlo RMSE-versus-SNR sweep."""
    payload = {
        "scenario": _scenario_payload(config, seed, trials, mode),
        "parallel": _parallel_value(parallel),
    }
    data = _post(ctx.obj["server"], "/sweep", payload)
    _emit_sweep(data, out)


@main.command()
@config_opt
@out_opt
@seed_opt
@trials_opt
@parallel_opt
@click.pass_context
def baseline(ctx, config, out, seed, trials, parallel):
    """RMSE sweep with the estimator forced to the OFDM periodogram baseline."""
    payload = {
        "scenario": _scenario_payload(config, seed, trials, None),
        "parallel": _parallel_value(parallel),
    }
    data = _post(ctx.obj["server"], "/baseline", payload)
    _emit_sweep(data, out)


def _emit_sweep(data, out):
    for row in data["rows"]:
        flag = " [flagged]" if row["flagged"] else ""
        click.echo(
            f"snr {row['snr_db']:+6.1f} dB  mode {row['estimator_mode']:<10s} "
            f"rmse range {row['rmse_range_m']:10.4f} m  velocity {row['rmse_velocity_mps']:8.4f} m/s"
            f"  censored {row['censored_trials']}/{row['trials']}{flag}"
        )
    if out:
        Path(out).write_text(data["csv"])
        click.echo(f"wrote {out}")


@main.command()
@click.pass_context
def selftest(ctx):
    """Run the built-in oracle suite and exit nonzero on failure."""
    data = _post(ctx.obj["server"], "/selftest", None)
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['name']}: {check['detail']}")
    if not data["passed"]:
        sys.exit(1)
    click.echo("all checks passed")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("ddsense.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

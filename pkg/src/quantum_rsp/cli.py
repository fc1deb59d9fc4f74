"""Command-line front end: ``quantum-rsp payoff|equilibrium|sweep|verify|invade``."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

import click
import numpy as np

from . import dynamics
from .equilibrium import classify, solve_interior_ne
from .errors import QuantumRspError
from .game_model import MixedQuantumStrategy, PayoffBimatrix, make_rsp_matrix, validate_strategy
from .quantum_engine import (
    InitialState,
    classical_state,
    entangled_state,
    make_initial_state,
    payoff_closed_form,
    payoff_sums,
)
from .verification import DEFAULT_SEED, run_all


class ConfigError(click.ClickException):
    """Config problem located by source and field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")


# -- config parsing ---------------------------------------------------------

def _load_json(path: str, where: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(where, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", f"invalid JSON: {exc.msg}") from exc


def parse_game(data: Any, where: str = "game") -> PayoffBimatrix:
    if not isinstance(data, dict):
        raise ConfigError(where, "expected an object with key 'rsp' or 'bimatrix'")
    if "rsp" in data:
        rsp = data["rsp"]
        if not isinstance(rsp, dict) or "epsilon" not in rsp:
            raise ConfigError(f"{where}.rsp", "expected {\"epsilon\": <real>}")
        eps = rsp["epsilon"]
        if isinstance(eps, bool) or not isinstance(eps, (int, float)):
            raise ConfigError(f"{where}.rsp.epsilon", f"expected a real number, got {eps!r}")
        try:
            return make_rsp_matrix(eps)
        except QuantumRspError as exc:
            raise ConfigError(f"{where}.rsp.epsilon", str(exc)) from exc
    if "bimatrix" in data:
        rows = data["bimatrix"]
        if not isinstance(rows, list) or len(rows) != 3:
            raise ConfigError(f"{where}.bimatrix", "expected 3 rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 3:
                raise ConfigError(f"{where}.bimatrix[{i}]", "expected 3 cells")
            for j, cell in enumerate(row):
                ok = (
                    isinstance(cell, list)
                    and len(cell) == 2
                    and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in cell)
                )
                if not ok:
                    raise ConfigError(f"{where}.bimatrix[{i}][{j}]", f"expected [alpha, beta], got {cell!r}")
        try:
            return PayoffBimatrix.from_pairs(rows)
        except QuantumRspError as exc:
            raise ConfigError(f"{where}.bimatrix", str(exc)) from exc
    raise ConfigError(where, "expected key 'rsp' or 'bimatrix'")


def parse_state_json(data: Any, where: str, label: str | None = None) -> InitialState:
    if not isinstance(data, dict) or "amplitudes" not in data:
        raise ConfigError(where, "expected an object with key 'amplitudes'")
    amps = data["amplitudes"]
    if not isinstance(amps, list) or len(amps) != 9:
        raise ConfigError(f"{where}.amplitudes", "expected 9 [re, im] pairs")
    values = []
    for idx, pair in enumerate(amps):
        ok = (
            isinstance(pair, list)
            and len(pair) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        )
        if not ok:
            raise ConfigError(f"{where}.amplitudes[{idx}]", f"expected [re, im], got {pair!r}")
        values.append(complex(pair[0], pair[1]))
    try:
        return make_initial_state(values, label=label)
    except QuantumRspError as exc:
        raise ConfigError(f"{where}.amplitudes", str(exc)) from exc


def parse_state(spec: str) -> InitialState:
    if spec == "classical":
        return classical_state()
    if spec == "entangled":
        return entangled_state()
    path = spec[len("file:"):] if spec.startswith("file:") else spec
    if not Path(path).exists():
        raise ConfigError("--state", f"expected 'classical', 'entangled' or file:<path>, got {spec!r}")
    return parse_state_json(_load_json(path, "--state"), path, label=Path(path).stem)


def parse_strategy(text: str, where: str) -> MixedQuantumStrategy:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(where, f"expected 'p,p1', got {text!r}")
    try:
        p, p1 = (float(v) for v in parts)
    except ValueError as exc:
        raise ConfigError(where, f"expected two decimal numbers, got {text!r}") from exc
    try:
        return validate_strategy(p, p1)
    except QuantumRspError as exc:
        raise ConfigError(where, str(exc)) from exc


def resolve_game(epsilon: float | None, game: str | None) -> PayoffBimatrix:
    if epsilon is not None and game is not None:
        raise ConfigError("--epsilon/--game", "give one of --epsilon or --game, not both")
    if game is not None:
        return parse_game(_load_json(game, "--game"), game)
    if epsilon is None:
        raise ConfigError("--epsilon/--game", "one of --epsilon or --game is required")
    try:
        return make_rsp_matrix(epsilon)
    except QuantumRspError as exc:
        raise ConfigError("--epsilon", str(exc)) from exc


# -- output -----------------------------------------------------------------

def _fmt(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render_text_pairs(pairs: list[tuple[str, Any]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {_fmt(v)}\n" for k, v in pairs)


def render_text_table(header: list[str], rows: list[list[Any]]) -> str:
    cells = [header] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def render_csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def render_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _guarded(fn: Callable[[], str]) -> str:
    # Build the whole output before writing anything so errors never leave partial output.
    try:
        return fn()
    except QuantumRspError as exc:
        raise click.ClickException(str(exc)) from exc


# -- shared options ---------------------------------------------------------

def game_options(f):
    f = click.option("--game", type=str, default=None, help="Game config JSON file.")(f)
    f = click.option("--epsilon", type=float, default=None, help="RSP draw premium.")(f)
    return f


def state_option(f):
    return click.option(
        "--state", "state_spec", default="classical", show_default=True,
        help="classical | entangled | file:<path to state JSON>",
    )(f)


def output_options(f):
    f = click.option("--out", type=str, default=None, help="Output path (default stdout).")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True
    )(f)
    return f


@click.group()
def main():
    """Quantized Rock-Scissors-Paper: payoffs, equilibria and mutant invasions."""


@main.command()
@game_options
@state_option
@click.option("--alice", required=True, help="Alice's strategy as 'p,p1'.")
@click.option("--bob", required=True, help="Bob's strategy as 'p,p1'.")
@output_options
def payoff(epsilon, game, state_spec, alice, bob, fmt, out):
    """Payoffs to both players and the predicted payoff sums."""
    m = resolve_game(epsilon, game)
    s = parse_state(state_spec)
    a = parse_strategy(alice, "--alice")
    b = parse_strategy(bob, "--bob")

    def build() -> str:
        pa, pb = payoff_closed_form(m, s, a, b)
        sum_cl = sum_qu = None
        if m.epsilon is not None:
            sum_cl, sum_qu = payoff_sums(m.epsilon, a, b)
        record = {
            "epsilon": m.epsilon,
            "state": s.describe(),
            "alice": {"p": a.p, "p1": a.p1},
            "bob": {"p": b.p, "p1": b.p1},
            "P_A": pa,
            "P_B": pb,
            "P_A+P_B": pa + pb,
            "predicted_sum_classical": sum_cl,
            "predicted_sum_quantum": sum_qu,
        }
        if fmt == "json":
            return render_json(record)
        flat = [
            ("epsilon", m.epsilon), ("state", s.describe()),
            ("alice_p", a.p), ("alice_p1", a.p1), ("bob_p", b.p), ("bob_p1", b.p1),
            ("P_A", pa), ("P_B", pb), ("P_A+P_B", pa + pb),
            ("predicted_sum_classical", sum_cl), ("predicted_sum_quantum", sum_qu),
        ]
        if fmt == "csv":
            return render_csv([k for k, _ in flat], [[v for _, v in flat]])
        return render_text_pairs(flat)

    emit(_guarded(build), out)


def _report_row(report) -> list[Any]:
    c, f = report.candidate, report.form
    return [
        report.epsilon,
        None if c is None else c.p,
        None if c is None else c.p1,
        None if f is None else f.a,
        None if f is None else f.b,
        None if f is None else f.c,
        report.classification.value,
    ]


SWEEP_HEADER = ["epsilon", "p_star", "p1_star", "a", "b", "c", "classification"]


@main.command()
@game_options
@state_option
@output_options
def equilibrium(epsilon, game, state_spec, fmt, out):
    """Interior mixed NE and its ESS classification."""
    m = resolve_game(epsilon, game)
    s = parse_state(state_spec)

    def build() -> str:
        report = classify(m, s)
        d = report.to_dict()
        if fmt == "json":
            return render_json(d)
        if fmt == "csv":
            return render_csv(SWEEP_HEADER + ["residual", "state"], [_report_row(report) + [d["residual"], d["state"]]])
        cand, form, cx = d["candidate"], d["form"], d["counterexample"]
        pairs = [
            ("classification", d["classification"]),
            ("epsilon", d["epsilon"]),
            ("state", d["state"]),
            ("p_star", None if cand is None else cand["p"]),
            ("p1_star", None if cand is None else cand["p1"]),
            ("residual", d["residual"]),
            ("form_a", None if form is None else form["a"]),
            ("form_b", None if form is None else form["b"]),
            ("form_c", None if form is None else form["c"]),
        ]
        if cx is not None:
            pairs.append(("counterexample", f"p={cx['p']:.6g} p1={cx['p1']:.6g} diff={cx['difference']:.6g}"))
        return render_text_pairs(pairs)

    emit(_guarded(build), out)


def sweep_epsilons(start: float, stop: float, count: int) -> list[float]:
    if count < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise ConfigError("--count", f"invalid sweep range start={start} stop={stop} count={count}")
    if count == 1:
        if start != stop:
            raise ConfigError("--count", "a single-point sweep needs --start equal to --stop")
        return [float(start)]
    return sorted(float(e) for e in np.linspace(start, stop, count))


@main.command()
@state_option
@click.option("--start", type=float, required=True, help="First epsilon.")
@click.option("--stop", type=float, required=True, help="Last epsilon (inclusive).")
@click.option("--count", type=int, required=True, help="Number of epsilon values.")
@output_options
def sweep(state_spec, start, stop, count, fmt, out):
    """Classify the interior NE across a range of draw premiums."""
    s = parse_state(state_spec)
    epsilons = sweep_epsilons(start, stop, count)

    def build() -> str:
        reports = [classify(make_rsp_matrix(e), s) for e in epsilons]
        rows = [_report_row(r) for r in reports]
        if fmt == "json":
            return render_json([dict(zip(SWEEP_HEADER, row)) for row in rows])
        if fmt == "csv":
            return render_csv(SWEEP_HEADER, rows)
        return render_text_table(SWEEP_HEADER, rows)

    emit(_guarded(build), out)


@main.command()
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=DEFAULT_SEED, show_default=True)
@output_options
def verify(seed, fmt, out):
    """Run every cross-check suite; exit status 1 if any suite fails."""
    results = run_all(seed)
    failed = [r.name for r in results if not r.passed]

    def _jsonable(v):
        if isinstance(v, dict):
            return {k: _jsonable(x) for k, x in v.items()}
        if isinstance(v, (np.bool_, bool)):
            return bool(v)
        if isinstance(v, (np.floating, float)):
            return float(v)
        return v

    if fmt == "json":
        text = render_json({"seed": seed, "passed": not failed, "suites": [_jsonable(r.to_dict()) for r in results]})
    elif fmt == "csv":
        text = render_csv(
            ["suite", "passed", "max_deviation", "tolerance"],
            [[r.name, "PASS" if r.passed else "FAIL", float(r.max_deviation), r.tolerance] for r in results],
        )
    else:
        lines = []
        for r in results:
            lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28} max_dev={r.max_deviation:.3e} tol={r.tolerance:g}\n")
            for k, v in r.details.items():
                lines.append(f"      {k}: {_jsonable(v)}\n")
        lines.append(f"{'ALL SUITES PASSED' if not failed else 'FAILED: ' + ', '.join(failed)}\n")
        text = "".join(lines)
    emit(text, out)
    if failed:
        sys.exit(1)


@main.command()
@game_options
@state_option
@click.option("--incumbent", default=None, help="Resident strategy 'p,p1' (default: the interior NE).")
@click.option("--mutant", required=True, help="Mutant strategy 'p,p1'.")
@click.option("--mu0", type=float, default=0.1, show_default=True, help="Initial mutant share.")
@click.option("--eta", type=float, default=dynamics.DEFAULT_ETA, show_default=True, help="Replicator step size.")
@click.option("--steps", type=int, default=2000, show_default=True, help="Maximum number of updates.")
@output_options
def invade(epsilon, game, state_spec, incumbent, mutant, mu0, eta, steps, fmt, out):
    """Replicator trace of a mutant invading a resident population."""
    m = resolve_game(epsilon, game)
    s = parse_state(state_spec)
    v = parse_strategy(mutant, "--mutant")
    if incumbent is not None:
        u = parse_strategy(incumbent, "--incumbent")
    else:
        sol = _guarded(lambda: solve_interior_ne(m, s))
        if not sol.found:
            raise ConfigError("--incumbent", f"no interior NE to default to (solver status {sol.status})")
        u = sol.candidate

    trace = _guarded(lambda: dynamics.simulate_invasion(u, v, mu0, m, s, eta, steps))
    summary = f"final_mu={trace.final_mu!r} outcome={trace.outcome}"
    if fmt == "csv":
        emit(trace.to_csv(), out)
        click.echo(summary, err=True)
    elif fmt == "json":
        emit(render_json({
            "incumbent": {"p": u.p, "p1": u.p1},
            "mutant": {"p": v.p, "p1": v.p1},
            "trace": [r.__dict__ for r in trace.rows],
            "final_mu": trace.final_mu,
            "outcome": trace.outcome,
        }), out)
    else:
        table = render_text_table(
            ["step", "mu", "f_incumbent", "f_mutant"],
            [[r.step, r.mu, r.f_incumbent, r.f_mutant] for r in trace.rows],
        )
        emit(table + summary + "\n", out)


if __name__ == "__main__":
    main()

"""
CLI interface for arithdyn using typer.
"""
import csv
import importlib
import io
import json
import sys
from contextlib import contextmanager
from enum import Enum
from fractions import Fraction
from types import ModuleType
from typing import Annotated, Callable, Iterator, Optional

import click
import mpmath
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .adic import Extremal, iterate, odometer_equivalence_check
from .beta_core import (
    classify_compactum,
    expansion_of_one,
    greedy_expand,
    greedy_two_sided,
    lazy_expand,
    parry_entropy,
)
from .beta_count import (
    Block,
    block_matrix_count,
    branching_explore,
    brute_force_count,
    count_block,
    count_equivalent_words,
    split_blocks,
)
from .beta_unique import (
    classify_unique_set,
    doubling_hole_survivor_count,
    doubling_hole_threshold,
    generalized_critical_base,
    is_unique_expansion,
    unique_entropy_estimate,
    unique_word_count,
)
from .config import SCHEMA_VERSION, Settings, configure_logging
from .digits import parse_digits
from .errors import (
    ArithdynError,
    BoundaryUndecidedError,
    PrecisionError,
    UndecidableAtDepthError,
)
from .exactnum import Approx, FieldElement, refine, to_mpf
from .parsing import (
    parse_alpha,
    parse_base,
    parse_compactum,
    parse_element,
    parse_int_list,
    parse_matrix,
    parse_path,
    parse_real,
    parse_window,
)
from .rotation import (
    digit_statistics,
    integer_encode1,
    integer_encode2,
    limit_theorem_conditions,
    markov_measure,
    model1_compactum,
    model2_compactum,
    ostrowski_encode,
    ostrowski_encode1,
    psi1,
    psi2,
    sample_digits,
    unique_rotational_analysis,
)
from .toral import (
    HomoclinicPoint,
    ToralAutomorphism,
    bac_search,
    finitary_probe,
    homoclinic_eval,
    preimage_count,
    shift_commutation_check,
    two_sided_admissible,
)

console = Console()

EXIT_ERROR = 1
EXIT_UNDECIDED = 2
EXIT_PRECISION = 3


class ExpansionMode(str, Enum):
    greedy = "greedy"
    lazy = "lazy"
    two_sided = "two-sided"


class Model(str, Enum):
    one = "1"
    two = "2"


def version_callback(value: bool):
    if value:
        console.print(f"arithdyn version {__version__}")
        raise typer.Exit()


@contextmanager
def _session(ctx: typer.Context) -> Iterator[Settings]:
    """Run a command at the configured precision, mapping errors to exit codes."""
    settings: Settings = ctx.obj or Settings()
    try:
        with mpmath.workdps(settings.precision):
            yield settings
    except (UndecidableAtDepthError, BoundaryUndecidedError) as e:
        console.print(f"[yellow]Undecided:[/yellow] {e}")
        raise typer.Exit(code=EXIT_UNDECIDED)
    except PrecisionError as e:
        console.print(f"[red]Precision exhausted:[/red] {e}")
        raise typer.Exit(code=EXIT_PRECISION)
    except ArithdynError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(code=EXIT_ERROR)


def _number(x, digits: int):
    """A JSON-ready number; inexact values carry their error bound."""
    if isinstance(x, (bool, int)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, FieldElement):
        if x.is_rational:
            return str(x.coords[0])
        return refine(x, mpmath.mpf(10) ** -(digits + 5)).to_json(digits)
    if isinstance(x, Approx):
        return x.to_json(digits)
    if isinstance(x, float):
        return x
    return Approx(mpmath.mpf(x), abs(mpmath.mpf(x)) * mpmath.mpf(10) ** (5 - mpmath.mp.dps)).to_json(digits)


def _plain_value(value) -> str:
    if isinstance(value, dict) and "value" in value:
        bound = value.get("error_bound", "0")
        return value["value"] if bound in ("0", "0.0") else f"{value['value']} ± {bound}"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_plain_value(v)}" for k, v in value.items())
    if isinstance(value, list):
        return " ".join(_plain_value(v) for v in value)
    if value is None:
        return "-"
    return str(value)


def _emit(
    settings: Settings,
    payload: dict,
    title: str,
    rows: Optional[list[list]] = None,
    plain: Optional[Callable[[], None]] = None,
) -> None:
    """
    Write a result in the configured output format.

    Args:
        settings: Supplies the output format.
        payload: JSON body; ``schema_version`` is added.
        title: Heading for the plain table.
        rows: CSV rows (header first); defaults to key,value pairs.
        plain: Custom plain renderer; defaults to a key/value table.
    """
    if settings.output == "json":
        typer.echo(json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True))
    elif settings.output == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if rows is None:
            rows = [["key", "value"]] + [[k, _plain_value(v)] for k, v in payload.items()]
        writer.writerows(rows)
        typer.echo(buffer.getvalue(), nl=False)
    elif plain is not None:
        plain()
    else:
        table = Table(title=title, show_header=False)
        table.add_column("key", style="cyan")
        table.add_column("value")
        for key, value in payload.items():
            table.add_row(key, _plain_value(value))
        console.print(table)


app = typer.Typer(
    name="arithdyn",
    help="Arithmetic expansions and their dynamics: beta-expansions, rotations, adic maps, toral codings.",
    add_completion=False,
    no_args_is_help=True,
)
beta_app = typer.Typer(help="Greedy, lazy and two-sided beta-expansions; Parry data.", no_args_is_help=True)
unique_app = typer.Typer(help="Unique expansions: thresholds, classification, entropy.", no_args_is_help=True)
count_app = typer.Typer(help="Golden-ratio word classes, blocks and representation trees.", no_args_is_help=True)
rotate_app = typer.Typer(help="Continued fractions and Ostrowski (rotational) expansions.", no_args_is_help=True)
adic_app = typer.Typer(help="Adic transformations on Markov compacta.", no_args_is_help=True)
toral_app = typer.Typer(help="Arithmetic codings of toral automorphisms.", no_args_is_help=True)
app.add_typer(beta_app, name="beta")
app.add_typer(unique_app, name="unique")
app.add_typer(count_app, name="count")
app.add_typer(rotate_app, name="rotate")
app.add_typer(adic_app, name="adic")
app.add_typer(toral_app, name="toral")


@app.callback()
def callback(
    ctx: typer.Context,
    precision: Annotated[
        Optional[int],
        typer.Option("--precision", "-p", help="Internal decimal digits (default 50)."),
    ] = None,
    seed: Annotated[
        Optional[int],
        typer.Option("--seed", help="Seed for randomized commands (default 0)."),
    ] = None,
    output: Annotated[
        Optional[str],
        typer.Option("--output", "-o", help="Output format: plain, json or csv."),
    ] = None,
    max_depth: Annotated[
        Optional[int],
        typer.Option("--max-depth", help="Default digit count for expansions (default 64)."),
    ] = None,
    verbose: Annotated[
        bool,
        typer.Option("--verbose", help="Log search progress to stderr."),
    ] = False,
    version: Annotated[
        Optional[bool],
        typer.Option(
            "--version",
            "-v",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit.",
        ),
    ] = None,
):
    """
    Exact and controlled-precision tools for digit expansions in real bases,
    rotations and toral automorphisms.

    \b
    Examples:
      arithdyn beta expand --base golden --x 1/2 --digits 9
      arithdyn unique classify --base 1.9
      arithdyn count block --params 2
      arithdyn rotate cf --alpha sqrt:2:-1:1
      arithdyn toral preimages --matrix "1,1;1,0" --xi 1
    """
    try:
        settings = Settings.from_env(
            precision=precision, seed=seed, output=output, max_depth=max_depth, verbose=verbose
        )
    except ArithdynError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(code=EXIT_ERROR)
    except ValueError as e:
        console.print(f"[red]Error:[/red] Invalid ARITHDYN_* environment value: {e}")
        raise typer.Exit(code=EXIT_ERROR)
    configure_logging(settings.verbose)
    ctx.obj = settings


BaseOpt = Annotated[str, typer.Option("--base", "-b", help="Base: golden, sqrt:2, poly:-1,-1,1, 3/2, 1.9, ...")]
AlphaOpt = Annotated[str, typer.Option("--alpha", "-a", help="Rotation number: golden, sqrt:d:a:b, cf:1,(2), decimal.")]
MatrixOpt = Annotated[str, typer.Option("--matrix", "-m", help="Integer matrix, rows separated by ';'.")]


# --- beta -----------------------------------------------------------------


@beta_app.command("expand")
def beta_expand(
    ctx: typer.Context,
    base: BaseOpt,
    x: Annotated[str, typer.Option("--x", help="Point to expand: 1/2, 0.3, elt:c0,c1.")],
    digits: Annotated[Optional[int], typer.Option("--digits", "-n", help="Digits to compute.")] = None,
    mode: Annotated[ExpansionMode, typer.Option("--mode", help="Expansion type.")] = ExpansionMode.greedy,
):
    """Expand x in base beta; exact bases report the eventual period."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        value = parse_real(x, beta)
        n = digits or settings.max_depth
        start = 1
        if mode is ExpansionMode.greedy:
            seq = greedy_expand(value, beta, n)
        elif mode is ExpansionMode.lazy:
            seq = lazy_expand(value, beta, n)
        else:
            expansion = greedy_two_sided(value, beta, n)
            seq, start = expansion.digits, expansion.start_index
        payload = {
            "base": str(beta),
            "x": x,
            "mode": mode.value,
            "digits": seq.render(n),
            "expansion": seq.render(),
            "start_index": start,
            "sequence": seq.to_json(),
        }

        def plain():
            console.print(f"{seq.render(n)}…" if not seq.is_finite or seq.truncated else seq.render(n))
            console.print(f"[dim]{mode.value} expansion {seq.render()} from index {start}[/dim]")

        _emit(settings, payload, "Expansion", plain=plain)


@beta_app.command("parry")
def beta_parry(
    ctx: typer.Context,
    base: BaseOpt,
    bound: Annotated[Optional[int], typer.Option("--bound", help="Orbit steps for exact bases.")] = None,
):
    """Greedy expansion of 1 and the Parry sequence."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        parry = expansion_of_one(beta, bound=bound or settings.search_bound)
        payload = {
            "base": str(beta),
            "expansion_of_one": parry.a_prime.render(),
            "parry_sequence": parry.a.render(),
            "exhausted": parry.exhausted,
            "exact": parry.exact,
        }
        _emit(settings, payload, "Parry data")
        if parry.exhausted:
            raise typer.Exit(code=EXIT_UNDECIDED)


@beta_app.command("classify")
def beta_classify(
    ctx: typer.Context,
    base: BaseOpt,
    bound: Annotated[Optional[int], typer.Option("--bound", help="Orbit steps before giving up.")] = None,
):
    """Decide whether the beta-compactum is SFT, sofic or neither."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        kind = classify_compactum(beta, bound or settings.search_bound)
        payload = {
            "base": str(beta),
            "kind": kind.value,
            "entropy": _number(parry_entropy(beta), settings.print_digits),
        }
        _emit(settings, payload, "Compactum")


# --- unique ---------------------------------------------------------------


@unique_app.command("classify")
def unique_classify(
    ctx: typer.Context,
    base: BaseOpt,
    resolution: Annotated[float, typer.Option("--resolution", help="Threshold resolution.")] = 1e-9,
):
    """Size of the set of points with a unique 0-1 expansion."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        verdict = classify_unique_set(beta, resolution)
        payload = {"base": str(beta), "category": verdict.category.value, "witnesses": verdict.witnesses}
        _emit(settings, payload, "Uniqueness")


@unique_app.command("threshold")
def unique_threshold(
    ctx: typer.Context,
    alphabet: Annotated[int, typer.Option("--alphabet", "-N", help="Digits 0..N-1.")] = 2,
):
    """Smallest base in which 1 has a unique expansion (Komornik-Loreti for N = 2)."""
    with _session(ctx) as settings:
        value = generalized_critical_base(alphabet)
        payload = {"alphabet": alphabet, "critical_base": _number(value, settings.print_digits)}
        _emit(settings, payload, "Critical base")


@unique_app.command("check")
def unique_check(
    ctx: typer.Context,
    base: BaseOpt,
    digits: Annotated[str, typer.Option("--digits", "-d", help="Sequence such as 0(10) or 110.")],
):
    """Whether a 0-1 sequence is the only expansion of its value."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        check = is_unique_expansion(parse_digits(digits, 1), beta)
        payload = {"base": str(beta), "digits": digits, "unique": check.unique, "endpoint": check.endpoint}
        _emit(settings, payload, "Unique expansion")


@unique_app.command("entropy")
def unique_entropy(
    ctx: typer.Context,
    base: BaseOpt,
    n: Annotated[int, typer.Option("--n", help="Word length.")] = 20,
):
    """Count length-n words of the uniqueness shift and the entropy estimate."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        payload = {
            "base": str(beta),
            "n": n,
            "words": unique_word_count(beta, n),
            "entropy_estimate": unique_entropy_estimate(beta, n),
        }
        _emit(settings, payload, "Uniqueness entropy")


@unique_app.command("hole")
def unique_hole(
    ctx: typer.Context,
    delta: Annotated[str, typer.Option("--delta", help="Hole [delta, 1 - delta] for the doubling map.")],
    n: Annotated[int, typer.Option("--n", help="Word length.")] = 20,
):
    """Survivor words of the doubling map with a symmetric hole."""
    with _session(ctx) as settings:
        d = parse_real(delta)
        threshold = doubling_hole_threshold()
        payload = {
            "delta": delta,
            "n": n,
            "survivors": doubling_hole_survivor_count(to_mpf(d), n),
            "threshold": _number(threshold, settings.print_digits),
            "positive_dimension": bool(to_mpf(d) > threshold.upper),
        }
        _emit(settings, payload, "Doubling map with hole")


# --- count ----------------------------------------------------------------


@count_app.command("word")
def count_word(
    ctx: typer.Context,
    word: Annotated[str, typer.Option("--word", "-w", help="0-1 word.")],
    strict: Annotated[bool, typer.Option("--strict", help="Reject words containing 11.")] = False,
    brute: Annotated[bool, typer.Option("--brute", help="Cross-check by enumeration.")] = False,
):
    """Number of 0-1 words of the same length with the same golden-ratio value."""
    with _session(ctx) as settings:
        count = count_equivalent_words(word, strict=strict)
        split = split_blocks(word)
        payload = {
            "word": word,
            "count": count,
            "leading_zeros": split.leading_zeros,
            "blocks": [str(b) for b in split.blocks],
            "residual": split.residual,
        }
        if brute:
            payload["brute_force"] = brute_force_count(word)
        _emit(settings, payload, "Equivalent words")


@count_app.command("block")
def count_block_command(
    ctx: typer.Context,
    params: Annotated[str, typer.Option("--params", help="Block parameters a1,...,ar.")],
):
    """Class size of the block B(a1, ..., ar)."""
    with _session(ctx) as settings:
        block = Block(tuple(parse_int_list(params)))
        count = count_block(block)
        payload = {
            "block": str(block),
            "word": block.render(),
            "count": count,
            "matrix_count": block_matrix_count(block),
        }
        _emit(settings, payload, "Block", plain=lambda: console.print(str(count)))


@count_app.command("explore")
def count_explore(
    ctx: typer.Context,
    base: BaseOpt,
    x: Annotated[str, typer.Option("--x", help="Point to represent.")],
    depth: Annotated[int, typer.Option("--depth", help="Tree depth.")] = 12,
    q: Annotated[int, typer.Option("--q", help="Alphabet size.")] = 2,
    prefixes: Annotated[bool, typer.Option("--prefixes", help="List the surviving prefixes.")] = False,
):
    """Explore every representation of x up to a depth."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        summary = branching_explore(parse_real(x, beta), beta, q, depth, keep_prefixes=prefixes)
        payload = {
            "base": str(beta),
            "x": x,
            "depth": depth,
            "paths": summary.paths,
            "choice_nodes": summary.choice_nodes,
            "per_level": summary.distinct_prefixes,
            "capped": summary.capped,
        }
        if prefixes:
            payload["prefixes"] = ["".join(map(str, p)) for p in summary.prefixes]
        rows = [["level", "prefixes"]] + [[k, c] for k, c in enumerate(summary.distinct_prefixes)]
        _emit(settings, payload, "Representation tree", rows=rows)


# --- rotate ---------------------------------------------------------------


def _rotation_point(text: str, cf):
    """Rationals and decimals, or elements of the field of an exact alpha."""
    if cf.exact:
        try:
            return parse_real(text)
        except ArithdynError:
            return parse_element(text, cf.alpha.field)
    return parse_real(text)


@rotate_app.command("cf")
def rotate_cf(
    ctx: typer.Context,
    alpha: AlphaOpt,
    n: Annotated[int, typer.Option("--n", help="Quotients to list.")] = 10,
):
    """Partial quotients, convergents and residues of alpha."""
    with _session(ctx) as settings:
        cf = parse_alpha(alpha, settings.precision)
        depth = n if cf.known_depth is None else min(n, cf.known_depth)
        payload = {
            "alpha": alpha,
            "continued_fraction": cf.render(depth),
            "quotients": cf.quotients(depth),
            "convergents": [f"{cf.p(k)}/{cf.q(k)}" for k in range(1, depth + 2)],
            "residues": [_number(cf.residue(k), settings.print_digits) for k in range(depth + 1)],
            "identity_holds": cf.identity_check(depth),
        }
        rows = [["n", "a_n", "p_n", "q_n", "alpha_n"]] + [
            [k, cf.quotient(k) if k else "", cf.p(k), cf.q(k), mpmath.nstr(cf.residue_mpf(k), settings.print_digits)]
            for k in range(depth + 1)
        ]
        _emit(settings, payload, "Continued fraction", rows=rows)


@rotate_app.command("encode")
def rotate_encode(
    ctx: typer.Context,
    alpha: AlphaOpt,
    x: Annotated[str, typer.Option("--x", help="Point of the circle.")],
    n: Annotated[int, typer.Option("--n", help="Digits.")] = 20,
    model: Annotated[Model, typer.Option("--model", help="Ostrowski model.")] = Model.two,
):
    """Ostrowski digits of a point and the value they reconstruct."""
    with _session(ctx) as settings:
        cf = parse_alpha(alpha, settings.precision)
        point = _rotation_point(x, cf)
        if model is Model.two:
            seq = ostrowski_encode(point, cf, n)
            value = psi2(seq, cf, n)
        else:
            seq = ostrowski_encode1(point, cf, n)
            value = psi1(seq, cf, n)
        payload = {
            "alpha": alpha,
            "x": x,
            "model": int(model.value),
            "digits": list(seq.prefix(n)),
            "finite": seq.is_finite and not seq.truncated,
            "value": _number(value, settings.print_digits),
        }
        _emit(settings, payload, f"Model {model.value} digits")


@rotate_app.command("integers")
def rotate_integers(
    ctx: typer.Context,
    alpha: AlphaOpt,
    value: Annotated[int, typer.Option("--value", "-N", help="Integer to encode.")],
    model: Annotated[Model, typer.Option("--model", help="Ostrowski model.")] = Model.two,
):
    """Ostrowski representation of an integer (model 2 allows negatives)."""
    with _session(ctx) as settings:
        cf = parse_alpha(alpha, settings.precision)
        if model is Model.one:
            seq = integer_encode1(value, cf)
        else:
            seq = integer_encode2(value, cf, settings.search_bound)
        payload = {"alpha": alpha, "N": value, "model": int(model.value), "digits": list(seq.preperiod)}
        _emit(settings, payload, "Integer digits")


@rotate_app.command("unique")
def rotate_unique(
    ctx: typer.Context,
    alpha: AlphaOpt,
    horizon: Annotated[int, typer.Option("--horizon", help="Levels used for numeric diagnostics.")] = 200,
):
    """Size of the set of points with a unique rotational expansion."""
    with _session(ctx) as settings:
        cf = parse_alpha(alpha, settings.precision)
        report = unique_rotational_analysis(cf, horizon)
        _emit(settings, {"alpha": alpha, **report.to_json(settings.print_digits)}, "Unique rotational expansions")


@rotate_app.command("stats")
def rotate_stats(
    ctx: typer.Context,
    alpha: AlphaOpt,
    n: Annotated[int, typer.Option("--n", help="Digits per sample.")] = 1000,
    count: Annotated[int, typer.Option("--count", help="Samples.")] = 1000,
    model: Annotated[Model, typer.Option("--model", help="Ostrowski model.")] = Model.two,
):
    """Moments of Ostrowski digit sums under the Markov measure."""
    with _session(ctx) as settings:
        cf = parse_alpha(alpha, settings.precision)
        measure = markov_measure(cf, int(model.value))
        samples = sample_digits(measure, n, count, settings.seed)
        stats = digit_statistics(samples)
        conditions = limit_theorem_conditions(cf, n)
        payload = {
            "alpha": alpha,
            "model": measure.model,
            "seed": settings.seed,
            **stats._asdict(),
            "lln": conditions.lln,
            "slln": conditions.slln,
            "clt": conditions.clt,
        }
        _emit(settings, payload, "Digit sum statistics")


# --- adic -----------------------------------------------------------------


@adic_app.command("succ")
def adic_succ(
    ctx: typer.Context,
    path: Annotated[str, typer.Option("--path", help="Digits x1,...,xk, level 1 first.")],
    compactum: Annotated[
        Optional[str], typer.Option("--compactum", "-c", help="golden, odometer:2,3,2 or JSON.")
    ] = None,
    alpha: Annotated[Optional[str], typer.Option("--alpha", "-a", help="Use a rotational compactum.")] = None,
    model: Annotated[Model, typer.Option("--model", help="Rotational model for --alpha.")] = Model.two,
    steps: Annotated[int, typer.Option("--steps", help="Steps; negative for predecessors.")] = 1,
):
    """Iterate the adic transformation on a finite path prefix."""
    with _session(ctx) as settings:
        if (compactum is None) == (alpha is None):
            console.print("[red]Error:[/red] Give exactly one of --compactum and --alpha")
            raise typer.Exit(code=EXIT_ERROR)
        if alpha is not None:
            cf = parse_alpha(alpha, settings.precision)
            space = model2_compactum(cf) if model is Model.two else model1_compactum(cf)
        else:
            space = parse_compactum(compactum)
        orbit = iterate(parse_path(path), space, steps)
        payload = {
            "compactum": space.name,
            "paths": [list(p.digits) for p in orbit.paths],
            "stopped": orbit.stopped.value if orbit.stopped else None,
        }
        rows = [["step", "path"]] + [[i, str(p)] for i, p in enumerate(orbit.paths)]

        def plain():
            for p in orbit.paths[1:] or orbit.paths:
                console.print(str(p))
            if orbit.stopped is Extremal.MAXIMAL:
                console.print("[yellow]Maximal path: the successor leaves the prefix[/yellow]")
            elif orbit.stopped is Extremal.MINIMAL:
                console.print("[yellow]Minimal path: the predecessor leaves the prefix[/yellow]")

        _emit(settings, payload, "Adic orbit", rows=rows, plain=plain)


@adic_app.command("odometer")
def adic_odometer(
    ctx: typer.Context,
    radices: Annotated[str, typer.Option("--radices", help="Mixed radices r1,r2,...")],
    n_max: Annotated[int, typer.Option("--n-max", help="Largest N checked.")],
):
    """Check N odometer steps against the mixed-radix encoding of N."""
    with _session(ctx) as settings:
        ok = odometer_equivalence_check(parse_int_list(radices), n_max)
        _emit(settings, {"radices": radices, "n_max": n_max, "agrees": ok}, "Odometer")
        if not ok:
            raise typer.Exit(code=EXIT_ERROR)


# --- toral ----------------------------------------------------------------


def _homoclinic(matrix: str, xi: str, n: Optional[str]) -> HomoclinicPoint:
    automorphism = ToralAutomorphism(parse_matrix(matrix))
    element = parse_element(xi, automorphism.field)
    if n is not None:
        return HomoclinicPoint.via(automorphism, parse_int_list(n), element)
    return HomoclinicPoint(element, automorphism)


XiOpt = Annotated[str, typer.Option("--xi", help="Homoclinic parameter: 1, elt:c0,c1, inv:elt:-1,2.")]
NOpt = Annotated[Optional[str], typer.Option("--n", help="Vector n for B_M(n) when M is not a companion.")]


@toral_app.command("eval")
def toral_eval(
    ctx: typer.Context,
    matrix: MatrixOpt,
    xi: XiOpt,
    window: Annotated[str, typer.Option("--window", "-w", help="Digits with offset, e.g. 101@-1.")],
    n: NOpt = None,
):
    """Evaluate the arithmetic coding h_t on a finite two-sided window."""
    with _session(ctx) as settings:
        t = _homoclinic(matrix, xi, n)
        s = parse_window(window)
        point = homoclinic_eval(t, s)
        payload = {
            "matrix": str(t.automorphism),
            "window": s.render(),
            "admissible": two_sided_admissible(s, t.beta),
            "point": point.to_json(settings.print_digits),
            "shift_commutes": shift_commutation_check(t, s),
        }
        _emit(settings, payload, "Toral point")


@toral_app.command("preimages")
def toral_preimages(
    ctx: typer.Context,
    matrix: MatrixOpt,
    xi: XiOpt,
    n: NOpt = None,
):
    """Number of preimages of a generic point under h_t."""
    with _session(ctx) as settings:
        t = _homoclinic(matrix, xi, n)
        k = preimage_count(t)
        payload = {
            "matrix": str(t.automorphism),
            "xi": str(t.xi),
            "preimages": k,
            "pisot": t.automorphism.is_pisot,
            "hyperbolicity_verified": t.automorphism.hyperbolicity_verified,
        }
        _emit(settings, payload, "Preimage count")


@toral_app.command("bac")
def toral_bac(
    ctx: typer.Context,
    matrix: MatrixOpt,
    bound: Annotated[int, typer.Option("--bound", help="Search |n|_inf <= bound.")] = 10,
):
    """Search for n with f_M(n) = +-1 (a bijective arithmetic coding)."""
    with _session(ctx) as settings:
        result = bac_search(ToralAutomorphism(parse_matrix(matrix)), bound)
        payload = {
            "matrix": matrix,
            "found": result.found,
            "solution": list(result.solution) if result.solution else None,
            "k_min": result.k_min,
            "k_min_proven": result.found,
            "bound": result.bound,
        }
        _emit(settings, payload, "Bijective arithmetic coding")
        if not result.found:
            raise typer.Exit(code=EXIT_UNDECIDED)


@toral_app.command("probe")
def toral_probe(
    ctx: typer.Context,
    base: BaseOpt,
    samples: Annotated[int, typer.Option("--samples", help="Random elements of Z[beta]_+.")] = 20,
    delta: Annotated[str, typer.Option("--delta", help="Upper bound for the perturbation f.")] = "1/10",
    depth: Annotated[int, typer.Option("--depth", help="Candidates tried per sample.")] = 50,
):
    """Heuristic evidence for the weakly finitary property of a Pisot base."""
    with _session(ctx) as settings:
        beta = parse_base(base, settings.precision)
        report = finitary_probe(beta, samples, parse_real(delta), depth, settings.seed)
        payload = {
            "base": str(beta),
            "samples": report.samples,
            "successes": report.successes,
            "unknown": report.unknown,
            "success_rate": report.success_rate,
        }

        def plain():
            console.print(
                Panel(
                    f"{report.successes}/{report.samples} samples found a finite x + f; "
                    f"{report.unknown} unknown at depth {depth}",
                    title=f"[green]Finitary probe[/green] {beta}",
                )
            )

        _emit(settings, payload, "Finitary probe", plain=plain)


def _click_exceptions(command: click.Command) -> ModuleType:
    """The ``exceptions`` module of the click package ``command`` was built from.

    typer may bundle its own copy of click, whose exception classes differ
    from those of the installed ``click``.
    """
    for cls in type(command).__mro__:
        package, _, name = cls.__module__.rpartition(".")
        if cls.__name__ == "Command" and name == "core":
            return importlib.import_module(f"{package}.exceptions")
    return click.exceptions


def run(argv: Optional[list[str]] = None) -> int:
    """
    Run the CLI on ``argv`` and return the exit code.

    Usage errors exit with 1 rather than click's 2, which is reserved for
    undecided searches.
    """
    command = typer.main.get_command(app)
    errors = _click_exceptions(command)
    try:
        result = command.main(args=argv, prog_name="arithdyn", standalone_mode=False)
    except errors.Exit as e:
        return e.exit_code
    except errors.ClickException as e:
        e.show()
        return EXIT_ERROR
    except errors.Abort:
        return EXIT_ERROR
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

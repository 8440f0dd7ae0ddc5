"""Command line entry point ``cmzv``.

Every command prints one JSON document ``{"metadata": ..., "result": ...}`` (``mine``
prints one per relation). Precision options count digits in ``1/theta`` and are
converted to v-exponents with the factor ``(q-1) q^R`` of the uniformizer.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

import dataclasses
import functools
import json
import logging
import re
import sys
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import click

from funcfield.multizeta.configuration import Configuration
from funcfield.multizeta.exceptions import (
    BudgetExceededError,
    EmptyWordError,
    FieldMismatchError,
    FieldSizeError,
    IndexSyntaxError,
    InsufficientPrecisionError,
    InvalidConfigurationError,
    InvalidFieldError,
    TowerDepthError,
    TwistError,
)
from funcfield.multizeta.gf import GFElem, canonical_generator, color_field
from funcfield.multizeta.powersum import Index, cmzv, nested_power_sum
from funcfield.multizeta.relmine import cross_weight_scan, enumerate_monomials, mine_relations
from funcfield.multizeta.ringa import function_field
from funcfield.multizeta.scalars import UniformizerSpec
from funcfield.multizeta.stuffle import graded_relation, verify_relation, zeta_relation
from funcfield.multizeta.tate import omega
from funcfield.multizeta.tmotive import (
    MotiveSpec,
    at_poly,
    build_triv,
    check_inverse,
    check_trivialization,
    phi_determinant_at_zero,
)

logger = logging.getLogger(__name__)

_COLOR = re.compile(r"^\s*(?:g(?:\^(\d+))?|1)\s*$")

USAGE_ERRORS = (
    IndexSyntaxError,
    EmptyWordError,
    InvalidFieldError,
    FieldSizeError,
    FieldMismatchError,
    TowerDepthError,
    TwistError,
    BudgetExceededError,
    InsufficientPrecisionError,
    InvalidConfigurationError,
)


@dataclasses.dataclass(frozen=True)
class JobConfig:
    """What a command was asked to do, recorded in the output metadata."""

    command: str
    q: int
    r: int = 1
    index: Optional[str] = None
    colors: Optional[str] = None
    t_deg: Optional[int] = None
    prec_digits: Optional[int] = None
    d_max: Optional[int] = None
    output: Optional[str] = None
    flags: Mapping[str, Any] = dataclasses.field(default_factory=dict)

    def metadata(self) -> Dict[str, Any]:
        """Job description with the configured limits and defaults."""
        from funcfield.multizeta import __version__

        data = dataclasses.asdict(self)
        data["flags"] = dict(self.flags)
        data["configuration"] = dict(Configuration.current().as_dict())
        data["version"] = __version__
        return data


def parse_colors(text: str, q: int, r: int) -> List[GFElem]:
    """Colors ``g^k`` of ``F_{q^r}``, ``g`` being its canonical generator.

    Raises
    ------
    IndexSyntaxError
        An entry is not of the form ``g``, ``g^k`` or ``1``.
    """
    generator = canonical_generator(color_field(q, r))
    colors = []
    for entry in text.split(","):
        match = _COLOR.match(entry)
        if match is None:
            raise IndexSyntaxError(text, f"cannot read the color {entry!r}")
        if entry.strip() == "1":
            colors.append(generator**0)
        else:
            colors.append(generator ** int(match.group(1) or 1))
    return colors


def parse_index(
    text: str, q: int, r: int, colors: Optional[str] = None
) -> Tuple[Tuple[int, ...], List[GFElem]]:
    """Exponents and colors from ``"s1,s2:g^k1,g^k2"`` or from separate strings.

    Missing colors default to 1.

    Raises
    ------
    IndexSyntaxError
        The text is malformed or the lengths differ.
    """
    if ":" in text:
        if colors is not None:
            raise IndexSyntaxError(text, "colors are given twice")
        text, colors = text.split(":", 1)
    try:
        s = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise IndexSyntaxError(text, "exponents must be integers") from e
    if min(s) < 1:
        raise IndexSyntaxError(text, "exponents must be positive")
    xi = parse_colors(colors, q, r) if colors else [color_field(q, r).one] * len(s)
    if len(xi) != len(s):
        raise IndexSyntaxError(text, f"{len(s)} exponents for {len(xi)} colors")
    return s, xi


def _uniformizer(q: int, r: int, depth: int = 0) -> UniformizerSpec:
    return UniformizerSpec(q, depth, color_field(q, r))


def emit(
    job: JobConfig,
    payload: Any,
    fmt: str = "json",
    stream=None,
    text: Optional[str] = None,
) -> None:
    """Write one result.

    JSON output is deterministic (sorted keys). Text output prints ``text`` when given,
    the indented JSON otherwise.
    """
    stream = sys.stdout if stream is None else stream
    result = payload.to_json_dict() if hasattr(payload, "to_json_dict") else payload
    if fmt == "text":
        stream.write((text if text is not None else json.dumps(result, indent=2)) + "\n")
        return
    document = {"metadata": job.metadata(), "result": result}
    stream.write(json.dumps(document, sort_keys=True) + "\n")


def emit_lines(job: JobConfig, payloads: Iterable[Any], stream=None) -> None:
    """Write one JSON document per payload."""
    for payload in payloads:
        emit(job, payload, "json", stream)


def _common_options(command: Callable) -> Callable:
    @click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
    @click.option("--output", type=click.Path(dir_okay=False), default=None)
    @click.option("--verbose", is_flag=True, help="Log debug messages on stderr.")
    @functools.wraps(command)
    def wrapper(*args, verbose: bool, **kwargs):
        logging.basicConfig(
            level=logging.DEBUG if verbose else logging.WARNING,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return command(*args, **kwargs)

    return wrapper


def _field_options(command: Callable) -> Callable:
    command = click.option("--r", "r", type=int, default=1, show_default=True)(command)
    return click.option("--q", "q", type=int, required=True)(command)


def _write(job: JobConfig, payload: Any, fmt: str, output: Optional[str], text=None) -> None:
    with click.open_file(output or "-", "w") as stream:
        emit(job, payload, fmt, stream, text)


@click.group()
def cli():
    """Colored multizeta values over F_q[theta]."""


@cli.command()
@_field_options
@click.option("--index", required=True, help='Exponents "s1,s2" or "s1,s2:g^k1,g^k2".')
@click.option("--colors", default=None, help='Colors "g^k1,g^k2".')
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@_common_options
def zeta(q, r, index, colors, prec_digits, fmt, output):
    """Compute a colored multizeta value."""
    prec_digits = prec_digits or Configuration.current().prec_digits
    s, xi = parse_index(index, q, r, colors)
    uspec = _uniformizer(q, r)
    value = cmzv(Index(s, xi), uspec, prec_digits * uspec.scale)
    job = JobConfig("zeta", q, r, index, colors, prec_digits=prec_digits, output=output)
    _write(job, value, fmt, output, value.value.to_text())
    return 0


@cli.command()
@_field_options
@click.option("--index", required=True)
@click.option("--colors", default=None)
@click.option("--d", "d", type=click.IntRange(min=0), required=True)
@_common_options
def powersum(q, r, index, colors, d, fmt, output):
    """Compute the nested power sum S_d of an index."""
    s, xi = parse_index(index, q, r, colors)
    field = color_field(q, r)
    value = nested_power_sum(function_field(q, field), d, Index(s, xi))
    job = JobConfig("powersum", q, r, index, colors, d_max=d, output=output)
    result = {"value": value.to_json_dict(), "degree": value.degree if not value.is_zero else None}
    _write(job, result, fmt, output)
    return 0


@cli.command()
@_field_options
@click.option("--a", "word_a", required=True, help='First word "s1,s2:g^k1,g^k2".')
@click.option("--b", "word_b", required=True, help="Second word.")
@click.option("--d-max", "d_max", type=click.IntRange(min=0), default=3, show_default=True)
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@click.option("--graded", is_flag=True, help="Use the S_d-level product.")
@_common_options
def shuffle(q, r, word_a, word_b, d_max, prec_digits, graded, fmt, output):
    """Expand and verify the stuffle product of two words."""
    prec_digits = prec_digits or Configuration.current().prec_digits
    a, b = (Index(*parse_index(word, q, r)) for word in (word_a, word_b))
    relation = graded_relation(a, b, q) if graded else zeta_relation(a, b, q)
    uspec = _uniformizer(q, r)
    report = verify_relation(relation, uspec, prec_digits * uspec.scale, d_max)
    job = JobConfig(
        "shuffle",
        q,
        r,
        prec_digits=prec_digits,
        d_max=d_max,
        output=output,
        flags={"a": word_a, "b": word_b, "graded": graded},
    )
    _write(job, {"relation": relation.to_json_dict(), "report": report.to_json_dict()}, fmt, output)
    return 0 if report.passed else 1


@cli.command("verify-triv")
@_field_options
@click.option("--index", required=True)
@click.option("--colors", default=None)
@click.option("--tdeg", "t_deg", type=click.IntRange(min=1), default=None)
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@click.option("--depth", type=click.IntRange(min=1), default=None, help="Uniformizer depth.")
@click.option("--t-term-literal", "literal", is_flag=True, help="Run T-products up to h = j.")
@click.option("--inverse", is_flag=True, help="Also check Upsilon Psi = Psi Upsilon = I.")
@_common_options
def verify_triv(q, r, index, colors, t_deg, prec_digits, depth, literal, inverse, fmt, output):
    """Check Psi^(-r) = Phi Psi for the system of an index."""
    prec_digits = prec_digits or Configuration.current().prec_digits
    s, xi = parse_index(index, q, r, colors)
    level = UniformizerSpec(q, depth or r, color_field(q, r))
    ms = MotiveSpec.from_colors(
        q, r, s, xi, depth=depth, t_deg=t_deg, prec=prec_digits * level.scale
    )
    td = build_triv(ms, literal=literal)
    report = check_trivialization(td)
    result = dict(report.to_json_dict())
    result["det_phi_at_zero_nonzero"] = not phi_determinant_at_zero(td).is_zero
    passed = report.passed
    if inverse:
        inverse_report = check_inverse(td)
        result["inverse"] = inverse_report.to_json_dict()
        passed = passed and inverse_report.passed
    job = JobConfig(
        "verify-triv",
        q,
        r,
        index,
        colors,
        t_deg=ms.t_deg,
        prec_digits=prec_digits,
        output=output,
        flags={"t_term_literal": literal, "inverse": inverse, "depth": ms.uspec.depth},
    )
    _write(job, result, fmt, output)
    return 0 if passed else 1


@cli.command("at-poly")
@click.option("--q", "q", type=int, required=True)
@click.option("--n", "n", type=click.IntRange(min=0), required=True)
@_common_options
def at_poly_command(q, n, fmt, output):
    """Print the Anderson-Thakur polynomial H_n."""
    h = at_poly(n, q)
    job = JobConfig("at-poly", q, flags={"n": n}, output=output)
    _write(job, h, fmt, output)
    return 0


@cli.command("omega")
@_field_options
@click.option("--tdeg", "t_deg", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@_common_options
def omega_command(q, r, t_deg, prec_digits, fmt, output):
    """Print the truncated series Omega."""
    prec_digits = prec_digits or Configuration.current().prec_digits
    uspec = _uniformizer(q, r, r)
    series = omega(uspec, t_deg, prec_digits * uspec.scale)
    job = JobConfig("omega", q, r, t_deg=t_deg, prec_digits=prec_digits, output=output)
    _write(job, series, fmt, output)
    return 0


@cli.command()
@_field_options
@click.option("--weight", type=click.IntRange(min=1), required=True)
@click.option("--depth-max", "depth_max", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@click.option("--trivial-colors", is_flag=True, help="Only use the color 1.")
@_common_options
def mine(q, r, weight, depth_max, prec_digits, trivial_colors, fmt, output):
    """Mine F_p-linear relations among monomials of one weight, one record per relation."""
    prec_digits = prec_digits or Configuration.current().prec_digits
    uspec = _uniformizer(q, r)
    colors = [uspec.field.one] if trivial_colors else None
    basis = enumerate_monomials(weight, depth_max, uspec, r, colors)
    result = mine_relations(basis, prec_digits * uspec.scale)
    job = JobConfig(
        "mine",
        q,
        r,
        prec_digits=prec_digits,
        output=output,
        flags={"weight": weight, "depth_max": depth_max, "trivial_colors": trivial_colors},
    )
    with click.open_file(output or "-", "w") as stream:
        if fmt == "text":
            for candidate in result.relations + result.artifacts:
                status = "" if candidate.confirmed else " (unconfirmed)"
                stream.write(f"{candidate}{status}\n")
        else:
            emit_lines(job, result.json_lines(), stream)
    return 0


@cli.command()
@_field_options
@click.option("--w1", type=click.IntRange(min=1), required=True)
@click.option("--w2", type=click.IntRange(min=1), required=True)
@click.option("--depth-max", "depth_max", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--prec", "prec_digits", type=click.IntRange(min=1), default=None)
@click.option("--trivial-colors", is_flag=True, help="Only use the color 1.")
@_common_options
def scan(q, r, w1, w2, depth_max, prec_digits, trivial_colors, fmt, output):
    """Look for relations mixing two weights."""
    if w1 == w2:
        raise click.BadParameter("the two weights must differ", param_hint="--w2")
    prec_digits = prec_digits or Configuration.current().prec_digits
    uspec = _uniformizer(q, r)
    colors = [uspec.field.one] if trivial_colors else None
    report = cross_weight_scan(w1, w2, depth_max, uspec, prec_digits * uspec.scale, r, colors)
    job = JobConfig(
        "scan",
        q,
        r,
        prec_digits=prec_digits,
        output=output,
        flags={"w1": w1, "w2": w2, "depth_max": depth_max, "trivial_colors": trivial_colors},
    )
    _write(job, report, fmt, output)
    return 0 if report.consistent else 1


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except USAGE_ERRORS as e:
        click.echo(f"Error: {e}", err=True)
        return 2
    return code if isinstance(code, int) else 0


def main() -> None:
    """Console script entry point."""
    sys.exit(parse_and_dispatch(sys.argv[1:]))

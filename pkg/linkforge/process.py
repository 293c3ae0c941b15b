"""This module contains the main process: the construction of f from a braid word and its verification."""

from dataclasses import dataclass
import sys

from linkforge import config
from linkforge.braid import BraidWord, invariants, markov_stabilize, parse_braid_word, project_to_singular
from linkforge.connection import PipelineConnection
from linkforge.exceptions import LinkforgeError, ParseError, UnresolvableInterval
from linkforge.sub_process import artifact_process, plot_process
from linkforge.sub_process.assemble import (
    MixedPoly, assemble_f, build_A, build_g, choose_k, choose_m, crossing_data, degree_bound, lift_to_pk,
    radial_weighted_degree, solve_star
)
from linkforge.sub_process.genericity import assign_signs, make_generic
from linkforge.sub_process.parametrize import build_F, interpolation_residual
from linkforge.sub_process.verifier import (
    DegreeSection, IsolationSection, LinkSection, VerificationReport, predicted_crossing_times, radius_schedule,
    verify_degree_bounds, verify_link, verify_weak_isolation
)


@dataclass
class BuildResult:
    """The polynomial of a build together with its trace."""
    word: BraidWord
    f: MixedPoly
    trace: dict
    predicted_times: list[float]


def prepare_word(word: BraidWord) -> tuple[BraidWord, bool]:
    """Stabilize until the word has at least two strands and one letter.

    Returns:
        The word to build from, and whether it was stabilized.
    """
    stabilized = False
    while word.strands < 2 or word.length == 0:
        word = markov_stabilize(word)
        stabilized = True
    return word, stabilized


def build(original: BraidWord, connection: PipelineConnection) -> BuildResult:
    """Run the six construction steps on a braid word.

    Args:
        original: The input braid word.
        connection: The connection of the running command.

    Returns:
        The polynomial f and the trace of every choice made.
    """
    word, stabilized = prepare_word(original)
    if stabilized:
        connection.log_info(f"Stabilized '{original}' on {original.strands} strands to '{word}' on {word.strands} strands.")
    s = word.strands

    connection.log_trace("Step 1: interpolating the strand functions.")
    system = build_F(word)
    residual = interpolation_residual(word, system)
    step1 = {
        "components": [
            {
                "lanes": list(component.lanes),
                "strands": component.strands,
                "nominal_degree": component.nominal_degree,
                "degree": float(component.poly.degree()),
                "poly": component.poly.to_json(),
            }
            for component in system.components
        ],
        "schedule": list(system.schedule),
        "residual": residual,
    }

    connection.log_trace("Step 2: making the crossings generic.")
    system, b_sing, report = make_generic(system, word)
    for perturbation in report.perturbations:
        connection.log_info(f"Perturbation {perturbation.kind} of component {perturbation.component} with size {perturbation.magnitude:.3e}.")
    if report.shift:
        connection.log_info(f"Shifted all crossing times by {report.shift:.6f}.")
    signs = assign_signs(b_sing, word, report, system)
    resolved = BraidWord(s, tuple(zip(b_sing.letters, signs)))
    if project_to_singular(resolved, list(b_sing.crossing_times)) != b_sing:
        raise UnresolvableInterval("The resolved braid does not project to the singular braid.")
    if max(word.length, resolved.length) <= config.MAX_STATE_SUM_CROSSINGS:
        if not invariants(resolved).same_closure(invariants(word)):
            raise UnresolvableInterval(f"The resolved braid '{resolved}' does not close to the input link.")
    connection.log_info(f"Resolved singular braid: '{resolved}'.")

    connection.log_trace("Steps 3 and 4: building g and its lift p_k.")
    g = build_g(system)
    k = choose_k(g, s, word.length)
    p_k = lift_to_pk(g, k, s)
    homogeneous, weighted_degree = radial_weighted_degree(p_k, (2 * k, 1))
    connection.log_info(f"k = {k}, p_k has weighted degree {weighted_degree}.")

    connection.log_trace("Steps 5 and 6: solving for A and assembling f.")
    data = crossing_data(g, b_sing, signs)
    a_tilde = solve_star(data)
    a = build_A(a_tilde)
    bound = degree_bound(word)
    m = choose_m(a, k, s, bound)
    f = assemble_f(p_k, a, m)
    connection.log_info(f"m = {m}, deg f = {f.total_degree()} (bound {bound}).")

    trace = {
        "input": {"braid": str(original), "strands": original.strands},
        "word": {"braid": str(word), "strands": s},
        "stabilized": stabilized,
        "step1": step1,
        "step2": report.to_json(),
        "resolved": {"braid": str(resolved), "strands": s},
        "g": g.to_json(),
        "k": k,
        "p_k": {"homogeneous": homogeneous, "weighted_degree": weighted_degree},
        "crossings": [datum.to_json() for datum in data],
        "a_tilde": a_tilde.to_json(),
        "a": a.to_json(),
        "m": m,
        "degree": f.total_degree(),
        "degree_bound": bound,
    }
    return BuildResult(word, f, trace, predicted_crossing_times(b_sing.crossing_times))


def verify(
    f: MixedPoly,
    word: BraidWord,
    connection: PipelineConnection,
    radius_start: float = config.RADIUS_START,
    samples: int = config.DEFAULT_SAMPLES,
    predicted_times: list[float] | None = None,
) -> VerificationReport:
    """Run the three verification sections, recording a failing section instead of raising.

    Args:
        f: The polynomial.
        word: The braid word f should realize; stabilized like a build input.
        connection: The connection of the running command.
        radius_start: The largest torus radius.
        samples: The initial number of samples per torus.
        predicted_times: Optional crossing times from the build.

    Returns:
        The report.
    """
    word, _ = prepare_word(word)

    connection.log_trace("Verifying the link.")
    try:
        link = verify_link(f, word, radius_start, samples, predicted_times)
        connection.log_info(f"Extracted '{link.word}' at radius {link.certified_radius}; match: {link.passed}.")
    except LinkforgeError as error:
        connection.log_error(f"Link verification failed: {error}")
        link = LinkSection(False, invariants(word) if word.length <= config.MAX_STATE_SUM_CROSSINGS else None,
                           attempts=getattr(error, "attempts", []), error=str(error))

    connection.log_trace("Verifying weak isolation.")
    if link.certified_radius is not None:
        radii = [link.certified_radius, link.certified_radius / 2, link.certified_radius / 4]
    else:
        radii = radius_schedule(f, radius_start)[:3]
    try:
        isolation = verify_weak_isolation(f, radii, samples)
    except LinkforgeError as error:
        connection.log_error(f"Weak isolation failed: {error}")
        isolation = IsolationSection(False, error=str(error))

    connection.log_trace("Checking the degree bounds.")
    try:
        degrees = verify_degree_bounds(f, word)
        if degrees.skipped:
            connection.log_info(degrees.notice)
    except LinkforgeError as error:
        connection.log_error(f"Degree bounds failed: {error}")
        degrees = DegreeSection(False, error=str(error))

    return VerificationReport(link, isolation, degrees)


def cmd_build(connection: PipelineConnection) -> int:
    """Build f, verify it and write the polynomial and trace.

    Returns:
        The exit code, 0 when the build verifies.
    """
    arguments = connection.arguments
    original = parse_braid_word(arguments.braid, arguments.strands)
    result = build(original, connection)

    report = verify(result.f, result.word, connection, arguments.radius_start, arguments.samples, result.predicted_times)
    result.trace["verification"] = report.to_json()
    tracked = report.link.tracked
    result.trace["trajectory"] = None if tracked is None else tracked.trajectory()

    store = artifact_process.ArtifactStore(arguments.out)
    store.write_polynomial(result.f)
    store.write_trace(result.trace)
    connection.log_info(f"Wrote {store.polynomial_path} and {store.trace_path}.")
    if arguments.json:
        sys.stdout.write(artifact_process.dumps(result.f.to_json()))
    return 0 if report.passed else 1


def cmd_verify(connection: PipelineConnection) -> int:
    """Verify a polynomial file against a braid word.

    Returns:
        The exit code, 0 iff every section passes.
    """
    arguments = connection.arguments
    f = artifact_process.read_polynomial(arguments.poly)
    word = parse_braid_word(arguments.braid, arguments.strands)
    report = verify(f, word, connection, arguments.radius_start, arguments.samples)

    data = report.to_json()
    if arguments.out is not None:
        artifact_process.write_json(arguments.out, data)
        connection.log_info(f"Wrote {arguments.out}.")
    if arguments.json:
        sys.stdout.write(artifact_process.dumps(data))
    connection.log_info(f"Verification {'passed' if report.passed else 'failed'}.")
    return 0 if report.passed else 1


def cmd_plot(connection: PipelineConnection) -> int:
    """Render the diagrams of a trace."""
    arguments = connection.arguments
    trace = artifact_process.read_trace(arguments.trace)
    try:
        paths = plot_process.write_plots(trace, arguments.out)
    except (KeyError, TypeError, ValueError) as error:
        raise ParseError(f"{arguments.trace} has a malformed section: {error}") from error
    for path in paths:
        connection.log_info(f"Wrote {path}.")
    return 0


def summarize_trace(trace: dict) -> str:
    """A readable summary of a trace."""
    step2 = trace["step2"]
    verification = trace.get("verification") or {}
    lines = [
        f"input:      '{trace['input']['braid']}' on {trace['input']['strands']} strands",
        f"built from: '{trace['word']['braid']}' on {trace['word']['strands']} strands"
        + (" (stabilized)" if trace.get("stabilized") else ""),
        f"step 1:     degrees {[c['degree'] for c in trace['step1']['components']]}, residual {trace['step1']['residual']:.3e}",
        f"step 2:     {len(step2['passes'])} passes, {len(step2['perturbations'])} perturbations, shift {step2['shift']:.6f}",
        f"crossings:  {[round(t, 6) for t in (step2.get('b_sing') or {}).get('crossing_times', [])]}",
        f"resolved:   '{(trace.get('resolved') or {}).get('braid', '')}'",
        f"k = {trace['k']}, m = {trace['m']}, deg f = {trace['degree']} (bound {trace.get('degree_bound')})",
    ]
    if verification:
        link = verification["link"]
        lines.append(
            f"verified:   {verification['passed']} (word '{link.get('word')}' at r = {link.get('certified_radius')}, "
            f"schedule matches: {link.get('schedule_matches')})"
        )
    return "\n".join(lines) + "\n"


def cmd_trace_dump(connection: PipelineConnection) -> int:
    """Print a trace, summarized or as JSON."""
    trace = artifact_process.read_trace(connection.arguments.trace)
    if connection.arguments.json:
        sys.stdout.write(artifact_process.dumps(trace))
    else:
        try:
            sys.stdout.write(summarize_trace(trace))
        except (KeyError, TypeError) as error:
            raise ParseError(f"{connection.arguments.trace} has a malformed section: {error}") from error
    return 0


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "plot": cmd_plot,
    "trace-dump": cmd_trace_dump,
}


def process(connection: PipelineConnection) -> int:
    """Do the primary process of the command line.

    Returns:
        The exit code of the command.
    """
    connection.log_trace(f"Running {connection.command}.")
    return COMMANDS[connection.command](connection)

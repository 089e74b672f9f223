"""Command-line front end: ``gss spectrum|scan|resonances|compose``."""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass

import numpy as np

from .composition import CompositionWiring, compose_spectrum
from .errors import GraphError, NumericalError
from .graph import InteriorGraph, WiringMatrix, direct_spectrum, full_wiring
from .lead import LeadSystem, default_w, find_resonances
from .solver import compare_with_oracle, scan, solve_spectrum

EXIT_OK, EXIT_PARSE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
COMPOSE_TOL = 1e-6
VERIFY_TOL = 1e-6


class ParseError(ValueError):
    def __init__(self, path, line, detail):
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {detail}")


class CliExit(Exception):
    def __init__(self, code, detail):
        self.code = code
        super().__init__(detail)


def fmt(x) -> str:
    return format(float(x), ".17g")


def _content_lines(path):
    """Yield ``(line_number, fields)`` for non-blank, non-comment lines."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(path, 0, exc.strerror or str(exc)) from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield n, line.split()


def _ints(path, n, fields, count):
    if len(fields) != count:
        raise ParseError(path, n, f"expected {count} integers, got {len(fields)} fields")
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise ParseError(path, n, f"non-integer field in {' '.join(fields)!r}") from None


def read_graph(path) -> InteriorGraph:
    """Parse the ``V E`` header plus ``E`` lines of 1-based ``i j`` pairs."""
    lines = list(_content_lines(path))
    if not lines:
        raise ParseError(path, 0, "missing 'V E' header")
    n, fields = lines[0]
    v, e = _ints(path, n, fields, 2)
    if v < 1 or e < 0:
        raise ParseError(path, n, f"invalid header V={v} E={e}")
    if len(lines) - 1 != e:
        raise ParseError(path, lines[-1][0] if len(lines) > 1 else n,
                         f"header announces {e} edges, found {len(lines) - 1}")
    edges, seen = [], {}
    for n, fields in lines[1:]:
        i, j = _ints(path, n, fields, 2)
        if not (1 <= i <= v and 1 <= j <= v):
            raise ParseError(path, n, f"vertex outside 1..{v} in edge {i} {j}")
        if i == j:
            raise ParseError(path, n, f"self edge {i} {j}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(path, n, f"duplicate edge {i} {j} (first on line {seen[key]})")
        seen[key] = n
        edges.append((i - 1, j - 1))
    try:
        return InteriorGraph(v, edges)
    except GraphError as exc:
        raise ParseError(path, 0, str(exc)) from None


def read_vertices(path, vertex_count) -> list[int]:
    """Whitespace separated 1-based vertex indices, returned 0-based."""
    out = []
    for n, fields in _content_lines(path):
        for f in fields:
            try:
                k = int(f)
            except ValueError:
                raise ParseError(path, n, f"non-integer vertex {f!r}") from None
            if not 1 <= k <= vertex_count:
                raise ParseError(path, n, f"vertex {k} outside 1..{vertex_count}")
            out.append(k - 1)
    if not out:
        raise ParseError(path, 0, "wiring file lists no vertices")
    return out


def read_links(path, left_count, right_count):
    links = []
    for n, fields in _content_lines(path):
        i, j = _ints(path, n, fields, 2)
        if not 1 <= i <= left_count:
            raise ParseError(path, n, f"left vertex {i} outside 1..{left_count}")
        if not 1 <= j <= right_count:
            raise ParseError(path, n, f"right vertex {j} outside 1..{right_count}")
        links.append((i - 1, j - 1))
    if not links:
        raise ParseError(path, 0, "composition needs at least one connecting edge")
    if len(set(links)) != len(links):
        raise ParseError(path, 0, "connecting edges must not repeat")
    return links


def _window(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    if not hi > lo:
        raise argparse.ArgumentTypeError(f"window {text!r} must satisfy lo < hi")
    return lo, hi


def _positive(kind):
    def parse(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not x > 0:
            raise argparse.ArgumentTypeError(f"{text!r} must be positive")
        return x
    return parse


def _w(text):
    return "auto" if text == "auto" else _positive(int)(text)


@dataclass
class RunConfig:
    method: str = "lead"
    w: int | str = "auto"
    wiring: str = "full"
    window: tuple[float, float] | None = None
    step: float | None = None
    tol: float = 1e-10
    output: str | None = None
    verify: bool = False
    threads: int = 1

    @classmethod
    def from_args(cls, args):
        threads = args.threads
        if threads is None:
            env = os.environ.get("GSS_THREADS", "")
            try:
                threads = _positive(int)(env) if env else 1
            except argparse.ArgumentTypeError:
                raise CliExit(EXIT_PARSE, f"GSS_THREADS={env!r} is not a positive integer")
        return cls(getattr(args, "method", "lead"), args.w, args.wiring, args.window,
                   args.step, args.tol, args.output, args.verify, threads)

    def resolve_w(self, g: InteriorGraph) -> int:
        return default_w(g) if self.w == "auto" else int(self.w)

    def resolve_wiring(self, g: InteriorGraph):
        if self.method in ("direct", "evolution"):
            return None
        mode = "lead" if self.method == "lead" else "dangling"
        if self.wiring == "full":
            return full_wiring(g, mode)
        return WiringMatrix.from_vertices(g.vertex_count, read_vertices(self.wiring, g.vertex_count),
                                          mode)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliExit(EXIT_PARSE, message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--w", type=_w, default="auto", help="lead bond count, integer or 'auto'")
    common.add_argument("--wiring", default="full", help="'full' or a file of 1-based vertices")
    common.add_argument("--window", type=_window, help="lo,hi")
    common.add_argument("--step", type=_positive(float))
    common.add_argument("--tol", type=_positive(float), default=1e-10)
    common.add_argument("--output", "-o", help="CSV destination (default: stdout)")
    common.add_argument("--verify", action="store_true", help="compare with the dense oracle")
    common.add_argument("--threads", type=_positive(int),
                        help="worker threads (default: $GSS_THREADS or 1)")
    methods = ("direct", "lead", "dangling", "evolution")

    p = _Parser(prog="gss", description="Graph Laplacian spectra from scattering secular functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues with multiplicities")
    s.add_argument("graph")
    s.add_argument("--method", choices=methods, default="lead")

    s = sub.add_parser("scan", parents=[common], help="secular determinant and eigenphases on a grid")
    s.add_argument("graph")
    s.add_argument("--method", choices=methods[1:], default="lead")

    s = sub.add_parser("resonances", parents=[common], help="complex poles of the lead S-matrix")
    s.add_argument("graph")
    s.add_argument("--im-window", type=_window, help="lo,hi of the imaginary part")
    s.add_argument("--grid", type=_positive(int), nargs=2, default=(24, 12), metavar=("NRE", "NIM"))

    s = sub.add_parser("compose", parents=[common], help="zeros of det(I - S1 S2) for two joined graphs")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("edges", help="connecting edges 'i j', left i to right j, 1-based")
    return p


def _csv(header, rows, footer=()):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def cmd_spectrum(args, cfg: RunConfig):
    g = read_graph(args.graph)
    wiring = cfg.resolve_wiring(g)
    report = solve_spectrum(g, cfg.method, wiring, cfg.resolve_w(g) if cfg.method == "lead" else None,
                            cfg.window, cfg.step, cfg.tol, cfg.threads)
    rows = [(fmt(x), m, fmt(r), report.method)
            for x, m, r in zip(report.eigenvalues, report.multiplicities, report.residuals)]
    footer = list(report.diagnostics)
    code = EXIT_OK
    if cfg.verify:
        partial = wiring is not None and cfg.wiring != "full"
        mism = compare_with_oracle(report, g, VERIFY_TOL, subset=partial)
        footer += [f"verify: {m}" for m in mism] or ["verify: ok"]
        code = EXIT_VERIFY if mism else EXIT_OK
    return _csv(("eigenvalue", "multiplicity", "residual", "method"), rows, footer), code


def cmd_scan(args, cfg: RunConfig):
    g = read_graph(args.graph)
    wiring = cfg.resolve_wiring(g)
    s = scan(g, wiring, cfg.method, cfg.window, cfg.step,
             cfg.resolve_w(g) if cfg.method == "lead" else None, cfg.threads)
    header = ["lambda", "re_det", "im_det", "abs_det"]
    header += [f"eigenphase_{k + 1}" for k in range(s.size)] + ["reason"]
    rows = []
    for k, lam in enumerate(s.grid):
        if s.valid[k]:
            d = s.det_values[k]
            row = [fmt(lam), fmt(d.real), fmt(d.imag), fmt(abs(d))]
            row += [fmt(t) for t in s.eigenphases[k]]
        else:
            row = [fmt(lam), "", "", ""] + [""] * s.size
        rows.append(row + [s.reasons[k]])
    return _csv(header, rows, s.diagnostics), EXIT_OK


def cmd_resonances(args, cfg: RunConfig):
    g = read_graph(args.graph)
    cfg.method = "lead"
    system = LeadSystem(g, cfg.resolve_wiring(g), cfg.resolve_w(g))
    w = system.w
    re_range = cfg.window or (-float(w), 5.0 * w)
    im_range = args.im_window or (-float(w), float(w))
    found, dropped = find_resonances(system, re_range, im_range, *args.grid, tol=cfg.tol)
    rows = [(fmt(r.lam.real), fmt(r.lam.imag), fmt(r.abs_z), r.iterations) for r in found]
    return _csv(("re_lambda", "im_lambda", "abs_z_res", "newton_iters"), rows,
                [f"dropped seeds: {dropped}"]), EXIT_OK


def cmd_compose(args, cfg: RunConfig):
    left, right = read_graph(args.left), read_graph(args.right)
    links = read_links(args.edges, left.vertex_count, right.vertex_count)
    cw = CompositionWiring(left, right, tuple(links))
    report = compose_spectrum(cw, cfg.window, cfg.step, cfg.tol, cfg.threads)
    oracle = np.asarray(direct_spectrum(cw.composite).eigenvalues)
    rows, worst = [], 0.0
    for x, m, r in zip(report.eigenvalues, report.multiplicities, report.residuals):
        k = int(np.argmin(np.abs(oracle - x)))
        dist = abs(oracle[k] - x)
        worst = max(worst, dist)
        rows.append((fmt(x), m, fmt(r), report.method, fmt(oracle[k]), fmt(dist)))
    footer = list(report.diagnostics)
    code = EXIT_OK
    if cfg.verify:
        ok = worst <= COMPOSE_TOL
        footer.append("verify: ok" if ok else f"verify: max distance {worst:.3e} exceeds {COMPOSE_TOL:g}")
        code = EXIT_OK if ok else EXIT_VERIFY
    header = ("eigenvalue", "multiplicity", "residual", "method", "oracle_eigenvalue", "distance")
    return _csv(header, rows, footer), code


COMMANDS = {"spectrum": cmd_spectrum, "scan": cmd_scan,
            "resonances": cmd_resonances, "compose": cmd_compose}


def run(argv=None) -> tuple[int, str, str | None]:
    """Execute a command.

    Returns ``(exit_code, csv_text, output_path)``; errors surface as
    :class:`CliExit`.
    """
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        text, code = COMMANDS[args.command](args, cfg)
    except (ParseError, GraphError) as exc:
        raise CliExit(EXIT_PARSE, str(exc)) from None
    except NumericalError as exc:
        raise CliExit(EXIT_NUMERICAL, f"{type(exc).__name__}: {exc}") from None
    except (np.linalg.LinAlgError, OverflowError) as exc:
        raise CliExit(EXIT_NUMERICAL, f"{type(exc).__name__}: {exc}") from None
    except ValueError as exc:
        raise CliExit(EXIT_PARSE, str(exc)) from None
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliExit(EXIT_PARSE, f"{cfg.output}: {exc.strerror}") from None
    return code, text, cfg.output


def main(argv=None) -> int:
    try:
        code, text, path = run(argv)
    except CliExit as exc:
        detail = " ".join(str(exc).split())
        print(f"ERROR {exc.code}: {detail}", file=sys.stderr)
        return exc.code
    if path is None:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

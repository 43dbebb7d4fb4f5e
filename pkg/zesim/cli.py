"""
CLI interface for zesim.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from zesim.models import (
    ZesimConfig, ZesimError, PayloadError, GraphPayload, ChannelPayload,
    ClassicalGraphPayload, CertificatePayload, load_payload, load_config,
)
from zesim.graphspace import (
    Channel, NCBGraph, InvalidChannelError, InvalidGraphError, classical_graph, delta_ell,
    graph_feasibility, graph_power, kalpha,
)
from zesim.linalg import LinalgError
from zesim.sdpcore import SolverError, dump_problem
from zesim.simcost import (
    Certificate, DimensionCapError, InfeasibleGraphError, build_lower_program,
    cheapest_full_rank_check, nontrivial_check, paper_certificate_pi3, property_prop3_check,
    s0ns_bounds, search_condition_dual, sigma_channel, sigma_equality_dual, sigma_graph,
    sigma_minus, verify_certificate,
)
from zesim.sweep import SweepEngine, format_number, sweep_grid, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_INFEASIBLE = 4
EXIT_REJECTED = 5


class Colors:
    RESET = '\033[0m'
    BOLD = '\033[1m'
    RED = '\033[91m'
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    CYAN = '\033[96m'


class ZesimCLI:
    def __init__(self, config: ZesimConfig, as_json: bool = False, out: Optional[TextIO] = None):
        self.config = config
        self.as_json = as_json
        self.out = out or sys.stdout
        self.color = hasattr(self.out, 'isatty') and self.out.isatty()

    # ------------------------------------------------------------------
    # output helpers
    # ------------------------------------------------------------------
    def _print(self, text: str = "") -> None:
        print(text, file=self.out)

    def _mark(self, ok: bool) -> str:
        if not self.color:
            return ""
        return f"{Colors.GREEN}✓{Colors.RESET} " if ok else f"{Colors.RED}✗{Colors.RESET} "

    def _line(self, key: str, value: Any, ok: Optional[bool] = None) -> None:
        if isinstance(value, float):
            value = format_number(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        prefix = self._mark(ok) if ok is not None else ""
        self._print(f"{prefix}{key}: {value}")

    def _json(self, data: Dict[str, Any]) -> None:
        self._print(json.dumps(data, indent=2, sort_keys=False))

    # ------------------------------------------------------------------
    # graph sources
    # ------------------------------------------------------------------
    def load_graph(self, args: argparse.Namespace) -> NCBGraph:
        if args.kalpha is not None:
            return kalpha(args.kalpha)
        if args.delta is not None:
            return delta_ell(args.delta)
        if args.classical is not None:
            payload = load_payload(ClassicalGraphPayload, args.classical)
            return classical_graph(np.array(payload.adjacency, dtype=bool))
        if args.graph is not None:
            payload = load_payload(GraphPayload, args.graph)
            if payload.kraus_basis is not None:
                return NCBGraph.from_kraus(payload.kraus_arrays())
            return NCBGraph.from_vectors(payload.dimA, payload.dimB, payload.vector_arrays())
        raise PayloadError("no graph source given (use --graph, --kalpha, --delta or --classical)")

    def _require_feasible(self, k: NCBGraph) -> None:
        if graph_feasibility(k, self.config.solver, self.config.tolerances.feasibility) is None:
            raise InfeasibleGraphError("no channel is consistent with the graph")

    # ------------------------------------------------------------------
    # commands
    # ------------------------------------------------------------------
    def sigma(self, args: argparse.Namespace) -> int:
        if getattr(args, 'channel', None):
            payload = load_payload(ChannelPayload, args.channel)
            result = sigma_channel(Channel.from_kraus(payload.kraus_arrays()), self.config)
            if self.as_json:
                self._json(result.to_payload().model_dump())
            else:
                self._line("sigma", result.value)
                self._line("dual", result.dual_value)
                self._line("status", result.status.value)
            return EXIT_OK

        k = self.load_graph(args)
        self._require_feasible(k)
        if args.dump_problem:
            problem, _ = build_lower_program(k)
            with open(args.dump_problem, 'w', encoding='utf-8') as f:
                dump_problem(problem, f)

        result = sigma_graph(k, self.config)
        data: Dict[str, Any] = result.to_payload().model_dump()
        lines: List[tuple] = [("sigma", result.value), ("dual", result.dual_value),
                              ("status", result.status.value)]

        if args.minus:
            minus = sigma_minus(k, self.config)
            data['sigmaMinus'] = minus.value
            lines.append(("sigma-minus", minus.value))
        if args.power and args.power > 1:
            size = k.n ** args.power
            if size > self.config.dimension_cap:
                raise DimensionCapError(f"dimension {size} exceeds the cap {self.config.dimension_cap}")
            power = sigma_graph(graph_power(k, args.power), self.config)
            root = power.value ** (1.0 / args.power)
            data['power'] = {'n': args.power, 'value': power.value, 'root': root,
                             'status': power.status.value}
            lines.append((f"sigma-power-{args.power}", power.value))
            lines.append((f"sigma-power-{args.power}-root", root))
        if args.bounds:
            bounds = s0ns_bounds(k, max(1, args.power or 1), self.config)
            data['bounds'] = bounds.to_dict()
            lines.append(("lower-bits", bounds.lower))
            lines.append(("upper-bits", bounds.upper))
            lines.append(("tight", bounds.tight))

        if self.as_json:
            self._json(data)
        else:
            for key, value in lines:
                self._line(key, value)
        return EXIT_OK

    def sweep(self, args: argparse.Namespace) -> int:
        grid = sweep_grid(args.min_cos2, args.max_cos2, args.steps)

        def progress(index: int, status: str) -> None:
            if status != "starting":
                logging.getLogger("zesim.cli").info("point %d %s", index, status)

        rows = SweepEngine(self.config, progress).run(grid)
        failed = [r for r in rows if not r.ok]
        for r in failed:
            print(f"{Colors.YELLOW}⚠{Colors.RESET} cos2alpha={format_number(r.cos2alpha)} "
                  f"status={'/'.join(r.solve_status)}", file=sys.stderr)

        if self.as_json:
            self._json({'rows': [r.to_dict() for r in rows]})
        elif args.out:
            with open(args.out, 'w', encoding='utf-8', newline='') as f:
                write_csv(rows, f)
        else:
            write_csv(rows, self.out)
        return EXIT_SOLVER if failed else EXIT_OK

    def verify(self, args: argparse.Namespace) -> int:
        if args.paper_pi3:
            cert = paper_certificate_pi3()
            k = kalpha(np.pi / 3)
        else:
            if not args.certificate:
                raise PayloadError("verify needs a certificate file or --paper-pi3")
            cert = Certificate.from_payload(load_payload(CertificatePayload, args.certificate))
            k = self.load_graph(args)

        check = verify_certificate(k, cert, args.tol or self.config.tolerances.certificate, args.strict)
        if self.as_json:
            self._json({'kind': cert.kind.value, 'passed': check.passed, 'bound': check.bound,
                        'strict': check.strict, 'worstMargin': check.worst_margin,
                        'margins': check.margins})
        else:
            self._line("certificate", cert.kind.value)
            self._line("result", "pass" if check.passed else "fail", check.passed)
            self._line("bound", check.bound)
            self._line("worst margin", check.worst_margin)
            for name, value in check.margins.items():
                self._line(f"margin {name}", value, value >= -(args.tol or self.config.tolerances.certificate))
        return EXIT_OK if check.passed else EXIT_REJECTED

    def checks(self, args: argparse.Namespace) -> int:
        k = self.load_graph(args)
        self._require_feasible(k)
        sigma = sigma_graph(k, self.config).value
        nontrivial = nontrivial_check(k)
        full_rank = cheapest_full_rank_check(k, sigma=sigma, config=self.config)
        pair = search_condition_dual(k, sigma=sigma, config=self.config)
        equality = sigma_equality_dual(k, self.config).value
        prop3 = property_prop3_check(k, config=self.config)

        if self.as_json:
            self._json({
                'sigma': sigma,
                'nontrivial': nontrivial,
                'cheapestFullRank': {'value': full_rank.full_rank, 't': full_rank.t},
                'theorem1Condition': pair is not None,
                'equalityDual': equality,
                'prop3': {'minEigW': prop3.min_eig_w, 'traceWJ': prop3.trace_wj,
                          'traceGap': prop3.trace_gap, 'consistent': prop3.consistent},
            })
            return EXIT_OK

        self._line("sigma", sigma)
        self._line("nontrivial", nontrivial, nontrivial)
        self._print(f"{self._mark(full_rank.full_rank)}cheapest-full-rank: "
                    f"{'true' if full_rank.full_rank else 'false'} (t={format_number(full_rank.t)})")
        self._line("theorem1-condition", "found" if pair is not None else "none found", pair is not None)
        self._line("equality-dual", equality)
        self._print(f"{self._mark(prop3.consistent)}prop3: min-eig-W={format_number(prop3.min_eig_w)} "
                    f"tr(WJ)={format_number(prop3.trace_wj)} "
                    f"|tr(UJ)-trS|={format_number(prop3.trace_gap)}")
        return EXIT_OK


def _add_graph_source(p: argparse.ArgumentParser, channel: bool = False) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument('--graph', metavar='FILE', help='Graph JSON file')
    group.add_argument('--kalpha', type=float, metavar='ALPHA', help='K_alpha family member')
    group.add_argument('--delta', type=int, metavar='L', help='Noiseless L-symbol graph')
    group.add_argument('--classical', metavar='FILE', help='Classical adjacency JSON file')
    if channel:
        group.add_argument('--channel', metavar='FILE', help='Channel JSON file (Kraus operators)')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, help='Solver gap/feasibility tolerance')
    common.add_argument('--max-iter', type=int, help='Solver iteration cap')
    common.add_argument('--json', action='store_true', help='Print JSON')
    common.add_argument('--config', metavar='FILE', help='YAML or JSON configuration file')
    common.add_argument('-v', '--verbose', action='count', default=0, help='More logging (-vv for debug)')

    parser = argparse.ArgumentParser(
        description="zesim - no-signalling assisted zero-error simulation cost",
        prog="zesim"
    )
    subparsers = parser.add_subparsers(dest='command', help='Commands')

    sigma_p = subparsers.add_parser('sigma', parents=[common], help='Compute the simulation cost')
    _add_graph_source(sigma_p, channel=True)
    sigma_p.add_argument('--minus', action='store_true', help='Also compute the restricted value')
    sigma_p.add_argument('--power', type=int, default=1, help='Also compute the n-th tensor power')
    sigma_p.add_argument('--bounds', action='store_true', help='Print asymptotic bounds in bits')
    sigma_p.add_argument('--dump-problem', metavar='PATH', help='Write the SDP as sparse triplets')

    sweep_p = subparsers.add_parser('sweep', parents=[common], help='Sweep the K_alpha family')
    sweep_p.add_argument('--min-cos2', type=float, default=0.25)
    sweep_p.add_argument('--max-cos2', type=float, default=0.35)
    sweep_p.add_argument('--steps', type=int, default=11)
    sweep_p.add_argument('--out', metavar='PATH', help='CSV output file (default stdout)')

    verify_p = subparsers.add_parser('verify', parents=[common], help='Verify a certificate')
    verify_p.add_argument('certificate', nargs='?', help='Certificate JSON file')
    _add_graph_source(verify_p)
    verify_p.add_argument('--paper-pi3', action='store_true', help='Use the built-in alpha = pi/3 certificate')
    verify_p.add_argument('--strict', action='store_true', help='Require strictly positive support margins')

    checks_p = subparsers.add_parser('checks', parents=[common], help='Run structural checks')
    _add_graph_source(checks_p)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _make_config(args: argparse.Namespace) -> ZesimConfig:
    config = load_config(args.config)
    if args.tol is not None:
        config.solver.gap_tol = config.solver.feas_tol = args.tol
        config.solver.relaxed_tol = max(config.solver.relaxed_tol, args.tol)
    if args.max_iter is not None:
        config.solver.max_iter = args.max_iter
    errors = config.validate()
    if errors:
        raise ZesimError("Invalid configuration: " + "; ".join(errors))
    return config


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        config = _make_config(args)
        cli = ZesimCLI(config, as_json=args.json)
        if args.command == 'sigma':
            return cli.sigma(args)
        elif args.command == 'sweep':
            return cli.sweep(args)
        elif args.command == 'verify':
            return cli.verify(args)
        elif args.command == 'checks':
            return cli.checks(args)
    except InfeasibleGraphError as e:
        print(f"{Colors.RED}✗ {e}{Colors.RESET}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as e:
        print(f"{Colors.RED}✗ {e}{Colors.RESET}", file=sys.stderr)
        return EXIT_SOLVER
    except (PayloadError, DimensionCapError, InvalidGraphError, InvalidChannelError,
            LinalgError, ZesimError, ValueError) as e:
        print(f"{Colors.RED}✗ {e}{Colors.RESET}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())

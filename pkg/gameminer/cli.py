# gameminer/cli.py
import argparse
import logging
import sys

from .commands import STRUCTURE_NAMES, Options, cmd_analyze, cmd_bargain, cmd_oracle
from .config import DEFAULT_GRID, DEFAULT_MARGIN, EXIT_INVARIANT, EXIT_OK, EXIT_PARSE
from .equilibrium import SelectionPolicy
from .errors import GameMinerError, InvariantViolation, ParseError
from .fileformat import load_game_file, parse_number
from .utils import die, warn


def _fraction(text: str):
    try:
        return parse_number(text.strip())
    except ParseError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _policy(text: str) -> SelectionPolicy:
    try:
        return SelectionPolicy.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_common(p: argparse.ArgumentParser, menu: bool = True):
    p.add_argument("file", help="game file")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--policy", type=_policy, default=SelectionPolicy(),
                   help="equilibrium selection: miner_optimistic (default), contractor_optimistic,\n"
                        "adversarial_to:A|B, lexicographic")
    if menu:
        p.add_argument("--menu-epsilon", type=_fraction, default=None, help="epsilon for generated contracts (p/q)")
        p.add_argument("--menu-steps", type=int, default=None, help="payment levels per shift family")
        p.add_argument("--menu-grid", type=int, default=0, help="add a grid-derived maximizer contract at n divisions")
        p.add_argument("--fixtures-only", action="store_true", help="menus are null plus the file's contracts")


def _mk_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="game-miner",
        description=(
            "Exact analysis of two-player games with an outside contract miner.\n\n"
            "Common usage:\n"
            "  game-miner analyze fixtures/cell_phone.game\n"
            "  game-miner bargain fixtures/aggregate_flow.game --structure one --restrict-to-aggregate-maximizers\n"
            "  game-miner bargain fixtures/sequential.game --structure sequential --first B\n"
            "  game-miner oracle fixtures/cell_phone.game --grid 60 --json\n"
        ),
        formatter_class=argparse.RawTextHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr (-vv for debug)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="equilibria, dominance, maxagg/maxminagg, feasibility",
                       formatter_class=argparse.RawTextHelpFormatter)
    _add_common(a)
    a.add_argument("--prop7-statement-term", "--bound-opponent-term", dest="bound_opponent_term", action="store_true",
                   help="dual-offer bound with B's payoff in the last term")

    b = sub.add_parser("bargain", help="equilibrium of one market structure",
                       formatter_class=argparse.RawTextHelpFormatter)
    _add_common(b)
    b.add_argument("--structure", required=True, choices=list(STRUCTURE_NAMES), help="market structure")
    b.add_argument("--first", choices=["A", "B"], default="A", help="first mover for --structure sequential")
    b.add_argument("--margin", type=_fraction, default=DEFAULT_MARGIN, help="strictness margin for miner offers")
    b.add_argument("--restrict-to-aggregate-maximizers", dest="restrict", action="store_true",
                   help="players only offer aggregate-maximizing contracts and their shifts")
    b.add_argument("--prop7-statement-term", "--bound-opponent-term", dest="bound_opponent_term", action="store_true",
                   help="dual-offer bound: measure the last term with B's payoff where A best-responds")

    o = sub.add_parser("oracle", help="grid cross-checks of equilibria and maxagg",
                       formatter_class=argparse.RawTextHelpFormatter)
    _add_common(o, menu=False)
    o.add_argument("--grid", type=int, default=DEFAULT_GRID, help=f"grid divisions (default: {DEFAULT_GRID})")
    return p


def _options(args) -> Options:
    opts = Options(policy=args.policy)
    for name in ("menu_epsilon", "menu_steps", "menu_grid", "fixtures_only", "restrict", "first", "margin",
                 "bound_opponent_term", "grid"):
        if hasattr(args, name):
            setattr(opts, name, getattr(args, name))
    return opts


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _mk_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    opts = _options(args)
    if args.command == "oracle" and opts.grid < 1:
        die("--grid must be >= 1", EXIT_PARSE)
    if opts.menu_grid < 0:
        die("--menu-grid must be >= 0", EXIT_PARSE)
    try:
        gf = load_game_file(args.file)
    except ParseError as e:
        die(f"{args.file}: {e}", EXIT_PARSE)
    except OSError as e:
        die(f"cannot read {args.file}: {e.strerror}", EXIT_PARSE)

    try:
        if args.command == "analyze":
            rep = cmd_analyze(gf, opts)
        elif args.command == "bargain":
            rep = cmd_bargain(gf, args.structure, opts)
        else:
            rep = cmd_oracle(gf, opts)
    except InvariantViolation as e:
        die(f"invariant violated: {e}", EXIT_INVARIANT)
    except GameMinerError as e:
        die(str(e), 1)

    sys.stdout.write(rep.to_json() if args.json else rep.render(color=sys.stdout.isatty()))
    if not rep.ok:
        failed = [c.name for c in rep.checks if not c.ok]
        warn("failed checks: " + ", ".join(failed))
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

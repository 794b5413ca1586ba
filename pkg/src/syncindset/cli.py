"""Command line interface: ``syncindset <command> ...``.

Exit status 0 on success, 1 when an input violates an invariant, 2 when a
file is missing or malformed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

from . import io
from .algebra import Tolerance, ValidationError
from .games import classical_value, eval_sync_strategy, validate_game, DEFAULT_CAP
from .graph import build_game_graph, export_graph
from .indepset import eval_indep_strategy, reduction_verifier, sync_loss_indep
from .lifting import backward_lift_approx, backward_lift_perfect, forward_lift, reduce_game
from .luck import LuckParams, make_luck_game, sharpness_report, sharpness_strategy
from .stability import StabilityError, round_positive_family, round_projection_family


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _print_kv(d: dict, out) -> None:
    for k, v in d.items():
        out.write(f"{k}: {_fmt(v)}\n")


def _vertex(text: str) -> tuple[int, int]:
    try:
        q, a = text.split(",")
        return int(q), int(a)
    except ValueError:
        raise argparse.ArgumentTypeError(f"vertex must look like 'q,a', got {text!r}") from None


def cmd_validate(args, out):
    g = io.game_from_json(io.read_json(args.game))
    report = validate_game(g)
    out.write(f"{report}\n")
    return 0 if report.ok else 1


def cmd_graph(args, out):
    x = build_game_graph(io.game_from_json(io.read_json(args.game)))
    if args.format == "json":
        text = json.dumps(io.graph_to_json(x)) + "\n"
    else:
        text = export_graph(x, args.format)
    if not args.out:
        out.write(text)
        return 0
    with open(args.out, "w") as fh:
        fh.write(text)
    out.write(f"wrote {args.out}: {x.num_vertices} vertices, {len(x.edges())} edges\n")
    return 0


def cmd_reduce(args, out):
    game = reduce_game(io.game_from_json(io.read_json(args.game)))
    io.write_json(args.out, io.isgame_to_json(game))
    out.write(f"wrote {args.out}: t={game.t}, {game.num_vertices} vertices, {len(game.graph.edges())} edges\n")
    return 0


def cmd_classical_value(args, out):
    g = io.game_from_json(io.read_json(args.game))
    value, witness = classical_value(g, cap=args.cap, synchronous=args.synchronous)
    out.write(f"{_fmt(value)}\n")
    out.write(f"f: {list(witness.f)}\nf_prime: {list(witness.f_prime)}\n")
    return 0


def cmd_eval(args, out, tol):
    g = io.game_from_json(io.read_json(args.game))
    s = io.sync_strategy_from_json(io.read_json(args.strategy))
    out.write(f"{_fmt(eval_sync_strategy(g, s, tol))}\n")
    return 0


def cmd_loss(args, out, tol):
    game = io.isgame_from_json(io.read_json(args.isgame))
    s = io.indep_strategy_from_json(io.read_json(args.strategy))
    if game.weighting == "uniform":
        value = eval_indep_strategy(game, s, tol)
        out.write(f"loss: {_fmt(1 - value)}\n")
        return 0
    loss, breakdown = sync_loss_indep(game, s, tol)
    _print_kv({"loss": loss, "same_vertex": breakdown.same_vertex, "adjacent": breakdown.adjacent}, out)
    return 0


def cmd_round(args, out, tol):
    ops = io.load_operators(io.read_json(args.operators))
    if args.projections:
        q, report = round_projection_family(ops, tol)
    else:
        q, report = round_positive_family(ops, tol)
    io.write_json(args.out, io.dump_operators(q))
    if args.report:
        io.write_json(args.report, report.as_dict())
    _print_kv(report.as_dict(), out)
    return 0


def cmd_lift_forward(args, out, tol):
    g = io.game_from_json(io.read_json(args.game))
    s = io.sync_strategy_from_json(io.read_json(args.strategy))
    lifted = forward_lift(g, s, tol)
    io.write_json(args.out, io.indep_strategy_to_json(lifted))
    loss, _ = sync_loss_indep(reduce_game(g), lifted, tol)
    out.write(f"wrote {args.out}: loss {_fmt(loss)}\n")
    return 0


def cmd_lift_back(args, out, tol):
    g = io.game_from_json(io.read_json(args.game))
    s = io.indep_strategy_from_json(io.read_json(args.strategy))
    if args.approx:
        strategy, report = backward_lift_approx(s, g, tol, kappa=args.kappa)
        if args.report:
            io.write_json(args.report, report.as_dict())
        value = report.value_on_G
    else:
        strategy = backward_lift_perfect(s, g, tol)
        value = eval_sync_strategy(g, strategy, tol)
    io.write_json(args.out, io.sync_strategy_to_json(strategy, g))
    out.write(f"wrote {args.out}: value on G {_fmt(value)}\n")
    return 0


def cmd_verify(args, out):
    game = io.isgame_from_json(io.read_json(args.isgame))
    if args.exhaustive:
        g = io.game_from_json(io.read_json(args.exhaustive))
        if game.t != g.num_questions:
            out.write(f"t={game.t} does not match |Q|={g.num_questions}\n")
            return 1
        vertices = list(game.graph.vertices)
        mismatches = []
        for i, j in itertools.product(range(game.t), repeat=2):
            for u, v in itertools.product(vertices, repeat=2):
                if reduction_verifier(g, i, j, u, v) != game.predicate(i, j, u, v):
                    mismatches.append((i, j, u, v))
        total = game.t**2 * len(vertices) ** 2
        if mismatches:
            out.write(f"mismatch on {len(mismatches)} of {total} tuples, first {mismatches[0]}\n")
            return 1
        out.write(f"equivalent on all tuples ({total})\n")
        return 0
    if args.game is None or None in (args.i, args.j, args.u, args.v):
        out.write("single-tuple mode needs --game, --i, --j, --u and --v\n")
        return 2
    g = io.game_from_json(io.read_json(args.game))
    verdict = reduction_verifier(g, args.i, args.j, args.u, args.v)
    direct = game.predicate(args.i, args.j, args.u, args.v)
    out.write(f"verifier: {'accept' if verdict else 'reject'}\n")
    out.write(f"predicate: {'accept' if direct else 'reject'}\n")
    return 0 if verdict == direct else 1


def cmd_luck(args, out):
    p = LuckParams(args.k, args.n)
    g = make_luck_game(p)
    io.write_json(args.out, io.game_to_json(g))
    out.write(f"wrote {args.out}\n")
    if args.strategy:
        io.write_json(args.strategy, io.indep_strategy_to_json(sharpness_strategy(p)))
        out.write(f"wrote {args.strategy}\n")
    if args.report:
        io.write_json(args.report, sharpness_report(p))
        out.write(f"wrote {args.report}\n")
    return 0


def cmd_sharpness(args, out):
    report = sharpness_report(LuckParams(args.k, args.n))
    _print_kv(report, out)
    return 0 if report["game_value_ok"] and report["strategy_value_ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syncindset", description=__doc__.splitlines()[0])
    parser.add_argument("--tol", type=float, default=None, help="override the default tolerance eta (1e-9)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check distribution normalization and synchronicity")
    p.add_argument("game")

    p = sub.add_parser("graph", help="export the game graph X(G)")
    p.add_argument("game")
    p.add_argument("--format", choices=["dot", "edge_list", "json"], default="dot")
    p.add_argument("--out")

    p = sub.add_parser("reduce", help="write the diagonally weighted independent set game (X(G), |Q|)")
    p.add_argument("game")
    p.add_argument("--out", required=True)

    p = sub.add_parser("classical-value", help="exact classical value by enumeration")
    p.add_argument("game")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration budget on |A|^(2|Q|)")
    p.add_argument("--synchronous", action="store_true", help="restrict to f = f'")

    p = sub.add_parser("eval", help="winning probability of a synchronous quantum strategy")
    p.add_argument("game")
    p.add_argument("strategy")

    p = sub.add_parser("loss", help="losing probability of a strategy for an independent set game")
    p.add_argument("isgame")
    p.add_argument("strategy")

    p = sub.add_parser("round", help="round an operator family to a PVM")
    p.add_argument("operators")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--projections", action="store_true", help="input is a family of projections")

    p = sub.add_parser("lift-forward", help="strategy for G -> strategy for (X(G), |Q|)")
    p.add_argument("game")
    p.add_argument("strategy")
    p.add_argument("--out", required=True)

    p = sub.add_parser("lift-back", help="strategy for (X(G), |Q|) -> strategy for G")
    p.add_argument("game")
    p.add_argument("strategy")
    p.add_argument("--out", required=True)
    p.add_argument("--approx", action="store_true", help="round per question instead of requiring a perfect input")
    p.add_argument("--report")
    p.add_argument("--kappa", type=float, default=10.0)

    p = sub.add_parser("verify", help="run the reduction verifier")
    p.add_argument("isgame")
    p.add_argument("--exhaustive", metavar="GAME", help="compare against the predicate on every tuple")
    p.add_argument("--game", help="source game for single-tuple mode")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--u", type=_vertex, help="vertex q,a")
    p.add_argument("--v", type=_vertex, help="vertex q,a")

    p = sub.add_parser("luck", help="write a (k,n)-luck game")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strategy", help="also write the sharpness strategy")
    p.add_argument("--report", help="also write the sharpness report")

    p = sub.add_parser("sharpness", help="print the sharpness report for a luck game")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "graph": cmd_graph,
    "reduce": cmd_reduce,
    "classical-value": cmd_classical_value,
    "eval": cmd_eval,
    "loss": cmd_loss,
    "round": cmd_round,
    "lift-forward": cmd_lift_forward,
    "lift-back": cmd_lift_back,
    "verify": cmd_verify,
    "luck": cmd_luck,
    "sharpness": cmd_sharpness,
}
NEEDS_TOL = {"eval", "loss", "round", "lift-forward", "lift-back"}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    tol = Tolerance(args.tol) if args.tol is not None else Tolerance()
    handler = COMMANDS[args.command]
    try:
        if args.command in NEEDS_TOL:
            return handler(args, out, tol)
        return handler(args, out)
    except io.FormatError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (ValidationError, StabilityError) as e:
        sys.stderr.write(f"invalid: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

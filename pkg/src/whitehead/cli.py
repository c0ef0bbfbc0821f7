"""Command line interface: ``wh <subcommand> ...``.

Exit status is 0 on success, 1 when the input is well formed but the
computation fails (not an automorphism, cap exceeded, ...), and 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import cluster_lab, currents, ideal, minimizer
from .autos import LiteralError, parse_automorphism
from .core import (
    MAX_RANK,
    CyclicWord,
    Word,
    WordError,
    count_occurrences,
    cyclic_core,
    free_reduce,
    make_rng,
    parse_letters,
    rank_of,
    word_str,
)
from .graph import graph_distance, normalized_graph, whitehead_graph


class UsageError(Exception):
    pass


def _frac(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _word_arg(text: str, k: int, name: str = "word") -> Word:
    try:
        raw = parse_letters(text)
    except WordError as e:
        raise UsageError(f"{name}: {e}") from None
    if rank_of(raw) > k:
        raise UsageError(f"{name} {text!r} uses letters beyond rank {k} (raise --k)")
    w = free_reduce(raw)
    if len(w) != len(raw):
        print(f"note: {name} {text!r} freely reduced to {word_str(w)}", file=sys.stderr)
    return w


def _cyclic_arg(text: str, k: int, name: str = "word") -> CyclicWord:
    if not text.strip() or text.strip() == "1":
        raise UsageError(f"{name} must be a nontrivial word")
    w = _word_arg(text, k, name)
    if not w:
        raise WordError(f"{name} {text!r} is trivial in the free group")
    u, c = cyclic_core(w)
    if c:
        print(f"note: {name} {word_str(w)} cyclically reduced to {word_str(u)}", file=sys.stderr)
    return CyclicWord(u)


def _auto_arg(text: str, k: int):
    # syntax problems are usage errors; a well-formed literal that is not an
    # automorphism (bad inverse, trivial image) is a domain error
    try:
        return parse_automorphism(text, k)
    except (LiteralError, WordError) as e:
        raise UsageError(f"automorphism {text!r}: {e}") from None


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data))
    else:
        print(text)


# --- subcommands ---------------------------------------------------------


def cmd_reduce(args):
    w = _word_arg(args.word, args.k)
    _emit(args, {"word": word_str(w), "length": len(w)}, word_str(w))


def cmd_cyclic(args):
    w = _word_arg(args.word, args.k)
    if not w:
        raise WordError("the trivial word has no cyclic reduction")
    u, c = cyclic_core(w)
    cw = CyclicWord(u)
    _emit(
        args,
        {"cyclic": str(cw), "core": word_str(u), "conjugator": word_str(c), "length": len(cw)},
        f"{cw}  (core {word_str(u)}, conjugator {word_str(c)}, ||w|| = {len(cw)})",
    )


def cmd_count(args):
    v = _word_arg(args.v, args.k, "v")
    if not v:
        raise UsageError("v must be nontrivial")
    w = _cyclic_arg(args.w, args.k, "w")
    n = count_occurrences(v, w)
    _emit(args, {"v": word_str(v), "w": str(w), "count": n}, str(n))


def cmd_minimize(args):
    w = _cyclic_arg(args.word, args.k)
    tr = minimizer.minimize(w, args.k)
    lines = [str(tr.result)]
    for i, (p, x) in enumerate(tr.steps, 1):
        lines.append(f"  step {i}: {p} -> {x} (length {len(x)})")
    _emit(args, tr.to_dict(), "\n".join(lines))


def cmd_equiv(args):
    u = _cyclic_arg(args.u, args.k, "u")
    v = _cyclic_arg(args.v, args.k, "v")
    res = minimizer.automorphic_equivalence(u, v, args.cap, args.k)
    _emit(args, res.to_dict(), res.verdict.value)


def cmd_whgraph(args):
    w = _cyclic_arg(args.word, args.k)
    g = normalized_graph(w, args.k) if args.normalized else whitehead_graph(w, args.k)
    text = "\n".join(f"{e['u']}{e['v']} {e['r']}" for e in g.to_dict()["edges"] if e["r"])
    _emit(args, g.to_dict(), text)


def cmd_dist(args):
    u = _cyclic_arg(args.u, args.k, "u")
    v = _cyclic_arg(args.v, args.k, "v")
    d = graph_distance(normalized_graph(u, args.k), normalized_graph(v, args.k))
    _emit(args, {"distance": d}, repr(d))


def cmd_euler(args):
    ew = currents.euler_word(args.k, args.m)
    _emit(args, {"k": ew.k, "m": ew.m, "word": str(ew.w), "length": len(ew)}, str(ew.w))


def cmd_stretch(args):
    phi = _auto_arg(args.auto, args.k)
    s = ideal.stretch_factor(phi)
    flag = "" if s.stabilized else "  (NOT stabilized)"
    _emit(args, s.to_dict(), f"{s.value}  (m = {s.m_used}){flag}")


def cmd_ideal_step(args):
    phi = _auto_arg(args.auto, args.k)
    tau = ideal.ideal_step(phi)
    from .autos import compose, wh2_images

    before = ideal.stretch_factor(phi).value
    after = ideal.stretch_factor(compose(wh2_images(tau, phi.k), phi)).value
    _emit(
        args,
        {"tau": tau.to_dict(), "stretch_before": _frac(before), "stretch_after": _frac(after)},
        f"{tau}  (stretch {before} -> {after})",
    )


def cmd_factorize(args):
    phi = _auto_arg(args.auto, args.k)
    f = ideal.factorize(phi, args.max_steps)
    lines = [f"alpha: {f.alpha}"]
    for i, p in enumerate(f.sigmas, 1):
        lines.append(f"sigma_{i}: {p}")
    lines.append("L: " + ", ".join(str(x) for x in f.L_sequence))
    _emit(args, f.to_dict(), "\n".join(lines))


def cmd_current(args):
    if args.kind == "uniform":
        nu = currents.uniform_current(args.k, args.R)
        _emit(args, nu.to_dict(), _current_text(nu))
    elif args.kind == "rational":
        if not args.arg:
            raise UsageError("current rational needs a word")
        w = _cyclic_arg(args.arg, args.k)
        nu = currents.rational_current(w, args.R, args.k)
        _emit(args, nu.to_dict(), _current_text(nu))
    else:
        if not args.arg:
            raise UsageError("current check needs a JSON file")
        with open(args.arg) as fh:
            nu = currents.TruncatedCurrent.from_dict(json.load(fh))
        bad = currents.check_invariance(nu)
        _emit(
            args,
            {"violations": [{"v": word_str(b.v), "side": b.side} for b in bad]},
            "\n".join(str(b) for b in bad) or "ok",
        )
        if bad:
            return 1
    return 0


def _current_text(nu) -> str:
    lines = [f"L = {currents.length(nu)}"]
    for m in range(1, nu.R + 1):
        lines.append(" ".join(f"{word_str(v)}:{x}" for v, x in nu.level(m)))
    return "\n".join(lines)


def cmd_limit_check(args):
    phi = _auto_arg(args.auto, args.k) if args.auto else None
    rep = currents.empirical_limit_check(
        phi, args.n, args.samples, make_rng(args.seed), args.k, args.R
    )
    _emit(args, rep.to_dict(), f"max deviation {rep.max_deviation!r} at {rep.worst_word}")


def cmd_genericity(args):
    if args.predicate == "strictly-minimal":
        pred = cluster_lab.strictly_minimal_predicate(args.k)
    elif args.predicate == "always":
        pred = cluster_lab.always
    else:
        pred = cluster_lab.uniform_neighbourhood(args.eps, args.m, args.k)
    tab = cluster_lab.estimate_genericity(
        pred, args.domain, args.n, args.samples, make_rng(args.seed), args.k
    )
    text = "\n".join(f"n={n} samples={s} frequency={f!r}" for n, s, f in tab.rows)
    _emit(args, tab.to_dict(), text)


def cmd_run(args):
    if not args.config:
        raise UsageError("run needs --config")
    cfg = cluster_lab.ExperimentConfig.from_json(args.config)
    out = args.out or cfg.out_dir
    rep = cluster_lab.run_experiment(cfg)
    if out:
        cluster_lab.write_outputs(rep, out)
    acc = cluster_lab.nearest_centroid_classify(rep)
    summary = {
        "records": len(rep.records),
        "transformed": len(rep.transformed()),
        "accuracy": acc,
        "clusters": [
            {
                "label": c.label,
                "size": c.size,
                "mean_distance": c.mean_distance,
                "fraction_reduced": c.fraction_reduced,
            }
            for c in rep.clusters
        ],
    }
    lines = [f"{len(rep.records)} records, {len(rep.transformed())} transformed, accuracy {acc!r}"]
    for c in rep.clusters:
        lines.append(
            f"  {c.label}: size {c.size}, mean distance {c.mean_distance!r}, "
            f"reduced {c.fraction_reduced!r}"
        )
    _emit(args, summary, "\n".join(lines))


# --- parser ----------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--k", type=int, default=2, help="rank of the free group (default 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--cap", type=int, default=minimizer.DEFAULT_NODE_CAP)
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser(prog: str = "wh") -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog=prog, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    add("reduce", cmd_reduce, "free reduction").add_argument("word")
    add("cyclic", cmd_cyclic, "cyclic reduction").add_argument("word")
    sp = add("count", cmd_count, "occurrences of v in the cyclic word w")
    sp.add_argument("v")
    sp.add_argument("w")
    add("minimize", cmd_minimize, "Whitehead minimization").add_argument("word")
    sp = add("equiv", cmd_equiv, "automorphic equivalence of two words")
    sp.add_argument("u")
    sp.add_argument("v")
    sp = add("whgraph", cmd_whgraph, "Whitehead graph of a cyclic word")
    sp.add_argument("word")
    sp.add_argument("--normalized", action="store_true")
    sp = add("dist", cmd_dist, "distance of normalized Whitehead graphs")
    sp.add_argument("u")
    sp.add_argument("v")
    add("euler", cmd_euler, "Euler word of level m").add_argument("m", type=int)
    add("stretch", cmd_stretch, "generic stretching factor").add_argument("auto")
    add("ideal-step", cmd_ideal_step, "ideal Whitehead step").add_argument("auto")
    sp = add("factorize", cmd_factorize, "stretch-increasing Whitehead factorization")
    sp.add_argument("auto")
    sp.add_argument("--max-steps", type=int, default=ideal.DEFAULT_MAX_STEPS)
    sp = add("current", cmd_current, "uniform / rational currents, invariance check")
    sp.add_argument("kind", choices=["uniform", "rational", "check"])
    sp.add_argument("arg", nargs="?")
    sp.add_argument("--R", type=int, default=currents.DEFAULT_RADIUS)
    sp = add("limit-check", cmd_limit_check, "random words vs. phi n_A")
    sp.add_argument("auto", nargs="?")
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--R", type=int, default=3)
    sp = add("genericity", cmd_genericity, "frequency of a property among random words")
    sp.add_argument("--predicate", choices=["strictly-minimal", "always", "U"],
                    default="strictly-minimal")
    sp.add_argument("--domain", choices=["C", "F"], default="C")
    sp.add_argument("--n", type=int, nargs="+", default=[50, 100, 200])
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--m", type=int, default=2)
    add("run", cmd_run, "cluster experiment")
    return parser


def main(argv=None, prog: str = "wh") -> int:
    parser = build_parser(prog)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not 2 <= args.k <= MAX_RANK:
        parser.print_usage(sys.stderr)
        print(f"{prog}: error: --k must lie in 2..{MAX_RANK}", file=sys.stderr)
        return 2
    try:
        return args.func(args) or 0
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{prog}: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"{prog}: {e}", file=sys.stderr)
        return 1


def cluster_lab_main(argv=None) -> int:
    """``cluster-lab run --config cfg.json --out DIR``."""
    return main(argv, prog="cluster-lab")


if __name__ == "__main__":
    sys.exit(main())

"""phonosim command line interface.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error. All configuration is explicit; no environment variables are read.
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from .density import write_contours_json
from .errors import DataError, PhonosimError
from .formats import fmt_float
from .g2p import MODES, load_ruleset, transliterate
from .ipa import default_policy, load_policy, normalize, tokenize_ipa
from .pca import pca_project, read_coords_csv, write_coords_csv
from .per import corpus_per
from .pipeline import (PipelineConfig, compute_family_contours, load_config,
                       read_corpus_tsv, run_pipeline)
from .registry import load_registry
from .render import render_svg
from .selection import Strategy, select_strategy, selection_report
from .stats import (build_vocabulary, count_phonemes, read_matrix_csv,
                    similarity_matrix, to_distribution,
                    write_distributions_csv, write_matrix_csv)
from .typology import impute, load_feature_matrix, project_typology

STRATEGY_CHOICES = tuple(s.value for s in Strategy)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for data
    # errors here, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _policy_from(args):
    return load_policy(args.policy) if args.policy else default_policy()


def _cmd_registry_validate(args):
    reg = load_registry(args.path, low_resource_threshold_hours=args.threshold)
    print(f"languages\t{len(reg)}")
    print("low_resource\t" + " ".join(reg.low_resource_codes()))
    families = {}
    for record in reg:
        families[record.family] = families.get(record.family, 0) + 1
    print("families\t" + " ".join(f"{fam}:{n}" for fam, n in sorted(families.items())))
    return 0


def _cmd_ipa_tokenize(args):
    policy = _policy_from(args)
    for raw in sys.stdin:
        segments = tokenize_ipa(raw.rstrip("\n"))
        if not args.raw:
            segments = normalize(segments, policy)
        print(" ".join(segments))
    return 0


def _cmd_g2p(args):
    rs = load_ruleset(args.rules)
    policy = _policy_from(args)
    for raw in sys.stdin:
        seq = transliterate(raw.rstrip("\n"), rs, policy, mode=args.mode)
        print(" ".join(seq))
    return 0


def _scan_corpus_languages(corpus_dir):
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise DataError(f"corpus directory {corpus_dir} does not exist")
    codes = sorted(p.stem for p in corpus_dir.glob("*.tsv"))
    if not codes:
        raise DataError(f"no .tsv corpus files in {corpus_dir}")
    return codes


def _cmd_sim_matrix(args):
    policy = _policy_from(args)
    rules_dir = Path(args.rules_dir)
    codes = _scan_corpus_languages(args.corpus_dir)
    count_maps = {}
    for code in codes:
        rules_path = rules_dir / f"{code}.rules"
        if not rules_path.is_file():
            raise DataError(f"missing rules file for language {code!r} "
                            f"(expected {rules_path})")
        rs = load_ruleset(rules_path)
        utterances = read_corpus_tsv(Path(args.corpus_dir) / f"{code}.tsv")
        counts = count_phonemes((text for _, text in utterances), rs, policy,
                                mode=args.mode)
        if not counts:
            print(f"warning: language {code!r} has an empty corpus; excluded",
                  file=sys.stderr)
            continue
        count_maps[code] = counts
    if len(count_maps) < 2:
        raise DataError("need at least 2 languages with nonempty corpora")
    vocab = build_vocabulary(count_maps.values())
    dists = [to_distribution(count_maps[code], vocab, language_code=code)
             for code in sorted(count_maps)]
    matrix = similarity_matrix(dists)
    write_matrix_csv(matrix, args.out)
    if args.distributions:
        write_distributions_csv(dists, vocab, args.distributions)
    print(f"wrote {len(matrix.codes)}x{len(matrix.codes)} matrix to {args.out}")
    return 0


def _cmd_pca(args):
    matrix = read_matrix_csv(getattr(args, "in"))
    proj = pca_project(matrix.values, matrix.codes, dims=2)
    write_coords_csv(proj, args.out)
    ev1, ev2 = proj.explained_variance[:2]
    print(f"explained variance: {fmt_float(ev1)} {fmt_float(ev2)}")
    return 0


def _cmd_contours(args):
    codes, coords = read_coords_csv(args.coords)
    reg = load_registry(args.registry)
    contour_sets = compute_family_contours(
        codes, coords, reg, level=args.level, relative=args.relative,
        resolution=args.resolution, robust=args.robust_bandwidth)
    out = Path(args.out)
    if out.suffix.lower() == ".svg":
        points = [(code, float(x), float(y), reg.get(code).family)
                  for code, (x, y) in zip(codes, coords)]
        render_svg(points, contour_sets, out)
    elif out.suffix.lower() == ".json":
        write_contours_json(contour_sets, out)
    else:
        raise DataError("output must end in .json or .svg")
    print(f"wrote {len(contour_sets)} family contour set(s) to {out}")
    return 0


def _cmd_typology(args):
    fm = load_feature_matrix(args.features)
    values = impute(fm, method=args.impute)
    proj = project_typology(values, fm.language_ids)
    families = None
    if args.registry:
        reg = load_registry(args.registry)
        families = {r.code: r.family for r in reg}
    write_coords_csv(proj, args.out, families=families)
    ev1, ev2 = proj.explained_variance[:2]
    print(f"projected {len(fm.language_ids)} languages over "
          f"{len(fm.feature_ids)} features; explained variance "
          f"{fmt_float(ev1)} {fmt_float(ev2)}")
    return 0


def _cmd_select(args):
    reg = load_registry(args.registry)
    matrix = read_matrix_csv(args.matrix) if args.matrix else None
    sel = select_strategy(args.target, args.strategy, reg, matrix=matrix, k=args.k)
    report = selection_report(sel)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(report)
    else:
        sys.stdout.write(report)
    return 0


def _read_sequences(path):
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n").split() for line in f]


def _cmd_per(args):
    refs = _read_sequences(args.ref)
    hyps = _read_sequences(args.hyp)
    if len(refs) != len(hyps):
        raise DataError(
            f"reference has {len(refs)} lines but hypothesis has {len(hyps)}")
    report = corpus_per(list(zip(refs, hyps)), macro=args.macro)
    print(f"substitutions\t{report.substitutions}")
    print(f"insertions\t{report.insertions}")
    print(f"deletions\t{report.deletions}")
    print(f"reference_length\t{report.reference_length}")
    print(f"per_percent\t{fmt_float(report.per_percent)}")
    return 0


def _cmd_pipeline(args):
    def absolute(value):
        # flag paths resolve against the cwd even when a config file
        # (whose own paths resolve against its directory) is in play
        return None if value is None else str(Path(value).absolute())

    overrides = {
        "corpus_dir": absolute(args.corpus_dir),
        "rules_dir": absolute(args.rules_dir),
        "registry": absolute(args.registry),
        "policy": absolute(args.policy),
        "target": args.target,
        "strategy": args.strategy,
        "k": args.k,
        "level": args.level,
        "relative": "true" if args.relative else None,
        "resolution": args.resolution,
        "out": absolute(args.out),
    }
    if args.config:
        cfg = load_config(args.config, overrides)
    else:
        missing = [k for k in ("corpus_dir", "rules_dir", "registry", "target", "out")
                   if overrides.get(k) is None]
        if missing:
            raise DataError(
                "without --config these flags are required: "
                + ", ".join(f"--{m.replace('_', '-')}" for m in missing))
        cfg = PipelineConfig(
            corpus_dir=args.corpus_dir, rules_dir=args.rules_dir,
            registry_path=args.registry, output_dir=args.out,
            target=args.target, strategy=args.strategy or "corpus_sim",
            policy_path=args.policy, k=args.k if args.k is not None else 3,
            contour_level=args.level if args.level is not None else 0.1,
            relative_level=args.relative,
            resolution=args.resolution if args.resolution is not None else 512)
    artifacts = run_pipeline(cfg)
    for name in sorted(artifacts):
        print(f"wrote {artifacts[name]}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="phonosim",
                     description="Language similarity toolkit: G2P, phoneme "
                                 "distributions, PCA/KDE maps, source selection, PER.")
    parser.add_argument("--version", action="version", version=f"phonosim {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("registry", help="registry file operations")
    rsub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    v = rsub.add_parser("validate", help="load a registry and print a summary")
    v.add_argument("path")
    v.add_argument("--threshold", type=float, default=15.0,
                   help="low-resource threshold in hours (default 15)")
    v.set_defaults(func=_cmd_registry_validate)

    p = sub.add_parser("ipa", help="IPA utilities")
    isub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    t = isub.add_parser("tokenize", help="tokenize stdin lines into segments")
    t.add_argument("--policy", help="normalization policy file")
    t.add_argument("--raw", action="store_true", help="skip normalization")
    t.set_defaults(func=_cmd_ipa_tokenize)

    p = sub.add_parser("g2p", help="convert stdin text lines to phonemes")
    p.add_argument("--rules", required=True, help="rule file")
    p.add_argument("--policy", help="normalization policy file")
    p.add_argument("--mode", choices=MODES, default="error")
    p.set_defaults(func=_cmd_g2p)

    p = sub.add_parser("sim", help="similarity computations")
    ssub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    m = ssub.add_parser("matrix", help="build the cosine similarity matrix")
    m.add_argument("--corpus-dir", required=True)
    m.add_argument("--rules-dir", required=True)
    m.add_argument("--policy")
    m.add_argument("--out", required=True)
    m.add_argument("--distributions", help="also export distribution vectors")
    m.add_argument("--mode", choices=MODES, default="error")
    m.set_defaults(func=_cmd_sim_matrix)

    p = sub.add_parser("pca", help="project matrix rows to 2D")
    p.add_argument("--in", required=True, help="similarity matrix CSV")
    p.add_argument("--out", required=True, help="coordinates CSV")
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("contours", help="family KDE contours from coordinates")
    p.add_argument("--coords", required=True, help="coordinates CSV")
    p.add_argument("--registry", required=True)
    p.add_argument("--level", type=float, default=0.1)
    p.add_argument("--relative", action="store_true",
                   help="treat level as a fraction of each family's peak")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--robust-bandwidth", action="store_true",
                   help="use the min(sigma, IQR/1.34) bandwidth variant")
    p.add_argument("--out", required=True, help=".json or .svg")
    p.set_defaults(func=_cmd_contours)

    p = sub.add_parser("typology", help="PCA of a binary feature matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--impute", choices=("none", "column_mode"), default="none")
    p.add_argument("--registry", help="adds a family column to the output")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_typology)

    p = sub.add_parser("select", help="pick source languages for a target")
    p.add_argument("--target", required=True)
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--registry", required=True)
    p.add_argument("--matrix", help="similarity matrix CSV (corpus_sim)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("per", help="phoneme error rate between two files")
    p.add_argument("--ref", required=True, help="reference sequences, one per line")
    p.add_argument("--hyp", required=True, help="hypothesis sequences, line-aligned")
    p.add_argument("--macro", action="store_true",
                   help="average per-utterance percentages instead of pooling")
    p.set_defaults(func=_cmd_per)

    p = sub.add_parser("pipeline", help="run the full analysis pipeline")
    p.add_argument("--config", help="INI file with a [pipeline] section")
    p.add_argument("--corpus-dir")
    p.add_argument("--rules-dir")
    p.add_argument("--registry")
    p.add_argument("--policy")
    p.add_argument("--target")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES)
    p.add_argument("--k", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--relative", action="store_true")
    p.add_argument("--resolution", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        func = getattr(args, "func", None)
        if func is None:
            parser.print_help(sys.stderr)
            return 1
        return func(args)
    except SystemExit as e:
        return int(e.code or 0)
    except BrokenPipeError:
        return 0
    except (PhonosimError, OSError, UnicodeDecodeError) as e:
        print(f"phonosim: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - defensive
        print(f"phonosim: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()

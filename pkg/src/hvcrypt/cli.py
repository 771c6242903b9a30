"""Command-line front end."""
from __future__ import annotations

import argparse
import hashlib
import secrets
import sys
from pathlib import Path

from . import __version__
from .analysis import format_csv, pixel_stats, report, StatsReport, write_csv
from .bitmap import BinaryImage, PbmError, load_pbm, parse_pbm, save_pbm
from .codec import MIXED_POLICIES
from .hvc import (LEAVES, STRATEGIES, KeyMapping, encode_hierarchical,
                  generate_key_share, reveal_chain, reveal_final)
from .rng import GENERATOR, MASK64
from .vc2 import EncodeConfig, encode

LEAF_FILES = {"s1": "s1.pbm", "s2": "s2.pbm", "s11": "s11.pbm", "s12": "s12.pbm",
              "s21": "s21.pbm", "s22": "s22.pbm", "keyshare": "keyshare.pbm",
              "carrier": "carrier.pbm"}

DEFAULTS = {
    "seed": "0",
    "mixed_policy": "paper-random",
    "normalize": "scale",
    "key_mapping": "table",
    "keyshare_inputs": "s12,s21,s22",
    "format": "p4",
}
MANIFEST_KEYS = ("generator", "seed", "mixed_policy", "normalize", "key_mapping",
                 "keyshare_inputs", "strategy", "format", "secret_sha256")


class CliError(Exception):
    pass


def parse_seed(text: str) -> tuple[int, bool]:
    if text == "random":
        return secrets.randbits(64), True
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}")
    if not 0 <= seed <= MASK64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed, False


def parse_inputs(text: str) -> tuple[str, str, str]:
    names = tuple(t.strip() for t in text.split(","))
    if len(names) != 3 or len(set(names)) != 3 or not set(names) <= set(LEAVES):
        raise argparse.ArgumentTypeError(
            f"expected three distinct names from {','.join(LEAVES)}, got {text!r}")
    return names  # type: ignore[return-value]


def _load(path) -> BinaryImage:
    try:
        return load_pbm(path)
    except PbmError as e:
        raise CliError(f"{path}: {e}")


def _save(img: BinaryImage, path: Path, fmt: str) -> None:
    save_pbm(img, path, fmt.upper())
    if load_pbm(path) != img:
        raise CliError(f"{path}: written file does not read back identically")


def _config(args) -> tuple[EncodeConfig, int, bool]:
    seed, drawn = parse_seed(args.seed)
    return EncodeConfig(seed, args.mixed_policy, args.normalize), seed, drawn


def cmd_encode(args) -> int:
    secret = _load(args.secret)
    cfg, seed, _ = _config(args)
    pair = encode(secret, cfg, workers=args.workers)
    _save(pair.share1, Path(args.out1), args.format)
    _save(pair.share2, Path(args.out2), args.format)
    print(f"normalized={pair.source_dims} seed={seed}")
    return 0


def _write_bundle(bundle, outdir: Path, fmt: str) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, fname in LEAF_FILES.items():
        img = bundle.key_share if name == "keyshare" else getattr(bundle, name)
        _save(img, outdir / fname, fmt)


def cmd_encode_hvc(args) -> int:
    secret = _load(args.secret)
    cfg, seed, _ = _config(args)
    mapping = KeyMapping(args.key_mapping, parse_inputs(args.keyshare_inputs))
    bundle = encode_hierarchical(secret, cfg, mapping, workers=args.workers)
    _write_bundle(bundle, Path(args.outdir), args.format)
    print(f"normalized={bundle.s1.dims} seed={seed} carrier={mapping.carrier}")
    return 0


def cmd_reveal(args) -> int:
    imgs = [_load(p) for p in args.inputs]
    if args.strategy == "chain":
        if len(imgs) != 4:
            raise CliError("chain needs four inputs: s11 s12 s21 s22")
        out = reveal_chain(imgs)
    else:
        if len(imgs) != 2:
            raise CliError(f"{args.strategy} needs exactly two inputs, got {len(imgs)}")
        out = reveal_final(imgs[0], imgs[1], args.strategy)
    _save(out, Path(args.out), args.format)
    print(f"revealed {out.dims} strategy={args.strategy}")
    return 0


def cmd_keyshare(args) -> int:
    a, b, c = (_load(p) for p in (args.a, args.b, args.c))
    key = generate_key_share(a, b, c, args.key_mapping)
    _save(key, Path(args.out), args.format)
    print(f"key share {key.dims} mapping={args.key_mapping} black={key.black}")
    return 0


def cmd_analyze(args) -> int:
    rows = tuple(pixel_stats(_load(p), Path(p).stem) for p in args.images)
    rep = StatsReport(rows)
    if args.csv:
        write_csv(rep, args.csv)
    width = max(len(r.entity) for r in rows)
    print(f"{'entity':<{width}}  {'black':>8}  {'white':>8}  {'total':>8}  black%  white%")
    for r in rows:
        print(f"{r.entity:<{width}}  {r.black:>8}  {r.white:>8}  {r.total:>8}  "
              f"{100 * r.black_fraction:5.1f}  {100 * r.white_fraction:5.1f}")
    return 0


# ----------------------------------------------------------------- pipeline

def read_manifest(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise CliError(f"{path}:{n}: expected key=value")
            if key not in MANIFEST_KEYS:
                raise CliError(f"{path}:{n}: unknown manifest key {key!r}")
            out[key] = value
    return out


def format_manifest(settings: dict[str, str]) -> str:
    return "".join(f"{k}={settings[k]}\n" for k in MANIFEST_KEYS)


def _resolve_pipeline_settings(args, secret_bytes: bytes) -> dict[str, str]:
    explicit = {k: getattr(args, k) for k in (*DEFAULTS, "strategy")
                if getattr(args, k) is not None}
    digest = hashlib.sha256(secret_bytes).hexdigest()
    if args.manifest:
        m = read_manifest(args.manifest)
        if m.get("generator", GENERATOR) != GENERATOR:
            raise CliError(f"manifest was made with generator {m['generator']}, "
                           f"this build uses {GENERATOR}")
        if "secret_sha256" in m and m["secret_sha256"] != digest:
            raise CliError("secret does not match the manifest's secret_sha256")
        for k, v in explicit.items():
            if m.get(k, v) != v:
                raise CliError(f"--{k.replace('_', '-')} conflicts with the manifest")
        if m.get("seed") == "random":
            raise CliError("manifest seed must be a number")
        settings = {**DEFAULTS, "strategy": "xor-denoise", **m, **explicit}
    else:
        settings = {**DEFAULTS, "strategy": "xor-denoise", **explicit}
    seed, drawn = parse_seed(settings["seed"])
    if drawn:
        print(f"seed={seed} (drawn at random)")
    settings.update(seed=str(seed), generator=GENERATOR, secret_sha256=digest)
    return settings


def cmd_pipeline(args) -> int:
    secret_path = Path(args.secret)
    raw = secret_path.read_bytes()
    try:
        secret = parse_pbm(raw)
    except PbmError as e:
        raise CliError(f"{secret_path}: {e}")
    s = _resolve_pipeline_settings(args, raw)
    for key, choices in (("mixed_policy", MIXED_POLICIES), ("normalize", ("scale", "pad")),
                         ("key_mapping", ("table", "rules")), ("strategy", STRATEGIES),
                         ("format", ("p1", "p4"))):
        if s[key] not in choices:
            raise CliError(f"invalid {key} {s[key]!r}; choose from {', '.join(choices)}")
    try:
        inputs = parse_inputs(s["keyshare_inputs"])
    except argparse.ArgumentTypeError as e:
        raise CliError(str(e))
    cfg = EncodeConfig(int(s["seed"]), s["mixed_policy"], s["normalize"])
    mapping = KeyMapping(s["key_mapping"], inputs)
    bundle = encode_hierarchical(secret, cfg, mapping, workers=args.workers)
    if s["strategy"] == "chain":
        revealed = reveal_chain(bundle)
    else:
        revealed = reveal_final(bundle.carrier, bundle.key_share, s["strategy"])

    outdir = Path(args.outdir)
    _write_bundle(bundle, outdir, s["format"])
    _save(revealed, outdir / "revealed.pbm", s["format"])
    rep = report(bundle, secret, revealed, cfg.normalize_mode)
    write_csv(rep, outdir / "stats.csv")
    (outdir / "manifest.txt").write_text(format_manifest(s), encoding="utf-8", newline="\n")
    print(f"normalized={bundle.s1.dims} seed={s['seed']} carrier={mapping.carrier} "
          f"strategy={s['strategy']}")
    print(format_csv(rep), end="")
    return 0


# ------------------------------------------------------------------- parser

def _add_encode_flags(p, pipeline=False):
    d = (lambda v: None) if pipeline else (lambda v: v)
    p.add_argument("--seed", default=d(DEFAULTS["seed"]), metavar="N",
                   help="64-bit seed, or 'random' (default 0)")
    p.add_argument("--mixed-policy", choices=MIXED_POLICIES, default=d("paper-random"))
    p.add_argument("--normalize", choices=("scale", "pad"), default=d("scale"))
    p.add_argument("--format", choices=("p1", "p4"), default=d("p4"), type=str.lower)
    p.add_argument("--workers", type=int, default=1,
                   help="threads for block encoding; output does not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvcrypt",
        description="Expansionless 2-out-of-2 and hierarchical visual cryptography on PBM images.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sp = parser.add_subparsers(dest="command", required=True)

    p = sp.add_parser("encode", help="split a secret into two shares")
    p.add_argument("secret")
    p.add_argument("out1")
    p.add_argument("out2")
    _add_encode_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sp.add_parser("encode-hvc", help="two-level encryption plus key share")
    p.add_argument("secret")
    p.add_argument("outdir")
    _add_encode_flags(p)
    p.add_argument("--key-mapping", choices=("table", "rules"), default="table")
    p.add_argument("--keyshare-inputs", default=DEFAULTS["keyshare_inputs"], metavar="A,B,C")
    p.set_defaults(func=cmd_encode_hvc)

    p = sp.add_parser("reveal", help="stack shares (chain takes s11 s12 s21 s22)")
    p.add_argument("inputs", nargs="+", metavar="SHARE")
    p.add_argument("out")
    p.add_argument("--strategy", choices=STRATEGIES, default="xor")
    p.add_argument("--format", choices=("p1", "p4"), default="p4", type=str.lower)
    p.set_defaults(func=cmd_reveal)

    p = sp.add_parser("keyshare", help="derive a key share from three leaf shares")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("out")
    p.add_argument("--key-mapping", choices=("table", "rules"), default="table")
    p.add_argument("--format", choices=("p1", "p4"), default="p4", type=str.lower)
    p.set_defaults(func=cmd_keyshare)

    p = sp.add_parser("analyze", help="black/white pixel counts per image")
    p.add_argument("images", nargs="+")
    p.add_argument("--csv", metavar="PATH", help="also write entity,black,white,total CSV")
    p.set_defaults(func=cmd_analyze)

    p = sp.add_parser("pipeline", help="full hierarchy, reveal, stats.csv and manifest")
    p.add_argument("secret")
    p.add_argument("outdir")
    _add_encode_flags(p, pipeline=True)
    p.add_argument("--key-mapping", choices=("table", "rules"), default=None)
    p.add_argument("--keyshare-inputs", default=None, metavar="A,B,C")
    p.add_argument("--strategy", choices=STRATEGIES, default=None,
                   help="reveal strategy for revealed.pbm (default xor-denoise)")
    p.add_argument("--manifest", metavar="FILE", help="replay settings from a manifest")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    if args.command != "pipeline" and hasattr(args, "seed"):
        try:
            parse_seed(args.seed)
        except argparse.ArgumentTypeError as e:
            parser.error(str(e))
    if hasattr(args, "keyshare_inputs") and args.keyshare_inputs is not None:
        try:
            parse_inputs(args.keyshare_inputs)
        except argparse.ArgumentTypeError as e:
            parser.error(str(e))
    try:
        return args.func(args)
    except (CliError, PbmError, OSError, ValueError) as e:
        print(f"hvcrypt: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Command-line front end for the SCF codec: encode, decode, inspect, corpus
generation and the A/B benchmark.

Exit codes: 0 success, 1 usage, 2 I/O, 3 corrupt stream.
"""

import argparse
import sys
import time
from pathlib import Path

import pandas as pd
from dotenv import find_dotenv, load_dotenv

# LOG_* settings are read when the Logger singleton is created, which happens
# while the scfcodec modules below are imported.
load_dotenv(find_dotenv(usecwd=True))

from scfcodec.bench.corpus import CorpusSpec, write_corpus  # noqa: E402
from scfcodec.bench.report import run_bench  # noqa: E402
from scfcodec.codec import SCFEncoder, decode  # noqa: E402
from scfcodec.core.bitstream import BitstreamHeader, is_bitstream  # noqa: E402
from scfcodec.core.config import CodecConfig  # noqa: E402
from scfcodec.core.errors import BitstreamError, CorruptStreamError, ImageFormatError  # noqa: E402
from scfcodec.core.image import parse_ppm, read_ppm, write_ppm  # noqa: E402
from scfcodec.core.logger import Logger  # noqa: E402
from scfcodec.stages.palette_model import NUM_CONTEXTS  # noqa: E402

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CORRUPT = 3

logger = Logger()


class UsageArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def add_codec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--no-stage3-pruning', action='store_true',
                        help="Code every residual with the MAPc case-3 histogram.")
    parser.add_argument('--no-escape-ctx', action='store_true',
                        help="Condition the palette escape on similarity instead of new-color contexts.")
    parser.add_argument('--exclude-stage1-colors', action='store_true',
                        help="Remove colors already offered by Stage 1 from the palette distribution.")
    parser.add_argument('--tolerance', type=int, default=None,
                        help="Pattern similarity tolerance per component (default 0, exact).")
    parser.add_argument('--debug-checksums', action='store_true',
                        help="Record model-state checksums at every row boundary.")


def config_from_args(args) -> CodecConfig:
    return CodecConfig.from_env(
        enable_stage3_pruning=False if args.no_stage3_pruning else None,
        enable_escape_context_model=False if args.no_escape_ctx else None,
        exclude_stage1_colors=True if args.exclude_stage1_colors else None,
        similarity_tolerance=args.tolerance,
        debug_checksums=True if args.debug_checksums else None,
    )


def cmd_encode(args) -> int:
    """Encode a PPM file into an SCF bitstream."""
    cfg = config_from_args(args)
    logger.log_codec_start('encode', args.input)
    started = time.perf_counter()
    img = read_ppm(args.input)
    data, stats = SCFEncoder(cfg).encode_with_stats(img)
    Path(args.output).write_bytes(data)
    logger.log_codec_end('encode', len(data), time.perf_counter() - started)
    logger.log_stage_stats(Path(args.input).name, stats)
    if args.stats:
        row = {'input': args.input, 'output': args.output, 'config': cfg.label}
        row.update(stats.as_row())
        pd.DataFrame([row]).to_csv(args.stats, index=False)
        logger.log_report_saved(args.stats, 1)
    return EXIT_OK


def cmd_decode(args) -> int:
    """Decode an SCF bitstream into a PPM file."""
    logger.log_codec_start('decode', args.input)
    started = time.perf_counter()
    data = Path(args.input).read_bytes()
    img = decode(data)
    write_ppm(args.output, img)
    logger.log_codec_end('decode', len(data), time.perf_counter() - started)
    return EXIT_OK


def cmd_inspect(args) -> int:
    """Print model statistics for a PPM (encoded in memory) or an SCF file (decoded)."""
    data = Path(args.input).read_bytes()
    if is_bitstream(data):
        img = decode(data)
        cfg = BitstreamHeader.unpack(data).config
    else:
        img = parse_ppm(data)
        cfg = config_from_args(args)
    encoder = SCFEncoder(cfg)
    encoded, stats = encoder.encode_with_stats(img)
    print(format_inspection(args.input, cfg, encoder.describe(), stats, len(encoded)))
    return EXIT_OK


def format_inspection(name, cfg, models, stats, n_bytes) -> str:
    lines = [
        f"== {name}: {stats.width}x{stats.height}, {n_bytes} bytes, {stats.bpp:.3f} bpp ({cfg.label})",
        f"unique colors: {stats.unique_colors} ({100.0 * stats.unique_fraction:.2f}%)",
        "stage  pixels  bits        escapes",
    ]
    for n in range(3):
        escapes = stats.stage_escapes[n] if n < 2 else '-'
        lines.append(f"{n + 1:<6} {stats.stage_pixels[n]:<7} {stats.stage_bits[n]:<11.1f} {escapes}")
    lines.append(f"overhead bits: {stats.overhead_bits:.2f}")

    store = models['pattern_store']
    lines.append("pattern store entries per level: " + ', '.join(
        f"s={s}: {n}" for s, n in store['entries_per_level'].items()))
    lines.append("stage-1 escapes per level (escaped/total): " + ', '.join(
        f"s={s}: {e[0]}/{e[1]}" for s, e in store['stage1_escapes_per_level'].items()))

    palette = models['palette']
    lines.append(f"palette: {palette['palette_size']} colors, total count {palette['palette_total']}")
    lines.append("escape contexts (FEDCBA new/total p):")
    for ctx in range(NUM_CONTEXTS):
        n_new, n_total = palette['escape_contexts'].get(ctx, (0, 0))
        if n_total:
            lines.append(f"  {ctx:2d} {ctx:06b} {n_new:5d}/{n_total:<5d} {(n_new + 1) / (n_total + 2):.3f}")
    lines.append("similarity escapes (new/total): " + ', '.join(
        f"s={s}: {e[0]}/{e[1]}" for s, e in palette['similarity_escapes'].items()))

    residual = models['residual']
    lines.append(f"residual threshold t = {residual['threshold']}")
    for k, (cases, decisions) in enumerate(zip(residual['cases_per_component'],
                                               residual['decisions_per_component'])):
        lines.append(f"  component {k}: {cases}, in-range decisions {decisions[0]}/{decisions[1]}")
    return '\n'.join(lines)


def cmd_gen_corpus(args) -> int:
    """Generate a deterministic synthetic screen-content corpus."""
    spec = CorpusSpec(
        count=args.count, min_size=args.min_size, max_size=args.max_size,
        screen=args.screen, window=args.window, photo=args.photo, noise=args.noise,
        flat=args.flat, text=args.text,
        palette_size=args.palette_size, color_levels=args.color_levels,
        patches=args.patches, gradient_bars=args.gradient_bars, seed=args.seed,
    )
    entries = write_corpus(spec, args.output)
    print(f"Wrote {len(entries)} images to {args.output}")
    return EXIT_OK


def cmd_bench(args) -> int:
    """Run the four-way A/B benchmark over a corpus directory."""
    tolerance = CodecConfig.from_env(similarity_tolerance=args.tolerance).similarity_tolerance
    report = run_bench(args.corpus, jobs=args.jobs, verify=not args.no_verify, tolerance=tolerance)
    summary_path = report.to_csv(args.out)
    print("\n=== BENCH SUMMARY (percent of 'both') ===")
    print(report.format_summary())
    print(f"Rows: {args.out} | Summary: {summary_path}")
    if not args.no_verify and not report.rows['roundtrip_ok'].all():
        return EXIT_CORRUPT
    return EXIT_OK


COMMANDS = {
    'encode': cmd_encode,
    'decode': cmd_decode,
    'inspect': cmd_inspect,
    'gen-corpus': cmd_gen_corpus,
    'bench': cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = UsageArgumentParser(description="Lossless screen-content codec (soft context formation).")
    parser.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL.")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=UsageArgumentParser)

    p = sub.add_parser('encode', help="Encode a PPM file.")
    p.add_argument('input')
    p.add_argument('output')
    p.add_argument('--stats', default=None, help="Write per-stage statistics to this CSV file.")
    add_codec_flags(p)

    p = sub.add_parser('decode', help="Decode an SCF file to PPM.")
    p.add_argument('input')
    p.add_argument('output')

    p = sub.add_parser('inspect', help="Print model statistics for a PPM or SCF file.")
    p.add_argument('input')
    add_codec_flags(p)

    p = sub.add_parser('gen-corpus', help="Generate a synthetic corpus of PPM files.")
    p.add_argument('output')
    defaults = CorpusSpec()
    p.add_argument('--seed', type=int, default=defaults.seed)
    p.add_argument('--count', type=int, default=defaults.count)
    p.add_argument('--min-size', type=int, default=defaults.min_size)
    p.add_argument('--max-size', type=int, default=defaults.max_size)
    p.add_argument('--screen', type=float, default=defaults.screen, help="Weight of interface-only images.")
    p.add_argument('--window', type=float, default=defaults.window, help="Weight of screens with a photo window.")
    p.add_argument('--photo', type=float, default=defaults.photo, help="Weight of full-frame photos.")
    p.add_argument('--noise', type=float, default=defaults.noise, help="Weight of uniform noise images.")
    p.add_argument('--flat', type=float, default=defaults.flat, help="Weight of flat interface panels.")
    p.add_argument('--text', type=float, default=defaults.text, help="Weight of text interface panels.")
    p.add_argument('--palette-size', type=int, default=defaults.palette_size)
    p.add_argument('--color-levels', type=int, default=defaults.color_levels)
    p.add_argument('--patches', type=int, default=defaults.patches)
    p.add_argument('--gradient-bars', type=int, default=defaults.gradient_bars)

    p = sub.add_parser('bench', help="Run the A/B benchmark over a corpus directory.")
    p.add_argument('corpus')
    p.add_argument('--out', default='bench_report.csv')
    p.add_argument('--jobs', type=int, default=None)
    p.add_argument('--tolerance', type=int, default=None, help="Similarity tolerance (default SCF_TOLERANCE or 0).")
    p.add_argument('--no-verify', action='store_true', help="Skip decoding every bitstream.")
    return parser


def main(argv=None) -> int:
    """Main function to parse arguments and run the selected command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        logger.set_level(args.log_level)

    handler = COMMANDS[args.command]
    target = getattr(args, 'input', None) or getattr(args, 'corpus', None) or getattr(args, 'output', None)
    try:
        return handler(args)
    except (BitstreamError, CorruptStreamError) as e:
        logger.log_codec_error(args.command, e, target)
        return EXIT_CORRUPT
    except (ImageFormatError, OSError) as e:
        logger.log_codec_error(args.command, e, target)
        return EXIT_IO
    except ValueError as e:
        logger.log_codec_error(args.command, e, target)
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"An error occurred during '{args.command}': {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

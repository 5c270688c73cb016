"""Command-line entry points: ``embed`` and ``translate``."""
from __future__ import annotations

import argparse
import logging
import sys

from .embed import DEFAULT_MODEL, EmbedJob, ModelLoadError, embed_batch
from .records import read_records, write_records
from .translate import read_sidecar, translate_passthrough

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xldrift-embed",
        description="Embed record files into xldrift vector files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="embed records into an XLDV file")
    p_embed.add_argument("--records", required=True)
    p_embed.add_argument("--out", required=True)
    p_embed.add_argument("--model", default=DEFAULT_MODEL)
    p_embed.add_argument("--batch-size", type=int, default=64)
    p_embed.add_argument("--device", default=None)

    p_tr = sub.add_parser(
        "translate",
        help="attach sidecar translations as mt_en records (no live translation)",
    )
    p_tr.add_argument("--records", required=True)
    p_tr.add_argument("--sidecar", required=True)
    p_tr.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "embed":
            job = EmbedJob(
                input_path=args.records,
                output_path=args.out,
                model=args.model,
                batch_size=args.batch_size,
                device=args.device,
            )
            count = embed_batch(job)
            print(f"wrote {count} vectors to {args.out}")
        else:
            records = read_records(args.records)
            translated = translate_passthrough(records, read_sidecar(args.sidecar))
            write_records(args.out, translated)
            print(f"wrote {len(translated)} mt_en records to {args.out}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

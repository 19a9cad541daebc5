"""Command-line interface: scan, serve, gen-fixtures."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from . import corpus
from .geo_services import (
    GeoLookupClient,
    GeoProviderConfig,
    GeoServices,
    ProviderKind,
    offline_services,
)
from .indexer import ScanAbortedError, ScanConfig, ScanSetupError, scan_tree

logger = logging.getLogger(__name__)

WORKSPACE_ENV = "GEOEXIF_WORKSPACE"


def _workspace_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workspace",
        default=os.environ.get(WORKSPACE_ENV),
        help=f"output directory (default: ${WORKSPACE_ENV})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoexif",
        description="Forensic photo-geolocation workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan an evidence tree read-only")
    scan.add_argument("--root", required=True, help="evidence directory")
    _workspace_arg(scan)
    scan.add_argument("--thumb-px", type=int, default=256)
    scan.add_argument("--workers", type=int, default=1)
    scan.add_argument("--reverse-geocode", action="store_true")
    scan.add_argument("--altitude-check", action="store_true")
    scan.add_argument(
        "--offline",
        action="store_true",
        help="force offline stub providers regardless of endpoints",
    )
    scan.add_argument("--geocode-endpoint", help="URL template with {lat}/{lng}")
    scan.add_argument("--geocode-field", default="display_name")
    scan.add_argument("--elevation-endpoint", help="URL template with {lat}/{lng}")
    scan.add_argument("--elevation-field", default="results.0.elevation")
    scan.add_argument("--geocode-stub", help="offline stub table file")
    scan.add_argument("--elevation-stub", help="offline stub table file")

    serve = sub.add_parser("serve", help="serve the API and UI")
    _workspace_arg(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui", help="directory with built UI assets")

    gen = sub.add_parser("gen-fixtures", help="write a synthetic test corpus")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument(
        "--spec",
        default="demo",
        help="corpus recipe: a JSON file path or one of "
        + "/".join(sorted(corpus.BUILTIN_CORPORA)),
    )

    return parser


def _build_services(args: argparse.Namespace, workspace: Path) -> GeoServices:
    if args.offline or not (args.geocode_endpoint or args.elevation_endpoint):
        services = offline_services(workspace)
        if args.geocode_stub:
            services.geocoder = GeoLookupClient(
                GeoProviderConfig(
                    cache_path=workspace / "geocode-cache.json",
                    stub_table_path=Path(args.geocode_stub),
                )
            )
        if args.elevation_stub:
            services.elevation = GeoLookupClient(
                GeoProviderConfig(
                    cache_path=workspace / "elevation-cache.json",
                    stub_table_path=Path(args.elevation_stub),
                ),
                numeric=True,
            )
        return services

    def client(endpoint: Optional[str], field: str, cache: str, numeric: bool):
        if endpoint is None:
            return GeoLookupClient(
                GeoProviderConfig(cache_path=workspace / cache), numeric=numeric
            )
        return GeoLookupClient(
            GeoProviderConfig(
                provider=ProviderKind.HTTP_PROVIDER,
                endpoint=endpoint,
                response_field=field,
                cache_path=workspace / cache,
            ),
            numeric=numeric,
        )

    return GeoServices(
        geocoder=client(
            args.geocode_endpoint, args.geocode_field, "geocode-cache.json", False
        ),
        elevation=client(
            args.elevation_endpoint,
            args.elevation_field,
            "elevation-cache.json",
            True,
        ),
    )


def cmd_scan(args: argparse.Namespace) -> int:
    if not args.workspace:
        print("error: --workspace or $GEOEXIF_WORKSPACE required", file=sys.stderr)
        return 2
    root = Path(args.root)
    if not root.is_dir():
        print(f"error: root is not a directory: {root}", file=sys.stderr)
        return 2
    workspace = Path(args.workspace)
    try:
        config = ScanConfig(
            root=root,
            workspace=workspace,
            thumbnail_max_px=args.thumb_px,
            reverse_geocode=args.reverse_geocode,
            altitude_check=args.altitude_check,
            workers=args.workers,
        )
        workspace.mkdir(parents=True, exist_ok=True)
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            handlers=[
                logging.StreamHandler(sys.stderr),
                logging.FileHandler(workspace / "scan.log"),
            ],
            force=True,
        )
        services = _build_services(args, workspace)

        def show(files: int, images: int, geo: int) -> None:
            if files % 25 == 0:
                print(
                    f"\rscanned {files} files | {images} images |"
                    f" {geo} geotagged",
                    end="",
                    flush=True,
                )

        run = scan_tree(config, services=services, progress=show)
    except ScanSetupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScanAbortedError as exc:
        print(f"\nscan aborted: {exc}", file=sys.stderr)
        return 1
    print(
        f"\rscanned {run.files_scanned} files | {run.images_found} images |"
        f" {run.geotagged_count} geotagged"
    )
    print(
        f"run_id={run.id} files_scanned={run.files_scanned}"
        f" images_found={run.images_found}"
        f" geotagged_count={run.geotagged_count}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    if not args.workspace:
        print("error: --workspace or $GEOEXIF_WORKSPACE required", file=sys.stderr)
        return 2
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.workspace), Path(args.ui) if args.ui else None)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_gen_fixtures(args: argparse.Namespace) -> int:
    out = Path(args.out)
    manifest = corpus.generate(out, args.spec)
    print(f"corpus written to {out / manifest['root']}")
    print(f"manifest written to {out / 'manifest.json'}")
    print(
        f"files={manifest['files_scanned']} images={manifest['images_found']}"
        f" geotagged={manifest['geotagged_count']}"
        f" devices={len(manifest['devices'])}"
    )
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scan":
        return cmd_scan(args)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "gen-fixtures":
        return cmd_gen_fixtures(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())

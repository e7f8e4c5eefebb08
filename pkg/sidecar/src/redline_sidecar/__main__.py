"""Run the sidecar: `redline-sidecar` or `python -m redline_sidecar`."""

from __future__ import annotations

import argparse
import logging

import uvicorn

from .app import create_app
from .config import SidecarConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="redline-sidecar", description=__doc__)
    parser.add_argument("--embed-model", default=None, help="embedding model id or path")
    parser.add_argument("--emotion-model", default=None, help="emotion model id or path")
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--max-batch", type=int, default=None)
    parser.add_argument("--device", default=None)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO)
    config = SidecarConfig.from_env()
    if args.embed_model:
        config.embed_model_id = args.embed_model
    if args.emotion_model:
        config.emotion_model_id = args.emotion_model
    if args.port is not None:
        config.port = args.port
    if args.max_batch is not None:
        config.max_batch = args.max_batch
    if args.device is not None:
        config.device = args.device

    uvicorn.run(create_app(config), host=args.host, port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Run the inference sidecar: `python -m inference_server [--config PATH]`."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import ServerConfig


def main() -> None:
    parser = argparse.ArgumentParser(prog="agentzero-server")
    parser.add_argument("--config", help="YAML or JSON config file")
    parser.add_argument("--host", help="override bind host")
    parser.add_argument("--port", type=int, help="override bind port")
    args = parser.parse_args()
    config = ServerConfig.load(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()

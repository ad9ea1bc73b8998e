"""Entry point for serving the API with uvicorn."""

from __future__ import annotations

import argparse

import uvicorn


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description="Run the coaxsim HTTP service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run("coaxsim.service.app:app", host=args.host, port=args.port)


if __name__ == "__main__":
    main()

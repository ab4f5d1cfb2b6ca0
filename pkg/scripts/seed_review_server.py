"""Start an HTTP service over a freshly generated workspace whose review
queue holds an exact number of pending items. Used by the console's
integration tests and handy for manual demos.

    python3 scripts/seed_review_server.py --out /tmp/ws --pending 50 --port 8765
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import uvicorn

from citykb.service.app import create_app
from citykb.testkit import CorpusSpec
from citykb.workspace import create_demo_workspace


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("--pending", type=int, default=50)
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args()

    # Every word-swap service with a planted collision lands in review:
    # services = 2 x pending at ambiguous_share 0.5 gives the exact count.
    spec = CorpusSpec(
        seed=5050,
        municipalities=3,
        roads_per_municipality=30,
        services=args.pending * 2,
        corruption_mix={"word-swap": 1.0},
        ambiguous_share=0.5,
    )
    workspace, _ = create_demo_workspace(args.out, spec)
    pending = workspace.review_queue.counts().get("pending", 0)
    print(f"workspace ready: {pending} pending reviews", flush=True)
    if pending != args.pending:
        raise SystemExit(f"expected {args.pending} pending items, got {pending}")
    app = create_app(workspace)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate frontend/src/assets/kinematics.json from the parameter file.

Keeps the cockpit's render geometry and command limits in lockstep with the
simulator (single source of truth: params/default.json via the service's
kinematics asset).
"""

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from samadyn.params import load_params
from samadyn.service.app import kinematics_asset


def main():
    ps = load_params(REPO / "params" / "default.json")
    asset = kinematics_asset(ps)
    out = REPO / "frontend" / "src" / "assets" / "kinematics.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as f:
        json.dump(asset, f, indent=2)
        f.write("\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Writes configs/microcircuit.json: a scaled-down four-layer cortical column.

Population sizes are 2% of the usual full-scale column (20683, 5834, 21915,
5479, 4850, 1065, 14395, 2948 for L2/3e ... L6i). Pairwise connection
probabilities are the standard layer-resolved table, kept unscaled, so the
in-degrees shrink with the population sizes; the synaptic efficacies below
were chosen to keep the small network in an asynchronous irregular state.

  LIF: tau_m 10 ms, V_rest = V_reset = -65 mV, V_th -50 mV, t_ref 2 ms, dt 0.1 ms
  excitatory PSP jump 1.0 mV (uniform in [0.5, 1.5]), doubled for L4e -> L2/3e
  inhibitory jump -g * 1.0 mV with g = 7
  delays 1.5 ms (excitatory) and 0.8 ms (inhibitory)
  external drive: one Poisson source per neuron, 900 Hz * K_ext / 2000 with a
  1.5 mV jump, K_ext = 1600, 1500, 2100, 1900, 2000, 1900, 2900, 2100

Connections carry no synaptic filter, so a weight w moves V by w * dt / tau_m;
weights below are the jumps in mV times tau_m / dt.
"""

import json
import sys
from pathlib import Path

POPS = ["L23e", "L23i", "L4e", "L4i", "L5e", "L5i", "L6e", "L6i"]
FULL = [20683, 5834, 21915, 5479, 4850, 1065, 14395, 2948]
K_EXT = [1600, 1500, 2100, 1900, 2000, 1900, 2900, 2100]
# rows: target, columns: source
P = [
    [0.1009, 0.1689, 0.0437, 0.0818, 0.0323, 0.0, 0.0076, 0.0],
    [0.1346, 0.1371, 0.0316, 0.0515, 0.0755, 0.0, 0.0042, 0.0],
    [0.0077, 0.0059, 0.0497, 0.135, 0.0067, 0.0003, 0.0453, 0.0],
    [0.0691, 0.0029, 0.0794, 0.1597, 0.0033, 0.0, 0.1057, 0.0],
    [0.1004, 0.0622, 0.0505, 0.0057, 0.0831, 0.3726, 0.0204, 0.0],
    [0.0548, 0.0269, 0.0257, 0.0022, 0.06, 0.3158, 0.0086, 0.0],
    [0.0156, 0.0066, 0.0211, 0.0166, 0.0572, 0.0197, 0.0396, 0.2252],
    [0.0364, 0.001, 0.0034, 0.0005, 0.0277, 0.008, 0.0658, 0.1443],
]

SCALE = 0.02
DT = 0.1
J_E = 1.0
G = 7.0
EXT_RATE = 900.0
J_EXT = 1.5
LIF = {"tau_m": 10.0, "V_rest": -65.0, "V_reset": -65.0, "V_th": -50.0, "R": 1.0, "t_refrac": 2.0}


def build(seed=2024):
    unit = LIF["tau_m"] / DT
    sizes = [max(1, round(n * SCALE)) for n in FULL]
    cfg = {"name": "microcircuit", "dt": DT, "seed": seed,
           "nodes": [], "groups": [], "connections": [], "monitors": []}
    for pop, n, k in zip(POPS, sizes, K_EXT):
        cfg["groups"].append({"id": pop, "num": n, "model": "lif", "params": LIF,
                              "tags": ["exc" if pop.endswith("e") else "inh"]})
        cfg["nodes"].append({"id": "ext_" + pop, "kind": "generator", "method": "poisson_generate",
                             "num": n, "params": {"rate": EXT_RATE * k / 2000.0}})
        cfg["connections"].append({"id": "drive_" + pop, "pre": "ext_" + pop, "post": pop,
                                   "link_type": "one_to_one",
                                   "weight_init": {"kind": "constant", "a": J_EXT * unit}})
        cfg["monitors"].append({"id": pop + "_spikes", "target": pop, "kind": "spike"})
    for i, post in enumerate(POPS):
        for j, pre in enumerate(POPS):
            if P[i][j] == 0.0:
                continue
            exc = pre.endswith("e")
            jump = J_E if exc else -G * J_E
            if pre == "L4e" and post == "L23e":
                jump *= 2.0
            w = jump * unit
            lo, hi = sorted((0.5 * w, 1.5 * w))
            cfg["connections"].append({"id": pre + "_" + post, "pre": pre, "post": post,
                                       "link_type": "sparse_random", "sparsity": P[i][j],
                                       "weight_init": {"kind": "uniform", "a": lo, "b": hi},
                                       "delay_ms": 1.5 if exc else 0.8})
    return cfg


def dump(cfg):
    # one list entry per line keeps the file diffable
    lines = ["{"]
    keys = list(cfg)
    for n, key in enumerate(keys):
        tail = "," if n + 1 < len(keys) else ""
        value = cfg[key]
        if isinstance(value, list):
            lines.append(f'  "{key}": [')
            lines += [f"    {json.dumps(e)}" + ("," if m + 1 < len(value) else "") for m, e in enumerate(value)]
            lines.append("  ]" + tail)
        else:
            lines.append(f'  "{key}": {json.dumps(value)}' + tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "configs" / "microcircuit.json"
    out.write_text(dump(build()))

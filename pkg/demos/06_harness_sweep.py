"""Seeded sweeps through the harness, with replay of a single trial."""

import io
import json

from deformed_pb.harness import Command, RunConfig, replay, run

cfg = RunConfig(Command.VerifyMain, "iv", dims=(2, 3), trials=100, seed=42)
out = io.StringIO()
code, summary = run(cfg, out, io.StringIO())
lines = out.getvalue().splitlines()
print(lines[0])
print(lines[1])
print(summary.text(cfg))

worst = summary.worst_trial
again = replay(cfg, worst)
original = json.loads(lines[1 + worst])
print("replayed worst trial, identical slack:", again["slack"] == original["slack"])
# the same run from the shell:
#   deformed-pb verify main --case iv --dims 2,3 --trials 100 --seed 42
#   deformed-pb verify main --case iv --dims 2,3 --trials 100 --seed 42 --replay-trial <k>

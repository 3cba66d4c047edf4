# Learning walkthrough: run the full online update of the candidate set
# against the rational decision maker and watch the expansion direction lock
# onto the line from the nominal action to the decision maker's hidden
# optimum.  Takes a couple of seconds; pass --plot for the trajectory plots.

import sys

import numpy as np

from weakloop import benchmark_config, run_case, steady_state

cfg = benchmark_config(4)
trace, extras = run_case(cfg, return_extras=True)
learner = extras["learner"]

v_steady = -3.5 * np.asarray(cfg.K_e, float).reshape(-1)
ustar = np.array([0.25, 0.0, 1.0])  # hidden optimum of the benchmark cost
oracle = (v_steady - ustar) / np.linalg.norm(v_steady - ustar)

angle = np.degrees(
    np.arccos(np.clip(abs(float(learner.current.direction @ oracle)), -1.0, 1.0))
)
print("learner summary")
print("  converged           :", learner.converged)
print("  recorded hyperplanes:", len(learner.directions))
print("  direction updates   :", learner.k)
print("  learned direction   :", np.round(learner.current.direction, 6))
print("  target direction    :", np.round(oracle, 6))
print(f"  angular error       : {angle:.5f} deg")
print("  expansion ratio     :", round(learner.current.gamma, 6))

fixed = run_case(benchmark_config(3))
f_fixed = steady_state([r.cost for r in fixed])
f_learned = steady_state([r.cost for r in trace])
y_ss = steady_state([abs(float(np.asarray(r.y).reshape(()))) for r in trace])
print("\nsteady costs: fixed set", round(f_fixed, 4), "-> learned set", round(f_learned, 4))
print("steady |y| stays at the budget:", round(y_ss, 6))

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    ts = [r.t for r in trace]
    fig, (ax_f, ax_g) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax_f.plot(ts, [r.cost for r in trace], "C0", label="learned set")
    ax_f.axhline(f_fixed, color="r", ls=":", label="fixed set, steady")
    ax_f.set_ylabel("decision cost f(u)")
    ax_f.set_xlim(0, min(len(ts), 8000))
    ax_f.legend()
    ax_g.plot(ts, [r.gamma for r in trace], "C2")
    ax_g.set_ylabel("expansion ratio")
    ax_g.set_xlabel("step")
    fig.tight_layout()
    plt.show()

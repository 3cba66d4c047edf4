# Closed-loop walkthrough: the four standard cases of the benchmark, from no
# feedback at all to weak control with a fixed candidate set.  Produces the
# output and cost trajectories; pass --plot to draw them.

import sys

import numpy as np

from weakloop import benchmark_config, run_case, steady_state


def scalar(rec_y):
    return float(np.asarray(rec_y).reshape(()))


traces = {}
for case in (1, 2, 3):
    traces[case] = run_case(benchmark_config(case))

print("steady-state summary (unit step disturbance)")
print(f"{'case':>4} {'|y| steady':>12} {'cost steady':>12}")
for case, trace in traces.items():
    y_ss = steady_state([abs(scalar(r.y)) for r in trace])
    f_ss = steady_state([r.cost for r in trace]) if case != 1 else float("nan")
    label = {1: "no feedback", 2: "strong control", 3: "weak control"}[case]
    print(f"{case:>4} {y_ss:>12.6f} {f_ss:>12.4f}   {label}")

print(
    "\ncase 2 drives the output to zero but dictates the action;"
    "\ncase 3 concedes a 0.2 output budget and the decision maker"
    "\nspends that freedom to lower its own cost."
)

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    fig, (ax_y, ax_f) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    styles = {1: "C4-.", 2: "k--", 3: "r:"}
    for case, trace in traces.items():
        ts = [r.t for r in trace]
        ax_y.plot(ts, [scalar(r.y) for r in trace], styles[case], label=f"case {case}")
        if case != 1:
            ax_f.plot(ts, [r.cost for r in trace], styles[case], label=f"case {case}")
    ax_y.axhspan(-0.2, 0.2, color="C0", alpha=0.15, label="budget band")
    ax_y.set_ylabel("output y")
    ax_y.legend()
    ax_f.set_ylabel("decision cost f(u)")
    ax_f.set_xlabel("step")
    ax_f.legend()
    fig.tight_layout()
    plt.show()

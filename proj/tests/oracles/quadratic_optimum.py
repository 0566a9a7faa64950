# Copyright 2026 The ldpagg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Minimizer of the quadratic aggregative objective, solved with scipy.

F(x) = sum_i kappa/2 |x_i - c_i|^2 + gamma/2 |g(x) - d_i|^2,
g(x) = mean_i (A_i x_i + b_i), over the box [lo, hi]^n.

Usage: quadratic_optimum.py fixture.json  (reads agents, gamma, kappa, box)
"""
import json
import sys

import numpy as np
from scipy.optimize import minimize


def main():
    fx = json.load(open(sys.argv[1]))
    A = [np.array(a["a"]) for a in fx["agents"]]
    b = [np.array(a["b"]) for a in fx["agents"]]
    c = [np.array(a["c"]) for a in fx["agents"]]
    d = [np.array(a["d"]) for a in fx["agents"]]
    m = len(A)
    gamma, kappa = fx["gamma"], fx["x_weight"]
    lo, hi = fx["box"]
    sizes = [Ai.shape[1] for Ai in A]
    cuts = np.cumsum([0] + sizes)

    def split(x):
        return [x[cuts[i]:cuts[i + 1]] for i in range(m)]

    def g(x):
        return sum(Ai @ xi + bi for Ai, xi, bi in zip(A, split(x), b)) / m

    def F(x):
        gx = g(x)
        return sum(0.5 * kappa * np.sum((xi - ci) ** 2) + 0.5 * gamma * np.sum((gx - di) ** 2)
                   for xi, ci, di in zip(split(x), c, d))

    def grad(x):
        gx = g(x)
        dual = sum(gamma * (gx - di) for di in d) / m
        return np.concatenate([kappa * (xi - ci) + Ai.T @ dual
                               for Ai, xi, ci in zip(A, split(x), c)])

    # Unconstrained stationary point from the normal equations; checked
    # against a bounded quasi-Newton solve.
    n = cuts[-1]
    H = np.zeros((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        H[:, k] = grad(e) - grad(np.zeros(n))
    x_lin = np.linalg.solve(H, -grad(np.zeros(n)))
    res = minimize(F, np.zeros(n), jac=grad, method="L-BFGS-B",
                   bounds=[(lo, hi)] * n, options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": 10000})
    assert np.all(x_lin > lo) and np.all(x_lin < hi)
    assert np.max(np.abs(res.x - x_lin)) < 1e-6, np.max(np.abs(res.x - x_lin))
    json.dump({"x_star": [float(v) for v in x_lin], "F_star": float(F(x_lin))},
              sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
